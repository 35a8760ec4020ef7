#include "cssrs/models.hpp"

#include <algorithm>
#include <set>

#include "cssrs/error.hpp"
#include "cssrs/graph.hpp"
#include "cssrs/rng.hpp"
#include "cssrs/text.hpp"

namespace cssrs {

using nn::Graph;
using nn::ModelBundle;
using nn::ParameterSet;
using nn::Tensor;
using nn::TrainConfig;
using nn::Vocabulary;

Method method_from_string(std::string_view s) {
  std::string f = casefold(s);
  if (f == "tinvm") return Method::TinvM;
  if (f == "tvarm") return Method::TvarM;
  throw usage_error("unknown method '" + std::string(s) + "' (tinvm or tvarm)");
}

std::string to_string(Method m) { return m == Method::TinvM ? "tinvm" : "tvarm"; }

PostLabel argmax_post_label(const std::array<double, kNumPostLabels>& probs) {
  int best = 0;
  for (int i = 1; i < kNumPostLabels; ++i) {
    const PostLabel cand = static_cast<PostLabel>(i);
    const PostLabel cur = static_cast<PostLabel>(best);
    if (probs[i] > probs[best] ||
        (probs[i] == probs[best] && tiebreak_rank(cand) > tiebreak_rank(cur))) {
      best = i;
    }
  }
  return static_cast<PostLabel>(best);
}

SeverityLabel argmax_severity(const std::array<double, kNumSeverityLabels>& probs) {
  int best = 0;
  for (int i = 1; i < kNumSeverityLabels; ++i) {
    if (probs[i] >= probs[best]) best = i;  // >= biases ties toward higher severity
  }
  return static_cast<SeverityLabel>(best);
}

std::vector<std::string> model_tokens(const PostRecord& post, const TrainConfig& config) {
  const std::string& source =
      (config.use_normalized_text && post.normalized_text) ? *post.normalized_text : post.text;
  return tokenize_words(source);
}

namespace {

constexpr const char* kEmbeddingParam = "embedding";

struct BuiltGraph {
  Graph graph;
  std::vector<std::pair<std::string, int>> param_leaves;
  int loss = -1;

  double loss_value() const { return graph.value(loss)[0]; }
};

void harvest_grads(ParameterSet& params, BuiltGraph& bg) {
  for (auto& [name, node] : bg.param_leaves) {
    if (!bg.graph.has_grad(node)) continue;
    Tensor& dst = params.at(name).grad;
    const Tensor& src = bg.graph.grad(node);
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
  }
  for (const auto& rec : bg.graph.embed_records()) {
    if (!bg.graph.has_grad(rec.node)) continue;
    Tensor& dst = params.at(kEmbeddingParam).grad;
    const Tensor& g = bg.graph.grad(rec.node);
    const int d = dst.cols();
    for (std::size_t t = 0; t < rec.ids.size(); ++t) {
      double* row = dst.row(rec.ids[t]);
      const double* src = g.row(static_cast<int>(t));
      for (int j = 0; j < d; ++j) row[j] += src[j];
    }
  }
}

std::vector<double> class_weights(const std::vector<int>& labels, int n_classes,
                                  nn::ClassWeighting mode) {
  std::vector<double> counts(n_classes, 0.0);
  for (int l : labels) counts[l] += 1.0;
  std::vector<double> weights(n_classes, 1.0);
  if (mode == nn::ClassWeighting::InverseFrequency) {
    int present = 0;
    for (double c : counts)
      if (c > 0) ++present;
    const double total = static_cast<double>(labels.size());
    for (int c = 0; c < n_classes; ++c)
      weights[c] = counts[c] > 0 ? total / (present * counts[c]) : 0.0;
  }
  return weights;
}

void require_distinct_labels(const std::vector<int>& labels, const char* what) {
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw train_error(std::string("degenerate labels: ") + what +
                      " needs at least 2 distinct classes, got " +
                      std::to_string(distinct.size()));
}

// Mini-batch loop shared by the three trainers. Sample graphs within one
// batch are independent, so they run in parallel; the gradient reduction and
// the Adam step stay serial and ordered, which keeps training byte-for-byte
// reproducible at any thread count.
template <typename BuildFn>
std::vector<double> run_training(ParameterSet& params, std::size_t n_samples,
                                 const TrainConfig& config, const BuildFn& build) {
  nn::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  std::vector<double> epoch_losses;
  std::vector<std::size_t> order(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(config.rng_seed, "epoch-" + std::to_string(epoch)));
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < n_samples; start += config.batch_size) {
      const std::size_t batch_n = std::min<std::size_t>(config.batch_size, n_samples - start);
      std::vector<BuiltGraph> graphs(batch_n);
      std::string batch_error;  // exceptions must not escape the parallel region
#pragma omp parallel for schedule(dynamic)
      for (long bi = 0; bi < static_cast<long>(batch_n); ++bi) {
        try {
          const std::size_t sample = order[start + bi];
          Rng dropout_rng(derive_seed(config.rng_seed, "dropout-" + std::to_string(epoch) + "-" +
                                                           std::to_string(sample)));
          graphs[bi] = build(sample, 1.0 / static_cast<double>(batch_n), dropout_rng);
          graphs[bi].graph.backward(graphs[bi].loss);
        } catch (const std::exception& e) {
#pragma omp critical
          if (batch_error.empty()) batch_error = e.what();
        }
      }
      if (!batch_error.empty()) throw train_error("training step failed: " + batch_error);
      params.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t bi = 0; bi < batch_n; ++bi) {
        harvest_grads(params, graphs[bi]);
        batch_loss += graphs[bi].loss_value();
      }
      if (!std::isfinite(batch_loss))
        throw train_error("non-finite loss at epoch " + std::to_string(epoch));
      params.adam_step(adam);
      loss_sum += batch_loss;
      ++n_batches;
    }
    epoch_losses.push_back(n_batches ? loss_sum / static_cast<double>(n_batches) : 0.0);
  }
  return epoch_losses;
}

// Embedding matrix over the vocabulary. With a pretrained table only the OOV
// row learns; from scratch everything but the PAD row learns.
void init_embedding(ParameterSet& params, const Vocabulary& vocab, int dim,
                    const EmbeddingTable* pretrained, Rng& rng) {
  nn::Param& p = params.add(kEmbeddingParam, {vocab.size(), dim});
  p.row_trainable.assign(vocab.size(), pretrained ? 0 : 1);
  p.row_trainable[Vocabulary::kPad] = 0;
  if (pretrained) p.row_trainable[Vocabulary::kOov] = 1;
  for (int row = 0; row < vocab.size(); ++row) {
    if (row == Vocabulary::kPad) continue;
    double* dst = p.value.row(row);
    if (pretrained) {
      if (row == Vocabulary::kOov || row == Vocabulary::kSep) {
        if (row == Vocabulary::kOov)
          for (int j = 0; j < dim; ++j) dst[j] = rng.uniform(-0.08, 0.08);
        continue;
      }
      auto vec = pretrained->lookup(vocab.tokens[row]);
      if (!vec) throw internal_error("vocab token missing from pretrained table");
      std::copy(vec->begin(), vec->end(), dst);
    } else {
      for (int j = 0; j < dim; ++j) dst[j] = rng.uniform(-0.08, 0.08);
    }
  }
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& docs,
                       const TrainConfig& config, const EmbeddingTable* pretrained) {
  if (!pretrained) return Vocabulary::build(docs, config.min_token_freq);
  // Keep only tokens backed by a pretrained vector; the rest encode as OOV.
  std::vector<std::vector<std::string>> filtered;
  filtered.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<std::string> kept;
    for (const std::string& w : doc)
      if (pretrained->lookup(w)) kept.push_back(w);
    filtered.push_back(std::move(kept));
  }
  return Vocabulary::build(filtered, config.min_token_freq);
}

std::vector<int> encode_or_oov(const Vocabulary& vocab, const std::vector<std::string>& words,
                               int max_len) {
  std::vector<int> ids = vocab.encode(words, max_len);
  if (ids.empty()) ids.push_back(Vocabulary::kOov);
  return ids;
}

// ---- post-level LSTM classifier ----

BuiltGraph build_post_graph(ParameterSet& params, const std::vector<int>& ids, int label,
                            double ce_weight, double dropout_rate, Rng& dropout_rng) {
  BuiltGraph bg;
  Graph& g = bg.graph;
  const int e = g.embed(&params.at(kEmbeddingParam).value, ids);
  const int wx = g.leaf(&params.at("lstm.wx").value);
  const int wh = g.leaf(&params.at("lstm.wh").value);
  const int b = g.leaf(&params.at("lstm.b").value);
  bg.param_leaves = {{"lstm.wx", wx}, {"lstm.wh", wh}, {"lstm.b", b}};
  const int h = g.lstm(e, wx, wh, b);
  const int dp = g.dropout(h, dropout_rate, dropout_rng);
  const int w_out = g.leaf(&params.at("out.w").value);
  const int b_out = g.leaf(&params.at("out.b").value);
  bg.param_leaves.emplace_back("out.w", w_out);
  bg.param_leaves.emplace_back("out.b", b_out);
  const int logits = g.affine(dp, w_out, b_out);
  const int probs = g.softmax(logits);
  bg.loss = g.cross_entropy(probs, label, ce_weight);
  return bg;
}

std::array<double, kNumPostLabels> post_forward(const ModelBundle& bundle,
                                                const std::vector<int>& ids) {
  const ParameterSet& params = bundle.params;
  Tensor embedded = nn::embed_sequence(ids, params.at(kEmbeddingParam).value);
  Tensor hidden = nn::lstm_forward(embedded, params.at("lstm.wx").value,
                                   params.at("lstm.wh").value, params.at("lstm.b").value);
  Tensor probs = nn::dense_softmax(hidden, params.at("out.w").value, params.at("out.b").value);
  std::array<double, kNumPostLabels> out{};
  for (int i = 0; i < kNumPostLabels; ++i) out[i] = probs[i];
  return out;
}

// ---- CNN helpers shared by TvarM user model and TinvM ----

struct ConvSpec {
  std::vector<int> widths;
  int maps = 0;
  int channels = 0;
  int classes = 0;
};

void init_cnn_params(ParameterSet& params, const ConvSpec& spec, Rng& rng) {
  for (int w : spec.widths) {
    const std::string key = "conv.w" + std::to_string(w);
    params.add(key, {spec.maps, w * spec.channels});
    params.init_glorot(key, w * spec.channels, spec.maps, rng);
    params.add("conv.b" + std::to_string(w), {spec.maps});
  }
  const int feat = spec.maps * static_cast<int>(spec.widths.size());
  params.add("out.w", {spec.classes, feat});
  params.init_glorot("out.w", feat, spec.classes, rng);
  params.add("out.b", {spec.classes});
}

int build_cnn_feature(Graph& g, BuiltGraph& bg, ParameterSet& params, const ConvSpec& spec,
                      int input_node, int valid_rows) {
  std::vector<int> pooled;
  for (int w : spec.widths) {
    const std::string wkey = "conv.w" + std::to_string(w);
    const std::string bkey = "conv.b" + std::to_string(w);
    const int wf = g.leaf(&params.at(wkey).value);
    const int bf = g.leaf(&params.at(bkey).value);
    bg.param_leaves.emplace_back(wkey, wf);
    bg.param_leaves.emplace_back(bkey, bf);
    pooled.push_back(g.conv1d_relu_maxpool(input_node, wf, bf, w, valid_rows));
  }
  return g.concat(pooled);
}

BuiltGraph build_cnn_graph(ParameterSet& params, const ConvSpec& spec, Tensor input,
                           int valid_rows, int label, double ce_weight, double dropout_rate,
                           Rng& dropout_rng) {
  BuiltGraph bg;
  Graph& g = bg.graph;
  const int input_node = g.constant(std::move(input));
  const int feat = build_cnn_feature(g, bg, params, spec, input_node, valid_rows);
  const int dp = g.dropout(feat, dropout_rate, dropout_rng);
  const int w_out = g.leaf(&params.at("out.w").value);
  const int b_out = g.leaf(&params.at("out.b").value);
  bg.param_leaves.emplace_back("out.w", w_out);
  bg.param_leaves.emplace_back("out.b", b_out);
  const int logits = g.affine(dp, w_out, b_out);
  const int probs = g.softmax(logits);
  bg.loss = g.cross_entropy(probs, label, ce_weight);
  return bg;
}

Tensor cnn_forward_probs(const ParameterSet& params, const ConvSpec& spec, const Tensor& input,
                         int valid_rows) {
  std::vector<double> feat;
  feat.reserve(spec.maps * spec.widths.size());
  for (int w : spec.widths) {
    Tensor pooled = nn::conv1d_maxpool(input, params.at("conv.w" + std::to_string(w)).value,
                                       params.at("conv.b" + std::to_string(w)).value, w,
                                       valid_rows);
    feat.insert(feat.end(), pooled.data.begin(), pooled.data.end());
  }
  const int feat_size = static_cast<int>(feat.size());
  Tensor features = Tensor::from({feat_size}, std::move(feat));
  return nn::dense_softmax(features, params.at("out.w").value, params.at("out.b").value);
}

// ---- TvarM input assembly ----

// Risk probability matrix for one user: most recent max_posts_per_user posts
// in timestamp order, one row [Pr(S) Pr(I) Pr(B) Pr(A)] per post, zero rows
// as padding. Returns the number of real rows.
int tvarm_input_matrix(const ModelBundle& post_bundle, const UserRecord& user,
                       int max_posts, Tensor& out) {
  const int keep = std::min<int>(max_posts, static_cast<int>(user.posts.size()));
  const std::size_t first = user.posts.size() - static_cast<std::size_t>(keep);
  out = Tensor::zeros({max_posts, kNumSeverityLabels});
  for (int r = 0; r < keep; ++r) {
    PostPrediction pred = predict_post(post_bundle, user.posts[first + r]);
    for (int c = 0; c < kNumSeverityLabels; ++c) out(r, c) = pred.probabilities[c];
  }
  return keep;
}

// ---- TinvM input assembly ----

std::vector<int> tinvm_token_ids(const Vocabulary& vocab, const UserRecord& user,
                                 const TrainConfig& config) {
  const int budget = config.max_tokens_per_post * config.max_posts_per_user;
  std::vector<std::string> words;
  for (std::size_t p = 0; p < user.posts.size(); ++p) {
    if (p > 0) words.push_back("<sep>");
    std::vector<std::string> tw = model_tokens(user.posts[p], config);
    words.insert(words.end(), tw.begin(), tw.end());
    if (static_cast<int>(words.size()) >= budget) break;
  }
  std::vector<int> ids = encode_or_oov(vocab, words, budget);
  // pad so the widest filter always has one window
  const int min_len = *std::max_element(config.tinvm_filter_widths.begin(),
                                        config.tinvm_filter_widths.end());
  while (static_cast<int>(ids.size()) < min_len) ids.push_back(Vocabulary::kPad);
  return ids;
}

}  // namespace

ModelBundle train_post_classifier(const std::vector<PostRecord>& posts,
                                  const TrainConfig& config, const EmbeddingTable* pretrained) {
  config.validate();
  if (posts.empty()) throw train_error("degenerate labels: empty training set");
  std::vector<int> labels;
  labels.reserve(posts.size());
  for (const PostRecord& p : posts) labels.push_back(static_cast<int>(p.label));
  require_distinct_labels(labels, "post classifier");

  std::vector<std::vector<std::string>> docs;
  docs.reserve(posts.size());
  for (const PostRecord& p : posts) docs.push_back(model_tokens(p, config));

  ModelBundle bundle;
  bundle.kind = ModelBundle::kKindPostLstm;
  bundle.config = config;
  bundle.pretrained_embeddings = pretrained != nullptr;
  bundle.vocab = build_vocab(docs, config, pretrained);
  bundle.params.rng_seed = config.rng_seed;

  Rng init_rng(derive_seed(config.rng_seed, "init"));
  const int dim = pretrained ? pretrained->dimension : config.embedding_dim;
  const int h = config.lstm_hidden;
  init_embedding(bundle.params, bundle.vocab, dim, pretrained, init_rng);
  bundle.params.add("lstm.wx", {4 * h, dim});
  bundle.params.init_uniform("lstm.wx", -0.08, 0.08, init_rng);
  bundle.params.add("lstm.wh", {4 * h, h});
  bundle.params.init_uniform("lstm.wh", -0.08, 0.08, init_rng);
  bundle.params.add("lstm.b", {4 * h});
  bundle.params.add("out.w", {kNumPostLabels, h});
  bundle.params.init_glorot("out.w", h, kNumPostLabels, init_rng);
  bundle.params.add("out.b", {kNumPostLabels});

  std::vector<std::vector<int>> encoded(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i)
    encoded[i] = encode_or_oov(bundle.vocab, docs[i], config.max_tokens_per_post);

  const std::vector<double> weights =
      class_weights(labels, kNumPostLabels, config.class_weighting);

  bundle.epoch_loss = run_training(
      bundle.params, posts.size(), config,
      [&](std::size_t sample, double inv_batch, Rng& dropout_rng) {
        return build_post_graph(bundle.params, encoded[sample], labels[sample],
                                weights[labels[sample]] * inv_batch, config.dropout,
                                dropout_rng);
      });
  return bundle;
}

PostPrediction predict_post(const ModelBundle& bundle, const PostRecord& post) {
  bundle.require_kind(ModelBundle::kKindPostLstm);
  const std::vector<int> ids = encode_or_oov(
      bundle.vocab, model_tokens(post, bundle.config), bundle.config.max_tokens_per_post);
  PostPrediction pred;
  pred.post_id = post.post_id;
  pred.probabilities = post_forward(bundle, ids);
  pred.predicted = argmax_post_label(pred.probabilities);
  return pred;
}

ModelBundle train_tvarm(const std::vector<UserRecord>& users, const ModelBundle& post_bundle,
                        const TrainConfig& config) {
  config.validate();
  post_bundle.require_kind(ModelBundle::kKindPostLstm);
  if (users.empty()) throw train_error("degenerate labels: empty training set");
  for (const UserRecord& u : users)
    if (u.posts.empty()) throw train_error("user '" + u.user_id + "' has no posts");
  std::vector<int> labels;
  labels.reserve(users.size());
  for (const UserRecord& u : users) labels.push_back(static_cast<int>(u.user_label));
  require_distinct_labels(labels, "tvarm user model");

  ModelBundle bundle;
  bundle.kind = ModelBundle::kKindTvarmUserCnn;
  bundle.config = config;
  bundle.params.rng_seed = config.rng_seed;

  ConvSpec spec{config.tvarm_filter_widths, config.tvarm_feature_maps, kNumSeverityLabels,
                kNumSeverityLabels};
  Rng init_rng(derive_seed(config.rng_seed, "init"));
  init_cnn_params(bundle.params, spec, init_rng);

  // The post classifier stays frozen: inputs are precomputed once.
  std::vector<Tensor> inputs(users.size());
  std::vector<int> valid_rows(users.size());
  std::string input_error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(users.size()); ++i) {
    try {
      valid_rows[i] =
          tvarm_input_matrix(post_bundle, users[i], config.max_posts_per_user, inputs[i]);
    } catch (const std::exception& e) {
#pragma omp critical
      if (input_error.empty()) input_error = e.what();
    }
  }
  if (!input_error.empty()) throw train_error("tvarm input assembly failed: " + input_error);

  const std::vector<double> weights =
      class_weights(labels, kNumSeverityLabels, config.class_weighting);

  bundle.epoch_loss = run_training(
      bundle.params, users.size(), config,
      [&](std::size_t sample, double inv_batch, Rng& dropout_rng) {
        return build_cnn_graph(bundle.params, spec, inputs[sample], valid_rows[sample],
                               labels[sample], weights[labels[sample]] * inv_batch,
                               config.dropout, dropout_rng);
      });
  return bundle;
}

UserPrediction predict_user_tvarm(const ModelBundle& post_bundle, const ModelBundle& user_bundle,
                                  const UserRecord& user) {
  post_bundle.require_kind(ModelBundle::kKindPostLstm);
  user_bundle.require_kind(ModelBundle::kKindTvarmUserCnn);
  const TrainConfig& config = user_bundle.config;
  Tensor input;
  const int valid = tvarm_input_matrix(post_bundle, user, config.max_posts_per_user, input);
  ConvSpec spec{config.tvarm_filter_widths, config.tvarm_feature_maps, kNumSeverityLabels,
                kNumSeverityLabels};
  Tensor probs = cnn_forward_probs(user_bundle.params, spec, input, valid);

  UserPrediction pred;
  pred.user_id = user.user_id;
  pred.method = Method::TvarM;
  for (int i = 0; i < kNumSeverityLabels; ++i) pred.probabilities[i] = probs[i];
  pred.predicted = argmax_severity(pred.probabilities);
  pred.post_trace.reserve(user.posts.size());
  for (const PostRecord& post : user.posts)
    pred.post_trace.push_back(predict_post(post_bundle, post));
  pred.effective_tokens = valid;
  return pred;
}

ModelBundle train_tinvm(const std::vector<UserRecord>& users, const TrainConfig& config,
                        const EmbeddingTable* pretrained) {
  config.validate();
  if (users.empty()) throw train_error("degenerate labels: empty training set");
  for (const UserRecord& u : users)
    if (u.posts.empty()) throw train_error("user '" + u.user_id + "' has no posts");
  std::vector<int> labels;
  labels.reserve(users.size());
  for (const UserRecord& u : users) labels.push_back(static_cast<int>(u.user_label));
  require_distinct_labels(labels, "tinvm model");

  std::vector<std::vector<std::string>> docs;
  docs.reserve(users.size());
  for (const UserRecord& u : users) {
    std::vector<std::string> doc;
    for (const PostRecord& p : u.posts) {
      std::vector<std::string> tw = model_tokens(p, config);
      doc.insert(doc.end(), tw.begin(), tw.end());
    }
    docs.push_back(std::move(doc));
  }

  ModelBundle bundle;
  bundle.kind = ModelBundle::kKindTinvmCnn;
  bundle.config = config;
  bundle.pretrained_embeddings = pretrained != nullptr;
  bundle.vocab = build_vocab(docs, config, pretrained);
  bundle.params.rng_seed = config.rng_seed;

  const int dim = pretrained ? pretrained->dimension : config.embedding_dim;
  ConvSpec spec{config.tinvm_filter_widths, config.tinvm_feature_maps, dim, kNumSeverityLabels};
  Rng init_rng(derive_seed(config.rng_seed, "init"));
  init_embedding(bundle.params, bundle.vocab, dim, pretrained, init_rng);
  init_cnn_params(bundle.params, spec, init_rng);

  std::vector<std::vector<int>> encoded(users.size());
  for (std::size_t i = 0; i < users.size(); ++i)
    encoded[i] = tinvm_token_ids(bundle.vocab, users[i], config);

  const std::vector<double> weights =
      class_weights(labels, kNumSeverityLabels, config.class_weighting);

  bundle.epoch_loss = run_training(
      bundle.params, users.size(), config,
      [&](std::size_t sample, double inv_batch, Rng& dropout_rng) {
        BuiltGraph bg;
        Graph& g = bg.graph;
        const int input_node = g.embed(&bundle.params.at(kEmbeddingParam).value, encoded[sample]);
        const int feat = build_cnn_feature(g, bg, bundle.params, spec, input_node,
                                            static_cast<int>(encoded[sample].size()));
        const int dp = g.dropout(feat, config.dropout, dropout_rng);
        const int w_out = g.leaf(&bundle.params.at("out.w").value);
        const int b_out = g.leaf(&bundle.params.at("out.b").value);
        bg.param_leaves.emplace_back("out.w", w_out);
        bg.param_leaves.emplace_back("out.b", b_out);
        const int logits = g.affine(dp, w_out, b_out);
        const int probs = g.softmax(logits);
        bg.loss = g.cross_entropy(probs, labels[sample],
                                  weights[labels[sample]] * inv_batch);
        return bg;
      });
  return bundle;
}

UserPrediction predict_user_tinvm(const ModelBundle& bundle, const UserRecord& user) {
  bundle.require_kind(ModelBundle::kKindTinvmCnn);
  const TrainConfig& config = bundle.config;
  const std::vector<int> ids = tinvm_token_ids(bundle.vocab, user, config);
  const int dim = bundle.params.at(kEmbeddingParam).value.cols();
  ConvSpec spec{config.tinvm_filter_widths, config.tinvm_feature_maps, dim, kNumSeverityLabels};
  Tensor embedded = nn::embed_sequence(ids, bundle.params.at(kEmbeddingParam).value);
  Tensor probs = cnn_forward_probs(bundle.params, spec, embedded,
                                   static_cast<int>(ids.size()));
  UserPrediction pred;
  pred.user_id = user.user_id;
  pred.method = Method::TinvM;
  for (int i = 0; i < kNumSeverityLabels; ++i) pred.probabilities[i] = probs[i];
  pred.predicted = argmax_severity(pred.probabilities);
  pred.effective_tokens = static_cast<int>(ids.size());
  return pred;
}

}  // namespace cssrs
