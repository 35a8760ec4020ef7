#include "cssrs/bundle.hpp"

#include <fstream>

#include "cssrs/error.hpp"

namespace cssrs::nn {

using nlohmann::json;

ClassWeighting class_weighting_from_string(std::string_view s) {
  if (s == "none") return ClassWeighting::None;
  if (s == "inverse_frequency") return ClassWeighting::InverseFrequency;
  throw usage_error("unknown class_weighting '" + std::string(s) +
                    "' (none or inverse_frequency)");
}

std::string to_string(ClassWeighting w) {
  return w == ClassWeighting::None ? "none" : "inverse_frequency";
}

void TrainConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw usage_error(std::string("TrainConfig.") + name + " must be positive");
  };
  positive(epochs, "epochs");
  positive(learning_rate, "learning_rate");
  positive(batch_size, "batch_size");
  positive(max_tokens_per_post, "max_tokens_per_post");
  positive(max_posts_per_user, "max_posts_per_user");
  positive(embedding_dim, "embedding_dim");
  positive(lstm_hidden, "lstm_hidden");
  positive(tinvm_feature_maps, "tinvm_feature_maps");
  positive(tvarm_feature_maps, "tvarm_feature_maps");
  positive(min_token_freq, "min_token_freq");
  if (dropout < 0.0 || dropout >= 1.0) throw usage_error("TrainConfig.dropout must be in [0,1)");
  if (tinvm_filter_widths.empty() || tvarm_filter_widths.empty())
    throw usage_error("TrainConfig filter width lists must be non-empty");
  for (int w : tinvm_filter_widths)
    if (w < 1) throw usage_error("TrainConfig.tinvm_filter_widths must be positive");
  for (int w : tvarm_filter_widths) {
    if (w < 1) throw usage_error("TrainConfig.tvarm_filter_widths must be positive");
    if (w > max_posts_per_user)
      throw usage_error("TrainConfig.tvarm_filter_widths exceed max_posts_per_user");
  }
}

json TrainConfig::to_json() const {
  json j;
  j["epochs"] = epochs;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["rng_seed"] = rng_seed;
  j["max_tokens_per_post"] = max_tokens_per_post;
  j["max_posts_per_user"] = max_posts_per_user;
  j["class_weighting"] = to_string(class_weighting);
  j["embedding_dim"] = embedding_dim;
  j["lstm_hidden"] = lstm_hidden;
  j["tinvm_filter_widths"] = tinvm_filter_widths;
  j["tinvm_feature_maps"] = tinvm_feature_maps;
  j["tvarm_filter_widths"] = tvarm_filter_widths;
  j["tvarm_feature_maps"] = tvarm_feature_maps;
  j["dropout"] = dropout;
  j["use_normalized_text"] = use_normalized_text;
  j["min_token_freq"] = min_token_freq;
  return j;
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("epochs", c.epochs);
  get("learning_rate", c.learning_rate);
  get("batch_size", c.batch_size);
  get("rng_seed", c.rng_seed);
  get("max_tokens_per_post", c.max_tokens_per_post);
  get("max_posts_per_user", c.max_posts_per_user);
  if (j.contains("class_weighting"))
    c.class_weighting = class_weighting_from_string(j.at("class_weighting").get<std::string>());
  get("embedding_dim", c.embedding_dim);
  get("lstm_hidden", c.lstm_hidden);
  get("tinvm_filter_widths", c.tinvm_filter_widths);
  get("tinvm_feature_maps", c.tinvm_feature_maps);
  get("tvarm_filter_widths", c.tvarm_filter_widths);
  get("tvarm_feature_maps", c.tvarm_feature_maps);
  get("dropout", c.dropout);
  get("use_normalized_text", c.use_normalized_text);
  get("min_token_freq", c.min_token_freq);
  c.validate();
  return c;
}

namespace {

json tensor_to_json(const Tensor& t) {
  json j;
  j["shape"] = t.shape;
  j["data"] = t.data;
  return j;
}

Tensor tensor_from_json(const json& j) {
  Tensor t;
  t.shape = j.at("shape").get<std::vector<int>>();
  t.data = j.at("data").get<std::vector<double>>();
  if (static_cast<std::int64_t>(t.data.size()) != t.numel())
    throw data_error("bundle: tensor data length does not match shape");
  return t;
}

}  // namespace

json ModelBundle::to_json() const {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = kind;
  j["config"] = config.to_json();
  j["pretrained_embeddings"] = pretrained_embeddings;
  j["epoch_loss"] = epoch_loss;
  j["vocab"] = vocab.tokens;
  json params_json = json::object();
  for (const auto& [name, p] : params.all()) {
    json pj;
    pj["value"] = tensor_to_json(p.value);
    pj["adam_m"] = tensor_to_json(p.adam_m);
    pj["adam_v"] = tensor_to_json(p.adam_v);
    if (!p.row_trainable.empty()) pj["row_trainable"] = p.row_trainable;
    params_json[name] = std::move(pj);
  }
  j["params"] = std::move(params_json);
  j["adam_step_count"] = params.step_count();
  j["params_rng_seed"] = params.rng_seed;
  return j;
}

ModelBundle ModelBundle::from_json(const json& j) {
  ModelBundle b;
  const int version = j.at("format_version").get<int>();
  if (version != kFormatVersion)
    throw data_error("bundle format_version " + std::to_string(version) + " unsupported");
  b.kind = j.at("kind").get<std::string>();
  b.config = TrainConfig::from_json(j.at("config"));
  b.pretrained_embeddings = j.value("pretrained_embeddings", false);
  b.epoch_loss = j.value("epoch_loss", std::vector<double>{});
  b.vocab = Vocabulary{};
  b.vocab.tokens.clear();
  b.vocab.index.clear();
  for (const auto& token : j.at("vocab")) b.vocab.add(token.get<std::string>());
  for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) {
    Tensor value = tensor_from_json(it.value().at("value"));
    Param& p = b.params.add(it.key(), value.shape);
    p.value = std::move(value);
    p.adam_m = tensor_from_json(it.value().at("adam_m"));
    p.adam_v = tensor_from_json(it.value().at("adam_v"));
    if (it.value().contains("row_trainable"))
      p.row_trainable = it.value().at("row_trainable").get<std::vector<std::uint8_t>>();
  }
  b.params.set_step_count(j.value("adam_step_count", 0));
  b.params.rng_seed = j.value("params_rng_seed", std::uint64_t{0});
  return b;
}

std::string ModelBundle::serialize() const { return to_json().dump(); }

ModelBundle ModelBundle::deserialize(const std::string& bytes) {
  try {
    return from_json(json::parse(bytes));
  } catch (const json::exception& e) {
    throw data_error(std::string("bundle parse error: ") + e.what());
  }
}

void ModelBundle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write bundle: " + path.string());
  out << serialize();
}

ModelBundle ModelBundle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open bundle: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

void ModelBundle::require_kind(const std::string& expected) const {
  if (kind != expected)
    throw data_error("bundle kind mismatch: expected '" + expected + "', got '" + kind + "'");
}

}  // namespace cssrs::nn
