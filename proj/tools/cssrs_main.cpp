// cssrs: suicide-risk severity assessment pipeline over annotated Reddit
// data. Subcommands: stats, normalize, train, predict, cv, ablate,
// agreement, roc, diagnostics.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cssrs/ablation.hpp"
#include "cssrs/corpus.hpp"
#include "cssrs/cross_validation.hpp"
#include "cssrs/diagnostics.hpp"
#include "cssrs/error.hpp"
#include "cssrs/lexicon.hpp"
#include "cssrs/models.hpp"
#include "cssrs/report.hpp"
#include "cssrs/rng.hpp"
#include "cssrs/text.hpp"

namespace {

using cssrs::Error;
using cssrs::data_error;
using cssrs::usage_error;
using nlohmann::json;

std::string default_output_dir() {
  const char* env = std::getenv("CSSRS_OUTPUT_DIR");
  return env && *env ? env : "cssrs-output";
}

// Resolved run configuration: flat JSON schema, CLI flags override file
// values, and the manifest echo of this object is sufficient to rerun the
// command.
struct RunConfig {
  std::string dataset;
  std::string embeddings;
  std::vector<std::string> lexicons;
  std::string method = "tinvm";
  int folds = 5;
  std::string output_dir = default_output_dir();
  std::uint64_t master_seed = 1;
  double threshold = 0.6;
  cssrs::nn::TrainConfig train;

  json to_json() const {
    json j = train.to_json();
    j.erase("rng_seed");  // derived from master_seed, not independent
    j["dataset"] = dataset;
    j["embeddings"] = embeddings;
    j["lexicons"] = lexicons;
    j["method"] = method;
    j["folds"] = folds;
    j["output_dir"] = output_dir;
    j["master_seed"] = master_seed;
    j["threshold"] = threshold;
    return j;
  }

  static RunConfig from_json(const json& j) {
    RunConfig c;
    c.train = cssrs::nn::TrainConfig::from_json(j);
    auto get = [&](const char* key, auto& target) {
      if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
    };
    get("dataset", c.dataset);
    get("embeddings", c.embeddings);
    get("lexicons", c.lexicons);
    get("method", c.method);
    get("folds", c.folds);
    get("output_dir", c.output_dir);
    get("master_seed", c.master_seed);
    get("threshold", c.threshold);
    return c;
  }
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("config file not found: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw usage_error("config file " + path + ": " + e.what());
  }
}

// Per-command option bag; flags land here only when the user passed them so
// they can override config-file values.
struct CommonOpts {
  std::optional<std::string> config_file;
  std::optional<std::string> dataset;
  std::optional<std::string> embeddings;
  std::vector<std::string> lexicons;
  std::optional<std::string> method;
  std::optional<int> folds;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> master_seed;
  std::optional<double> threshold;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<int> batch_size;

  void add_flags(CLI::App* cmd, bool with_model_opts = true) {
    cmd->add_option("--config", config_file, "JSON config file (flat schema; flags override)");
    cmd->add_option("--dataset", dataset, "dataset path (.jsonl or .csv)");
    cmd->add_option("--output-dir", output_dir,
                    "output directory (env CSSRS_OUTPUT_DIR overrides the default)");
    cmd->add_option("--seed", master_seed, "master seed; every derived seed flows from it");
    if (with_model_opts) {
      cmd->add_option("--embeddings", embeddings, "pretrained embedding table (optional)");
      cmd->add_option("--method", method, "tinvm or tvarm");
      cmd->add_option("--folds", folds, "cross-validation folds");
      cmd->add_option("--epochs", epochs, "training epochs");
      cmd->add_option("--lr", learning_rate, "learning rate");
      cmd->add_option("--batch-size", batch_size, "batch size");
    }
    cmd->add_option("--lexicon", lexicons, "lexicon CSV (repeatable)");
    cmd->add_option("--threshold", threshold, "concept-match cosine threshold");
  }

  RunConfig resolve() const {
    RunConfig rc;
    if (config_file) rc = RunConfig::from_json(load_json_file(*config_file));
    if (dataset) rc.dataset = *dataset;
    if (embeddings) rc.embeddings = *embeddings;
    if (!lexicons.empty()) rc.lexicons = lexicons;
    if (method) rc.method = *method;
    if (folds) rc.folds = *folds;
    if (output_dir) rc.output_dir = *output_dir;
    if (master_seed) rc.master_seed = *master_seed;
    if (threshold) rc.threshold = *threshold;
    if (epochs) rc.train.epochs = *epochs;
    if (learning_rate) rc.train.learning_rate = *learning_rate;
    if (batch_size) rc.train.batch_size = *batch_size;
    rc.train.rng_seed = cssrs::derive_seed(rc.master_seed, "train");
    return rc;
  }
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw usage_error(std::string("missing required ") + what);
  if (!std::filesystem::exists(path))
    throw usage_error(std::string(what) + " file not found: " + path);
}

std::vector<cssrs::UserRecord> load_users(const RunConfig& rc) {
  require_file(rc.dataset, "dataset");
  cssrs::Corpus corpus = cssrs::load_dataset(rc.dataset);
  for (const std::string& warning : corpus.info.warnings)
    std::cerr << "cssrs: " << warning << "\n";
  return std::move(corpus.users);
}

std::optional<cssrs::EmbeddingTable> load_optional_embeddings(const RunConfig& rc) {
  if (rc.embeddings.empty()) return std::nullopt;
  require_file(rc.embeddings, "embeddings");
  return cssrs::load_embeddings(rc.embeddings);
}

json prediction_to_json(const cssrs::UserPrediction& pred, bool with_trace) {
  json j;
  j["user_id"] = pred.user_id;
  j["method"] = to_string(pred.method);
  j["predicted"] = to_string(pred.predicted);
  json probs = json::object();
  for (cssrs::SeverityLabel l : cssrs::kSeverityLabels)
    probs[to_string(l)] = pred.probabilities[static_cast<int>(l)];
  j["probabilities"] = std::move(probs);
  if (pred.fold >= 0) j["fold"] = pred.fold;
  j["effective_tokens"] = pred.effective_tokens;
  if (with_trace && !pred.post_trace.empty()) {
    json trace = json::array();
    for (const cssrs::PostPrediction& pp : pred.post_trace) {
      json t;
      t["post_id"] = pp.post_id;
      t["predicted"] = to_string(pp.predicted);
      json pprobs = json::object();
      for (cssrs::PostLabel l : cssrs::kPostLabels)
        pprobs[to_string(l)] = pp.probabilities[static_cast<int>(l)];
      t["probabilities"] = std::move(pprobs);
      trace.push_back(std::move(t));
    }
    j["post_trace"] = std::move(trace);
  }
  return j;
}

// ---- subcommands ----

int cmd_stats(const CommonOpts& opts) {
  RunConfig rc = opts.resolve();
  std::vector<cssrs::UserRecord> users = load_users(rc);
  cssrs::CorpusStats stats = cssrs::dataset_stats(users);
  std::cout << cssrs::stats_text(stats);
  return 0;
}

int cmd_normalize(const CommonOpts& opts, const std::string& input, const std::string& output) {
  RunConfig rc = opts.resolve();
  require_file(input, "input");
  if (rc.lexicons.empty()) throw usage_error("normalize needs at least one --lexicon");
  require_file(rc.embeddings, "embeddings");
  cssrs::EmbeddingTable table = cssrs::load_embeddings(rc.embeddings);
  std::vector<cssrs::PreparedLexicon> prepared;
  std::vector<cssrs::Lexicon> lexicons;
  lexicons.reserve(rc.lexicons.size());
  for (const std::string& path : rc.lexicons) {
    require_file(path, "lexicon");
    lexicons.push_back(cssrs::load_lexicon(path));
  }
  for (const cssrs::Lexicon& lex : lexicons) {
    prepared.push_back(cssrs::PreparedLexicon::prepare(lex, table));
    if (prepared.back().skipped_oov > 0) {
      std::cerr << "cssrs normalize: lexicon '" << lex.name << "' has "
                << prepared.back().skipped_oov
                << " concept(s) with no embedding coverage; they will never match\n";
    }
  }
  cssrs::MatchOptions options;
  options.threshold = rc.threshold;

  std::ifstream in(input);
  std::ofstream out(output, std::ios::binary);
  if (!out) throw data_error("cannot write " + output);
  std::string line;
  std::size_t line_no = 0, skipped = 0;
  auto normalize_text = [&](const std::string& text) {
    return cssrs::mednorm(text, std::span<const cssrs::PreparedLexicon>(prepared), table, options);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (cssrs::trim(line).empty()) continue;
    try {
      json rec = json::parse(line);
      if (rec.contains("posts") && rec["posts"].is_array()) {
        for (json& post : rec["posts"])
          post["normalized_text"] = normalize_text(post.at("text").get<std::string>());
      } else {
        rec["normalized_text"] = normalize_text(rec.at("text").get<std::string>());
      }
      out << rec.dump() << "\n";
    } catch (const std::exception& e) {
      std::cerr << "cssrs normalize: skipping line " << line_no << ": " << e.what() << "\n";
      ++skipped;
    }
  }
  if (skipped > 0) {
    std::cerr << "cssrs normalize: skipped " << skipped << " record(s)\n";
    return 3;
  }
  return 0;
}

int cmd_train(const CommonOpts& opts) {
  RunConfig rc = opts.resolve();
  std::vector<cssrs::UserRecord> users = load_users(rc);
  std::optional<cssrs::EmbeddingTable> table = load_optional_embeddings(rc);
  const cssrs::EmbeddingTable* table_ptr = table ? &*table : nullptr;
  const cssrs::Method method = cssrs::method_from_string(rc.method);

  cssrs::OutputWriter writer(rc.output_dir, "train", rc.to_json(), rc.master_seed);
  if (method == cssrs::Method::TinvM) {
    cssrs::nn::ModelBundle bundle = cssrs::train_tinvm(users, rc.train, table_ptr);
    writer.write("model.tinvm.json", bundle.serialize());
  } else {
    std::vector<cssrs::PostRecord> posts;
    for (const cssrs::UserRecord& u : users)
      posts.insert(posts.end(), u.posts.begin(), u.posts.end());
    cssrs::nn::ModelBundle post_bundle = cssrs::train_post_classifier(posts, rc.train, table_ptr);
    cssrs::nn::ModelBundle user_bundle = cssrs::train_tvarm(users, post_bundle, rc.train);
    writer.write("model.post.json", post_bundle.serialize());
    writer.write("model.tvarm.json", user_bundle.serialize());
  }
  writer.finish();
  std::cout << "trained " << rc.method << " -> " << writer.dir().string() << "\n";
  return 0;
}

int cmd_predict(const CommonOpts& opts, const std::string& bundle_path,
                const std::string& post_bundle_path, bool trace) {
  RunConfig rc = opts.resolve();
  std::vector<cssrs::UserRecord> users = load_users(rc);
  require_file(bundle_path, "bundle");
  cssrs::nn::ModelBundle bundle = cssrs::nn::ModelBundle::load(bundle_path);

  std::optional<cssrs::nn::ModelBundle> post_bundle;
  if (!post_bundle_path.empty()) {
    require_file(post_bundle_path, "post bundle");
    post_bundle = cssrs::nn::ModelBundle::load(post_bundle_path);
  }
  const bool tvarm = bundle.kind == cssrs::nn::ModelBundle::kKindTvarmUserCnn;
  if (tvarm && !post_bundle)
    throw usage_error("tvarm prediction needs --post-bundle (the frozen post classifier)");

  std::ostringstream out;
  for (const cssrs::UserRecord& user : users) {
    cssrs::UserPrediction pred = tvarm ? cssrs::predict_user_tvarm(*post_bundle, bundle, user)
                                       : cssrs::predict_user_tinvm(bundle, user);
    out << prediction_to_json(pred, trace).dump() << "\n";
  }
  cssrs::OutputWriter writer(rc.output_dir, "predict", rc.to_json(), rc.master_seed);
  writer.write("predictions.jsonl", out.str());
  writer.finish();
  std::cout << "predictions -> " << (writer.dir() / "predictions.jsonl").string() << "\n";
  return 0;
}

void write_cv_outputs(cssrs::OutputWriter& writer, const cssrs::CvResult& result,
                      const std::string& method_name, bool trace) {
  std::ostringstream preds;
  for (const cssrs::UserPrediction& pred : result.predictions)
    preds << prediction_to_json(pred, trace).dump() << "\n";
  writer.write("predictions.jsonl", preds.str());
  json metrics = cssrs::metrics_to_json(result.metrics);
  json rocs = json::array();
  for (const cssrs::RocCurve& curve : result.roc_curves) rocs.push_back(cssrs::roc_to_json(curve));
  metrics["roc"] = std::move(rocs);
  writer.write("metrics.json", metrics.dump(2) + "\n");
  writer.write("roc.csv", cssrs::roc_csv(result.roc_curves));
  writer.write("roc." + method_name + ".svg",
               cssrs::roc_svg(result.roc_curves, "one-vs-rest ROC (" + method_name + ")"));
}

int cmd_cv(const CommonOpts& opts, bool trace) {
  RunConfig rc = opts.resolve();
  std::vector<cssrs::UserRecord> users = load_users(rc);
  std::optional<cssrs::EmbeddingTable> table = load_optional_embeddings(rc);

  cssrs::CvOptions options;
  options.method = cssrs::method_from_string(rc.method);
  options.folds = rc.folds;
  options.seed = cssrs::derive_seed(rc.master_seed, "cv");
  options.train = rc.train;
  options.embeddings = table ? &*table : nullptr;
  options.keep_post_trace = trace;
  cssrs::CvResult result = cssrs::cross_validate(users, options);

  cssrs::OutputWriter writer(rc.output_dir, "cv", rc.to_json(), rc.master_seed);
  write_cv_outputs(writer, result, rc.method, trace);
  writer.finish();
  std::cout << "cv " << rc.method << ": macro P=" << result.metrics.macro_precision
            << " R=" << result.metrics.macro_recall << " F1=" << result.metrics.f1 << " -> "
            << writer.dir().string() << "\n";
  return 0;
}

int cmd_ablate(const CommonOpts& opts) {
  RunConfig rc = opts.resolve();
  std::vector<cssrs::UserRecord> users = load_users(rc);
  std::optional<cssrs::EmbeddingTable> table = load_optional_embeddings(rc);
  std::vector<cssrs::AblationRow> rows = cssrs::run_ablation(
      users, rc.train, rc.folds, rc.master_seed, table ? &*table : nullptr);

  cssrs::OutputWriter writer(rc.output_dir, "ablate", rc.to_json(), rc.master_seed);
  writer.write("ablation.csv", cssrs::ablation_csv(rows));
  writer.write("ablation.json", cssrs::ablation_to_json(rows).dump(2) + "\n");
  writer.finish();
  std::cout << cssrs::ablation_csv(rows);
  return 0;
}

int cmd_agreement(const CommonOpts& opts, const std::string& annotations_path) {
  RunConfig rc = opts.resolve();
  require_file(annotations_path, "annotations");
  // CSV: header item,<annotator...>; one row per item; empty cell = missing.
  std::ifstream in(annotations_path, std::ios::binary);
  std::string header_line;
  if (!std::getline(in, header_line)) throw data_error("annotations file is empty");
  std::vector<std::string> annotators;
  {
    std::istringstream hs(header_line);
    std::string cell;
    bool first = true;
    while (std::getline(hs, cell, ',')) {
      if (first) {
        first = false;
        continue;
      }
      annotators.push_back(cssrs::trim(cell));
    }
  }
  if (annotators.size() < 2) throw data_error("annotations need at least 2 annotator columns");
  std::vector<std::vector<std::optional<int>>> matrix(annotators.size());
  std::map<std::string, int> label_ids;
  std::string line;
  while (std::getline(in, line)) {
    if (cssrs::trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // item id, unused
    for (std::size_t a = 0; a < annotators.size(); ++a) {
      std::optional<int> value;
      if (std::getline(ls, cell, ',')) {
        std::string v = cssrs::casefold(cssrs::trim(cell));
        if (!v.empty()) value = label_ids.try_emplace(v, static_cast<int>(label_ids.size())).first->second;
      }
      matrix[a].push_back(value);
    }
  }

  json out;
  out["annotators"] = annotators;
  out["groupwise_alpha"] = cssrs::krippendorff_alpha(matrix);
  json pairwise = json::object();
  for (std::size_t a = 0; a < annotators.size(); ++a)
    for (std::size_t b = a + 1; b < annotators.size(); ++b)
      pairwise[annotators[a] + "|" + annotators[b]] =
          cssrs::krippendorff_alpha_pairwise(matrix, a, b);
  out["pairwise_alpha"] = std::move(pairwise);

  cssrs::OutputWriter writer(rc.output_dir, "agreement", rc.to_json(), rc.master_seed);
  writer.write("agreement.json", out.dump(2) + "\n");
  writer.finish();
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_roc(const CommonOpts& opts, const std::string& predictions_path) {
  RunConfig rc = opts.resolve();
  std::vector<cssrs::UserRecord> users = load_users(rc);
  require_file(predictions_path, "predictions");

  std::map<std::string, std::array<double, cssrs::kNumSeverityLabels>> scores;
  std::ifstream in(predictions_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (cssrs::trim(line).empty()) continue;
    try {
      json rec = json::parse(line);
      std::array<double, cssrs::kNumSeverityLabels> p{};
      for (cssrs::SeverityLabel l : cssrs::kSeverityLabels)
        p[static_cast<int>(l)] = rec.at("probabilities").at(to_string(l)).get<double>();
      scores[rec.at("user_id").get<std::string>()] = p;
    } catch (const std::exception& e) {
      throw data_error("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  std::vector<cssrs::RocCurve> curves;
  for (cssrs::SeverityLabel label : cssrs::kSeverityLabels) {
    std::vector<bool> is_positive;
    std::vector<double> score;
    for (const cssrs::UserRecord& user : users) {
      auto it = scores.find(user.user_id);
      if (it == scores.end())
        throw data_error("no prediction for user '" + user.user_id + "'");
      is_positive.push_back(user.user_label == label);
      score.push_back(it->second[static_cast<int>(label)]);
    }
    curves.push_back(cssrs::compute_roc(is_positive, score, to_string(label)));
  }

  cssrs::OutputWriter writer(rc.output_dir, "roc", rc.to_json(), rc.master_seed);
  writer.write("roc.csv", cssrs::roc_csv(curves));
  writer.write("roc.svg", cssrs::roc_svg(curves, "one-vs-rest ROC"));
  json summary = json::object();
  for (const cssrs::RocCurve& curve : curves) summary[curve.positive_class] = curve.auc;
  writer.write("auc.json", summary.dump(2) + "\n");
  writer.finish();
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_diagnostics(const CommonOpts& opts, const std::string& valence_path,
                    const std::string& happiness_path) {
  RunConfig rc = opts.resolve();
  std::vector<cssrs::UserRecord> users = load_users(rc);
  require_file(valence_path, "valence lexicon");
  require_file(happiness_path, "happiness lexicon");
  cssrs::DiagnosticsReport report = cssrs::sentiment_diagnostics(
      users, cssrs::load_score_lexicon(valence_path), cssrs::load_score_lexicon(happiness_path));

  cssrs::OutputWriter writer(rc.output_dir, "diagnostics", rc.to_json(), rc.master_seed);
  const json j = cssrs::diagnostics_to_json(report);
  writer.write("diagnostics.json", j.dump(2) + "\n");
  writer.finish();
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"suicide-risk severity assessment over annotated Reddit data"};
  app.require_subcommand(1);

  CommonOpts stats_opts;
  CLI::App* stats = app.add_subcommand("stats", "dataset statistics");
  stats_opts.add_flags(stats, false);

  CommonOpts norm_opts;
  std::string norm_input, norm_output;
  CLI::App* normalize = app.add_subcommand("normalize", "MedNorm normalization of JSONL records");
  norm_opts.add_flags(normalize, false);
  normalize->add_option("--embeddings", norm_opts.embeddings, "embedding table")->required();
  normalize->add_option("--input", norm_input, "input JSONL")->required();
  normalize->add_option("--output", norm_output, "output JSONL")->required();

  CommonOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "train tinvm or tvarm on a dataset");
  train_opts.add_flags(train);

  CommonOpts predict_opts;
  std::string bundle_path, post_bundle_path;
  bool predict_trace = false;
  CLI::App* predict = app.add_subcommand("predict", "predict user severity with a trained bundle");
  predict_opts.add_flags(predict);
  predict->add_option("--bundle", bundle_path, "model bundle path")->required();
  predict->add_option("--post-bundle", post_bundle_path, "post classifier bundle (tvarm)");
  predict->add_flag("--trace", predict_trace, "include per-post audit trace");

  CommonOpts cv_opts;
  bool cv_trace = false;
  CLI::App* cv = app.add_subcommand("cv", "stratified cross-validation");
  cv_opts.add_flags(cv);
  cv->add_flag("--trace", cv_trace, "include per-post audit trace in predictions");

  CommonOpts ablate_opts;
  CLI::App* ablate = app.add_subcommand("ablate", "S1..S16 ablation grid over both methods");
  ablate_opts.add_flags(ablate);

  CommonOpts agree_opts;
  std::string annotations_path;
  CLI::App* agreement = app.add_subcommand("agreement", "Krippendorff alpha from an annotation matrix");
  agree_opts.add_flags(agreement, false);
  agreement->add_option("--annotations", annotations_path, "CSV item,annotator columns")->required();

  CommonOpts roc_opts;
  std::string predictions_path;
  CLI::App* roc = app.add_subcommand("roc", "one-vs-rest ROC curves from predictions");
  roc_opts.add_flags(roc, false);
  roc->add_option("--predictions", predictions_path, "predictions JSONL")->required();

  CommonOpts diag_opts;
  std::string valence_path, happiness_path;
  CLI::App* diagnostics = app.add_subcommand("diagnostics", "sentiment/emotion distribution summary");
  diag_opts.add_flags(diagnostics, false);
  diagnostics->add_option("--valence", valence_path, "valence lexicon CSV")->required();
  diagnostics->add_option("--happiness", happiness_path, "happiness lexicon CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "cssrs: " << e.what() << "\n";
    return 2;
  }

  try {
    if (stats->parsed()) return cmd_stats(stats_opts);
    if (normalize->parsed()) return cmd_normalize(norm_opts, norm_input, norm_output);
    if (train->parsed()) return cmd_train(train_opts);
    if (predict->parsed())
      return cmd_predict(predict_opts, bundle_path, post_bundle_path, predict_trace);
    if (cv->parsed()) return cmd_cv(cv_opts, cv_trace);
    if (ablate->parsed()) return cmd_ablate(ablate_opts);
    if (agreement->parsed()) return cmd_agreement(agree_opts, annotations_path);
    if (roc->parsed()) return cmd_roc(roc_opts, predictions_path);
    if (diagnostics->parsed()) return cmd_diagnostics(diag_opts, valence_path, happiness_path);
  } catch (const Error& e) {
    std::cerr << "cssrs: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "cssrs: internal error: " << e.what() << "\n";
    return 5;
  }
  return 2;
}
