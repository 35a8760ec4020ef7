#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cssrs/params.hpp"
#include "cssrs/vocab.hpp"

namespace cssrs::nn {

enum class ClassWeighting { None, InverseFrequency };

ClassWeighting class_weighting_from_string(std::string_view s);
std::string to_string(ClassWeighting w);

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 1e-3;
  int batch_size = 16;
  std::uint64_t rng_seed = 1;
  int max_tokens_per_post = 256;
  int max_posts_per_user = 32;
  ClassWeighting class_weighting = ClassWeighting::InverseFrequency;

  // Architecture knobs; defaults follow Kim-style CNN conventions scaled for
  // CPU runs.
  int embedding_dim = 50;  // used when training embeddings from scratch
  int lstm_hidden = 64;
  std::vector<int> tinvm_filter_widths = {3, 4, 5};
  int tinvm_feature_maps = 100;
  std::vector<int> tvarm_filter_widths = {2, 3};
  int tvarm_feature_maps = 32;
  double dropout = 0.5;
  bool use_normalized_text = true;
  int min_token_freq = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

// Serializable trained model: hyperparameters, vocabulary, parameter
// tensors, and the seed that produced them. JSON doubles round-trip exactly,
// so a saved/loaded bundle reproduces inference bitwise.
struct ModelBundle {
  static constexpr int kFormatVersion = 1;
  static constexpr const char* kKindPostLstm = "post_lstm";
  static constexpr const char* kKindTvarmUserCnn = "tvarm_user_cnn";
  static constexpr const char* kKindTinvmCnn = "tinvm_cnn";

  std::string kind;
  TrainConfig config;
  Vocabulary vocab;
  ParameterSet params;
  std::vector<double> epoch_loss;
  bool pretrained_embeddings = false;

  nlohmann::json to_json() const;
  static ModelBundle from_json(const nlohmann::json& j);

  std::string serialize() const;  // deterministic bytes
  static ModelBundle deserialize(const std::string& bytes);

  void save(const std::filesystem::path& path) const;
  static ModelBundle load(const std::filesystem::path& path);

  void require_kind(const std::string& expected) const;
};

}  // namespace cssrs::nn
