#pragma once

#include <cstdint>
#include <vector>

#include "cssrs/metrics.hpp"
#include "cssrs/models.hpp"
#include "cssrs/records.hpp"

namespace cssrs {

struct FoldAssignment {
  int folds = 0;
  std::vector<int> fold_of_user;  // aligned with the user collection
};

// Deterministic stratified assignment: per-label shuffle with a derived
// seed, then round-robin dealing. Throws Error(Data) when any present class
// has fewer users than folds (suggesting fewer folds).
FoldAssignment stratified_folds(const std::vector<UserRecord>& users, int folds,
                                std::uint64_t seed);

struct CvOptions {
  Method method = Method::TinvM;
  int folds = 5;
  std::uint64_t seed = 1;
  nn::TrainConfig train;
  const EmbeddingTable* embeddings = nullptr;
  bool keep_post_trace = false;
};

struct CvResult {
  std::vector<UserPrediction> predictions;  // aligned with the user collection
  MetricsReport metrics;                    // pooled over all folds
  std::vector<RocCurve> roc_curves;         // one-vs-rest per severity class
  FoldAssignment assignment;
};

// Each user is predicted exactly once, by a model never trained on it. For
// TvarM the post classifier of a fold is trained only on training-fold
// users' posts. Fold seeds derive from `seed`, so results are reproducible
// regardless of how folds are scheduled.
CvResult cross_validate(const std::vector<UserRecord>& users, const CvOptions& options);

// One-vs-rest curves for all four severity classes from pooled predictions.
std::vector<RocCurve> roc_curves_from_predictions(const std::vector<UserRecord>& users,
                                                  const std::vector<UserPrediction>& predictions);

}  // namespace cssrs
