#include "cssrs/cross_validation.hpp"

#include <algorithm>
#include <map>

#include "cssrs/error.hpp"
#include "cssrs/rng.hpp"

namespace cssrs {

FoldAssignment stratified_folds(const std::vector<UserRecord>& users, int folds,
                                std::uint64_t seed) {
  if (folds < 2) throw usage_error("cross-validation needs folds >= 2");
  std::map<SeverityLabel, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < users.size(); ++i) by_label[users[i].user_label].push_back(i);
  if (by_label.size() < 2)
    throw data_error("stratification impossible: need users of at least 2 classes");
  for (const auto& [label, members] : by_label) {
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw data_error("stratification impossible: class '" + to_string(label) + "' has " +
                       std::to_string(members.size()) + " user(s) < " + std::to_string(folds) +
                       " folds; use fewer folds");
    }
  }
  FoldAssignment assignment;
  assignment.folds = folds;
  assignment.fold_of_user.assign(users.size(), -1);
  for (auto& [label, members] : by_label) {
    Rng rng(derive_seed(seed, "stratify-" + to_string(label)));
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j)
      assignment.fold_of_user[members[j]] = static_cast<int>(j % folds);
  }
  return assignment;
}

namespace {

struct FoldModels {
  nn::ModelBundle primary;              // tinvm_cnn or tvarm_user_cnn
  std::optional<nn::ModelBundle> post;  // TvarM only
};

FoldModels train_fold(const std::vector<UserRecord>& train_users, const CvOptions& options,
                      int fold) {
  nn::TrainConfig config = options.train;
  config.rng_seed = derive_seed(options.seed, "fold-" + std::to_string(fold));
  FoldModels models;
  if (options.method == Method::TinvM) {
    models.primary = train_tinvm(train_users, config, options.embeddings);
  } else {
    std::vector<PostRecord> train_posts;
    for (const UserRecord& u : train_users)
      train_posts.insert(train_posts.end(), u.posts.begin(), u.posts.end());
    models.post = train_post_classifier(train_posts, config, options.embeddings);
    models.primary = train_tvarm(train_users, *models.post, config);
  }
  return models;
}

}  // namespace

std::vector<RocCurve> roc_curves_from_predictions(const std::vector<UserRecord>& users,
                                                  const std::vector<UserPrediction>& predictions) {
  std::vector<RocCurve> curves;
  for (SeverityLabel label : kSeverityLabels) {
    std::vector<bool> is_positive;
    std::vector<double> score;
    is_positive.reserve(users.size());
    score.reserve(users.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      is_positive.push_back(users[i].user_label == label);
      positives += is_positive.back() ? 1 : 0;
      score.push_back(predictions[i].probabilities[static_cast<int>(label)]);
    }
    // one-vs-rest is undefined for a class with no positives or no
    // negatives (common after ablation slicing); skip those curves
    if (positives == 0 || positives == users.size()) continue;
    curves.push_back(compute_roc(is_positive, score, to_string(label)));
  }
  return curves;
}

CvResult cross_validate(const std::vector<UserRecord>& users, const CvOptions& options) {
  CvResult result;
  result.assignment = stratified_folds(users, options.folds, options.seed);
  result.predictions.resize(users.size());

  std::vector<std::vector<std::size_t>> fold_members(options.folds);
  for (std::size_t i = 0; i < users.size(); ++i)
    fold_members[result.assignment.fold_of_user[i]].push_back(i);

  // Folds are independent; results land in per-user slots, so any schedule
  // yields the same output.
  std::string fold_error;
#pragma omp parallel for schedule(dynamic)
  for (int fold = 0; fold < options.folds; ++fold) {
    try {
      std::vector<UserRecord> train_users;
      train_users.reserve(users.size());
      for (std::size_t i = 0; i < users.size(); ++i)
        if (result.assignment.fold_of_user[i] != fold) train_users.push_back(users[i]);
      FoldModels models = train_fold(train_users, options, fold);
      for (std::size_t i : fold_members[fold]) {
        UserPrediction pred =
            options.method == Method::TinvM
                ? predict_user_tinvm(models.primary, users[i])
                : predict_user_tvarm(*models.post, models.primary, users[i]);
        pred.fold = fold;
        if (!options.keep_post_trace) pred.post_trace.clear();
        result.predictions[i] = std::move(pred);
      }
    } catch (const std::exception& e) {
#pragma omp critical
      if (fold_error.empty()) fold_error = e.what();
    }
  }
  if (!fold_error.empty()) throw train_error("cross-validation fold failed: " + fold_error);

  std::vector<SeverityLabel> truth, predicted;
  truth.reserve(users.size());
  predicted.reserve(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    truth.push_back(users[i].user_label);
    predicted.push_back(result.predictions[i].predicted);
  }
  result.metrics = compute_metrics(truth, predicted);
  result.roc_curves = roc_curves_from_predictions(users, result.predictions);
  return result;
}

}  // namespace cssrs
