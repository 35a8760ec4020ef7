#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cssrs/labels.hpp"

namespace cssrs {

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;  // [true][predicted]

  std::size_t total() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool degenerate = false;  // class absent from both truth and predictions
};

struct MetricsReport {
  std::vector<std::string> classes;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  // Harmonic mean of the macro precision/recall pair (the single-F1 style
  // used in the ablation reports); the per-class-mean variant is alongside.
  double f1 = 0.0;
  double f1_mean_per_class = 0.0;
  double accuracy = 0.0;
  double ordinal_error = 0.0;  // mean |rank(pred) - rank(true)|
  std::size_t total = 0;
  ConfusionMatrix confusion;
};

ConfusionMatrix build_confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                                const std::vector<std::string>& classes);

// One-vs-rest precision/recall per class, unweighted macro averages.
// Degenerate classes (support 0 and never predicted) carry 0 metrics and the
// degenerate flag. Throws Error(Data) on length mismatch.
MetricsReport compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted,
                              const std::vector<std::string>& classes);

MetricsReport compute_metrics(const std::vector<SeverityLabel>& truth,
                              const std::vector<SeverityLabel>& predicted);

struct RocCurve {
  std::string positive_class;
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), begins (0,0) ends (1,1)
  double auc = 0.0;
};

// One-vs-rest curve over all distinct score thresholds; equal scores share a
// threshold step; AUC by trapezoid. Throws Error(Data) "ROC undefined" on
// single-class truth.
RocCurve compute_roc(const std::vector<bool>& is_positive, const std::vector<double>& score,
                     std::string positive_class);

// annotations[annotator][item]; missing values allowed. Nominal distance.
// alpha = 1 - D_observed / D_expected with pairable-value counting; exactly
// 1.0 under perfect agreement. Throws Error(Data) when no item has two or
// more annotations.
double krippendorff_alpha(const std::vector<std::vector<std::optional<int>>>& annotations);

// Two-annotator restriction of the same statistic.
double krippendorff_alpha_pairwise(const std::vector<std::vector<std::optional<int>>>& annotations,
                                   std::size_t annotator_a, std::size_t annotator_b);

}  // namespace cssrs
