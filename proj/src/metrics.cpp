#include "cssrs/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cssrs/error.hpp"

namespace cssrs {

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (std::size_t v : row) n += v;
  return n;
}

ConfusionMatrix build_confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                                const std::vector<std::string>& classes) {
  if (truth.size() != predicted.size())
    throw data_error("confusion: truth and prediction lengths differ (" +
                     std::to_string(truth.size()) + " vs " + std::to_string(predicted.size()) +
                     ")");
  const int k = static_cast<int>(classes.size());
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k)
      throw data_error("confusion: label outside the class list at index " + std::to_string(i));
    ++cm.counts[truth[i]][predicted[i]];
  }
  return cm;
}

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double harmonic(double p, double r) { return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

MetricsReport compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted,
                              const std::vector<std::string>& classes) {
  MetricsReport report;
  report.classes = classes;
  report.confusion = build_confusion(truth, predicted, classes);
  report.total = truth.size();
  const int k = static_cast<int>(classes.size());

  double correct = 0.0;
  double ordinal_sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) correct += 1.0;
    ordinal_sum += std::abs(truth[i] - predicted[i]);
  }
  report.accuracy = safe_div(correct, static_cast<double>(truth.size()));
  report.ordinal_error = safe_div(ordinal_sum, static_cast<double>(truth.size()));

  report.per_class.resize(k);
  double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
  for (int c = 0; c < k; ++c) {
    std::size_t tp = report.confusion.counts[c][c];
    std::size_t fn = 0, fp = 0;
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      fn += report.confusion.counts[c][o];
      fp += report.confusion.counts[o][c];
    }
    ClassMetrics& m = report.per_class[c];
    m.support = tp + fn;
    m.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    m.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    m.f1 = harmonic(m.precision, m.recall);
    m.degenerate = (m.support == 0 && tp + fp == 0);
    sum_p += m.precision;
    sum_r += m.recall;
    sum_f1 += m.f1;
  }
  report.macro_precision = safe_div(sum_p, k);
  report.macro_recall = safe_div(sum_r, k);
  report.f1 = harmonic(report.macro_precision, report.macro_recall);
  report.f1_mean_per_class = safe_div(sum_f1, k);
  return report;
}

MetricsReport compute_metrics(const std::vector<SeverityLabel>& truth,
                              const std::vector<SeverityLabel>& predicted) {
  std::vector<int> t, p;
  t.reserve(truth.size());
  p.reserve(predicted.size());
  for (SeverityLabel l : truth) t.push_back(static_cast<int>(l));
  for (SeverityLabel l : predicted) p.push_back(static_cast<int>(l));
  std::vector<std::string> classes;
  for (SeverityLabel l : kSeverityLabels) classes.push_back(to_string(l));
  return compute_metrics(t, p, classes);
}

RocCurve compute_roc(const std::vector<bool>& is_positive, const std::vector<double>& score,
                     std::string positive_class) {
  if (is_positive.size() != score.size())
    throw data_error("roc: truth and score lengths differ");
  std::size_t pos = 0;
  for (bool b : is_positive) pos += b ? 1 : 0;
  const std::size_t neg = is_positive.size() - pos;
  if (pos == 0 || neg == 0)
    throw data_error("ROC undefined: truth contains a single class for '" + positive_class +
                     "'");

  std::vector<std::size_t> order(score.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });

  RocCurve curve;
  curve.positive_class = std::move(positive_class);
  curve.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    // one threshold step per distinct score value
    const double s = score[order[i]];
    while (i < order.size() && score[order[i]] == s) {
      if (is_positive[order[i]]) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos));
  }
  double auc = 0.0;
  for (std::size_t j = 1; j < curve.points.size(); ++j) {
    const auto& [x0, y0] = curve.points[j - 1];
    const auto& [x1, y1] = curve.points[j];
    auc += (x1 - x0) * (y0 + y1) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

}  // namespace cssrs
