#include <map>

#include "cssrs/error.hpp"
#include "cssrs/metrics.hpp"

namespace cssrs {

namespace {

// Coincidence-matrix alpha with nominal distance. Each item with m >= 2
// annotations contributes every ordered value pair with weight 1/(m-1).
double alpha_from_matrix(const std::vector<std::vector<std::optional<int>>>& annotations) {
  if (annotations.size() < 2)
    throw data_error("krippendorff_alpha: need at least 2 annotators");
  std::size_t n_items = 0;
  for (const auto& row : annotations) n_items = std::max(n_items, row.size());
  if (n_items == 0) throw data_error("krippendorff_alpha: no items");

  std::map<std::pair<int, int>, double> coincidence;
  std::map<int, double> marginal;
  double n_total = 0.0;
  for (std::size_t item = 0; item < n_items; ++item) {
    std::vector<int> values;
    for (const auto& row : annotations) {
      if (item < row.size() && row[item].has_value()) values.push_back(*row[item]);
    }
    const std::size_t m = values.size();
    if (m < 2) continue;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        coincidence[{values[a], values[b]}] += w;
        marginal[values[a]] += w;
        n_total += w;
      }
    }
  }
  if (n_total <= 0.0) throw data_error("krippendorff_alpha: no pairable values");

  double observed_disagreement = 0.0;
  for (const auto& [pair, mass] : coincidence) {
    if (pair.first != pair.second) observed_disagreement += mass;
  }
  if (observed_disagreement == 0.0) return 1.0;

  double expected = 0.0;
  for (const auto& [va, na] : marginal) {
    for (const auto& [vb, nb] : marginal) {
      if (va != vb) expected += na * nb;
    }
  }
  expected /= (n_total - 1.0);
  if (expected == 0.0) throw data_error("krippendorff_alpha: zero expected disagreement");
  return 1.0 - observed_disagreement / expected;
}

}  // namespace

double krippendorff_alpha(const std::vector<std::vector<std::optional<int>>>& annotations) {
  return alpha_from_matrix(annotations);
}

double krippendorff_alpha_pairwise(const std::vector<std::vector<std::optional<int>>>& annotations,
                                   std::size_t annotator_a, std::size_t annotator_b) {
  if (annotator_a >= annotations.size() || annotator_b >= annotations.size() ||
      annotator_a == annotator_b)
    throw usage_error("krippendorff_alpha_pairwise: invalid annotator indices");
  return alpha_from_matrix({annotations[annotator_a], annotations[annotator_b]});
}

}  // namespace cssrs
