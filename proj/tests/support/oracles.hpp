#pragma once

// Independent reference implementations used to check the library: direct
// per-class tallies for metrics, the pairwise rank statistic for AUC, and a
// count-based coincidence matrix for Krippendorff's alpha. These deliberately
// avoid the code paths they verify.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cssrs/rng.hpp"

namespace test_support {

struct OracleClassStats {
  std::size_t tp = 0, fp = 0, fn = 0, support = 0;
};

inline OracleClassStats oracle_class(const std::vector<int>& truth, const std::vector<int>& pred,
                                     int cls) {
  OracleClassStats s;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == cls) ++s.support;
    if (truth[i] == cls && pred[i] == cls) ++s.tp;
    if (truth[i] != cls && pred[i] == cls) ++s.fp;
    if (truth[i] == cls && pred[i] != cls) ++s.fn;
  }
  return s;
}

// P(score_pos > score_neg), ties 1/2.
inline double auc_rank_oracle(const std::vector<bool>& is_positive,
                              const std::vector<double>& score) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (!is_positive[i]) continue;
    for (std::size_t j = 0; j < score.size(); ++j) {
      if (is_positive[j]) continue;
      ++pairs;
      if (score[i] > score[j]) wins += 1.0;
      else if (score[i] == score[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// o_ck = sum_u n_uc * (n_uk - delta_ck) / (m_u - 1), alpha = 1 - D_o/D_e.
inline double alpha_oracle(const std::vector<std::vector<std::optional<int>>>& annotations) {
  std::size_t n_items = 0;
  for (const auto& row : annotations) n_items = std::max(n_items, row.size());
  std::map<int, std::map<int, double>> o;
  std::map<int, double> n_c;
  double n = 0.0;
  for (std::size_t item = 0; item < n_items; ++item) {
    std::map<int, double> counts;
    double m = 0;
    for (const auto& row : annotations) {
      if (item < row.size() && row[item]) {
        ++counts[*row[item]];
        ++m;
      }
    }
    if (m < 2) continue;
    for (const auto& [c, nc] : counts) {
      for (const auto& [k, nk] : counts) {
        const double delta = c == k ? 1.0 : 0.0;
        o[c][k] += nc * (nk - delta) / (m - 1);
      }
    }
  }
  for (auto& [c, row] : o)
    for (auto& [k, mass] : row) {
      n_c[c] += mass;
      n += mass;
    }
  double d_o = 0.0;
  for (auto& [c, row] : o)
    for (auto& [k, mass] : row)
      if (c != k) d_o += mass;
  if (d_o == 0.0) return 1.0;
  double d_e = 0.0;
  for (auto& [c, nc] : n_c)
    for (auto& [k, nk] : n_c)
      if (c != k) d_e += nc * nk;
  d_e /= (n - 1.0);
  return 1.0 - d_o / d_e;
}

// Random text over the fixture-embedding vocabulary.
inline std::string random_fixture_post(cssrs::Rng& rng) {
  static const std::vector<std::string> vocab = {
      "i",    "am",   "sick", "of",      "loss",   "and",  "need", "a",        "way",
      "out",  "no",   "not",  "never",   "tired",  "my",   "losses", "hopeless", "helpless",
      "the",  "to",   "that", "support", "help",   "you",  "kill", "myself",   "wish",
      "die",  "plan", "pills", "overdose", "attempt", "sad", "happy", "pain",   "exhausted",
      "insomnia", "but", "don't", "cutting"};
  std::string text;
  const int n = 4 + static_cast<int>(rng.next_below(14));
  for (int i = 0; i < n; ++i) {
    if (i) text += rng.next_below(8) == 0 ? ", " : " ";
    text += vocab[rng.next_below(vocab.size())];
  }
  return text;
}

}  // namespace test_support
