#include <algorithm>
#include <cmath>
#include <map>

#include "cssrs/corpus.hpp"
#include "cssrs/error.hpp"
#include "cssrs/lexicon.hpp"

namespace cssrs {

std::vector<std::string> candidate_user_filter(const std::vector<PostRecord>& raw_posts,
                                               const Lexicon& severity_lexicon,
                                               const EmbeddingTable& table,
                                               const ZipfParams& params) {
  std::map<std::string, std::size_t> match_counts;  // user_id -> non-negated matches
  for (const PostRecord& post : raw_posts) match_counts.try_emplace(post.user_id, 0);
  if (match_counts.size() < static_cast<std::size_t>(params.min_users))
    throw data_error("insufficient corpus for rank fit (need >= " +
                     std::to_string(params.min_users) + " users, got " +
                     std::to_string(match_counts.size()) + ")");

  PreparedLexicon prepared = PreparedLexicon::prepare(severity_lexicon, table);
  MatchOptions options;
  options.threshold = params.match_threshold;
  options.max_ngram = params.max_ngram;
  for (const PostRecord& post : raw_posts) {
    std::size_t n = 0;
    for (const ConceptMatch& m : match_concepts(post.text, prepared, table, options))
      if (!m.negated) ++n;
    match_counts[post.user_id] += n;
  }

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [user, count] : match_counts)
    if (count > 0) ranked.emplace_back(user, count);
  if (ranked.empty()) return {};
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  // Too few positive users to fit a two-parameter curve: keep them all.
  if (ranked.size() < 3) {
    std::vector<std::string> all;
    for (auto& [user, count] : ranked) all.push_back(user);
    return all;
  }

  std::vector<double> freqs;
  freqs.reserve(ranked.size());
  for (auto& [user, count] : ranked) freqs.push_back(static_cast<double>(count));
  ZipfFit fit = fit_zipf_mandelbrot(freqs, params);

  // Cutoff: smallest rank where the observed frequency falls below
  // tau * fitted frequency. Users above the knee are the candidates.
  std::size_t cutoff = ranked.size();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    double fitted = std::exp(fit.log_c - fit.a * std::log(static_cast<double>(i + 1) + fit.b));
    if (freqs[i] < params.tau * fitted) {
      cutoff = i;
      break;
    }
  }

  std::vector<std::string> result;
  result.reserve(cutoff);
  for (std::size_t i = 0; i < cutoff; ++i) result.push_back(ranked[i].first);
  return result;
}

}  // namespace cssrs
