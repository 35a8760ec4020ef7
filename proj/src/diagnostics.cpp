#include "cssrs/diagnostics.hpp"

#include <cmath>
#include <fstream>

#include "cssrs/error.hpp"
#include "cssrs/text.hpp"
#include "csv.hpp"

namespace cssrs {

ScoreLexicon load_score_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open score lexicon: " + path.string());
  ScoreLexicon lexicon;
  std::vector<std::string> fields;
  std::size_t line = 1, consumed = 0;
  if (!detail::read_csv_record(in, fields, line, consumed) ||
      fields != std::vector<std::string>{"token", "score"})
    throw data_error("score lexicon " + path.string() + ": expected header token,score");
  line += consumed;
  while (detail::read_csv_record(in, fields, line, consumed)) {
    std::size_t this_line = line;
    line += consumed;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != 2)
      throw data_error("score lexicon line " + std::to_string(this_line) +
                       ": expected 2 columns");
    try {
      lexicon[casefold(trim(fields[0]))] = std::stod(fields[1]);
    } catch (const std::exception&) {
      throw data_error("score lexicon line " + std::to_string(this_line) +
                       ": unparseable score '" + fields[1] + "'");
    }
  }
  return lexicon;
}

LexiconDiagnostics score_diagnostics(const std::vector<UserRecord>& users,
                                     const ScoreLexicon& lexicon, std::string name) {
  LexiconDiagnostics diag;
  diag.lexicon_name = std::move(name);
  std::map<SeverityLabel, std::vector<double>> scores;
  for (SeverityLabel l : kSeverityLabels) scores[l] = {};
  for (const UserRecord& user : users) {
    for (const PostRecord& post : user.posts) {
      double sum = 0.0;
      std::size_t hits = 0;
      for (const std::string& w : tokenize_words(post.text)) {
        auto it = lexicon.find(w);
        if (it != lexicon.end()) {
          sum += it->second;
          ++hits;
        }
      }
      scores[user.user_label].push_back(hits ? sum / static_cast<double>(hits) : 0.0);
    }
  }

  double grand_sum = 0.0;
  std::size_t grand_n = 0;
  for (auto& [label, values] : scores) {
    GroupSummary summary;
    summary.n = values.size();
    for (double v : values) summary.mean += v;
    if (summary.n) summary.mean /= static_cast<double>(summary.n);
    double ss = 0.0;
    for (double v : values) ss += (v - summary.mean) * (v - summary.mean);
    summary.stddev = summary.n > 1 ? std::sqrt(ss / static_cast<double>(summary.n - 1)) : 0.0;
    diag.groups[label] = summary;
    grand_sum += summary.mean * static_cast<double>(summary.n);
    grand_n += summary.n;
  }
  if (grand_n == 0) return diag;
  const double grand_mean = grand_sum / static_cast<double>(grand_n);

  double ssb = 0.0, ssw = 0.0;
  std::size_t k = 0;
  for (auto& [label, values] : scores) {
    if (values.empty()) continue;
    ++k;
    const GroupSummary& g = diag.groups[label];
    ssb += static_cast<double>(g.n) * (g.mean - grand_mean) * (g.mean - grand_mean);
    for (double v : values) ssw += (v - g.mean) * (v - g.mean);
  }
  if (k > 1 && grand_n > k) {
    diag.between_group_variance = ssb / static_cast<double>(k - 1);
    diag.within_group_variance = ssw / static_cast<double>(grand_n - k);
    diag.f_ratio = diag.within_group_variance > 0.0
                       ? diag.between_group_variance / diag.within_group_variance
                       : 0.0;
  }
  return diag;
}

DiagnosticsReport sentiment_diagnostics(const std::vector<UserRecord>& users,
                                        const ScoreLexicon& valence,
                                        const ScoreLexicon& happiness) {
  DiagnosticsReport report;
  report.valence = score_diagnostics(users, valence, "valence");
  report.happiness = score_diagnostics(users, happiness, "happiness");
  return report;
}

}  // namespace cssrs
