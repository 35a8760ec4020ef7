#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cssrs/records.hpp"

namespace cssrs {

using ScoreLexicon = std::unordered_map<std::string, double>;

// CSV with header token,score.
ScoreLexicon load_score_lexicon(const std::filesystem::path& path);

struct GroupSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;  // posts in the group
};

struct LexiconDiagnostics {
  std::string lexicon_name;
  std::map<SeverityLabel, GroupSummary> groups;
  // One-way variance decomposition so weak separation across severity levels
  // can be eyeballed; no hypothesis-test verdict is asserted.
  double between_group_variance = 0.0;
  double within_group_variance = 0.0;
  double f_ratio = 0.0;
};

struct DiagnosticsReport {
  LexiconDiagnostics valence;
  LexiconDiagnostics happiness;
};

// Mean per-post lexicon score (0 when a post hits no lexicon token) grouped
// by user severity label.
LexiconDiagnostics score_diagnostics(const std::vector<UserRecord>& users,
                                     const ScoreLexicon& lexicon, std::string name);

DiagnosticsReport sentiment_diagnostics(const std::vector<UserRecord>& users,
                                        const ScoreLexicon& valence,
                                        const ScoreLexicon& happiness);

}  // namespace cssrs
