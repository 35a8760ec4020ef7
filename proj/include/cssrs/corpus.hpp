#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cssrs/records.hpp"

namespace cssrs {

struct EmbeddingTable;
struct Lexicon;

enum class DatasetFormat { Jsonl, Csv };

DatasetFormat format_from_string(std::string_view s);
DatasetFormat guess_format(const std::filesystem::path& path);

struct LoadInfo {
  std::size_t dropped_indication_users = 0;
  std::size_t dropped_indication_posts = 0;
  std::vector<std::string> warnings;
};

struct Corpus {
  std::vector<UserRecord> users;
  LoadInfo info;
};

// Throws Error(Data) naming line number and field on malformed input,
// unknown labels, or duplicate post ids. Users labeled "indication" in the
// source are dropped and counted in LoadInfo.
Corpus load_dataset(const std::filesystem::path& path, DatasetFormat format);
Corpus load_dataset(const std::filesystem::path& path);  // format from extension

void save_dataset_jsonl(const std::vector<UserRecord>& users, std::ostream& out);
void save_dataset_jsonl(const std::vector<UserRecord>& users,
                        const std::filesystem::path& path);

// True iff the case-folded username contains "throwaway".
bool detect_throwaway(std::string_view username);

using SentenceSplitter = std::function<std::size_t(std::string_view)>;

CorpusStats dataset_stats(const std::vector<UserRecord>& users);
CorpusStats dataset_stats(const std::vector<UserRecord>& users,
                          const SentenceSplitter& splitter);

struct AblationFlags {
  bool include_throwaway = true;
  bool include_uninformative = true;
  bool include_supportive = true;

  bool operator==(const AblationFlags&) const = default;
};

struct SliceResult {
  std::vector<UserRecord> users;
  std::size_t dropped_empty_users = 0;  // users left with zero posts
};

// include_supportive=false removes supportive posts AND supportive-labeled
// users; include_uninformative=false removes uninformative posts; users
// emptied by the slice are dropped, not kept as zero-post users.
SliceResult ablation_slice(const std::vector<UserRecord>& users, AblationFlags flags);

struct ZipfParams {
  double tau = 0.5;      // cutoff fraction of the fitted curve
  double b_max = 10.0;   // Zipf-Mandelbrot offset grid upper bound
  double b_step = 0.5;
  int min_users = 10;
  double match_threshold = 0.6;
  int max_ngram = 4;
};

struct ZipfFit {
  double log_c = 0.0;  // f(r) = C / (r + b)^a
  double a = 0.0;
  double b = 0.0;
};

// log-log least squares over ranked positive frequencies; b chosen from a
// grid by residual sum of squares (smallest b on ties).
ZipfFit fit_zipf_mandelbrot(const std::vector<double>& ranked_frequencies,
                            const ZipfParams& params);

// Ranks users by non-negated severity-lexicon match count and keeps those
// above the fitted knee: the cutoff is the smallest rank whose observed
// frequency drops below tau * fitted. Deterministic given params.
std::vector<std::string> candidate_user_filter(const std::vector<PostRecord>& raw_posts,
                                               const Lexicon& severity_lexicon,
                                               const EmbeddingTable& table,
                                               const ZipfParams& params);

}  // namespace cssrs
