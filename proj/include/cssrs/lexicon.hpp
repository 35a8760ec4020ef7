#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cssrs/embedding.hpp"
#include "cssrs/labels.hpp"
#include "cssrs/text.hpp"

namespace cssrs {

struct ConceptEntry {
  std::string concept_id;
  std::vector<std::string> surface;  // tokenized canonical phrase, non-empty
  std::optional<PostLabel> severity_category;
  std::string source;
};

struct Lexicon {
  std::string name;
  std::vector<ConceptEntry> concepts;

  bool is_severity_lexicon() const;
};

// CSV columns: concept_id,surface,severity_category(optional),source
Lexicon load_lexicon(const std::filesystem::path& path, std::string name = "");

struct ConceptMatch {
  std::string concept_id;
  std::size_t begin = 0;  // token index range [begin,end)
  std::size_t end = 0;
  double similarity = 0.0;
  bool negated = false;
  std::vector<std::string> replacement;  // the concept's canonical surface

  bool operator==(const ConceptMatch&) const = default;
};

struct MatchOptions {
  double threshold = 0.6;
  int max_ngram = 4;
  int negation_window = 3;
};

// Token-level negation rule: true iff a negation cue occurs within `window`
// tokens before span_begin with no clause boundary (".", ",", ";", "but")
// in between. The matching pipeline applies the same rule with punctuation
// recovered from the raw-text gaps between tokens.
bool resolve_negation(std::span<const std::string> tokens, std::size_t span_begin, int window);

bool is_negation_cue(std::string_view token);

// Lexicon with precomputed concept phrase vectors; concepts with no
// in-vocabulary token are skipped (counted in skipped_oov).
struct PreparedLexicon {
  const Lexicon* lexicon = nullptr;
  std::vector<std::vector<double>> vectors;  // empty vector = OOV concept
  std::size_t skipped_oov = 0;

  static PreparedLexicon prepare(const Lexicon& lexicon, const EmbeddingTable& table);
};

// Scans every n-gram (n <= max_ngram) of the tokenized text and keeps
// candidates with cosine >= threshold; overlaps resolved greedily by
// similarity desc, span length desc, position asc, concept_id asc. Selection
// by descending similarity makes the kept set shrink monotonically as the
// threshold rises.
std::vector<ConceptMatch> match_concepts(std::string_view text, const PreparedLexicon& lexicon,
                                         const EmbeddingTable& table, MatchOptions options = {});
std::vector<ConceptMatch> match_concepts(std::string_view text, const Lexicon& lexicon,
                                         const EmbeddingTable& table, MatchOptions options = {});

// Replaces every non-negated matched span with its concept's canonical
// surface; all other bytes pass through verbatim.
std::string mednorm(std::string_view text, std::span<const PreparedLexicon> norm_lexicons,
                    const EmbeddingTable& table, MatchOptions options = {});
std::string mednorm(std::string_view text, std::span<const Lexicon> norm_lexicons,
                    const EmbeddingTable& table, MatchOptions options = {});

// Non-negated match counts per severity category; requires every entry of
// the lexicon to carry severity_category.
std::array<std::size_t, kNumPostLabels> severity_score(std::string_view text,
                                                       const PreparedLexicon& severity_lexicon,
                                                       const EmbeddingTable& table,
                                                       MatchOptions options = {});

}  // namespace cssrs
