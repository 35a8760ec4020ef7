#include "cssrs/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "cssrs/error.hpp"
#include "csv.hpp"

namespace cssrs {

namespace {

const std::set<std::string, std::less<>> kNegationCues = {
    "no", "not", "never", "don't", "dont", "won't", "wont", "can't", "cant", "n't"};

bool is_clause_boundary_token(std::string_view token) {
  return token == "." || token == "," || token == ";" || token == "but";
}

bool gap_has_boundary(std::string_view gap) {
  return gap.find_first_of(".,;") != std::string_view::npos;
}

struct Candidate {
  std::size_t lexicon = 0;
  std::size_t concept_idx = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double similarity = 0.0;
};

void check_options(const MatchOptions& options) {
  if (!(options.threshold > 0.0 && options.threshold <= 1.0))
    throw usage_error("match threshold must be in (0,1]");
  if (options.max_ngram < 1) throw usage_error("max_ngram must be >= 1");
  if (options.negation_window < 1) throw usage_error("negation window must be >= 1");
}

// Candidates over all n-grams against all prepared lexicons, then a greedy
// non-overlapping selection ordered by similarity desc, span length desc,
// begin asc, concept_id asc.
std::vector<ConceptMatch> resolve_matches(std::string_view text,
                                          const std::vector<Token>& tokens,
                                          std::span<const PreparedLexicon> lexicons,
                                          const EmbeddingTable& table,
                                          const MatchOptions& options) {
  check_options(options);
  if (tokens.empty()) return {};

  // Phrase vectors for every span start/length, computed once.
  const std::size_t n_tokens = tokens.size();
  const std::size_t max_n = std::min<std::size_t>(options.max_ngram, n_tokens);
  std::vector<std::string> words(n_tokens);
  for (std::size_t i = 0; i < n_tokens; ++i) words[i] = tokens[i].text;

  std::vector<Candidate> candidates;
  for (std::size_t len = 1; len <= max_n; ++len) {
    for (std::size_t begin = 0; begin + len <= n_tokens; ++begin) {
      auto pv = phrase_vector(std::span<const std::string>(words).subspan(begin, len), table);
      if (!pv) continue;
      for (std::size_t li = 0; li < lexicons.size(); ++li) {
        const PreparedLexicon& pl = lexicons[li];
        for (std::size_t ci = 0; ci < pl.vectors.size(); ++ci) {
          if (pl.vectors[ci].empty()) continue;  // OOV concept, skipped
          double sim = cosine_similarity(*pv, pl.vectors[ci]);
          if (sim >= options.threshold)
            candidates.push_back({li, ci, begin, begin + len, sim});
        }
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    std::size_t alen = a.end - a.begin, blen = b.end - b.begin;
    if (alen != blen) return alen > blen;
    if (a.begin != b.begin) return a.begin < b.begin;
    const std::string& aid = lexicons[a.lexicon].lexicon->concepts[a.concept_idx].concept_id;
    const std::string& bid = lexicons[b.lexicon].lexicon->concepts[b.concept_idx].concept_id;
    if (aid != bid) return aid < bid;
    return a.lexicon < b.lexicon;
  });

  std::vector<bool> covered(n_tokens, false);
  std::vector<Candidate> selected;
  for (const Candidate& cand : candidates) {
    bool overlap = false;
    for (std::size_t i = cand.begin; i < cand.end && !overlap; ++i) overlap = covered[i];
    if (overlap) continue;
    for (std::size_t i = cand.begin; i < cand.end; ++i) covered[i] = true;
    selected.push_back(cand);
  }
  std::sort(selected.begin(), selected.end(),
            [](const Candidate& a, const Candidate& b) { return a.begin < b.begin; });

  // Negation resolved left to right. A cue absorbed into an earlier
  // non-negated (about to be replaced) span loses its negating force, so the
  // scan stops at such spans; this keeps a second normalization pass
  // consistent with the first.
  std::vector<int> owner(n_tokens, -1);
  for (std::size_t s = 0; s < selected.size(); ++s)
    for (std::size_t i = selected[s].begin; i < selected[s].end; ++i) owner[i] = static_cast<int>(s);

  std::vector<bool> negated(selected.size(), false);
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const Candidate& cand = selected[s];
    int steps = 0;
    for (std::size_t i = cand.begin; i > 0 && steps < options.negation_window; --i, ++steps) {
      std::string_view gap = text.substr(tokens[i - 1].end, tokens[i].begin - tokens[i - 1].end);
      if (gap_has_boundary(gap)) break;
      const int prev_owner = owner[i - 1];
      if (prev_owner >= 0 && static_cast<std::size_t>(prev_owner) != s &&
          !negated[prev_owner]) {
        break;  // token belongs to a replaced span
      }
      const std::string& tok = tokens[i - 1].text;
      if (tok == "but") break;
      if (is_negation_cue(tok)) {
        negated[s] = true;
        break;
      }
    }
  }

  std::vector<ConceptMatch> matches;
  matches.reserve(selected.size());
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const Candidate& cand = selected[s];
    const ConceptEntry& entry = lexicons[cand.lexicon].lexicon->concepts[cand.concept_idx];
    ConceptMatch m;
    m.concept_id = entry.concept_id;
    m.begin = cand.begin;
    m.end = cand.end;
    m.similarity = cand.similarity;
    m.negated = negated[s];
    m.replacement = entry.surface;
    matches.push_back(std::move(m));
  }
  return matches;
}

}  // namespace

bool Lexicon::is_severity_lexicon() const {
  return !concepts.empty() &&
         std::all_of(concepts.begin(), concepts.end(),
                     [](const ConceptEntry& c) { return c.severity_category.has_value(); });
}

Lexicon load_lexicon(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open lexicon file: " + path.string());
  Lexicon lexicon;
  lexicon.name = name.empty() ? path.stem().string() : std::move(name);

  std::vector<std::string> fields;
  std::size_t line = 1, consumed = 0;
  if (!detail::read_csv_record(in, fields, line, consumed))
    throw data_error("lexicon file is empty: " + path.string());
  const std::vector<std::string> expected = {"concept_id", "surface", "severity_category",
                                             "source"};
  if (fields != expected)
    throw data_error("lexicon " + path.string() +
                     ": expected header concept_id,surface,severity_category,source");
  line += consumed;

  std::set<std::string> seen_ids;
  while (detail::read_csv_record(in, fields, line, consumed)) {
    std::size_t this_line = line;
    line += consumed;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != 4)
      throw data_error("lexicon line " + std::to_string(this_line) + ": expected 4 columns");
    ConceptEntry entry;
    entry.concept_id = trim(fields[0]);
    if (entry.concept_id.empty())
      throw data_error("lexicon line " + std::to_string(this_line) + ": empty concept_id");
    if (!seen_ids.insert(entry.concept_id).second)
      throw data_error("lexicon line " + std::to_string(this_line) + ": duplicate concept_id '" +
                       entry.concept_id + "'");
    entry.surface = tokenize_words(fields[1]);
    if (entry.surface.empty())
      throw data_error("lexicon line " + std::to_string(this_line) + ": empty surface");
    std::string category = trim(fields[2]);
    if (!category.empty()) {
      auto label = parse_post_label(category);
      if (!label)
        throw data_error("lexicon line " + std::to_string(this_line) +
                         ": unknown severity_category '" + category +
                         "' (allowed: " + allowed_post_labels() + ")");
      entry.severity_category = *label;
    }
    entry.source = trim(fields[3]);
    lexicon.concepts.push_back(std::move(entry));
  }
  if (lexicon.concepts.empty())
    throw data_error("lexicon has no concepts: " + path.string());
  return lexicon;
}

bool is_negation_cue(std::string_view token) {
  return kNegationCues.find(token) != kNegationCues.end();
}

bool resolve_negation(std::span<const std::string> tokens, std::size_t span_begin, int window) {
  if (span_begin > tokens.size()) throw usage_error("resolve_negation: span out of bounds");
  if (window < 1) throw usage_error("resolve_negation: window must be >= 1");
  int steps = 0;
  for (std::size_t i = span_begin; i > 0 && steps < window; --i) {
    const std::string& tok = tokens[i - 1];
    if (is_clause_boundary_token(tok)) return false;
    if (is_negation_cue(tok)) return true;
    ++steps;
  }
  return false;
}

PreparedLexicon PreparedLexicon::prepare(const Lexicon& lexicon, const EmbeddingTable& table) {
  PreparedLexicon prepared;
  prepared.lexicon = &lexicon;
  prepared.vectors.reserve(lexicon.concepts.size());
  for (const ConceptEntry& entry : lexicon.concepts) {
    auto pv = phrase_vector(entry.surface, table);
    if (pv) {
      prepared.vectors.push_back(std::move(*pv));
    } else {
      prepared.vectors.emplace_back();
      ++prepared.skipped_oov;
    }
  }
  return prepared;
}

std::vector<ConceptMatch> match_concepts(std::string_view text, const PreparedLexicon& lexicon,
                                         const EmbeddingTable& table, MatchOptions options) {
  return resolve_matches(text, tokenize(text), std::span(&lexicon, 1), table, options);
}

std::vector<ConceptMatch> match_concepts(std::string_view text, const Lexicon& lexicon,
                                         const EmbeddingTable& table, MatchOptions options) {
  PreparedLexicon prepared = PreparedLexicon::prepare(lexicon, table);
  return match_concepts(text, prepared, table, options);
}

std::string mednorm(std::string_view text, std::span<const PreparedLexicon> norm_lexicons,
                    const EmbeddingTable& table, MatchOptions options) {
  std::vector<Token> tokens = tokenize(text);
  std::vector<ConceptMatch> matches = resolve_matches(text, tokens, norm_lexicons, table, options);

  // Byte ranges to replace; whitespace-adjacent spans of the same concept
  // collapse into one replacement so re-normalizing the output is a no-op.
  struct Splice {
    std::size_t begin, end;
    const ConceptMatch* match;
  };
  std::vector<Splice> splices;
  for (const ConceptMatch& m : matches) {
    if (m.negated) continue;
    const std::size_t byte_begin = tokens[m.begin].begin;
    const std::size_t byte_end = tokens[m.end - 1].end;
    if (!splices.empty() && splices.back().match->concept_id == m.concept_id) {
      std::string_view gap = text.substr(splices.back().end, byte_begin - splices.back().end);
      if (gap.find_first_not_of(" \t") == std::string_view::npos) {
        splices.back().end = byte_end;
        continue;
      }
    }
    splices.push_back({byte_begin, byte_end, &m});
  }

  std::string out;
  out.reserve(text.size());
  std::size_t cursor = 0;
  for (const Splice& splice : splices) {
    out.append(text.substr(cursor, splice.begin - cursor));
    for (std::size_t i = 0; i < splice.match->replacement.size(); ++i) {
      if (i) out.push_back(' ');
      out.append(splice.match->replacement[i]);
    }
    cursor = splice.end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::string mednorm(std::string_view text, std::span<const Lexicon> norm_lexicons,
                    const EmbeddingTable& table, MatchOptions options) {
  std::vector<PreparedLexicon> prepared;
  prepared.reserve(norm_lexicons.size());
  for (const Lexicon& lex : norm_lexicons) prepared.push_back(PreparedLexicon::prepare(lex, table));
  return mednorm(text, prepared, table, options);
}

std::array<std::size_t, kNumPostLabels> severity_score(std::string_view text,
                                                       const PreparedLexicon& severity_lexicon,
                                                       const EmbeddingTable& table,
                                                       MatchOptions options) {
  if (!severity_lexicon.lexicon || !severity_lexicon.lexicon->is_severity_lexicon())
    throw data_error("severity_score: every lexicon entry needs a severity_category");
  std::array<std::size_t, kNumPostLabels> counts{};
  for (const ConceptMatch& m : match_concepts(text, severity_lexicon, table, options)) {
    if (m.negated) continue;
    // match carries the concept id; category lookup by id
    for (const ConceptEntry& entry : severity_lexicon.lexicon->concepts) {
      if (entry.concept_id == m.concept_id) {
        counts[static_cast<std::size_t>(*entry.severity_category)] += 1;
        break;
      }
    }
  }
  return counts;
}

}  // namespace cssrs
