#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cssrs/embedding.hpp"
#include "cssrs/error.hpp"
#include "cssrs/lexicon.hpp"
#include "cssrs/rng.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace cssrs;
using test_support::fixture;
using test_support::write_temp;

namespace {

const EmbeddingTable& table() {
  static EmbeddingTable t = load_embeddings(fixture("mini_embeddings.txt"));
  return t;
}

const Lexicon& norm_lexicon() {
  static Lexicon l = load_lexicon(fixture("norm_lexicon.csv"));
  return l;
}

const Lexicon& severity_lexicon() {
  static Lexicon l = load_lexicon(fixture("severity_lexicon.csv"));
  return l;
}

// Second implementation of candidate scoring + greedy resolution, built
// n-gram-major with its own ordering code, used as the match_concepts
// oracle.
struct OracleCandidate {
  std::string concept_id;
  std::size_t begin, end;
  double sim;
  std::vector<std::string> replacement;
};

std::vector<OracleCandidate> oracle_matches(const std::string& text, const Lexicon& lexicon,
                                            const EmbeddingTable& tbl, double threshold,
                                            int max_ngram) {
  const std::vector<Token> toks = tokenize(text);
  std::vector<std::string> words;
  for (const Token& t : toks) words.push_back(t.text);

  std::vector<OracleCandidate> candidates;
  for (std::size_t begin = 0; begin < words.size(); ++begin) {
    for (std::size_t end = begin + 1; end <= words.size() && end - begin <= static_cast<std::size_t>(max_ngram);
         ++end) {
      std::vector<std::string> ngram(words.begin() + begin, words.begin() + end);
      auto pv = phrase_vector(ngram, tbl);
      if (!pv) continue;
      for (const ConceptEntry& entry : lexicon.concepts) {
        auto cv = phrase_vector(entry.surface, tbl);
        if (!cv) continue;
        double sim = cosine_similarity(*pv, *cv);
        if (sim >= threshold)
          candidates.push_back({entry.concept_id, begin, end, sim, entry.surface});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const OracleCandidate& a, const OracleCandidate& b) {
                     if (a.sim != b.sim) return a.sim > b.sim;
                     if (a.end - a.begin != b.end - b.begin) return a.end - a.begin > b.end - b.begin;
                     if (a.begin != b.begin) return a.begin < b.begin;
                     return a.concept_id < b.concept_id;
                   });
  std::vector<OracleCandidate> selected;
  std::set<std::size_t> taken;
  for (const OracleCandidate& c : candidates) {
    bool free = true;
    for (std::size_t i = c.begin; i < c.end; ++i)
      if (taken.count(i)) free = false;
    if (!free) continue;
    for (std::size_t i = c.begin; i < c.end; ++i) taken.insert(i);
    selected.push_back(c);
  }
  std::sort(selected.begin(), selected.end(),
            [](const OracleCandidate& a, const OracleCandidate& b) { return a.begin < b.begin; });
  return selected;
}

using test_support::random_fixture_post;

}  // namespace

TEST_CASE("load_embeddings basics and errors") {
  SUBCASE("two-line dim-3 file") {
    auto path = write_temp("emb", "two.txt", "alpha 1 0 0\nbeta 0 1 0\n");
    EmbeddingTable t = load_embeddings(path);
    CHECK(t.size() == 2);
    CHECK(t.dimension == 3);
    REQUIRE(t.lookup("alpha"));
    CHECK((*t.lookup("alpha"))[0] == 1.0);
    CHECK_FALSE(t.lookup("gamma"));
  }
  SUBCASE("inconsistent dimension names the line") {
    auto path = write_temp("emb", "baddim.txt", "alpha 1 0\nbeta 0 1 1\n");
    CHECK_THROWS_WITH_AS(load_embeddings(path), doctest::Contains("line 2"), Error);
  }
  SUBCASE("unparseable float") {
    auto path = write_temp("emb", "badfloat.txt", "alpha 1 zero\n");
    CHECK_THROWS_WITH_AS(load_embeddings(path), doctest::Contains("unparseable"), Error);
  }
  SUBCASE("duplicate token: last wins, counted") {
    auto path = write_temp("emb", "dup.txt", "alpha 1 0\nalpha 2 0\n");
    EmbeddingTable t = load_embeddings(path);
    CHECK(t.size() == 1);
    CHECK(t.duplicate_tokens == 1);
    CHECK((*t.lookup("alpha"))[0] == 2.0);
  }
  SUBCASE("50-token fixture lookup returns the file vector verbatim") {
    CHECK(table().size() == 50);
    auto vec = table().lookup("hopeless");
    REQUIRE(vec);
    REQUIRE(vec->size() == 9);
    CHECK((*vec)[1] == 1.0);
    for (std::size_t i = 0; i < vec->size(); ++i)
      if (i != 1) CHECK((*vec)[i] == 0.0);
  }
}

TEST_CASE("cosine_similarity") {
  std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
  std::vector<double> ex = {1, 0}, ey = {0, 1};
  CHECK(cosine_similarity(ex, ey) == doctest::Approx(0.0));
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.9746318461970762).epsilon(1e-12));
  std::vector<double> zero = {0, 0, 0};
  CHECK_THROWS_WITH_AS(cosine_similarity(a, zero), doctest::Contains("undefined similarity"),
                       Error);
  CHECK_THROWS_AS(cosine_similarity(a, ex), Error);

  SUBCASE("symmetry and scale invariance over random vectors") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> u(5), v(5);
      for (auto& x : u) x = rng.uniform(-2, 2);
      for (auto& x : v) x = rng.uniform(-2, 2);
      double k = 0.1 + rng.next_double() * 5;
      CHECK(cosine_similarity(u, v) == doctest::Approx(cosine_similarity(v, u)).epsilon(1e-12));
      std::vector<double> ku = u;
      for (auto& x : ku) x *= k;
      CHECK(cosine_similarity(u, ku) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("phrase_vector") {
  std::vector<std::string> one = {"hopeless"};
  auto v1 = phrase_vector(one, table());
  REQUIRE(v1);
  CHECK((*v1)[1] == 1.0);

  std::vector<std::string> with_oov = {"hopeless", "zzz_unknown"};
  auto v2 = phrase_vector(with_oov, table());
  REQUIRE(v2);
  CHECK(*v2 == *v1);  // mean of one available vector

  // hand arithmetic: no = 0.5*axis1, way = 1*axis1 -> mean 0.75*axis1
  std::vector<std::string> pair = {"no", "way"};
  auto v3 = phrase_vector(pair, table());
  REQUIRE(v3);
  CHECK((*v3)[1] == doctest::Approx(0.75));

  std::vector<std::string> all_oov = {"qqq", "zzz"};
  CHECK_FALSE(phrase_vector(all_oov, table()));
}

TEST_CASE("resolve_negation token rule") {
  std::vector<std::string> t1 = {"not", "hopeless"};
  CHECK(resolve_negation(t1, 1, 3));
  std::vector<std::string> t2 = {"hopeless"};
  CHECK_FALSE(resolve_negation(t2, 0, 3));
  // clause boundary stops the scan
  std::vector<std::string> t3 = {"not", ",", "hopeless"};
  CHECK_FALSE(resolve_negation(t3, 2, 3));
  std::vector<std::string> t4 = {"never", "but", "hopeless"};
  CHECK_FALSE(resolve_negation(t4, 2, 3));
  // window limit: cue 4 tokens back is out of a window of 3
  std::vector<std::string> t5 = {"not", "a", "b", "c", "hopeless"};
  CHECK_FALSE(resolve_negation(t5, 4, 3));
  CHECK(resolve_negation(t5, 4, 4));
  // manual trace: "sad , but never happy . hopeless"
  std::vector<std::string> t6 = {"sad", ",", "but", "never", "happy", ".", "hopeless"};
  CHECK(resolve_negation(t6, 4, 3));        // "happy" sees "never"
  CHECK_FALSE(resolve_negation(t6, 6, 3));  // "hopeless" blocked by "."
  CHECK_FALSE(resolve_negation(t6, 0, 3));  // nothing precedes "sad"
}

TEST_CASE("match_concepts basics") {
  MatchOptions options;
  SUBCASE("text equal to a concept surface matches at similarity 1") {
    auto matches = match_concepts("hopeless", norm_lexicon(), table(), options);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].concept_id == "twadr-hopeless");
    CHECK(matches[0].similarity == doctest::Approx(1.0));
    CHECK_FALSE(matches[0].negated);
  }
  SUBCASE("negation window marks the match") {
    auto matches = match_concepts("I am not hopeless", norm_lexicon(), table(), options);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].concept_id == "twadr-hopeless");
    CHECK(matches[0].negated);
  }
  SUBCASE("empty text yields no matches") {
    CHECK(match_concepts("", norm_lexicon(), table(), options).empty());
  }
  SUBCASE("threshold outside (0,1] is rejected") {
    options.threshold = 0.0;
    CHECK_THROWS_AS(match_concepts("hopeless", norm_lexicon(), table(), options), Error);
    options.threshold = 1.5;
    CHECK_THROWS_AS(match_concepts("hopeless", norm_lexicon(), table(), options), Error);
  }
}

TEST_CASE("match_concepts equals the exhaustive-scan oracle on random fixtures") {
  Rng rng(4242);
  MatchOptions options;
  for (int trial = 0; trial < 60; ++trial) {
    const std::string text = random_fixture_post(rng);
    const Lexicon& lex = trial % 2 ? norm_lexicon() : severity_lexicon();
    options.threshold = trial % 3 == 0 ? 0.9 : 0.6;
    auto got = match_concepts(text, lex, table(), options);
    auto expected = oracle_matches(text, lex, table(), options.threshold, options.max_ngram);
    REQUIRE_MESSAGE(got.size() == expected.size(), "text: ", text);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].concept_id == expected[i].concept_id);
      CHECK(got[i].begin == expected[i].begin);
      CHECK(got[i].end == expected[i].end);
      CHECK(got[i].similarity == doctest::Approx(expected[i].sim).epsilon(1e-12));
    }
  }
}

TEST_CASE("threshold monotonicity: raising the threshold never adds matches") {
  Rng rng(777);
  MatchOptions low, high;
  for (int trial = 0; trial < 50; ++trial) {
    const std::string text = random_fixture_post(rng);
    low.threshold = 0.6;
    high.threshold = 0.6 + 0.1 * (1 + rng.next_below(4));  // 0.7 .. 1.0
    auto low_matches = match_concepts(text, norm_lexicon(), table(), low);
    auto high_matches = match_concepts(text, norm_lexicon(), table(), high);
    CHECK(high_matches.size() <= low_matches.size());
    // every high-threshold match appears identically at the low threshold
    for (const ConceptMatch& hm : high_matches) {
      bool found = false;
      for (const ConceptMatch& lm : low_matches) {
        if (lm.concept_id == hm.concept_id && lm.begin == hm.begin && lm.end == hm.end)
          found = true;
      }
      CHECK_MESSAGE(found, "missing match of ", hm.concept_id, " in: ", text);
    }
  }
}

TEST_CASE("threshold 1.0 returns only exact-vector matches") {
  MatchOptions exact;
  exact.threshold = 1.0;
  auto matches = match_concepts("i am hopeless and exhausted", norm_lexicon(), table(), exact);
  for (const ConceptMatch& m : matches) CHECK(m.similarity == doctest::Approx(1.0));
  CHECK(matches.size() >= 1);
}

TEST_CASE("mednorm reproduces the P1/P2 transforms") {
  std::vector<Lexicon> lexicons = {norm_lexicon()};
  std::span<const Lexicon> span(lexicons);
  MatchOptions options;

  const std::string p1 = mednorm("I am sick of loss and need a way out", span, table(), options);
  CHECK(p1 == "I am helpless and hopeless");
  const std::string p2 = mednorm("No way out, I am tired of my losses", span, table(), options);
  CHECK(p2 == "hopeless, I am helpless");

  // identical concept multisets for the two paraphrases
  auto concepts_of = [&](const std::string& text) {
    std::multiset<std::string> ids;
    for (const ConceptMatch& m : match_concepts(text, norm_lexicon(), table(), options))
      if (!m.negated) ids.insert(m.concept_id);
    return ids;
  };
  CHECK(concepts_of("I am sick of loss and need a way out") ==
        concepts_of("No way out, I am tired of my losses"));

  SUBCASE("no matches leaves text unchanged") {
    const std::string text = "I am the one";
    CHECK(mednorm(text, span, table(), options) == text);
  }
  SUBCASE("negated matches are not replaced") {
    CHECK(mednorm("I am not hopeless", span, table(), options) == "I am not hopeless");
  }
  SUBCASE("idempotent on its own output") {
    Rng rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
      const std::string text = random_fixture_post(rng);
      const std::string once = mednorm(text, span, table(), options);
      CHECK(mednorm(once, span, table(), options) == once);
    }
  }
}

TEST_CASE("severity_score counts non-negated matches per category") {
  PreparedLexicon prepared = PreparedLexicon::prepare(severity_lexicon(), table());
  MatchOptions options;
  SUBCASE("empty text is all zero") {
    auto counts = severity_score("", prepared, table(), options);
    for (std::size_t c : counts) CHECK(c == 0);
  }
  SUBCASE("one behavior concept") {
    auto counts = severity_score("cutting", prepared, table(), options);
    CHECK(counts[static_cast<int>(PostLabel::Behavior)] == 1);
    CHECK(counts[static_cast<int>(PostLabel::Supportive)] == 0);
    CHECK(counts[static_cast<int>(PostLabel::Ideation)] == 0);
    CHECK(counts[static_cast<int>(PostLabel::Attempt)] == 0);
  }
  SUBCASE("negated matches are excluded") {
    auto with = severity_score("i will kill myself", prepared, table(), options);
    auto without = severity_score("i won't kill myself", prepared, table(), options);
    CHECK(with[static_cast<int>(PostLabel::Ideation)] == 1);
    CHECK(without[static_cast<int>(PostLabel::Ideation)] == 0);
  }
  SUBCASE("totals equal non-negated match_concepts counts on random fixtures") {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
      const std::string text = random_fixture_post(rng);
      auto counts = severity_score(text, prepared, table(), options);
      std::size_t total = 0;
      for (std::size_t c : counts) total += c;
      std::size_t expected = 0;
      for (const ConceptMatch& m : match_concepts(text, prepared, table(), options))
        if (!m.negated) ++expected;
      CHECK(total == expected);
    }
  }
  SUBCASE("normalization lexicon without categories is rejected") {
    PreparedLexicon norm = PreparedLexicon::prepare(norm_lexicon(), table());
    CHECK_THROWS_AS(severity_score("hopeless", norm, table(), options), Error);
  }
}

TEST_CASE("lexicon loader validates structure") {
  SUBCASE("duplicate concept ids rejected") {
    auto path = write_temp("lex", "dup.csv",
                           "concept_id,surface,severity_category,source\n"
                           "c1,alpha,,src\nc1,beta,,src\n");
    CHECK_THROWS_WITH_AS(load_lexicon(path), doctest::Contains("duplicate concept_id"), Error);
  }
  SUBCASE("empty surface rejected") {
    auto path = write_temp("lex", "empty_surface.csv",
                           "concept_id,surface,severity_category,source\nc1,,,src\n");
    CHECK_THROWS_WITH_AS(load_lexicon(path), doctest::Contains("empty surface"), Error);
  }
  SUBCASE("unknown category rejected") {
    auto path = write_temp("lex", "badcat.csv",
                           "concept_id,surface,severity_category,source\nc1,alpha,scary,src\n");
    CHECK_THROWS_WITH_AS(load_lexicon(path), doctest::Contains("severity_category"), Error);
  }
  SUBCASE("severity fixture is a severity lexicon, norm fixture is not") {
    CHECK(severity_lexicon().is_severity_lexicon());
    CHECK_FALSE(norm_lexicon().is_severity_lexicon());
  }
}
