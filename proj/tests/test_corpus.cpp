#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "cssrs/corpus.hpp"
#include "cssrs/error.hpp"
#include "cssrs/lexicon.hpp"
#include "cssrs/synth.hpp"
#include "cssrs/text.hpp"
#include "support/test_support.hpp"

using namespace cssrs;
using test_support::make_post;
using test_support::make_user;
using test_support::write_temp;

namespace {

const char* kThreeUserJsonl =
    R"({"user_id":"u1","label":"ideation","username":"quiet_one","posts":[{"post_id":"a1","timestamp":200,"subreddit":"SuicideWatch","text":"I keep thinking about it.","label":"ideation"},{"post_id":"a2","timestamp":100,"subreddit":"depression","text":"Long day again.","label":"uninformative"}]}
{"user_id":"u2","label":"indication","username":"watcher","posts":[{"post_id":"b1","timestamp":50,"subreddit":"SuicideWatch","text":"My cousin went through this.","label":"indication"}]}
{"user_id":"u3","label":"supportive","username":"ThrowawayHelper","posts":[{"post_id":"c1","timestamp":10,"subreddit":"SuicideWatch","text":"You matter. Stay with us.","label":"supportive"}]}
)";

}  // namespace

TEST_CASE("tokenizer splits on punctuation and keeps intra-word apostrophes") {
  auto words = tokenize_words("I don't know, man... it's FINE");
  CHECK(words == std::vector<std::string>{"i", "don't", "know", "man", "it's", "fine"});
  auto tokens = tokenize("No way out, friend");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0].text == "no");
  CHECK(tokens[2].text == "out");
  CHECK(tokens[2].end == 10);  // byte span covers "out"
  CHECK(tokenize_words("").empty());
  CHECK(tokenize_words("!!! ---").empty());
}

TEST_CASE("sentence splitting follows the documented rule") {
  CHECK(count_sentences("One. Two.") == 2);
  CHECK(count_sentences("One! Two? Three.") == 3);
  CHECK(count_sentences("no terminal punctuation") == 1);
  CHECK(count_sentences("e.g. this stays one sentence.") == 1);
  CHECK(count_sentences("Saw Dr. Smith today. It went ok.") == 2);
  CHECK(count_sentences("Wait... what? Really?!") == 3);
  CHECK(count_sentences("") == 0);
  CHECK(count_sentences("...") == 0);
}

TEST_CASE("detect_throwaway is case-insensitive substring") {
  CHECK(detect_throwaway("ThrowawayAcct99"));
  CHECK_FALSE(detect_throwaway("deep_thoughts"));
  CHECK(detect_throwaway("THROWAWAY_user"));
  CHECK(detect_throwaway("my_throwaway"));
  CHECK_FALSE(detect_throwaway(""));
}

TEST_CASE("detect_throwaway equals itself under casefold") {
  Rng rng(7);
  const std::string alphabet = "abcdefghTHROWAWAYthrowaway_";
  for (int i = 0; i < 200; ++i) {
    std::string name;
    for (int j = 0; j < 12; ++j) name += alphabet[rng.next_below(alphabet.size())];
    CHECK(detect_throwaway(name) == detect_throwaway(casefold(name)));
  }
}

TEST_CASE("load_dataset jsonl drops indication users and sorts posts") {
  auto path = write_temp("corpus", "mini.jsonl", kThreeUserJsonl);
  Corpus corpus = load_dataset(path, DatasetFormat::Jsonl);
  REQUIRE(corpus.users.size() == 2);  // 3-user fixture, one indication
  CHECK(corpus.info.dropped_indication_users == 1);
  const UserRecord& u1 = corpus.users[0];
  CHECK(u1.user_id == "u1");
  REQUIRE(u1.posts.size() == 2);
  CHECK(u1.posts[0].post_id == "a2");  // timestamp 100 before 200
  CHECK(u1.posts[1].post_id == "a1");
  CHECK(u1.posts[0].is_uninformative_content);
  CHECK_FALSE(u1.posts[0].is_supportive_content);
  CHECK(corpus.users[1].is_throwaway);  // username ThrowawayHelper
}

TEST_CASE("load_dataset error paths name line and field") {
  SUBCASE("empty file") {
    auto path = write_temp("corpus", "empty.jsonl", "");
    CHECK_THROWS_WITH_AS(load_dataset(path, DatasetFormat::Jsonl),
                         doctest::Contains("no records"), Error);
  }
  SUBCASE("unknown label lists allowed values") {
    auto path = write_temp(
        "corpus", "badlabel.jsonl",
        R"({"user_id":"u","label":"angry","posts":[{"post_id":"p","timestamp":1,"subreddit":"s","text":"x","label":"ideation"}]})"
        "\n");
    try {
      load_dataset(path, DatasetFormat::Jsonl);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
      CHECK(std::string(e.what()).find("supportive") != std::string::npos);
      CHECK(e.kind() == ErrorKind::Data);
    }
  }
  SUBCASE("duplicate post_id") {
    auto path = write_temp(
        "corpus", "dup.jsonl",
        R"({"user_id":"u","label":"ideation","posts":[{"post_id":"p","timestamp":1,"subreddit":"s","text":"x","label":"ideation"},{"post_id":"p","timestamp":2,"subreddit":"s","text":"y","label":"ideation"}]})"
        "\n");
    CHECK_THROWS_WITH_AS(load_dataset(path, DatasetFormat::Jsonl),
                         doctest::Contains("duplicate post_id"), Error);
  }
  SUBCASE("malformed json names the line") {
    auto path = write_temp("corpus", "broken.jsonl", "{not json}\n");
    CHECK_THROWS_WITH_AS(load_dataset(path, DatasetFormat::Jsonl), doctest::Contains("line 1"),
                         Error);
  }
  SUBCASE("empty text rejected") {
    auto path = write_temp(
        "corpus", "blank.jsonl",
        R"({"user_id":"u","label":"ideation","posts":[{"post_id":"p","timestamp":1,"subreddit":"s","text":"   ","label":"ideation"}]})"
        "\n");
    CHECK_THROWS_WITH_AS(load_dataset(path, DatasetFormat::Jsonl), doctest::Contains("text"),
                         Error);
  }
}

TEST_CASE("csv round trip equals jsonl semantics") {
  const std::string csv =
      "user_id,username,user_label,post_id,timestamp,subreddit,post_label,text\n"
      "u1,quiet_one,ideation,a1,200,SuicideWatch,ideation,\"I keep thinking, still.\"\n"
      "u1,quiet_one,ideation,a2,100,depression,uninformative,Long day again.\n"
      "u3,ThrowawayHelper,supportive,c1,10,SuicideWatch,supportive,You matter.\n";
  auto path = write_temp("corpus", "mini.csv", csv);
  Corpus corpus = load_dataset(path, DatasetFormat::Csv);
  REQUIRE(corpus.users.size() == 2);
  CHECK(corpus.users[0].posts[0].post_id == "a2");
  CHECK(corpus.users[0].posts[1].text == "I keep thinking, still.");
  CHECK(corpus.users[1].is_throwaway);

  SUBCASE("conflicting user label is an error") {
    auto bad = write_temp("corpus", "conflict.csv",
                          "user_id,username,user_label,post_id,timestamp,subreddit,post_label,text\n"
                          "u1,n,ideation,a1,1,s,ideation,x\n"
                          "u1,n,behavior,a2,2,s,ideation,y\n");
    CHECK_THROWS_WITH_AS(load_dataset(bad, DatasetFormat::Csv),
                         doctest::Contains("conflicting"), Error);
  }
  SUBCASE("bad timestamp names the field") {
    auto bad = write_temp("corpus", "badts.csv",
                          "user_id,username,user_label,post_id,timestamp,subreddit,post_label,text\n"
                          "u1,n,ideation,a1,soon,s,ideation,x\n");
    CHECK_THROWS_WITH_AS(load_dataset(bad, DatasetFormat::Csv), doctest::Contains("timestamp"),
                         Error);
  }
}

TEST_CASE("serialize/load round trip preserves the collection") {
  auto users = make_table1_demo_corpus(7);
  std::ostringstream os;
  save_dataset_jsonl(users, os);
  auto path = write_temp("corpus", "roundtrip.jsonl", os.str());
  Corpus reloaded = load_dataset(path, DatasetFormat::Jsonl);
  REQUIRE(reloaded.users.size() == users.size());
  CHECK(reloaded.users == users);
}

TEST_CASE("dataset_stats matches hand-tallied fixture") {
  std::vector<UserRecord> users;
  users.push_back(make_user("u1", SeverityLabel::Ideation,
                            {make_post("u1", "p1", 1, "One. Two.", PostLabel::Ideation)}));
  SUBCASE("single user, single post") {
    CorpusStats stats = dataset_stats(users);
    CHECK(stats.n_users == 1);
    CHECK(stats.n_posts == 1);
    CHECK(stats.n_sentences == 2);
    CHECK(stats.avg_posts_per_user == doctest::Approx(1.0));
    CHECK(stats.avg_sentences_per_post == doctest::Approx(2.0));
  }
  SUBCASE("ten-user fixture equals manual counts") {
    for (int i = 2; i <= 10; ++i) {
      std::vector<PostRecord> posts;
      for (int p = 0; p < i; ++p) {
        posts.push_back(make_post("u" + std::to_string(i), "p" + std::to_string(i * 100 + p), p,
                                  "Sentence one. Sentence two. Three!",
                                  PostLabel::Behavior));
      }
      users.push_back(make_user("u" + std::to_string(i),
                                i % 2 ? SeverityLabel::Behavior : SeverityLabel::Supportive,
                                std::move(posts), i % 3 == 0 ? "throwaway_" : "plain"));
    }
    // posts: 1 + sum(2..10) = 55; sentences: 2 + 54*3
    CorpusStats stats = dataset_stats(users);
    CHECK(stats.n_users == 10);
    CHECK(stats.n_posts == 55);
    CHECK(stats.n_sentences == 2 + 54 * 3);
    CHECK(stats.avg_posts_per_user == doctest::Approx(5.5));
    std::size_t total = 0;
    for (auto& [label, count] : stats.user_counts_throwaway) total += count;
    for (auto& [label, count] : stats.user_counts_non_throwaway) total += count;
    CHECK(total == stats.n_users);
  }
  SUBCASE("a custom sentence splitter is honored") {
    CorpusStats stats = dataset_stats(users, [](std::string_view) { return std::size_t{1}; });
    CHECK(stats.n_sentences == stats.n_posts);
  }
  SUBCASE("empty collection is an error") {
    CHECK_THROWS_AS(dataset_stats({}), Error);
  }
}

TEST_CASE("ablation_slice semantics") {
  std::vector<UserRecord> users;
  // 5 users, 2 supportive; mixed content
  users.push_back(make_user(
      "s1", SeverityLabel::Supportive,
      {make_post("s1", "s1p1", 1, "Stay strong.", PostLabel::Supportive)}, "alpha"));
  users.push_back(make_user(
      "s2", SeverityLabel::Supportive,
      {make_post("s2", "s2p1", 1, "Here to help.", PostLabel::Supportive)}, "throwaway_2"));
  users.push_back(make_user(
      "i1", SeverityLabel::Ideation,
      {make_post("i1", "i1p1", 1, "Dark thoughts.", PostLabel::Ideation),
       make_post("i1", "i1p2", 2, "New phone advice?", PostLabel::Uninformative),
       make_post("i1", "i1p3", 3, "Encouraging someone.", PostLabel::Supportive)},
      "beta"));
  users.push_back(make_user(
      "b1", SeverityLabel::Behavior,
      {make_post("b1", "b1p1", 1, "Made a plan.", PostLabel::Behavior)}, "throwaway_b"));
  users.push_back(make_user(
      "a1", SeverityLabel::Attempt,
      {make_post("a1", "a1p1", 5, "After the attempt.", PostLabel::Attempt),
       make_post("a1", "a1p2", 9, "Unrelated chatter.", PostLabel::Uninformative)},
      "gamma"));

  SUBCASE("identity slice preserves everything") {
    SliceResult r = ablation_slice(users, {true, true, true});
    CHECK(r.users == users);
    CHECK(r.dropped_empty_users == 0);
  }
  SUBCASE("flags remove the right users and posts") {
    SliceResult no_ta = ablation_slice(users, {false, true, true});
    CHECK(no_ta.users.size() == 3);  // two throwaway users removed

    SliceResult no_su = ablation_slice(users, {true, true, false});
    CHECK(no_su.users.size() == 3);  // 5-user fixture, 2 supportive users out
    for (const UserRecord& u : no_su.users) {
      CHECK(u.user_label != SeverityLabel::Supportive);
      for (const PostRecord& p : u.posts) CHECK_FALSE(p.is_supportive_content);
    }

    SliceResult no_ui = ablation_slice(users, {true, false, true});
    CHECK(no_ui.users.size() == 5);
    for (const UserRecord& u : no_ui.users)
      for (const PostRecord& p : u.posts) CHECK_FALSE(p.is_uninformative_content);
  }
  SUBCASE("users emptied by the slice are dropped and counted") {
    std::vector<UserRecord> tiny;
    tiny.push_back(make_user(
        "x", SeverityLabel::Ideation,
        {make_post("x", "xp1", 1, "What should I watch?", PostLabel::Uninformative)}));
    SliceResult r = ablation_slice(tiny, {true, false, true});
    CHECK(r.users.empty());
    CHECK(r.dropped_empty_users == 1);
  }
  SUBCASE("idempotence and order preservation on a random corpus") {
    auto demo = make_table1_demo_corpus(11);
    for (int mask = 0; mask < 8; ++mask) {
      AblationFlags flags{(mask & 4) != 0, (mask & 2) != 0, (mask & 1) != 0};
      SliceResult once = ablation_slice(demo, flags);
      SliceResult twice = ablation_slice(once.users, flags);
      CHECK(twice.users == once.users);
      CHECK(twice.dropped_empty_users == 0);
      for (const UserRecord& u : once.users) {
        for (std::size_t i = 1; i < u.posts.size(); ++i)
          CHECK(u.posts[i - 1].timestamp <= u.posts[i].timestamp);
      }
    }
  }
  SUBCASE("throwaway delta equals the throwaway user count") {
    auto demo = make_table1_demo_corpus(13);
    std::size_t n_throwaway = 0;
    for (const UserRecord& u : demo) n_throwaway += u.is_throwaway ? 1 : 0;
    CHECK(n_throwaway == 140);  // 37+63+23+17
    SliceResult with = ablation_slice(demo, {true, true, true});
    SliceResult without = ablation_slice(demo, {false, true, true});
    CHECK(with.users.size() - without.users.size() == n_throwaway);
  }
}

TEST_CASE("zipf fit and candidate filter") {
  ZipfParams params;
  SUBCASE("planted power law recovers the knee found by an independent fit") {
    // observed f(r) = 100 / (r+2)^1.5 for ranks 1..30, with a deliberate
    // drop below tau*fit from rank 21 on
    std::vector<double> freqs;
    for (int r = 1; r <= 30; ++r) {
      double f = 100.0 / std::pow(r + 2.0, 1.5);
      if (r > 20) f *= 0.2;  // below tau = 0.5
      freqs.push_back(f);
    }
    ZipfFit fit = fit_zipf_mandelbrot(freqs, params);
    // independent oracle: dense grid least squares re-implementation
    double best_sse = 1e300, oracle_a = 0, oracle_b = 0, oracle_c = 0;
    for (double b = 0.0; b <= params.b_max + 1e-12; b += params.b_step) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = freqs.size();
      for (std::size_t i = 0; i < freqs.size(); ++i) {
        double x = std::log(i + 1.0 + b), y = std::log(freqs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
      }
      double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      double intercept = (sy - slope * sx) / n;
      double sse = 0;
      for (std::size_t i = 0; i < freqs.size(); ++i) {
        double x = std::log(i + 1.0 + b);
        double r2 = std::log(freqs[i]) - (intercept + slope * x);
        sse += r2 * r2;
      }
      if (sse < best_sse - 1e-12) {
        best_sse = sse; oracle_a = -slope; oracle_b = b; oracle_c = intercept;
      }
    }
    CHECK(fit.a == doctest::Approx(oracle_a));
    CHECK(fit.b == doctest::Approx(oracle_b));
    CHECK(fit.log_c == doctest::Approx(oracle_c));
  }

  EmbeddingTable table = load_embeddings(test_support::fixture("mini_embeddings.txt"));
  Lexicon severity = load_lexicon(test_support::fixture("severity_lexicon.csv"));

  SUBCASE("end-to-end cutoff equals the oracle on planted power-law counts") {
    // user r gets round(400 / (r+1)^1.1) matches, collapsing to 1 after
    // rank 12; texts alternate two severity concepts so every token is one
    // match (mixed bigrams fall below the threshold only via overlap).
    std::vector<PostRecord> posts;
    std::vector<double> planted;
    for (int r = 1; r <= 18; ++r) {
      double f = std::floor(400.0 / std::pow(r + 1.0, 1.1) + 0.5);
      if (r > 12) f = 1.0;
      planted.push_back(f);
      std::string text;
      for (int k = 0; k < static_cast<int>(f); ++k) {
        if (k) text += ", ";
        text += k % 2 ? "overdose" : "cutting";
      }
      char user = static_cast<char>('a' + r - 1);
      posts.push_back(make_post(std::string("u") + user, std::string("pl") + user, 1, text,
                                PostLabel::Behavior));
    }
    auto result = candidate_user_filter(posts, severity, table, params);

    // independent oracle: same least-squares fit, then the documented
    // cutoff rule applied to the planted counts
    ZipfFit fit = fit_zipf_mandelbrot(planted, params);
    std::size_t oracle_cutoff = planted.size();
    for (std::size_t i = 0; i < planted.size(); ++i) {
      double fitted = std::exp(fit.log_c - fit.a * std::log(i + 1.0 + fit.b));
      if (planted[i] < params.tau * fitted) {
        oracle_cutoff = i;
        break;
      }
    }
    CHECK(oracle_cutoff < planted.size());  // the drop must be detected
    CHECK(result.size() == oracle_cutoff);
    for (std::size_t i = 0; i < result.size(); ++i)
      CHECK(result[i] == std::string("u") + static_cast<char>('a' + i));
  }

  SUBCASE("single matching user among quiet ones is returned") {
    std::vector<PostRecord> posts;
    posts.push_back(make_post("loud", "L1", 1, "I will kill myself", PostLabel::Ideation));
    for (int i = 0; i < 11; ++i) {
      posts.push_back(make_post("quiet" + std::to_string(i), "q" + std::to_string(i), 1,
                                "the day and the day", PostLabel::Uninformative));
    }
    auto result = candidate_user_filter(posts, severity, table, params);
    REQUIRE(result.size() == 1);
    CHECK(result[0] == "loud");
  }
  SUBCASE("all-zero-match corpus yields empty result") {
    std::vector<PostRecord> posts;
    for (int i = 0; i < 12; ++i)
      posts.push_back(make_post("u" + std::to_string(i), "p" + std::to_string(i), 1,
                                "the day and the day", PostLabel::Uninformative));
    CHECK(candidate_user_filter(posts, severity, table, params).empty());
  }
  SUBCASE("fewer than 10 users is an error") {
    std::vector<PostRecord> posts;
    for (int i = 0; i < 5; ++i)
      posts.push_back(make_post("u" + std::to_string(i), "p" + std::to_string(i), 1, "hello",
                                PostLabel::Uninformative));
    CHECK_THROWS_WITH_AS(candidate_user_filter(posts, severity, table, params),
                         doctest::Contains("insufficient corpus"), Error);
  }
}
