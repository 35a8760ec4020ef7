#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "cssrs/error.hpp"
#include "cssrs/metrics.hpp"
#include "cssrs/rng.hpp"
#include "support/oracles.hpp"

using namespace cssrs;

using test_support::alpha_oracle;
using test_support::auc_rank_oracle;
using test_support::oracle_class;
using test_support::OracleClassStats;

namespace {

std::vector<std::string> class_names(int k) {
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.push_back("c" + std::to_string(i));
  return names;
}

}  // namespace

TEST_CASE("compute_metrics exact cases") {
  SUBCASE("truth equals prediction gives all ones") {
    std::vector<int> truth = {0, 1, 2, 3, 2, 1};
    MetricsReport r = compute_metrics(truth, truth, class_names(4));
    CHECK(r.macro_precision == doctest::Approx(1.0));
    CHECK(r.macro_recall == doctest::Approx(1.0));
    CHECK(r.f1 == doctest::Approx(1.0));
    CHECK(r.accuracy == doctest::Approx(1.0));
    CHECK(r.ordinal_error == doctest::Approx(0.0));
  }
  SUBCASE("hand-built 4x4 example: truth (I,I,B,A) pred (I,B,B,A)") {
    // class order: S=0, I=1, B=2, A=3
    std::vector<int> truth = {1, 1, 2, 3};
    std::vector<int> pred = {1, 2, 2, 3};
    MetricsReport r = compute_metrics(truth, pred, class_names(4));
    CHECK(r.per_class[0].degenerate);
    CHECK(r.per_class[0].precision == 0.0);
    CHECK(r.per_class[0].recall == 0.0);
    CHECK(r.per_class[1].precision == doctest::Approx(1.0));
    CHECK(r.per_class[1].recall == doctest::Approx(0.5));
    CHECK(r.per_class[2].precision == doctest::Approx(0.5));
    CHECK(r.per_class[2].recall == doctest::Approx(1.0));
    CHECK(r.per_class[3].precision == doctest::Approx(1.0));
    CHECK(r.per_class[3].recall == doctest::Approx(1.0));
    CHECK(r.macro_precision == doctest::Approx(0.625));
    CHECK(r.macro_recall == doctest::Approx(0.625));
    CHECK(r.f1 == doctest::Approx(0.625));
    CHECK(r.per_class[1].support == 2);
    CHECK(r.confusion.counts[1][2] == 1);
    CHECK(r.confusion.total() == 4);
  }
  SUBCASE("length mismatch is an error") {
    CHECK_THROWS_AS(compute_metrics({0, 1}, {0}, class_names(2)), Error);
  }
  SUBCASE("label outside the class list is an error") {
    CHECK_THROWS_AS(compute_metrics({0, 5}, {0, 1}, class_names(2)), Error);
  }
}

TEST_CASE("compute_metrics equals the brute-force oracle on 1000 random cases") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_below(4));
    const std::size_t n = 1 + rng.next_below(50);
    std::vector<int> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = static_cast<int>(rng.next_below(k));
      pred[i] = static_cast<int>(rng.next_below(k));
    }
    MetricsReport r = compute_metrics(truth, pred, class_names(k));
    double sum_p = 0, sum_r = 0;
    for (int c = 0; c < k; ++c) {
      OracleClassStats s = oracle_class(truth, pred, c);
      const double precision = s.tp + s.fp == 0 ? 0.0 : double(s.tp) / double(s.tp + s.fp);
      const double recall = s.tp + s.fn == 0 ? 0.0 : double(s.tp) / double(s.tp + s.fn);
      REQUIRE(r.per_class[c].precision == precision);  // exact match
      REQUIRE(r.per_class[c].recall == recall);
      REQUIRE(r.per_class[c].support == s.support);
      sum_p += precision;
      sum_r += recall;
    }
    REQUIRE(r.macro_precision == sum_p / k);
    REQUIRE(r.macro_recall == sum_r / k);
  }
}

TEST_CASE("compute_roc") {
  SUBCASE("perfect separation gives auc 1") {
    RocCurve curve = compute_roc({true, true, false, false}, {0.9, 0.8, 0.2, 0.1}, "pos");
    CHECK(curve.auc == doctest::Approx(1.0));
    CHECK(curve.points.front() == std::pair{0.0, 0.0});
    CHECK(curve.points.back() == std::pair{1.0, 1.0});
  }
  SUBCASE("identical scores give the diagonal and auc 0.5") {
    RocCurve curve = compute_roc({true, false, true, false}, {0.5, 0.5, 0.5, 0.5}, "pos");
    CHECK(curve.auc == doctest::Approx(0.5));
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0] == std::pair{0.0, 0.0});
    CHECK(curve.points[1] == std::pair{1.0, 1.0});
  }
  SUBCASE("single-class truth is an error") {
    CHECK_THROWS_WITH_AS(compute_roc({true, true}, {0.5, 0.1}, "pos"),
                         doctest::Contains("ROC undefined"), Error);
  }
  SUBCASE("matches the pairwise rank oracle on 200 random fixtures") {
    Rng rng(202);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 4 + rng.next_below(60);
      std::vector<bool> truth(n);
      std::vector<double> score(n);
      bool any_pos = false, any_neg = false;
      for (std::size_t i = 0; i < n; ++i) {
        truth[i] = rng.next_below(2) == 1;
        // quantized scores force ties through the grouping path
        score[i] = static_cast<double>(rng.next_below(8)) / 8.0;
        (truth[i] ? any_pos : any_neg) = true;
      }
      if (!any_pos || !any_neg) {
        truth[0] = true;
        truth[n - 1] = false;
      }
      RocCurve curve = compute_roc(truth, score, "pos");
      CHECK(curve.auc == doctest::Approx(auc_rank_oracle(truth, score)).epsilon(1e-9));
    }
  }
  SUBCASE("curve invariants hold on random fixtures") {
    Rng rng(203);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 4 + rng.next_below(40);
      std::vector<bool> truth(n);
      std::vector<double> score(n);
      for (std::size_t i = 0; i < n; ++i) {
        truth[i] = rng.next_below(3) == 0;
        score[i] = rng.next_double();
      }
      truth[0] = true;
      truth[1] = false;
      RocCurve curve = compute_roc(truth, score, "pos");
      CHECK(curve.points.front() == std::pair{0.0, 0.0});
      CHECK(curve.points.back() == std::pair{1.0, 1.0});
      for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].first >= curve.points[i - 1].first);
        CHECK(curve.points[i].second >= curve.points[i - 1].second);
      }
      CHECK(curve.auc >= 0.0);
      CHECK(curve.auc <= 1.0);
    }
  }
}

TEST_CASE("krippendorff_alpha") {
  using Row = std::vector<std::optional<int>>;
  SUBCASE("perfect agreement is exactly 1") {
    std::vector<Row> m = {{1, 2, 3, 1}, {1, 2, 3, 1}, {1, 2, 3, 1}};
    CHECK(krippendorff_alpha(m) == 1.0);
  }
  SUBCASE("two annotators, items (A,A),(A,B),(B,B),(B,A)") {
    std::vector<Row> m = {{0, 0, 1, 1}, {0, 1, 1, 0}};
    const double expected = alpha_oracle(m);
    CHECK(krippendorff_alpha(m) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.125));  // hand-built coincidence matrix
  }
  SUBCASE("missing annotations are handled by pairable counting") {
    std::vector<Row> m = {{0, std::nullopt, 1}, {0, 1, std::nullopt}, {std::nullopt, 1, 1}};
    CHECK(krippendorff_alpha(m) == doctest::Approx(alpha_oracle(m)).epsilon(1e-12));
  }
  SUBCASE("no pairable values is an error") {
    std::vector<Row> m = {{0, std::nullopt}, {std::nullopt, 1}};
    CHECK_THROWS_WITH_AS(krippendorff_alpha(m), doctest::Contains("no pairable"), Error);
  }
  SUBCASE("matches the coincidence oracle on 100 random matrices") {
    Rng rng(303);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t annotators = 2 + rng.next_below(4);
      const std::size_t items = 2 + rng.next_below(12);
      const int k = 2 + static_cast<int>(rng.next_below(3));
      std::vector<Row> m(annotators, Row(items));
      bool pairable = false;
      for (std::size_t a = 0; a < annotators; ++a)
        for (std::size_t i = 0; i < items; ++i)
          if (rng.next_below(5) != 0) m[a][i] = static_cast<int>(rng.next_below(k));
      for (std::size_t i = 0; i < items; ++i) {
        int present = 0;
        for (std::size_t a = 0; a < annotators; ++a) present += m[a][i].has_value();
        if (present >= 2) pairable = true;
      }
      if (!pairable) {
        m[0][0] = 0;
        m[1][0] = 1;
      }
      CHECK(krippendorff_alpha(m) == doctest::Approx(alpha_oracle(m)).epsilon(1e-9));
    }
  }
  SUBCASE("invariant under relabeling and annotator reordering") {
    Rng rng(404);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t items = 4 + rng.next_below(10);
      std::vector<Row> m(3, Row(items));
      for (auto& row : m)
        for (auto& cell : row)
          if (rng.next_below(6) != 0) cell = static_cast<int>(rng.next_below(3));
      m[0][0] = 0;
      m[1][0] = 1;
      double base;
      try {
        base = krippendorff_alpha(m);
      } catch (const Error&) {
        continue;
      }
      // permute label names 0->7, 1->3, 2->11
      const std::map<int, int> relabel = {{0, 7}, {1, 3}, {2, 11}};
      std::vector<Row> renamed = m;
      for (auto& row : renamed)
        for (auto& cell : row)
          if (cell) cell = relabel.at(*cell);
      CHECK(krippendorff_alpha(renamed) == doctest::Approx(base).epsilon(1e-12));
      std::vector<Row> reordered = {m[2], m[0], m[1]};
      CHECK(krippendorff_alpha(reordered) == doctest::Approx(base).epsilon(1e-12));
    }
  }
  SUBCASE("duplicating an annotator never lowers alpha on agreement-only data") {
    std::vector<Row> m = {{0, 1, 2, 0}, {0, 1, 2, 0}};
    const double base = krippendorff_alpha(m);
    std::vector<Row> extended = m;
    extended.push_back(m[0]);
    CHECK(krippendorff_alpha(extended) >= base - 1e-12);
    CHECK(krippendorff_alpha(extended) == 1.0);
  }
  SUBCASE("pairwise restriction") {
    std::vector<Row> m = {{0, 0, 1}, {0, 1, 1}, {0, 0, 1}};
    CHECK(krippendorff_alpha_pairwise(m, 0, 2) == 1.0);
    CHECK(krippendorff_alpha_pairwise(m, 0, 1) ==
          doctest::Approx(alpha_oracle({m[0], m[1]})).epsilon(1e-12));
    CHECK_THROWS_AS(krippendorff_alpha_pairwise(m, 0, 0), Error);
  }
}
