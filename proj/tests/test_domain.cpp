#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gradepred/domain.hpp"

using namespace gradepred;

TEST_CASE("schedule rejects bad weights and ids") {
  CHECK_THROWS_AS(fx::schedule({0.5, 0.4}), WeightSumError);
  CHECK_THROWS_AS(fx::schedule({}), InvalidSchedule);
  CHECK_THROWS_AS(fx::schedule({1.2, -0.2}), InvalidSchedule);
  CHECK_THROWS_AS(AssessmentSchedule({{"a", AssessmentKind::in_class, "t", 0.5},
                                      {"a", AssessmentKind::in_class, "t", 0.5}}),
                  InvalidSchedule);
  const auto s = fx::schedule({0.25, 0.75});
  CHECK(s.size() == 2);
  CHECK(s.at(2).id == "A2");
  CHECK(s.prefix_weight(1) == doctest::Approx(0.25));
  CHECK(s.index_of("A2") == 2u);
  CHECK_FALSE(s.index_of("nope").has_value());
}

TEST_CASE("assessment kind parsing") {
  CHECK(parse_assessment_kind("in_class") == AssessmentKind::in_class);
  CHECK(to_string(AssessmentKind::take_home) == "take_home");
  CHECK_THROWS_AS(parse_assessment_kind("quiz"), InvalidSchedule);
}

TEST_CASE("overall score") {
  const auto s = fx::schedule({0.2, 0.8});
  CHECK(overall_score(fx::record("a", 1, {1, 1}), s) == doctest::Approx(1.0));
  CHECK(overall_score(fx::record("a", 1, {0, 0}), s) == 0.0);
  CHECK(overall_score(fx::record("a", 1, {0.5, 1.0}), s) == doctest::Approx(0.9));

  auto r = fx::record("a", 1, {0.5, 1.0});
  r.scores[1].reset();
  CHECK_THROWS_AS(overall_score(r, s), MissingScores);
  try {
    overall_score(r, s);
  } catch (const MissingScores& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("residual") {
  const auto s = fx::schedule({0.2, 0.3, 0.5});
  const auto r = fx::record("a", 1, {9.0, 0.4, 0.8});
  CHECK(residual(r, 1, s) == doctest::Approx(0.52));
  CHECK(residual(r, 3, s) == 0.0);
  CHECK_THROWS_AS(residual(r, 0, s), IndexError);
  CHECK_THROWS_AS(residual(r, 4, s), IndexError);
}

TEST_CASE("reconstruction and telescoping on random records") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t K = 1 + rep % 9;
    const auto w = fx::random_weights(rng, K);
    const auto s = fx::schedule(w);
    std::vector<double> a(K);
    for (auto& x : a) x = n01(rng);
    const auto r = fx::record("a", 1, a);
    const double z = overall_score(r, s);
    const auto c = residuals(r, s);
    for (std::size_t k = 1; k <= K; ++k) {
      CHECK(std::abs(c[k - 1] + prefix_score(r, k, s) - z) <= kBookkeepingTolerance);
      if (k >= 2) {
        CHECK(std::abs(c[k - 2] - c[k - 1] - w[k - 1] * a[k - 1]) <=
              kBookkeepingTolerance);
      }
    }
  }
}

TEST_CASE("feature prefix") {
  const auto r = fx::record("a", 1, {0.1, 0.2, 0.3});
  CHECK(feature_prefix(r, 1).k() == 1);
  CHECK(feature_prefix(r, 3).k() == 3);
  const auto x = feature_prefix(r, 2);
  CHECK(x[0] == 0.1);
  CHECK(x[1] == 0.2);
  auto gap = r;
  gap.scores[0].reset();
  CHECK_THROWS_AS(feature_prefix(gap, 2), MissingScores);
  CHECK_THROWS_AS(feature_prefix(r, 0), IndexError);
}

TEST_CASE("record helpers") {
  auto r = fx::record("a", 1, {0.1, 0.2, 0.3});
  CHECK(r.is_complete());
  CHECK(r.observed_prefix() == 3);
  const auto t = r.truncated(1);
  CHECK(t.observed_prefix() == 1);
  CHECK_FALSE(t.is_complete());
}

TEST_CASE("knowledge base views") {
  CohortDataset d;
  d.schedule = fx::schedule({0.5, 0.5});
  for (int y = 1; y <= 7; ++y) {
    for (int i = 0; i < 3; ++i) {
      d.years[y].push_back(fx::record(fx::id(i), y, {0.1 * i, 0.2 * y}));
    }
  }
  CHECK(knowledge_base(d, 1).empty());
  const auto w1 = knowledge_base(d, 7, 1);
  CHECK(w1.size() == 3);
  for (const auto& e : w1.entries()) CHECK(e.year == 6);
  CHECK(knowledge_base(d, 3).size() == 6);
  CHECK_THROWS_AS(knowledge_base(d, 3, 0), InvalidArgument);

  // Entries are ordered by (year, student_id); incomplete records are skipped.
  d.years[1][0].scores[1].reset();
  const auto kb = knowledge_base(d, 3);
  CHECK(kb.size() == 5);
  CHECK(kb.entries()[0].student_id == "p001");
  CHECK(kb.entries()[2].year == 2);
  CHECK(kb.features(0, 1).size() == 1);
  CHECK(kb.residual(0, 2) == 0.0);
}
