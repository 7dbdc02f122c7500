#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "gradepred/predictor.hpp"
#include "oracles.hpp"

using namespace gradepred;

namespace {

KnowledgeBase kb_from(const AssessmentSchedule& s,
                      const std::vector<std::vector<double>>& rows) {
  KnowledgeBase kb(s);
  std::vector<StudentRecord> records;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    records.push_back(fx::record(fx::id(i), 1, rows[i]));
  }
  kb.add_records(records);
  return kb;
}

std::vector<std::vector<double>> pool_of(const KnowledgeBase& kb) {
  std::vector<std::vector<double>> out;
  for (const auto& e : kb.entries()) out.push_back(e.scores);
  return out;
}

}  // namespace

TEST_CASE("forced final at K is exact") {
  const auto s = fx::schedule({0.3, 0.3, 0.4});
  const auto kb = kb_from(s, {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {-1, 5, 3}});
  PredictorConfig cfg;
  cfg.q_th = 1.0;
  const auto r = fx::record("x", 2, {0.5, -0.5, 1.0});
  const auto o = predict_student(r, kb, cfg);
  CHECK(o.status == OutcomeStatus::forced_final);
  CHECK(o.forced_final);
  CHECK(o.stop_k == 3);
  CHECK(o.z_hat == overall_score(r, s));
  CHECK(o.confidence_at_stop == 1.0);
  CHECK_FALSE(o.deferred_throughout);
}

TEST_CASE("zero-variance neighbors stop at k = 1") {
  const auto s = fx::schedule({0.5, 0.5});
  // Every pool member has residual 0.5 * 0.6 = 0.3 at k = 1.
  const auto kb = kb_from(s, {{0.1, 0.6}, {0.4, 0.6}, {-1.0, 0.6}, {2.0, 0.6}});
  PredictorConfig cfg;
  cfg.q_th = 0.9;
  const auto r = fx::record("x", 2, {0.2, 0.0});
  const auto o = predict_student(r, kb, cfg);
  CHECK(o.status == OutcomeStatus::predicted);
  CHECK(o.stop_k == 1);
  CHECK(o.z_hat == doctest::Approx(0.3 + 0.5 * 0.2));
}

TEST_CASE("toy knowledge base stops at k = 2 like the exhaustive replay") {
  const auto s = fx::schedule({0.2, 0.3, 0.5});
  // At k = 1 the residuals (0.3 a2 + 0.5 a3) spread widely; at k = 2 the three
  // members share a3 and only differ slightly.
  const auto kb = kb_from(s, {{0.0, 1.0, 0.10}, {0.1, -1.0, 0.12}, {0.2, 0.0, 0.14}});
  PredictorConfig cfg;
  cfg.epsilon = 0.5;
  cfg.q_th = 0.95;
  const auto r = fx::record("x", 2, {0.1, 0.0, 0.2});
  const auto o = predict_student(r, kb, cfg);
  const auto want = oracle::replay({0.1, 0.0, 0.2}, pool_of(kb),
                                   {0.2, 0.3, 0.5}, 0.5, 0.95);
  CHECK(want.k == 2);
  CHECK(o.stop_k == want.k);
  CHECK(o.z_hat == want.z_hat);
}

TEST_CASE("empty knowledge base defers to the forced final") {
  const auto s = fx::schedule({0.5, 0.5});
  KnowledgeBase kb(s);
  const auto o = predict_student(fx::record("x", 1, {1, 2}), kb, PredictorConfig{});
  CHECK(o.forced_final);
  CHECK(o.deferred_throughout);
  CHECK(o.z_hat == doctest::Approx(1.5));
}

TEST_CASE("partial records stay pending") {
  const auto s = fx::schedule({0.3, 0.3, 0.4});
  const auto kb = kb_from(s, {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}});
  PredictorConfig cfg;
  cfg.q_th = 1.0;
  const auto r = fx::record("x", 2, {0.5, -0.5, 1.0}).truncated(2);
  const auto o = predict_student(r, kb, cfg);
  CHECK(o.status == OutcomeStatus::pending);
  CHECK_FALSE(o.issued());
  CHECK(o.stop_k == 2);
}

TEST_CASE("predict_cohort") {
  const auto s = fx::schedule({0.3, 0.3, 0.4});
  const auto kb = kb_from(s, {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {0.5, 0.2, 1}});
  PredictorConfig cfg;
  CHECK(predict_cohort(std::vector<StudentRecord>{}, kb, cfg).empty());
  const auto r = fx::record("x", 2, {0.5, -0.5, 1.0});
  const auto one = predict_cohort(std::vector{r}, kb, cfg);
  REQUIRE(one.size() == 1);
  const auto single = predict_student(r, kb, cfg);
  CHECK(one[0].stop_k == single.stop_k);
  CHECK(one[0].z_hat == single.z_hat);

  const auto bad = fx::record("y", 2, {0.5});
  const auto mixed = predict_cohort(std::vector{bad, r}, kb, cfg);
  CHECK(mixed[0].status == OutcomeStatus::failed);
  CHECK(mixed[0].note.find("DimensionError") != std::string::npos);
  CHECK(mixed[1].issued());
  cfg.q_th = 1.5;
  CHECK_THROWS_AS(predict_cohort(std::vector{r}, kb, cfg), InvalidArgument);
}

TEST_CASE("streams resolve like predict_student; higher q_th never stops earlier") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t K = 2 + rep % 5;
    const auto s = fx::schedule(fx::random_weights(rng, K));
    std::vector<std::vector<double>> rows(3 + rep % 20, std::vector<double>(K));
    for (auto& row : rows)
      for (auto& v : row) v = n01(rng);
    const auto kb = kb_from(s, rows);
    std::vector<double> a(K);
    for (auto& v : a) v = n01(rng);
    const auto r = fx::record("x", 2, a);
    PredictorConfig cfg;
    if (rep % 2) cfg.bands = ClassBands::binary(0.1);
    const auto stream = decision_stream(r, kb, cfg);
    std::size_t prev = 0;
    for (double q : {0.0, 0.5, 0.8, 0.95, 1.0}) {
      cfg.q_th = q;
      const auto direct = predict_student(r, kb, cfg);
      const auto replayed = resolve(stream, q);
      CHECK(direct.stop_k == replayed.stop_k);
      CHECK(direct.z_hat == replayed.z_hat);
      CHECK(direct.class_hat == replayed.class_hat);
      CHECK(direct.stop_k >= prev);
      prev = direct.stop_k;
      const auto want = oracle::replay(
          a, pool_of(kb), std::vector<double>(s.weights().begin(), s.weights().end()),
          cfg.epsilon, q, rep % 2 ? std::optional<double>(0.1) : std::nullopt);
      CHECK(direct.stop_k == want.k);
      CHECK(direct.z_hat == want.z_hat);
    }
  }
}
