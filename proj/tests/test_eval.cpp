#include <doctest.h>

#include "gradepred/eval.hpp"

using namespace gradepred;

namespace {

PredictionOutcome issued(const std::string& id, std::size_t k, double z_hat,
                         std::optional<std::size_t> cls = std::nullopt,
                         bool forced = false) {
  PredictionOutcome o;
  o.student_id = id;
  o.year = 1;
  o.status = forced ? OutcomeStatus::forced_final : OutcomeStatus::predicted;
  o.forced_final = forced;
  o.stop_k = k;
  o.z_hat = z_hat;
  o.class_hat = cls;
  return o;
}

Truth truth(const std::string& id, double z, std::optional<std::size_t> label = std::nullopt) {
  return Truth{id, 1, z, label};
}

}  // namespace

TEST_CASE("regression metrics") {
  std::vector<PredictionOutcome> o = {issued("a", 1, 0.1), issued("b", 2, 0.7)};
  std::vector<Truth> t = {truth("a", 0.0), truth("b", 0.4)};
  const auto r = regression_metrics(o, t);
  CHECK(r.n == 2);
  CHECK(r.mean_abs_error == doctest::Approx(0.2));

  std::vector<PredictionOutcome> exact = {issued("a", 3, 0.0, std::nullopt, true)};
  const auto f = regression_metrics(exact, t);
  CHECK(f.mean_abs_error == 0.0);
  CHECK(f.forced_final == 1);

  PredictionOutcome pending;
  pending.student_id = "b";
  pending.year = 1;
  std::vector<PredictionOutcome> with_pending = {issued("a", 1, 0.0), pending};
  CHECK(regression_metrics(with_pending, t).not_issued == 1);

  std::vector<Truth> other = {truth("zzz", 0.0)};
  CHECK_THROWS_AS(regression_metrics(o, other), EmptyEvaluation);
}

TEST_CASE("classification metrics on a hand-tabulated fixture") {
  // (predicted, actual): TP x2, FP x1, TN x3, FN x2
  const std::vector<std::pair<std::size_t, std::size_t>> cells = {
      {1, 1}, {1, 1}, {1, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 1}, {0, 1}};
  std::vector<PredictionOutcome> o;
  std::vector<Truth> t;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string id = "s" + std::to_string(i);
    o.push_back(issued(id, 1, 0.0, cells[i].first));
    t.push_back(truth(id, 0.0, cells[i].second));
  }
  const auto r = classification_metrics(o, t);
  CHECK(r.tp == 2);
  CHECK(r.fp == 1);
  CHECK(r.tn == 3);
  CHECK(r.fn == 2);
  CHECK(*r.accuracy == doctest::Approx(5.0 / 8.0));
  CHECK(*r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(*r.recall == doctest::Approx(0.5));
  CHECK(*r.fpr == doctest::Approx(0.25));
  CHECK(*r.fnr == doctest::Approx(1.0 - *r.recall));
}

TEST_CASE("classification metrics: degenerate and perfect predictors") {
  std::vector<PredictionOutcome> o = {issued("a", 1, 0, 0), issued("b", 1, 0, 0)};
  std::vector<Truth> t = {truth("a", 0, 0), truth("b", 0, 1)};
  const auto r = classification_metrics(o, t);
  CHECK(*r.recall == 0.0);
  CHECK(*r.accuracy == 0.5);
  CHECK_FALSE(r.precision.has_value());

  std::vector<PredictionOutcome> p = {issued("a", 1, 0, 0), issued("b", 1, 0, 1)};
  const auto perfect = classification_metrics(p, t);
  CHECK(*perfect.accuracy == 1.0);
  CHECK(*perfect.fpr == 0.0);
  CHECK(*perfect.fnr == 0.0);

  std::vector<Truth> three = {truth("a", 0, 2), truth("b", 0, 1)};
  CHECK_THROWS_AS(classification_metrics(p, three), InvalidArgument);
}

TEST_CASE("cumulative curve") {
  std::vector<PredictionOutcome> all_k = {issued("a", 3, 0.0, std::nullopt, true),
                                          issued("b", 3, 0.4, std::nullopt, true)};
  std::vector<Truth> t = {truth("a", 0.0), truth("b", 0.4)};
  const auto step = cumulative_curve(all_k, t, 3, CurveMode::regression);
  REQUIRE(step.rows.size() == 3);
  CHECK(step.rows[0].share == 0.0);
  CHECK(step.rows[1].share == 0.0);
  CHECK(step.rows[2].share == 1.0);
  CHECK_FALSE(step.rows[0].mean_abs_error.has_value());

  std::vector<PredictionOutcome> mixed = {issued("a", 1, 0.1), issued("b", 3, 0.4, std::nullopt, true)};
  const auto c = cumulative_curve(mixed, t, 3, CurveMode::regression);
  CHECK(c.rows[0].share == 0.5);
  CHECK(*c.rows[0].mean_abs_error == doctest::Approx(0.1));
  CHECK(*c.rows[2].mean_abs_error == doctest::Approx(0.05));
  for (std::size_t k = 1; k < c.rows.size(); ++k) {
    CHECK(c.rows[k].share >= c.rows[k - 1].share);
  }
}

TEST_CASE("frontier points") {
  std::vector<Truth> t = {truth("a", 0.3)};
  std::vector<SweepCell> one = {{0.5, {issued("a", 2, 0.1)}}};
  const auto p = frontier_points(one, t);
  REQUIRE(p.size() == 1);
  CHECK(p[0].mean_stop == 2.0);
  CHECK(p[0].mean_abs_error == doctest::Approx(0.2));

  std::vector<SweepCell> forced = {{1.0, {issued("a", 4, 0.3, std::nullopt, true)}}};
  CHECK(frontier_points(forced, t)[0].mean_abs_error == 0.0);
}
