#include "gradepred/eval.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace gradepred {

namespace {

using TruthIndex = std::map<std::pair<int, std::string>, const Truth*>;

TruthIndex index_truth(std::span<const Truth> truth) {
  TruthIndex index;
  for (const auto& t : truth) index[{t.year, t.student_id}] = &t;
  return index;
}

const Truth* find(const TruthIndex& index, const PredictionOutcome& o) {
  auto it = index.find({o.year, o.student_id});
  return it == index.end() ? nullptr : it->second;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void finish_confusion(MetricsReport& r) {
  r.accuracy = ratio(r.tp + r.tn, r.tp + r.tn + r.fp + r.fn);
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.fpr = ratio(r.fp, r.fp + r.tn);
  r.fnr = ratio(r.fn, r.fn + r.tp);
}

void tally(MetricsReport& r, std::size_t predicted, std::size_t actual) {
  if (predicted > kDoesPoorly || actual > kDoesPoorly) {
    throw InvalidArgument("classification metrics need binary labels");
  }
  const bool pred_pos = predicted == kDoesPoorly;
  const bool true_pos = actual == kDoesPoorly;
  if (pred_pos && true_pos) ++r.tp;
  if (pred_pos && !true_pos) ++r.fp;
  if (!pred_pos && !true_pos) ++r.tn;
  if (!pred_pos && true_pos) ++r.fn;
}

}  // namespace

MetricsReport regression_metrics(std::span<const PredictionOutcome> outcomes,
                                 std::span<const Truth> truth) {
  const TruthIndex index = index_truth(truth);
  MetricsReport r;
  double sum = 0.0;
  for (const auto& o : outcomes) {
    const Truth* t = find(index, o);
    if (!t) continue;
    if (!o.issued()) {
      ++r.not_issued;
      continue;
    }
    ++r.n;
    if (o.forced_final) ++r.forced_final;
    if (o.deferred_throughout) ++r.deferred_throughout;
    sum += std::abs(t->z - o.z_hat);
  }
  if (r.n == 0) {
    throw EmptyEvaluation("no issued predictions match the truth set");
  }
  r.mean_abs_error = sum / static_cast<double>(r.n);
  return r;
}

MetricsReport classification_metrics(std::span<const PredictionOutcome> outcomes,
                                     std::span<const Truth> truth) {
  const TruthIndex index = index_truth(truth);
  MetricsReport r;
  double sum = 0.0;
  for (const auto& o : outcomes) {
    const Truth* t = find(index, o);
    if (!t) continue;
    if (!o.issued()) {
      ++r.not_issued;
      continue;
    }
    if (!o.class_hat || !t->label) {
      throw InvalidArgument("classification metrics need predicted and true "
                            "classes for student '" + o.student_id + "'");
    }
    ++r.n;
    if (o.forced_final) ++r.forced_final;
    if (o.deferred_throughout) ++r.deferred_throughout;
    sum += std::abs(t->z - o.z_hat);
    tally(r, *o.class_hat, *t->label);
  }
  if (r.n == 0) {
    throw EmptyEvaluation("no issued predictions match the truth set");
  }
  r.mean_abs_error = sum / static_cast<double>(r.n);
  finish_confusion(r);
  return r;
}

TimelinessCurve cumulative_curve(std::span<const PredictionOutcome> outcomes,
                                 std::span<const Truth> truth, std::size_t K,
                                 CurveMode mode) {
  const TruthIndex index = index_truth(truth);
  std::vector<std::pair<const PredictionOutcome*, const Truth*>> matched;
  for (const auto& o : outcomes) {
    if (const Truth* t = find(index, o)) matched.emplace_back(&o, t);
  }

  TimelinessCurve curve;
  for (std::size_t k = 1; k <= K; ++k) {
    CurveRow row;
    row.k = k;
    MetricsReport conf;
    double err = 0.0;
    for (const auto& [o, t] : matched) {
      if (!o->issued() || o->stop_k > k) continue;
      ++row.predicted;
      err += std::abs(t->z - o->z_hat);
      if (mode == CurveMode::classification && o->class_hat && t->label) {
        tally(conf, *o->class_hat, *t->label);
      }
    }
    if (!matched.empty()) {
      row.share = static_cast<double>(row.predicted) /
                  static_cast<double>(matched.size());
    }
    if (row.predicted > 0) {
      row.mean_abs_error = err / static_cast<double>(row.predicted);
    }
    if (mode == CurveMode::classification) {
      finish_confusion(conf);
      row.accuracy = conf.accuracy;
      row.fpr = conf.fpr;
      row.fnr = conf.fnr;
    }
    curve.rows.push_back(row);
  }
  return curve;
}

std::vector<FrontierPoint> frontier_points(std::span<const SweepCell> sweep,
                                           std::span<const Truth> truth) {
  const TruthIndex index = index_truth(truth);
  std::vector<FrontierPoint> out;
  for (const auto& cell : sweep) {
    FrontierPoint p;
    p.q_th = cell.q_th;
    double stop_sum = 0.0;
    bool classified = true;
    for (const auto& o : cell.outcomes) {
      if (!o.issued() || !find(index, o)) continue;
      stop_sum += static_cast<double>(o.stop_k);
      if (!o.class_hat) classified = false;
    }
    if (classified) {
      const MetricsReport r = classification_metrics(cell.outcomes, truth);
      p.mean_abs_error = r.mean_abs_error;
      p.accuracy = r.accuracy;
      p.n = r.n;
    } else {
      const MetricsReport r = regression_metrics(cell.outcomes, truth);
      p.mean_abs_error = r.mean_abs_error;
      p.n = r.n;
    }
    p.mean_stop = stop_sum / static_cast<double>(p.n);
    out.push_back(p);
  }
  return out;
}

}  // namespace gradepred
