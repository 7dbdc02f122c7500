#pragma once

// Error/accuracy metrics and the cumulative timeliness curves.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradepred/predictor.hpp"

namespace gradepred {

// Ground truth for one student: normalized overall score and, for
// classification, the true class (kDoesWell / kDoesPoorly).
struct Truth {
  std::string student_id;
  int year = 0;
  double z = 0.0;
  std::optional<std::size_t> label;
};

struct MetricsReport {
  std::size_t n = 0;              // issued predictions matched with truth
  std::size_t not_issued = 0;     // pending or failed
  std::size_t forced_final = 0;
  std::size_t deferred_throughout = 0;
  double mean_abs_error = 0.0;
  // Classification only; "does poorly" is the positive class. Ratios with a
  // zero denominator stay empty.
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> fpr;
  std::optional<double> fnr;
};

MetricsReport regression_metrics(std::span<const PredictionOutcome> outcomes,
                                 std::span<const Truth> truth);

MetricsReport classification_metrics(std::span<const PredictionOutcome> outcomes,
                                     std::span<const Truth> truth);

enum class CurveMode { regression, classification };

struct CurveRow {
  std::size_t k = 0;
  std::size_t predicted = 0;  // stop_k <= k
  double share = 0.0;
  std::optional<double> mean_abs_error;
  std::optional<double> accuracy;
  std::optional<double> fpr;
  std::optional<double> fnr;
};

struct TimelinessCurve {
  std::vector<CurveRow> rows;  // k = 1..K
};

TimelinessCurve cumulative_curve(std::span<const PredictionOutcome> outcomes,
                                 std::span<const Truth> truth, std::size_t K,
                                 CurveMode mode);

struct SweepCell {
  double q_th = 0.0;
  std::vector<PredictionOutcome> outcomes;
};

struct FrontierPoint {
  double q_th = 0.0;
  double mean_stop = 0.0;  // k-bar
  double mean_abs_error = 0.0;
  std::optional<double> accuracy;
  std::size_t n = 0;
};

std::vector<FrontierPoint> frontier_points(std::span<const SweepCell> sweep,
                                           std::span<const Truth> truth);

}  // namespace gradepred
