#pragma once

// Threshold learning: replay the stopping rule over completed years for a
// grid of confidence thresholds and keep the one that reaches the coverage
// and error targets earliest.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gradepred/eval.hpp"
#include "gradepred/predictor.hpp"

namespace gradepred {

struct CalibrationTarget {
  double p_min = 0.8;
  double e_max = 0.5;
  double q_th_0 = 0.9;
  std::vector<double> grid = default_grid();

  // {0.00, 0.05, ..., 1.00}
  static std::vector<double> default_grid();
  void validate() const;
};

// How a year is replayed: the predictor parameters (its q_th is ignored), the
// knowledge-base window and, for classification, how class bands are set.
struct ReplaySettings {
  double epsilon = kDefaultEpsilon;
  std::optional<std::size_t> max_rungs;
  std::optional<int> window;

  bool classification = false;
  // Fixed bands; when empty in classification mode the binary threshold is
  // re-derived each year from past letter grades.
  std::optional<ClassBands> bands;
  std::string upper_grade = "B-";
  std::string lower_grade = "C+";
};

// Bands in force when predicting `year` (empty in regression mode).
std::optional<ClassBands> bands_for_year(const CohortDataset& dataset, int year,
                                         const ReplaySettings& settings);

// Truth for the records of `year`; labels follow bands_for_year.
std::vector<Truth> truth_for_year(const CohortDataset& dataset, int year,
                                  const ReplaySettings& settings);

// q_th-independent decision streams of one year, predicted from earlier years.
struct YearReplay {
  int year = 0;
  std::vector<DecisionStream> streams;
  std::vector<Truth> truth;
};

// Caches one YearReplay per year; every year is predicted from strictly
// earlier years, so the cache is valid for any calibration horizon.
class ReplayCache {
 public:
  ReplayCache(const CohortDataset& dataset, ReplaySettings settings);

  const YearReplay& year(int y);
  const CohortDataset& dataset() const noexcept { return *dataset_; }
  const ReplaySettings& settings() const noexcept { return settings_; }

 private:
  const CohortDataset* dataset_;
  ReplaySettings settings_;
  std::map<int, YearReplay> cache_;
};

std::vector<PredictionOutcome> resolve_all(const std::vector<DecisionStream>& streams,
                                           double q_th);

struct FrontierRow {
  double q_th = 0.0;
  // Earliest k by which at least p_min of the students are predicted.
  std::size_t k_time = 0;
  double p = 0.0;      // share predicted by k_time
  double error = 0.0;  // E over those students (misclassification rate in
                       // classification mode)
  double mean_stop = 0.0;  // k-bar over all issued predictions
  double error_all = 0.0;  // E over all issued predictions
  std::size_t n = 0;
  bool feasible = false;
};

struct CalibrationResult {
  int year = 0;  // last year of the history used
  double q_th = 0.0;
  std::size_t k_y = 0;
  bool feasible = false;
  std::vector<FrontierRow> frontier;
  std::vector<int> replayed_years;
};

// Evaluates one grid candidate over pooled replay outcomes.
FrontierRow evaluate_candidate(double q_th,
                               const std::vector<PredictionOutcome>& outcomes,
                               const std::vector<Truth>& truth, std::size_t K,
                               const CalibrationTarget& target,
                               bool classification);

// Picks the feasible row with the smallest k-bar (ties: smaller error, then
// larger q_th). Without a feasible row, the row with the smallest error.
std::size_t select_threshold(const std::vector<FrontierRow>& frontier);

// Uses every year <= through_year that has at least one earlier year.
// Throws CalibrationError when no such year exists.
CalibrationResult calibrate_year(ReplayCache& cache, int through_year,
                                 const CalibrationTarget& target);
CalibrationResult calibrate_year(const CohortDataset& history, int through_year,
                                 const CalibrationTarget& target,
                                 const ReplaySettings& settings);

struct YearRun {
  int year = 0;
  double q_th_used = 0.0;
  std::optional<CalibrationResult> calibration;  // learned from years < year
  std::vector<PredictionOutcome> outcomes;
  std::vector<Truth> truth;
};

// Predicts each year with the threshold learned from all earlier years, or
// with q_th_0 while fewer than two earlier years exist.
std::vector<YearRun> run_yearly(const CohortDataset& dataset,
                                const CalibrationTarget& target,
                                const ReplaySettings& settings);

// Frontier of the pooled replay of `years` for every threshold in `grid`.
std::vector<SweepCell> sweep(ReplayCache& cache, const std::vector<int>& years,
                             const std::vector<double>& grid);

}  // namespace gradepred
