#pragma once

// Synthetic cohorts: latent ability plus per-assessment noise, with optional
// drifting students, scored on a 0..100 scale and banded into letter grades.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradepred/domain.hpp"
#include "gradepred/preprocess.hpp"

namespace gradepred {

// H1 H2 H3 M H4 H5 H6 H7 P F with 20% homework split evenly, midterm 25%,
// project 15% and final 40%.
AssessmentSchedule default_schedule();

// Raw overall score cut-offs {50, 58, 63, 67, 71, 76, 82} over
// {A, B+, B, B-, C+, C, D, F}, best first.
ClassBands default_letter_bands();

struct SynthConfig {
  std::uint64_t seed = 1;
  int first_year = 1;
  int years = 5;
  std::size_t students_min = 80;
  std::size_t students_max = 80;
  AssessmentSchedule schedule = default_schedule();
  double ability_std = 1.0;
  double noise_take_home = 0.8;
  double noise_in_class = 0.3;
  double trend_fraction = 0.1;
  double trend_slope = 1.0;  // drift runs from -slope to +slope (or reverse)
  double score_mean = 70.0;
  double score_scale = 10.0;
  ClassBands grade_bands = default_letter_bands();

  void validate() const;
};

// Scores are clamp(mean + scale (theta + drift_l + noise_l), 0, 100) rounded
// to 0.01, then normalized per year.
CohortDataset generate(const SynthConfig& config);

struct CorrelationRow {
  std::string id;
  std::optional<double> with_overall;
  std::optional<double> with_final;  // against the last assessment
};

// Sample Pearson correlation of each normalized assessment column with the
// overall score and with the last assessment, pooled over all complete
// records. A zero-variance column yields an absent coefficient.
std::vector<CorrelationRow> correlation_table(const CohortDataset& dataset);

std::optional<double> pearson(std::span<const double> a,
                              std::span<const double> b);

}  // namespace gradepred
