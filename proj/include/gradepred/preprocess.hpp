#pragma once

// Score normalization, cross-year schedule alignment and class thresholds.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gradepred/domain.hpp"

namespace gradepred {

struct NormalizedYear {
  std::vector<StudentRecord> records;
  NormalizationStats stats;
};

// a = (a_raw - column mean) / sd(raw overall scores), with the (n-1)
// sample standard deviation. Column means use every present raw score; the
// standard deviation uses students with complete raw records unless
// `overall_std` is supplied (for a year still in progress).
NormalizedYear normalize_year(std::span<const StudentRecord> raw_records,
                              const AssessmentSchedule& schedule,
                              std::optional<double> overall_std = std::nullopt);

// --- alignment -------------------------------------------------------------

struct MergeStep {
  std::vector<std::size_t> members;  // 1-based past indices
};
struct DuplicateStep {
  std::size_t index = 0;  // 1-based past index
  std::size_t count = 0;
};
struct MoveStep {
  std::size_t from = 0;  // 1-based past index
  std::size_t to = 0;    // 1-based current slot
};
using AlignmentStep = std::variant<MergeStep, DuplicateStep, MoveStep>;

// Maps each current-year slot to the past-year assessments it is built
// from. One source is a copy, several are a weighted merge, and a source
// shared by several slots is a duplicate.
class AlignmentPlan {
 public:
  AlignmentPlan(std::vector<std::vector<std::size_t>> sources,
                std::size_t past_size);

  std::size_t current_size() const noexcept { return sources_.size(); }
  std::size_t past_size() const noexcept { return past_size_; }
  // 1-based past indices feeding current slot j (0-based).
  const std::vector<std::size_t>& sources(std::size_t j) const {
    return sources_[j];
  }
  bool is_identity() const noexcept;

  // Audit form: merges, then duplicates, then moves.
  std::vector<AlignmentStep> steps() const;

 private:
  std::vector<std::vector<std::size_t>> sources_;
  std::size_t past_size_;
};

// Derives the plan from (topic, kind) tags. Each tag group is matched in
// order; surplus past assessments are merged into contiguous blocks and
// missing ones are filled by duplication.
AlignmentPlan plan_alignment(const AssessmentSchedule& past,
                             const AssessmentSchedule& current);

// Rewrites past records onto the current schedule. Merged slots take the
// past-weight weighted mean of their members.
std::vector<StudentRecord> apply_alignment(
    const AlignmentPlan& plan, const AssessmentSchedule& past,
    std::span<const StudentRecord> records);

std::vector<StudentRecord> align_schedule(
    const AssessmentSchedule& past, std::span<const StudentRecord> records,
    const AssessmentSchedule& current);

// --- classes ---------------------------------------------------------------

// Ascending score thresholds splitting the line into L bands. Class indices
// count from the best band: index 0 is at or above the top threshold and
// index L-1 is below the lowest one. labels[i] names class i.
class ClassBands {
 public:
  ClassBands(std::vector<double> thresholds, std::vector<std::string> labels);
  static ClassBands binary(double z_th);

  std::size_t class_count() const noexcept { return labels_.size(); }
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  // Distance from z to the nearest threshold.
  double distance_to_nearest(double z) const;

 private:
  std::vector<double> thresholds_;
  std::vector<std::string> labels_;
};

inline constexpr std::size_t kDoesWell = 0;
inline constexpr std::size_t kDoesPoorly = 1;

std::size_t classify_score(double z_hat, const ClassBands& bands);

// Midpoint of the mean normalized overall scores of students holding exactly
// `upper_grade` and exactly `lower_grade`.
double derive_binary_threshold(std::span<const StudentRecord> past_records,
                               const AssessmentSchedule& schedule,
                               const std::string& upper_grade,
                               const std::string& lower_grade);

// Past-year records (years before `current_year`, optionally windowed).
std::vector<StudentRecord> past_records(const CohortDataset& dataset,
                                        int current_year,
                                        std::optional<int> window = std::nullopt);

}  // namespace gradepred
