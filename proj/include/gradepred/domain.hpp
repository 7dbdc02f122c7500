#pragma once

// Core data model: course schedules, student score records, residual and
// overall-score bookkeeping, and the cross-year knowledge base.
//
// Assessment indices `k` in this API are 1-based (k = 1..K) to match the
// grading order; containers are 0-based internally.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradepred/errors.hpp"

namespace gradepred {

inline constexpr double kBookkeepingTolerance = 1e-9;

enum class AssessmentKind { in_class, take_home };

std::string to_string(AssessmentKind kind);
AssessmentKind parse_assessment_kind(const std::string& text);

struct AssessmentDesc {
  std::string id;
  AssessmentKind kind = AssessmentKind::take_home;
  std::string topic;
  double weight = 0.0;
};

// Ordered list of graded assessments. Weights are strictly positive and sum
// to one; ids are unique. The constructor enforces both.
class AssessmentSchedule {
 public:
  AssessmentSchedule() = default;
  explicit AssessmentSchedule(std::vector<AssessmentDesc> assessments);

  std::size_t size() const noexcept { return assessments_.size(); }
  bool empty() const noexcept { return assessments_.empty(); }

  // 1-based access.
  const AssessmentDesc& at(std::size_t k) const;
  const std::vector<AssessmentDesc>& assessments() const noexcept {
    return assessments_;
  }
  std::span<const double> weights() const noexcept { return weights_; }

  // Sum of w_1..w_k.
  double prefix_weight(std::size_t k) const;

  std::optional<std::size_t> index_of(const std::string& id) const;

  friend bool operator==(const AssessmentSchedule& a,
                         const AssessmentSchedule& b);

 private:
  std::vector<AssessmentDesc> assessments_;
  std::vector<double> weights_;
};

// One student's scores in one year. `scores` holds normalized values and
// `raw_scores` the original grading units; absent entries are scores not
// yet graded (or never recorded).
struct StudentRecord {
  std::string student_id;
  int year = 1;
  std::vector<std::optional<double>> scores;
  std::vector<std::optional<double>> raw_scores;
  std::optional<std::string> letter_grade;

  bool is_complete() const noexcept;
  // Number of leading present normalized scores.
  std::size_t observed_prefix() const noexcept;
  // Copy of the record with normalized and raw scores after `k` removed.
  StudentRecord truncated(std::size_t k) const;
};

// Length-k prefix of a student's normalized scores.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::vector<double> entries);

  std::size_t k() const noexcept { return entries_.size(); }
  std::span<const double> entries() const noexcept { return entries_; }
  double operator[](std::size_t i) const { return entries_[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<double> entries_;
};

// z = sum_k w_k a_k over normalized scores.
double overall_score(const StudentRecord& record,
                     const AssessmentSchedule& schedule);

// Same sum over raw scores.
double raw_overall_score(const StudentRecord& record,
                         const AssessmentSchedule& schedule);

// c_k = sum_{l>k} w_l a_l; exactly 0 at k = K.
double residual(const StudentRecord& record, std::size_t k,
                const AssessmentSchedule& schedule);

// c_1..c_K of a complete record.
std::vector<double> residuals(const StudentRecord& record,
                              const AssessmentSchedule& schedule);

// sum_{l<=k} w_l a_l.
double prefix_score(std::span<const double> scores,
                    std::span<const double> weights, std::size_t k);

double prefix_score(const StudentRecord& record, std::size_t k,
                    const AssessmentSchedule& schedule);

FeatureVector feature_prefix(const StudentRecord& record, std::size_t k);

// Per-year affine normalization statistics.
struct NormalizationStats {
  std::vector<double> column_means;
  double overall_std = 0.0;
};

struct CohortDataset {
  AssessmentSchedule schedule;
  std::map<int, std::vector<StudentRecord>> years;
  std::map<int, NormalizationStats> normalization;

  std::size_t student_count() const noexcept;
  std::vector<int> year_list() const;
};

// A completed past-year student as stored in the knowledge base.
struct KnowledgeEntry {
  std::string student_id;
  int year = 0;
  std::vector<double> scores;     // a_1..a_K
  std::vector<double> residuals;  // c_1..c_K
  double overall = 0.0;           // z
};

// Read-only store of (feature vector, residual, overall score) triples from
// completed years. Entries are kept sorted by (year, student_id), which fixes
// the order every downstream tie-break refers to.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(AssessmentSchedule schedule)
      : schedule_(std::move(schedule)) {}
  KnowledgeBase(AssessmentSchedule schedule,
                std::vector<KnowledgeEntry> entries);

  // Year-end append of a completed cohort.
  void add_records(const std::vector<StudentRecord>& records);

  const AssessmentSchedule& schedule() const noexcept { return schedule_; }
  std::span<const KnowledgeEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Length-k prefix of entry i (the X^k member).
  std::span<const double> features(std::size_t i, std::size_t k) const;
  // c_k of entry i (the C^k member).
  double residual(std::size_t i, std::size_t k) const;

 private:
  void sort_entries();

  AssessmentSchedule schedule_;
  std::vector<KnowledgeEntry> entries_;
};

// Past-year view for predicting `current_year`: complete records of years
// current_year - window .. current_year - 1, or of every earlier year when
// `window` is empty.
KnowledgeBase knowledge_base(const CohortDataset& dataset, int current_year,
                             std::optional<int> window = std::nullopt);

}  // namespace gradepred
