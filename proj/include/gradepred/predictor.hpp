#pragma once

// Confidence-gated stopping rule. At each graded assessment k the student's
// prefix is compared with past students at the same k; the lowest-variance
// neighborhood supplies the residual estimate, and the prediction is issued
// as soon as its confidence clears q_th. At k = K the exact overall score is
// returned.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradepred/domain.hpp"
#include "gradepred/neighborhoods.hpp"
#include "gradepred/preprocess.hpp"

namespace gradepred {

struct PredictorConfig {
  double epsilon = kDefaultEpsilon;
  double q_th = 0.9;
  std::optional<std::size_t> max_rungs;
  // Present => classification: the stopping gate uses the distance-modified
  // confidence and outcomes carry a class index.
  std::optional<ClassBands> bands;

  void validate() const;
};

// Everything the rule computes at one assessment index.
struct StepDecision {
  std::size_t k = 0;
  bool deferred = false;  // fewer than three past students at k
  std::size_t rung = 0;   // 0-based index of the selected rung
  double radius = 0.0;
  std::size_t member_count = 0;
  double mean = 0.0;  // c_hat
  double variance = 0.0;
  double confidence = 0.0;  // unmodified q of the selected rung
  double gate = 0.0;        // q (regression) or q_bin (classification)
  double prefix = 0.0;      // sum_{l<=k} w_l a_l
  double z_hat = 0.0;       // prefix + c_hat
};

enum class OutcomeStatus { predicted, forced_final, pending, failed };

std::string to_string(OutcomeStatus status);

struct PredictionOutcome {
  std::string student_id;
  int year = 0;
  OutcomeStatus status = OutcomeStatus::pending;
  std::size_t stop_k = 0;
  double z_hat = 0.0;
  std::optional<std::size_t> class_hat;
  double confidence_at_stop = 0.0;
  double radius = 0.0;
  std::size_t member_count = 0;
  double variance = 0.0;
  bool forced_final = false;
  // Forced final reached without any usable neighborhood along the way.
  bool deferred_throughout = false;
  std::string note;

  bool issued() const noexcept {
    return status == OutcomeStatus::predicted ||
           status == OutcomeStatus::forced_final;
  }
};

// Reads only scores 1..k of `record`.
StepDecision decide_at(const StudentRecord& record, std::size_t k,
                       const KnowledgeBase& kb, const PredictorConfig& config);

// Walks k = 1, 2, ... and stops at the first gate >= q_th; never reads scores
// beyond the stop. A record whose graded prefix ends before a decision is
// returned as `pending`.
PredictionOutcome predict_student(const StudentRecord& record,
                                  const KnowledgeBase& kb,
                                  const PredictorConfig& config);

// One outcome per record, in input order. Per-student errors become `failed`
// outcomes carrying the error text.
std::vector<PredictionOutcome> predict_cohort(
    std::span<const StudentRecord> records, const KnowledgeBase& kb,
    const PredictorConfig& config);

// The q_th-independent part of a prediction: every step k = 1..K-1 that the
// graded prefix allows, plus the exact score when the record is complete.
// Resolving it at several thresholds replays the rule without recomputing
// neighborhoods.
struct DecisionStream {
  std::string student_id;
  int year = 0;
  std::size_t K = 0;
  std::vector<StepDecision> steps;
  std::optional<double> exact_z;
  std::optional<ClassBands> bands;  // as used for the gate
  std::string failure;
};

DecisionStream decision_stream(const StudentRecord& record,
                               const KnowledgeBase& kb,
                               const PredictorConfig& config);

std::vector<DecisionStream> decision_streams(
    std::span<const StudentRecord> records, const KnowledgeBase& kb,
    const PredictorConfig& config);

PredictionOutcome resolve(const DecisionStream& stream, double q_th);

}  // namespace gradepred
