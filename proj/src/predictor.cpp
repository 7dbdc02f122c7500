#include "gradepred/predictor.hpp"

#include <cmath>

namespace gradepred {

namespace {

PredictionOutcome stopped_outcome(const std::string& id, int year,
                                  const StepDecision& step,
                                  const std::optional<ClassBands>& bands) {
  PredictionOutcome out;
  out.student_id = id;
  out.year = year;
  out.status = OutcomeStatus::predicted;
  out.stop_k = step.k;
  out.z_hat = step.z_hat;
  out.confidence_at_stop = step.gate;
  out.radius = step.radius;
  out.member_count = step.member_count;
  out.variance = step.variance;
  if (bands) out.class_hat = classify_score(step.z_hat, *bands);
  return out;
}

PredictionOutcome final_outcome(const std::string& id, int year,
                                std::size_t K, double z, bool any_neighborhood,
                                const std::optional<ClassBands>& bands) {
  PredictionOutcome out;
  out.student_id = id;
  out.year = year;
  out.status = OutcomeStatus::forced_final;
  out.stop_k = K;
  out.z_hat = z;
  out.confidence_at_stop = 1.0;
  out.forced_final = true;
  out.deferred_throughout = !any_neighborhood && K > 1;
  if (bands) out.class_hat = classify_score(z, *bands);
  return out;
}

PredictionOutcome pending_outcome(const std::string& id, int year,
                                  std::size_t observed) {
  PredictionOutcome out;
  out.student_id = id;
  out.year = year;
  out.status = OutcomeStatus::pending;
  out.stop_k = observed;
  out.note = "awaiting assessment " + std::to_string(observed + 1);
  return out;
}

PredictionOutcome failed_outcome(const std::string& id, int year,
                                 const std::string& message) {
  PredictionOutcome out;
  out.student_id = id;
  out.year = year;
  out.status = OutcomeStatus::failed;
  out.note = message;
  return out;
}

bool clears(const StepDecision& step, double q_th) {
  return !step.deferred && step.gate >= q_th;
}

}  // namespace

void PredictorConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(q_th <= 1.0)) throw InvalidArgument("q_th must be <= 1");
  if (max_rungs && *max_rungs == 0) {
    throw InvalidArgument("max_rungs must be positive");
  }
}

std::string to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::predicted:
      return "predicted";
    case OutcomeStatus::forced_final:
      return "forced_final";
    case OutcomeStatus::pending:
      return "pending";
    case OutcomeStatus::failed:
      return "failed";
  }
  return "unknown";
}

StepDecision decide_at(const StudentRecord& record, std::size_t k,
                       const KnowledgeBase& kb, const PredictorConfig& config) {
  const AssessmentSchedule& schedule = kb.schedule();
  const FeatureVector x = feature_prefix(record, k);

  StepDecision step;
  step.k = k;
  step.prefix = prefix_score(x.entries(), schedule.weights(), k);
  if (kb.size() < kMinNeighbors) {
    step.deferred = true;
    return step;
  }

  const std::vector<double> dist = pool_distances(x.entries(), kb);
  const RadiusLadder ladder = radius_ladder(dist, config.max_rungs);
  std::vector<double> pool_residuals(kb.size());
  for (std::size_t i = 0; i < kb.size(); ++i) {
    pool_residuals[i] = kb.residual(i, k);
  }
  const auto hoods = evaluate_ladder(ladder, pool_residuals, config.epsilon);
  const std::size_t best = select_best(hoods);
  const Neighborhood& h = hoods[best];

  step.rung = best;
  step.radius = h.radius;
  step.member_count = h.count;
  step.mean = h.mean;
  step.variance = h.variance;
  step.confidence = h.confidence;
  step.z_hat = step.prefix + h.mean;
  step.gate = config.bands
                  ? binary_confidence(h.variance, config.epsilon,
                                      config.bands->distance_to_nearest(step.z_hat))
                  : h.confidence;
  return step;
}

PredictionOutcome predict_student(const StudentRecord& record,
                                  const KnowledgeBase& kb,
                                  const PredictorConfig& config) {
  config.validate();
  const std::size_t K = kb.schedule().size();
  if (record.scores.size() != K) {
    throw DimensionError("student '" + record.student_id +
                         "' does not match the schedule length");
  }
  const std::size_t observed = record.observed_prefix();
  bool any_neighborhood = false;
  for (std::size_t k = 1; k < K; ++k) {
    if (k > observed) return pending_outcome(record.student_id, record.year, observed);
    const StepDecision step = decide_at(record, k, kb, config);
    any_neighborhood = any_neighborhood || !step.deferred;
    if (clears(step, config.q_th)) {
      return stopped_outcome(record.student_id, record.year, step, config.bands);
    }
  }
  if (observed < K) return pending_outcome(record.student_id, record.year, observed);
  return final_outcome(record.student_id, record.year, K,
                       overall_score(record, kb.schedule()), any_neighborhood,
                       config.bands);
}

std::vector<PredictionOutcome> predict_cohort(
    std::span<const StudentRecord> records, const KnowledgeBase& kb,
    const PredictorConfig& config) {
  config.validate();
  std::vector<PredictionOutcome> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    try {
      out.push_back(predict_student(r, kb, config));
    } catch (const Error& e) {
      out.push_back(failed_outcome(r.student_id, r.year, e.code() + ": " + e.what()));
    }
  }
  return out;
}

DecisionStream decision_stream(const StudentRecord& record,
                               const KnowledgeBase& kb,
                               const PredictorConfig& config) {
  config.validate();
  DecisionStream stream;
  stream.student_id = record.student_id;
  stream.year = record.year;
  stream.K = kb.schedule().size();
  stream.bands = config.bands;
  try {
    if (record.scores.size() != stream.K) {
      throw DimensionError("student '" + record.student_id +
                           "' does not match the schedule length");
    }
    const std::size_t observed = record.observed_prefix();
    for (std::size_t k = 1; k < stream.K && k <= observed; ++k) {
      stream.steps.push_back(decide_at(record, k, kb, config));
    }
    if (observed == stream.K) stream.exact_z = overall_score(record, kb.schedule());
  } catch (const Error& e) {
    stream.failure = e.code() + ": " + e.what();
  }
  return stream;
}

std::vector<DecisionStream> decision_streams(
    std::span<const StudentRecord> records, const KnowledgeBase& kb,
    const PredictorConfig& config) {
  std::vector<DecisionStream> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(decision_stream(r, kb, config));
  return out;
}

PredictionOutcome resolve(const DecisionStream& stream, double q_th) {
  const auto& bands = stream.bands;
  if (!stream.failure.empty()) {
    return failed_outcome(stream.student_id, stream.year, stream.failure);
  }
  bool any_neighborhood = false;
  for (const auto& step : stream.steps) {
    any_neighborhood = any_neighborhood || !step.deferred;
    if (clears(step, q_th)) {
      return stopped_outcome(stream.student_id, stream.year, step, bands);
    }
  }
  if (!stream.exact_z) {
    return pending_outcome(stream.student_id, stream.year, stream.steps.size());
  }
  return final_outcome(stream.student_id, stream.year, stream.K, *stream.exact_z,
                       any_neighborhood, bands);
}

}  // namespace gradepred
