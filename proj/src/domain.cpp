#include "gradepred/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

namespace gradepred {

namespace {

std::string join_indices(const std::vector<std::size_t>& indices) {
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(indices[i]);
  }
  return out;
}

void check_length(const StudentRecord& record,
                  const AssessmentSchedule& schedule) {
  if (record.scores.size() != schedule.size()) {
    throw DimensionError("student '" + record.student_id + "' has " +
                         std::to_string(record.scores.size()) +
                         " score slots, schedule has " +
                         std::to_string(schedule.size()));
  }
}

void require_present(const StudentRecord& record, std::size_t first,
                     std::size_t last) {
  std::vector<std::size_t> missing;
  for (std::size_t l = first; l <= last; ++l) {
    if (l > record.scores.size() || !record.scores[l - 1]) missing.push_back(l);
  }
  if (!missing.empty()) {
    throw MissingScores("student '" + record.student_id +
                        "' is missing scores at assessments " +
                        join_indices(missing));
  }
}

}  // namespace

std::string to_string(AssessmentKind kind) {
  return kind == AssessmentKind::in_class ? "in_class" : "take_home";
}

AssessmentKind parse_assessment_kind(const std::string& text) {
  if (text == "in_class") return AssessmentKind::in_class;
  if (text == "take_home") return AssessmentKind::take_home;
  throw InvalidSchedule("unknown assessment kind '" + text +
                        "' (expected in_class or take_home)");
}

AssessmentSchedule::AssessmentSchedule(std::vector<AssessmentDesc> assessments)
    : assessments_(std::move(assessments)) {
  if (assessments_.empty()) {
    throw InvalidSchedule("schedule must contain at least one assessment");
  }
  std::set<std::string> ids;
  double total = 0.0;
  for (const auto& a : assessments_) {
    if (!(a.weight > 0.0) || a.weight > 1.0) {
      throw InvalidSchedule("assessment '" + a.id +
                            "' has weight outside (0, 1]");
    }
    if (!ids.insert(a.id).second) {
      throw InvalidSchedule("duplicate assessment id '" + a.id + "'");
    }
    total += a.weight;
    weights_.push_back(a.weight);
  }
  if (std::abs(total - 1.0) > kBookkeepingTolerance) {
    throw WeightSumError("assessment weights sum to " + std::to_string(total) +
                         ", expected 1");
  }
}

const AssessmentDesc& AssessmentSchedule::at(std::size_t k) const {
  if (k < 1 || k > assessments_.size()) {
    throw IndexError("assessment index " + std::to_string(k) +
                     " outside 1.." + std::to_string(assessments_.size()));
  }
  return assessments_[k - 1];
}

double AssessmentSchedule::prefix_weight(std::size_t k) const {
  if (k > weights_.size()) {
    throw IndexError("assessment index " + std::to_string(k) +
                     " outside 0.." + std::to_string(weights_.size()));
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < k; ++l) sum += weights_[l];
  return sum;
}

std::optional<std::size_t> AssessmentSchedule::index_of(
    const std::string& id) const {
  for (std::size_t i = 0; i < assessments_.size(); ++i) {
    if (assessments_[i].id == id) return i + 1;
  }
  return std::nullopt;
}

bool operator==(const AssessmentSchedule& a, const AssessmentSchedule& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.assessments_[i];
    const auto& y = b.assessments_[i];
    if (x.id != y.id || x.kind != y.kind || x.topic != y.topic ||
        x.weight != y.weight) {
      return false;
    }
  }
  return true;
}

bool StudentRecord::is_complete() const noexcept {
  return std::all_of(scores.begin(), scores.end(),
                     [](const auto& s) { return s.has_value(); });
}

std::size_t StudentRecord::observed_prefix() const noexcept {
  std::size_t k = 0;
  while (k < scores.size() && scores[k]) ++k;
  return k;
}

StudentRecord StudentRecord::truncated(std::size_t k) const {
  StudentRecord out = *this;
  for (std::size_t l = k; l < out.scores.size(); ++l) out.scores[l].reset();
  for (std::size_t l = k; l < out.raw_scores.size(); ++l) {
    out.raw_scores[l].reset();
  }
  return out;
}

FeatureVector::FeatureVector(std::vector<double> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw IndexError("feature vector needs at least one entry (k >= 1)");
  }
}

double overall_score(const StudentRecord& record,
                     const AssessmentSchedule& schedule) {
  check_length(record, schedule);
  require_present(record, 1, schedule.size());
  const auto w = schedule.weights();
  double z = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) z += w[l] * *record.scores[l];
  return z;
}

double raw_overall_score(const StudentRecord& record,
                         const AssessmentSchedule& schedule) {
  if (record.raw_scores.size() != schedule.size()) {
    throw DimensionError("student '" + record.student_id +
                         "' raw score length does not match the schedule");
  }
  std::vector<std::size_t> missing;
  for (std::size_t l = 0; l < record.raw_scores.size(); ++l) {
    if (!record.raw_scores[l]) missing.push_back(l + 1);
  }
  if (!missing.empty()) {
    throw MissingScores("student '" + record.student_id +
                        "' is missing raw scores at assessments " +
                        join_indices(missing));
  }
  const auto w = schedule.weights();
  double z = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) z += w[l] * *record.raw_scores[l];
  return z;
}

double residual(const StudentRecord& record, std::size_t k,
                const AssessmentSchedule& schedule) {
  const std::size_t K = schedule.size();
  if (k < 1 || k > K) {
    throw IndexError("residual index " + std::to_string(k) + " outside 1.." +
                     std::to_string(K));
  }
  check_length(record, schedule);
  if (k == K) return 0.0;
  require_present(record, k + 1, K);
  const auto w = schedule.weights();
  double c = 0.0;
  for (std::size_t l = k; l < K; ++l) c += w[l] * *record.scores[l];
  return c;
}

std::vector<double> residuals(const StudentRecord& record,
                              const AssessmentSchedule& schedule) {
  std::vector<double> out(schedule.size());
  for (std::size_t k = 1; k <= schedule.size(); ++k) {
    out[k - 1] = residual(record, k, schedule);
  }
  return out;
}

double prefix_score(std::span<const double> scores,
                    std::span<const double> weights, std::size_t k) {
  double sum = 0.0;
  for (std::size_t l = 0; l < k; ++l) sum += weights[l] * scores[l];
  return sum;
}

double prefix_score(const StudentRecord& record, std::size_t k,
                    const AssessmentSchedule& schedule) {
  const FeatureVector x = feature_prefix(record, k);
  return prefix_score(x.entries(), schedule.weights(), k);
}

FeatureVector feature_prefix(const StudentRecord& record, std::size_t k) {
  if (k < 1 || k > record.scores.size()) {
    throw IndexError("feature prefix length " + std::to_string(k) +
                     " outside 1.." + std::to_string(record.scores.size()));
  }
  require_present(record, 1, k);
  std::vector<double> entries(k);
  for (std::size_t l = 0; l < k; ++l) entries[l] = *record.scores[l];
  return FeatureVector(std::move(entries));
}

std::size_t CohortDataset::student_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [year, records] : years) n += records.size();
  return n;
}

std::vector<int> CohortDataset::year_list() const {
  std::vector<int> out;
  for (const auto& [year, records] : years) out.push_back(year);
  return out;
}

KnowledgeBase::KnowledgeBase(AssessmentSchedule schedule,
                             std::vector<KnowledgeEntry> entries)
    : schedule_(std::move(schedule)), entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.scores.size() != schedule_.size() ||
        e.residuals.size() != schedule_.size()) {
      throw DimensionError("knowledge entry '" + e.student_id +
                           "' does not match the schedule length");
    }
  }
  sort_entries();
}

void KnowledgeBase::add_records(const std::vector<StudentRecord>& records) {
  for (const auto& r : records) {
    KnowledgeEntry e;
    e.student_id = r.student_id;
    e.year = r.year;
    e.overall = overall_score(r, schedule_);
    e.residuals = gradepred::residuals(r, schedule_);
    e.scores.reserve(r.scores.size());
    for (const auto& s : r.scores) e.scores.push_back(*s);
    entries_.push_back(std::move(e));
  }
  sort_entries();
}

std::span<const double> KnowledgeBase::features(std::size_t i,
                                                std::size_t k) const {
  return std::span<const double>(entries_[i].scores).first(k);
}

double KnowledgeBase::residual(std::size_t i, std::size_t k) const {
  return entries_[i].residuals[k - 1];
}

void KnowledgeBase::sort_entries() {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const KnowledgeEntry& a, const KnowledgeEntry& b) {
                     return std::tie(a.year, a.student_id) <
                            std::tie(b.year, b.student_id);
                   });
}

KnowledgeBase knowledge_base(const CohortDataset& dataset, int current_year,
                             std::optional<int> window) {
  if (window && *window < 1) {
    throw InvalidArgument("knowledge-base window must be at least one year");
  }
  KnowledgeBase kb(dataset.schedule);
  const int first = window ? current_year - *window
                           : std::numeric_limits<int>::min();
  for (const auto& [year, records] : dataset.years) {
    if (year >= current_year || year < first) continue;
    std::vector<StudentRecord> complete;
    for (const auto& r : records) {
      if (r.is_complete()) complete.push_back(r);
    }
    kb.add_records(complete);
  }
  return kb;
}

}  // namespace gradepred
