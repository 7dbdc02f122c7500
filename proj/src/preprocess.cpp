#include "gradepred/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace gradepred {

NormalizedYear normalize_year(std::span<const StudentRecord> raw_records,
                              const AssessmentSchedule& schedule,
                              std::optional<double> overall_std) {
  const std::size_t K = schedule.size();
  NormalizedYear out;
  out.stats.column_means.assign(K, 0.0);

  std::vector<std::size_t> present(K, 0);
  for (const auto& r : raw_records) {
    if (r.raw_scores.size() != K) {
      throw DimensionError("student '" + r.student_id +
                           "' raw score length does not match the schedule");
    }
    for (std::size_t l = 0; l < K; ++l) {
      if (r.raw_scores[l]) {
        out.stats.column_means[l] += *r.raw_scores[l];
        ++present[l];
      }
    }
  }
  for (std::size_t l = 0; l < K; ++l) {
    if (present[l] > 0) out.stats.column_means[l] /= present[l];
  }

  if (overall_std) {
    if (!(*overall_std > 0.0)) {
      throw DegenerateCohort("supplied overall standard deviation must be > 0");
    }
    out.stats.overall_std = *overall_std;
  } else {
    std::vector<double> overall;
    for (const auto& r : raw_records) {
      const bool complete =
          std::all_of(r.raw_scores.begin(), r.raw_scores.end(),
                      [](const auto& s) { return s.has_value(); });
      if (complete) overall.push_back(raw_overall_score(r, schedule));
    }
    if (overall.size() < 2) {
      throw DegenerateCohort(
          "need at least two students with complete scores to normalize a "
          "year, found " +
          std::to_string(overall.size()));
    }
    double mean = 0.0;
    for (double z : overall) mean += z;
    mean /= static_cast<double>(overall.size());
    double ss = 0.0;
    for (double z : overall) ss += (z - mean) * (z - mean);
    const double sd = std::sqrt(ss / static_cast<double>(overall.size() - 1));
    if (!(sd > 0.0)) {
      throw DegenerateCohort("all overall scores in the year are identical");
    }
    out.stats.overall_std = sd;
  }

  out.records.reserve(raw_records.size());
  for (const auto& r : raw_records) {
    StudentRecord n = r;
    n.scores.assign(K, std::nullopt);
    for (std::size_t l = 0; l < K; ++l) {
      if (r.raw_scores[l]) {
        n.scores[l] = (*r.raw_scores[l] - out.stats.column_means[l]) /
                      out.stats.overall_std;
      }
    }
    out.records.push_back(std::move(n));
  }
  return out;
}

// --- alignment -------------------------------------------------------------

AlignmentPlan::AlignmentPlan(std::vector<std::vector<std::size_t>> sources,
                             std::size_t past_size)
    : sources_(std::move(sources)), past_size_(past_size) {
  for (const auto& s : sources_) {
    if (s.empty()) throw AlignmentError("alignment slot without a source");
    for (std::size_t idx : s) {
      if (idx < 1 || idx > past_size_) {
        throw AlignmentError("alignment source " + std::to_string(idx) +
                             " outside the past schedule");
      }
    }
  }
}

bool AlignmentPlan::is_identity() const noexcept {
  if (sources_.size() != past_size_) return false;
  for (std::size_t j = 0; j < sources_.size(); ++j) {
    if (sources_[j].size() != 1 || sources_[j][0] != j + 1) return false;
  }
  return true;
}

std::vector<AlignmentStep> AlignmentPlan::steps() const {
  std::vector<AlignmentStep> out;
  std::map<std::size_t, std::size_t> uses;
  for (const auto& s : sources_) {
    if (s.size() > 1) out.emplace_back(MergeStep{s});
    if (s.size() == 1) ++uses[s[0]];
  }
  for (const auto& [idx, count] : uses) {
    if (count > 1) out.emplace_back(DuplicateStep{idx, count});
  }
  for (std::size_t j = 0; j < sources_.size(); ++j) {
    if (sources_[j].size() == 1 && sources_[j][0] != j + 1) {
      out.emplace_back(MoveStep{sources_[j][0], j + 1});
    }
  }
  return out;
}

AlignmentPlan plan_alignment(const AssessmentSchedule& past,
                             const AssessmentSchedule& current) {
  using Key = std::pair<std::string, AssessmentKind>;
  std::map<Key, std::vector<std::size_t>> past_groups;
  std::map<Key, std::vector<std::size_t>> current_groups;
  for (std::size_t i = 1; i <= past.size(); ++i) {
    const auto& a = past.at(i);
    past_groups[{a.topic, a.kind}].push_back(i);
  }
  for (std::size_t j = 1; j <= current.size(); ++j) {
    const auto& a = current.at(j);
    current_groups[{a.topic, a.kind}].push_back(j);
  }

  std::set<std::string> offending;
  for (const auto& [key, slots] : current_groups) {
    if (!past_groups.count(key)) {
      offending.insert(key.first + "/" + to_string(key.second));
    }
  }
  for (const auto& [key, members] : past_groups) {
    if (!current_groups.count(key)) {
      offending.insert(key.first + "/" + to_string(key.second));
    }
  }
  if (!offending.empty()) {
    std::string list;
    for (const auto& t : offending) list += (list.empty() ? "" : ", ") + t;
    throw AlignmentError("topics without a counterpart: " + list);
  }

  std::vector<std::vector<std::size_t>> sources(current.size());
  for (const auto& [key, slots] : current_groups) {
    const auto& members = past_groups.at(key);
    const std::size_t p = members.size();
    const std::size_t c = slots.size();
    for (std::size_t j = 0; j < c; ++j) {
      auto& src = sources[slots[j] - 1];
      if (p >= c) {
        // Contiguous block [j*p/c, (j+1)*p/c) of the past group.
        for (std::size_t m = j * p / c; m < (j + 1) * p / c; ++m) {
          src.push_back(members[m]);
        }
      } else {
        src.push_back(members[j * p / c]);
      }
    }
  }
  return AlignmentPlan(std::move(sources), past.size());
}

namespace {

std::optional<double> combine(const std::vector<std::optional<double>>& values,
                              const std::vector<std::size_t>& sources,
                              std::span<const double> weights) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t idx : sources) {
    const auto& v = values[idx - 1];
    if (!v) return std::nullopt;
    num += weights[idx - 1] * *v;
    den += weights[idx - 1];
  }
  return num / den;
}

}  // namespace

std::vector<StudentRecord> apply_alignment(
    const AlignmentPlan& plan, const AssessmentSchedule& past,
    std::span<const StudentRecord> records) {
  if (plan.past_size() != past.size()) {
    throw AlignmentError("plan was built for a different past schedule");
  }
  const auto w = past.weights();
  std::vector<StudentRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.scores.size() != past.size() || r.raw_scores.size() != past.size()) {
      throw DimensionError("student '" + r.student_id +
                           "' does not match the past schedule length");
    }
    StudentRecord a = r;
    a.scores.assign(plan.current_size(), std::nullopt);
    a.raw_scores.assign(plan.current_size(), std::nullopt);
    for (std::size_t j = 0; j < plan.current_size(); ++j) {
      a.scores[j] = combine(r.scores, plan.sources(j), w);
      a.raw_scores[j] = combine(r.raw_scores, plan.sources(j), w);
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<StudentRecord> align_schedule(
    const AssessmentSchedule& past, std::span<const StudentRecord> records,
    const AssessmentSchedule& current) {
  return apply_alignment(plan_alignment(past, current), past, records);
}

// --- classes ---------------------------------------------------------------

ClassBands::ClassBands(std::vector<double> thresholds,
                       std::vector<std::string> labels)
    : thresholds_(std::move(thresholds)), labels_(std::move(labels)) {
  if (thresholds_.empty()) {
    throw InvalidArgument("class bands need at least one threshold");
  }
  for (std::size_t i = 1; i < thresholds_.size(); ++i) {
    if (!(thresholds_[i - 1] < thresholds_[i])) {
      throw InvalidArgument("class thresholds must be strictly ascending");
    }
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i <= thresholds_.size(); ++i) {
      labels_.push_back("class" + std::to_string(i));
    }
  }
  if (labels_.size() != thresholds_.size() + 1) {
    throw InvalidArgument("class bands need exactly one more label than "
                          "thresholds");
  }
}

ClassBands ClassBands::binary(double z_th) {
  return ClassBands({z_th}, {"well", "poorly"});
}

double ClassBands::distance_to_nearest(double z) const {
  double d = std::abs(z - thresholds_.front());
  for (double t : thresholds_) d = std::min(d, std::abs(z - t));
  return d;
}

std::size_t classify_score(double z_hat, const ClassBands& bands) {
  const auto& t = bands.thresholds();
  // Number of thresholds at or below z_hat = band index from the bottom.
  const auto above = static_cast<std::size_t>(
      std::upper_bound(t.begin(), t.end(), z_hat) - t.begin());
  return t.size() - above;
}

double derive_binary_threshold(std::span<const StudentRecord> past,
                               const AssessmentSchedule& schedule,
                               const std::string& upper_grade,
                               const std::string& lower_grade) {
  double upper_sum = 0.0;
  double lower_sum = 0.0;
  std::size_t upper_n = 0;
  std::size_t lower_n = 0;
  for (const auto& r : past) {
    if (!r.letter_grade) continue;
    if (*r.letter_grade == upper_grade) {
      upper_sum += overall_score(r, schedule);
      ++upper_n;
    } else if (*r.letter_grade == lower_grade) {
      lower_sum += overall_score(r, schedule);
      ++lower_n;
    }
  }
  if (upper_n == 0 || lower_n == 0) {
    std::string missing;
    if (upper_n == 0) missing += upper_grade;
    if (lower_n == 0) missing += (missing.empty() ? "" : ", ") + lower_grade;
    throw InsufficientHistory("no past students with grade(s) " + missing);
  }
  return (upper_sum / upper_n + lower_sum / lower_n) / 2.0;
}

std::vector<StudentRecord> past_records(const CohortDataset& dataset,
                                        int current_year,
                                        std::optional<int> window) {
  std::vector<StudentRecord> out;
  for (const auto& [year, records] : dataset.years) {
    if (year >= current_year) continue;
    if (window && year < current_year - *window) continue;
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

}  // namespace gradepred
