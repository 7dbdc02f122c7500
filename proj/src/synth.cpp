#include "gradepred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace gradepred {

AssessmentSchedule default_schedule() {
  const double hw = 0.2 / 7.0;
  using K = AssessmentKind;
  return AssessmentSchedule({
      {"H1", K::take_home, "homework", hw},
      {"H2", K::take_home, "homework", hw},
      {"H3", K::take_home, "homework", hw},
      {"M", K::in_class, "midterm", 0.25},
      {"H4", K::take_home, "homework", hw},
      {"H5", K::take_home, "homework", hw},
      {"H6", K::take_home, "homework", hw},
      {"H7", K::take_home, "homework", hw},
      {"P", K::take_home, "project", 0.15},
      {"F", K::in_class, "final", 0.40},
  });
}

ClassBands default_letter_bands() {
  return ClassBands({50, 58, 63, 67, 71, 76, 82},
                    {"A", "B+", "B", "B-", "C+", "C", "D", "F"});
}

void SynthConfig::validate() const {
  if (years < 1) throw InvalidArgument("years must be >= 1");
  if (students_min < 3 || students_max < students_min) {
    throw InvalidArgument("students per year must satisfy 3 <= min <= max");
  }
  if (schedule.empty()) throw InvalidArgument("schedule is empty");
  if (!(ability_std >= 0.0)) throw InvalidArgument("ability_std must be >= 0");
  if (!(noise_take_home >= 0.0) || !(noise_in_class >= 0.0)) {
    throw InvalidArgument("noise standard deviations must be >= 0");
  }
  if (!(trend_fraction >= 0.0 && trend_fraction <= 1.0)) {
    throw InvalidArgument("trend_fraction must lie in [0, 1]");
  }
  if (!(trend_slope >= 0.0)) throw InvalidArgument("trend_slope must be >= 0");
  if (!(score_scale > 0.0)) throw InvalidArgument("score_scale must be > 0");
}

namespace {

double draw_normal(std::mt19937_64& rng, double sd) {
  if (sd == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sd)(rng);
}

StudentRecord draw_student(const SynthConfig& c, int year, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(c.seed),
                    static_cast<std::uint32_t>(c.seed >> 32),
                    static_cast<std::uint32_t>(year),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  std::mt19937_64 rng(seq);
  const std::size_t K = c.schedule.size();

  const double theta = draw_normal(rng, c.ability_std);
  const bool trend =
      std::uniform_real_distribution<double>(0.0, 1.0)(rng) < c.trend_fraction;
  const double direction = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;

  StudentRecord r;
  char id[32];
  std::snprintf(id, sizeof id, "s%04zu", index + 1);
  r.student_id = id;
  r.year = year;
  r.raw_scores.resize(K);
  for (std::size_t l = 0; l < K; ++l) {
    const auto& a = c.schedule.assessments()[l];
    double drift = 0.0;
    if (trend && K > 1) {
      const double t = static_cast<double>(l) / static_cast<double>(K - 1);
      drift = direction * c.trend_slope * (2.0 * t - 1.0);
    }
    const double sd = a.kind == AssessmentKind::in_class ? c.noise_in_class
                                                          : c.noise_take_home;
    double raw = c.score_mean + c.score_scale * (theta + drift + draw_normal(rng, sd));
    raw = std::clamp(raw, 0.0, 100.0);
    r.raw_scores[l] = std::round(raw * 100.0) / 100.0;
  }
  r.scores = r.raw_scores;
  r.letter_grade = c.grade_bands.labels()[classify_score(
      raw_overall_score(r, c.schedule), c.grade_bands)];
  return r;
}

}  // namespace

CohortDataset generate(const SynthConfig& config) {
  config.validate();
  CohortDataset data;
  data.schedule = config.schedule;
  for (int y = config.first_year; y < config.first_year + config.years; ++y) {
    std::size_t n = config.students_min;
    if (config.students_max > config.students_min) {
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                        static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(y), 0xc0u};
      std::mt19937_64 rng(seq);
      n = std::uniform_int_distribution<std::size_t>(config.students_min,
                                                     config.students_max)(rng);
    }
    std::vector<StudentRecord> raw;
    raw.reserve(n);
    for (std::size_t i = 0; i < n; ++i) raw.push_back(draw_student(config, y, i));
    NormalizedYear norm = normalize_year(raw, config.schedule);
    data.years[y] = std::move(norm.records);
    data.normalization[y] = std::move(norm.stats);
  }
  return data;
}

std::optional<double> pearson(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("pearson on unequal lengths");
  const std::size_t n = a.size();
  if (n < 3) throw InvalidArgument("pearson needs at least three observations");
  auto constant = [](std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
  };
  if (constant(a) || constant(b)) return std::nullopt;
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<CorrelationRow> correlation_table(const CohortDataset& dataset) {
  const std::size_t K = dataset.schedule.size();
  std::vector<std::vector<double>> columns(K);
  std::vector<double> z;
  for (const auto& [year, records] : dataset.years) {
    for (const auto& r : records) {
      if (!r.is_complete()) continue;
      for (std::size_t l = 0; l < K; ++l) columns[l].push_back(*r.scores[l]);
      z.push_back(overall_score(r, dataset.schedule));
    }
  }
  if (z.size() < 3) {
    throw InvalidArgument("correlation table needs at least three complete students");
  }
  std::vector<CorrelationRow> out;
  for (std::size_t l = 0; l < K; ++l) {
    CorrelationRow row;
    row.id = dataset.schedule.assessments()[l].id;
    row.with_overall = pearson(columns[l], z);
    row.with_final = pearson(columns[l], columns[K - 1]);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace gradepred
