#pragma once

// CSV and key=value file formats.
//
// schedule CSV: id,kind,topic,weight   (kind is in_class or take_home)
// scores CSV:   student_id,year,<assessment ids in schedule order>[,letter_grade]
//               raw scores; an empty cell is a missing score.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gradepred/benchmarks.hpp"
#include "gradepred/bounds.hpp"
#include "gradepred/calibrate.hpp"
#include "gradepred/eval.hpp"
#include "gradepred/synth.hpp"

namespace gradepred {

inline constexpr double kScheduleWeightTolerance = 1e-6;

// %.9g
std::string format_number(double x);

// Splits one CSV line. Fields may be double-quoted; "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line);

// Weights must sum to 1 within kScheduleWeightTolerance and are rescaled to
// sum to exactly 1.
AssessmentSchedule read_schedule(std::istream& in, const std::string& name);
AssessmentSchedule read_schedule_file(const std::string& path);
std::string schedule_csv(const AssessmentSchedule& schedule);

// Raw records (scores and raw_scores both hold the raw values).
std::vector<StudentRecord> read_scores(std::istream& in, const std::string& name,
                                       const AssessmentSchedule& schedule);
std::string scores_csv(const CohortDataset& dataset);

// Builds a dataset from raw records, normalizing every year.
CohortDataset build_dataset(const AssessmentSchedule& schedule,
                            std::vector<StudentRecord> raw_records);

CohortDataset ingest(const std::string& schedule_path,
                     const std::string& scores_path);

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> parse_kv(std::istream& in,
                                            const std::string& name);
std::map<std::string, std::string> read_kv_file(const std::string& path);

// Keys: seed, first_year, years, students_min, students_max, students,
// ability_std, noise_take_home, noise_in_class, trend_fraction, trend_slope,
// score_mean, score_scale, grade_thresholds, grade_labels. Unknown keys are
// rejected.
SynthConfig synth_config_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& name);

// Keys: thresholds (comma list, ascending), labels (optional comma list).
ClassBands bands_from_kv(const std::map<std::string, std::string>& kv,
                         const std::string& name);

// "a:step:b" or a comma list.
std::vector<double> parse_grid(const std::string& text);

// --- report CSVs -------------------------------------------------------------

std::string predictions_csv(const std::vector<PredictionOutcome>& outcomes);
std::string frontier_csv(const std::vector<FrontierRow>& rows);
std::string sweep_csv(const std::vector<FrontierPoint>& points);
std::string curve_csv(const TimelinessCurve& curve);
std::string bench_csv(const std::vector<BenchmarkRow>& rows);

// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace gradepred
