#include "gradepred/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace gradepred {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::optional<double> to_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<long long> to_int(const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

bool next_line(std::istream& in, std::string& line, std::size_t& row) {
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::string opt(const std::optional<double>& v) {
  return v ? format_number(*v) : "";
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

// --- schedule ------------------------------------------------------------------

AssessmentSchedule read_schedule(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t row = 0;
  if (!next_line(in, line, row)) throw ParseError(name, 0, 0, "empty schedule file");
  const std::vector<std::string> expected = {"id", "kind", "topic", "weight"};
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header != expected) {
    throw ParseError(name, row, 0, "header must be id,kind,topic,weight");
  }

  std::vector<AssessmentDesc> items;
  std::set<std::string> seen;
  double total = 0.0;
  while (next_line(in, line, row)) {
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw ParseError(name, row, 0,
                       "expected 4 fields, found " + std::to_string(f.size()));
    }
    AssessmentDesc d;
    d.id = trim(f[0]);
    if (d.id.empty()) throw ParseError(name, row, 1, "empty assessment id");
    if (!seen.insert(d.id).second) {
      throw ParseError(name, row, 1, "duplicate assessment id '" + d.id + "'");
    }
    try {
      d.kind = parse_assessment_kind(trim(f[1]));
    } catch (const Error& e) {
      throw ParseError(name, row, 2, e.what());
    }
    d.topic = trim(f[2]);
    const auto w = to_double(f[3]);
    if (!w || !(*w > 0.0) || *w > 1.0) {
      throw ParseError(name, row, 4, "weight must be a number in (0, 1]");
    }
    d.weight = *w;
    total += *w;
    items.push_back(std::move(d));
  }
  if (items.empty()) throw ParseError(name, row, 0, "schedule has no assessments");
  if (std::abs(total - 1.0) > kScheduleWeightTolerance) {
    throw WeightSumError(name + ": weights sum to " + format_number(total) +
                         ", expected 1");
  }
  for (auto& d : items) d.weight /= total;
  return AssessmentSchedule(std::move(items));
}

AssessmentSchedule read_schedule_file(const std::string& path) {
  auto in = open_input(path);
  return read_schedule(in, path);
}

std::string schedule_csv(const AssessmentSchedule& schedule) {
  std::string out = "id,kind,topic,weight\n";
  for (const auto& a : schedule.assessments()) {
    out += csv_field(a.id) + "," + to_string(a.kind) + "," + csv_field(a.topic) +
           "," + format_number(a.weight) + "\n";
  }
  return out;
}

// --- scores ----------------------------------------------------------------------

std::vector<StudentRecord> read_scores(std::istream& in, const std::string& name,
                                       const AssessmentSchedule& schedule) {
  std::string line;
  std::size_t row = 0;
  if (!next_line(in, line, row)) throw ParseError(name, 0, 0, "empty scores file");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  const std::size_t K = schedule.size();

  if (header.size() < 2 || header[0] != "student_id" || header[1] != "year") {
    throw ParseError(name, row, 1, "header must start with student_id,year");
  }
  for (std::size_t l = 0; l < K; ++l) {
    const std::string& id = schedule.assessments()[l].id;
    if (header.size() <= l + 2 || header[l + 2] != id) {
      throw ParseError(name, row, l + 3,
                       "missing assessment column '" + id +
                           "' (columns must follow the schedule order)");
    }
  }
  bool has_grade = false;
  if (header.size() == K + 3) {
    if (header[K + 2] != "letter_grade") {
      throw ParseError(name, row, K + 3,
                       "unexpected column '" + header[K + 2] + "'");
    }
    has_grade = true;
  } else if (header.size() > K + 3) {
    throw ParseError(name, row, K + 4, "too many columns");
  }

  std::vector<StudentRecord> records;
  std::set<std::pair<int, std::string>> seen;
  while (next_line(in, line, row)) {
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw ParseError(name, row, 0,
                       "expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(f.size()));
    }
    StudentRecord r;
    r.student_id = trim(f[0]);
    if (r.student_id.empty()) throw ParseError(name, row, 1, "empty student_id");
    const auto y = to_int(f[1]);
    if (!y) throw ParseError(name, row, 2, "year must be an integer");
    r.year = static_cast<int>(*y);
    if (!seen.insert({r.year, r.student_id}).second) {
      throw ParseError(name, row, 1,
                       "duplicate student '" + r.student_id + "' in year " +
                           std::to_string(r.year));
    }
    r.raw_scores.resize(K);
    for (std::size_t l = 0; l < K; ++l) {
      if (trim(f[l + 2]).empty()) continue;
      const auto v = to_double(f[l + 2]);
      if (!v) {
        throw ParseError(name, row, l + 3, "score is not a number");
      }
      r.raw_scores[l] = *v;
    }
    r.scores = r.raw_scores;
    if (has_grade && !trim(f[K + 2]).empty()) r.letter_grade = trim(f[K + 2]);
    records.push_back(std::move(r));
  }
  return records;
}

std::string scores_csv(const CohortDataset& dataset) {
  const auto& sched = dataset.schedule;
  bool any_grade = false;
  for (const auto& [y, records] : dataset.years) {
    for (const auto& r : records) any_grade = any_grade || r.letter_grade.has_value();
  }
  std::string out = "student_id,year";
  for (const auto& a : sched.assessments()) out += "," + csv_field(a.id);
  if (any_grade) out += ",letter_grade";
  out += "\n";
  for (const auto& [y, records] : dataset.years) {
    for (const auto& r : records) {
      out += csv_field(r.student_id) + "," + std::to_string(r.year);
      for (const auto& s : r.raw_scores) out += "," + opt(s);
      if (any_grade) out += "," + csv_field(r.letter_grade.value_or(""));
      out += "\n";
    }
  }
  return out;
}

CohortDataset build_dataset(const AssessmentSchedule& schedule,
                            std::vector<StudentRecord> raw_records) {
  CohortDataset data;
  data.schedule = schedule;
  std::map<int, std::vector<StudentRecord>> by_year;
  for (auto& r : raw_records) by_year[r.year].push_back(std::move(r));
  for (auto& [y, records] : by_year) {
    NormalizedYear norm = normalize_year(records, schedule);
    data.years[y] = std::move(norm.records);
    data.normalization[y] = std::move(norm.stats);
  }
  return data;
}

CohortDataset ingest(const std::string& schedule_path,
                     const std::string& scores_path) {
  const AssessmentSchedule schedule = read_schedule_file(schedule_path);
  auto in = open_input(scores_path);
  return build_dataset(schedule, read_scores(in, scores_path, schedule));
}

// --- key = value -------------------------------------------------------------------

std::map<std::string, std::string> parse_kv(std::istream& in,
                                            const std::string& name) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(name, row, 0, "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(name, row, 1, "empty key");
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ParseError(name, row, 1, "duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  auto in = open_input(path);
  return parse_kv(in, path);
}

namespace {

double kv_double(const std::string& name, const std::string& key,
                 const std::string& value) {
  const auto v = to_double(value);
  if (!v) throw ParseError(name, 0, 0, "key '" + key + "' needs a number");
  return *v;
}

long long kv_int(const std::string& name, const std::string& key,
                 const std::string& value) {
  const auto v = to_int(value);
  if (!v) throw ParseError(name, 0, 0, "key '" + key + "' needs an integer");
  return *v;
}

std::vector<double> kv_doubles(const std::string& name, const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(kv_double(name, key, item));
  return out;
}

}  // namespace

SynthConfig synth_config_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& name) {
  SynthConfig c;
  std::optional<std::vector<double>> thresholds;
  std::optional<std::vector<std::string>> labels;
  for (const auto& [key, value] : kv) {
    if (key == "seed") {
      const long long s = kv_int(name, key, value);
      if (s < 0) throw ParseError(name, 0, 0, "seed must be >= 0");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "first_year") {
      c.first_year = static_cast<int>(kv_int(name, key, value));
    } else if (key == "years") {
      c.years = static_cast<int>(kv_int(name, key, value));
    } else if (key == "students" || key == "students_min" || key == "students_max") {
      const long long n = kv_int(name, key, value);
      if (n < 0) throw ParseError(name, 0, 0, "key '" + key + "' must be >= 0");
      if (key != "students_max") c.students_min = static_cast<std::size_t>(n);
      if (key != "students_min") c.students_max = static_cast<std::size_t>(n);
    } else if (key == "ability_std") {
      c.ability_std = kv_double(name, key, value);
    } else if (key == "noise_take_home") {
      c.noise_take_home = kv_double(name, key, value);
    } else if (key == "noise_in_class") {
      c.noise_in_class = kv_double(name, key, value);
    } else if (key == "trend_fraction") {
      c.trend_fraction = kv_double(name, key, value);
    } else if (key == "trend_slope") {
      c.trend_slope = kv_double(name, key, value);
    } else if (key == "score_mean") {
      c.score_mean = kv_double(name, key, value);
    } else if (key == "score_scale") {
      c.score_scale = kv_double(name, key, value);
    } else if (key == "grade_thresholds") {
      thresholds = kv_doubles(name, key, value);
    } else if (key == "grade_labels") {
      labels = split_list(value);
    } else {
      throw ParseError(name, 0, 0, "unknown key '" + key + "'");
    }
  }
  if (thresholds || labels) {
    if (!thresholds) throw ParseError(name, 0, 0, "grade_labels without grade_thresholds");
    c.grade_bands = ClassBands(*thresholds, labels.value_or(std::vector<std::string>{}));
  }
  c.validate();
  return c;
}

ClassBands bands_from_kv(const std::map<std::string, std::string>& kv,
                         const std::string& name) {
  std::optional<std::vector<double>> thresholds;
  std::vector<std::string> labels;
  for (const auto& [key, value] : kv) {
    if (key == "thresholds") {
      thresholds = kv_doubles(name, key, value);
    } else if (key == "labels") {
      labels = split_list(value);
    } else {
      throw ParseError(name, 0, 0, "unknown key '" + key + "'");
    }
  }
  if (!thresholds) throw ParseError(name, 0, 0, "missing key 'thresholds'");
  return ClassBands(*thresholds, labels);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const auto colon = std::count(text.begin(), text.end(), ':');
  if (colon == 2) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    const auto lo = to_double(text.substr(0, a));
    const auto step = to_double(text.substr(a + 1, b - a - 1));
    const auto hi = to_double(text.substr(b + 1));
    if (!lo || !step || !hi || !(*step > 0.0) || *hi < *lo) {
      throw InvalidArgument("grid must be lo:step:hi with step > 0");
    }
    const auto n = static_cast<long long>(std::floor((*hi - *lo) / *step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
      const double v = *lo + static_cast<double>(i) * *step;
      // Snap to 12 decimals so 0:0.05:1 yields exact-looking grid values.
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
  }
  if (colon != 0) throw InvalidArgument("grid must be lo:step:hi or a comma list");
  for (const auto& item : split_list(text)) {
    const auto v = to_double(item);
    if (!v) throw InvalidArgument("grid value '" + item + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

// --- reports -------------------------------------------------------------------------

std::string predictions_csv(const std::vector<PredictionOutcome>& outcomes) {
  std::string out = "student_id,stop_k,z_hat,class_hat,confidence,forced_final\n";
  for (const auto& o : outcomes) {
    out += csv_field(o.student_id) + ",";
    if (o.issued()) {
      out += std::to_string(o.stop_k) + "," + format_number(o.z_hat) + ",";
      if (o.class_hat) out += std::to_string(*o.class_hat);
      out += "," + format_number(o.confidence_at_stop) + ",";
      out += o.forced_final ? "1" : "0";
    } else {
      out += ",,,,0";
    }
    out += "\n";
  }
  return out;
}

std::string frontier_csv(const std::vector<FrontierRow>& rows) {
  std::string out = "q_th,k_time,p,error,mean_stop,error_all,n,feasible\n";
  for (const auto& r : rows) {
    out += format_number(r.q_th) + "," + std::to_string(r.k_time) + "," +
           format_number(r.p) + "," + format_number(r.error) + "," +
           format_number(r.mean_stop) + "," + format_number(r.error_all) + "," +
           std::to_string(r.n) + "," + (r.feasible ? "1" : "0") + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<FrontierPoint>& points) {
  std::string out = "q_th,mean_stop,mean_abs_error,accuracy,n\n";
  for (const auto& p : points) {
    out += format_number(p.q_th) + "," + format_number(p.mean_stop) + "," +
           format_number(p.mean_abs_error) + "," + opt(p.accuracy) + "," +
           std::to_string(p.n) + "\n";
  }
  return out;
}

std::string curve_csv(const TimelinessCurve& curve) {
  std::string out = "k,predicted,share,mean_abs_error,accuracy,fpr,fnr\n";
  for (const auto& r : curve.rows) {
    out += std::to_string(r.k) + "," + std::to_string(r.predicted) + "," +
           format_number(r.share) + "," + opt(r.mean_abs_error) + "," +
           opt(r.accuracy) + "," + opt(r.fpr) + "," + opt(r.fnr) + "\n";
  }
  return out;
}

std::string bench_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out = "method,k,n,mean_abs_error,accuracy,failed\n";
  for (const auto& r : rows) {
    out += to_string(r.method) + "," + std::to_string(r.k) + "," +
           std::to_string(r.n) + "," + opt(r.mean_abs_error) + "," +
           opt(r.accuracy) + "," + std::to_string(r.failed) + "\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gradepred
