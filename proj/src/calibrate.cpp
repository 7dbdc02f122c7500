#include "gradepred/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace gradepred {

std::vector<double> CalibrationTarget::default_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

void CalibrationTarget::validate() const {
  if (!(p_min > 0.0 && p_min <= 1.0)) {
    throw InvalidArgument("p_min must lie in (0, 1]");
  }
  if (!(e_max >= 0.0)) throw InvalidArgument("e_max must be >= 0");
  if (!(q_th_0 <= 1.0)) throw InvalidArgument("q_th_0 must be <= 1");
  if (grid.empty()) throw InvalidArgument("threshold grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] <= 1.0)) throw InvalidArgument("grid values must be <= 1");
    if (i > 0 && !(grid[i - 1] < grid[i])) {
      throw InvalidArgument("grid must be strictly ascending");
    }
  }
}

std::optional<ClassBands> bands_for_year(const CohortDataset& dataset, int year,
                                         const ReplaySettings& settings) {
  if (!settings.classification) return std::nullopt;
  if (settings.bands) return settings.bands;
  const auto past = past_records(dataset, year, settings.window);
  try {
    return ClassBands::binary(derive_binary_threshold(
        past, dataset.schedule, settings.upper_grade, settings.lower_grade));
  } catch (const InsufficientHistory&) {
    // No usable history yet: label with the year's own grade boundary. The
    // knowledge base is empty in that situation, so no early decision can
    // depend on it.
    auto it = dataset.years.find(year);
    if (it == dataset.years.end()) throw;
    return ClassBands::binary(derive_binary_threshold(
        it->second, dataset.schedule, settings.upper_grade,
        settings.lower_grade));
  }
}

std::vector<Truth> truth_for_year(const CohortDataset& dataset, int year,
                                  const ReplaySettings& settings) {
  std::vector<Truth> out;
  auto it = dataset.years.find(year);
  if (it == dataset.years.end()) return out;
  const auto bands = bands_for_year(dataset, year, settings);
  for (const auto& r : it->second) {
    if (!r.is_complete()) continue;
    Truth t;
    t.student_id = r.student_id;
    t.year = r.year;
    t.z = overall_score(r, dataset.schedule);
    if (bands) t.label = classify_score(t.z, *bands);
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

bool has_history(const CohortDataset& data, int year, std::optional<int> window) {
  for (const auto& [y, records] : data.years) {
    if (y >= year) break;
    if (window && y < year - *window) continue;
    if (!records.empty()) return true;
  }
  return false;
}

}  // namespace

ReplayCache::ReplayCache(const CohortDataset& dataset, ReplaySettings settings)
    : dataset_(&dataset), settings_(std::move(settings)) {}

const YearReplay& ReplayCache::year(int y) {
  auto it = cache_.find(y);
  if (it != cache_.end()) return it->second;

  YearReplay replay;
  replay.year = y;
  auto records = dataset_->years.find(y);
  if (records != dataset_->years.end()) {
    PredictorConfig config;
    config.epsilon = settings_.epsilon;
    config.max_rungs = settings_.max_rungs;
    config.bands = bands_for_year(*dataset_, y, settings_);
    const KnowledgeBase kb = knowledge_base(*dataset_, y, settings_.window);
    replay.streams = decision_streams(records->second, kb, config);
    replay.truth = truth_for_year(*dataset_, y, settings_);
  }
  return cache_.emplace(y, std::move(replay)).first->second;
}

std::vector<PredictionOutcome> resolve_all(const std::vector<DecisionStream>& streams,
                                           double q_th) {
  std::vector<PredictionOutcome> out;
  out.reserve(streams.size());
  for (const auto& s : streams) out.push_back(resolve(s, q_th));
  return out;
}

FrontierRow evaluate_candidate(double q_th,
                               const std::vector<PredictionOutcome>& outcomes,
                               const std::vector<Truth>& truth, std::size_t K,
                               const CalibrationTarget& target,
                               bool classification) {
  std::map<std::pair<int, std::string>, const Truth*> index;
  for (const auto& t : truth) index[{t.year, t.student_id}] = &t;

  struct Item {
    std::size_t stop;
    double abs_error;
    bool wrong;
  };
  std::vector<Item> issued;
  std::size_t total = 0;
  for (const auto& o : outcomes) {
    auto it = index.find({o.year, o.student_id});
    if (it == index.end()) continue;
    ++total;
    if (!o.issued()) continue;
    const Truth& t = *it->second;
    const bool wrong = classification && o.class_hat && t.label &&
                       *o.class_hat != *t.label;
    issued.push_back({o.stop_k, std::abs(t.z - o.z_hat), wrong});
  }

  FrontierRow row;
  row.q_th = q_th;
  row.n = issued.size();
  if (total == 0 || issued.empty()) {
    row.k_time = K;
    return row;
  }
  auto metric = [&](const Item& it) {
    return classification ? (it.wrong ? 1.0 : 0.0) : it.abs_error;
  };
  double stop_sum = 0.0;
  double err_sum = 0.0;
  for (const auto& it : issued) {
    stop_sum += static_cast<double>(it.stop);
    err_sum += metric(it);
  }
  row.mean_stop = stop_sum / static_cast<double>(issued.size());
  row.error_all = err_sum / static_cast<double>(issued.size());

  row.k_time = K;
  bool reached = false;
  for (std::size_t k = 1; k <= K; ++k) {
    std::size_t count = 0;
    double err = 0.0;
    for (const auto& it : issued) {
      if (it.stop <= k) {
        ++count;
        err += metric(it);
      }
    }
    const double p = static_cast<double>(count) / static_cast<double>(total);
    if (p >= target.p_min) {
      row.k_time = k;
      row.p = p;
      row.error = err / static_cast<double>(count);
      reached = true;
      break;
    }
  }
  if (!reached) {
    row.p = static_cast<double>(issued.size()) / static_cast<double>(total);
    row.error = row.error_all;
  }
  row.feasible = reached && row.error <= target.e_max;
  return row;
}

std::size_t select_threshold(const std::vector<FrontierRow>& frontier) {
  if (frontier.empty()) throw CalibrationError("empty frontier");
  auto better_feasible = [](const FrontierRow& a, const FrontierRow& b) {
    if (a.mean_stop != b.mean_stop) return a.mean_stop < b.mean_stop;
    if (a.error != b.error) return a.error < b.error;
    return a.q_th > b.q_th;
  };
  auto better_nearest = [](const FrontierRow& a, const FrontierRow& b) {
    if (a.error != b.error) return a.error < b.error;
    if (a.mean_stop != b.mean_stop) return a.mean_stop < b.mean_stop;
    return a.q_th > b.q_th;
  };
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    if (!frontier[i].feasible) continue;
    if (!best || better_feasible(frontier[i], frontier[*best])) best = i;
  }
  if (best) return *best;
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < frontier.size(); ++i) {
    if (better_nearest(frontier[i], frontier[nearest])) nearest = i;
  }
  return nearest;
}

CalibrationResult calibrate_year(ReplayCache& cache, int through_year,
                                 const CalibrationTarget& target) {
  target.validate();
  const CohortDataset& data = cache.dataset();
  const auto& settings = cache.settings();

  CalibrationResult result;
  result.year = through_year;
  std::vector<const YearReplay*> replays;
  for (const auto& [year, records] : data.years) {
    if (year > through_year) break;
    if (records.empty()) continue;
    if (!has_history(data, year, settings.window)) continue;
    replays.push_back(&cache.year(year));
    result.replayed_years.push_back(year);
  }
  if (replays.empty()) {
    throw CalibrationError("no year up to " + std::to_string(through_year) +
                           " has an earlier year to learn from");
  }

  std::vector<Truth> truth;
  for (const auto* r : replays) {
    truth.insert(truth.end(), r->truth.begin(), r->truth.end());
  }
  const std::size_t K = data.schedule.size();
  for (double q : target.grid) {
    std::vector<PredictionOutcome> outcomes;
    for (const auto* r : replays) {
      auto part = resolve_all(r->streams, q);
      outcomes.insert(outcomes.end(), part.begin(), part.end());
    }
    result.frontier.push_back(evaluate_candidate(q, outcomes, truth, K, target,
                                                 settings.classification));
  }
  const std::size_t chosen = select_threshold(result.frontier);
  result.q_th = result.frontier[chosen].q_th;
  result.k_y = result.frontier[chosen].k_time;
  result.feasible = result.frontier[chosen].feasible;
  return result;
}

CalibrationResult calibrate_year(const CohortDataset& history, int through_year,
                                 const CalibrationTarget& target,
                                 const ReplaySettings& settings) {
  ReplayCache cache(history, settings);
  return calibrate_year(cache, through_year, target);
}

std::vector<YearRun> run_yearly(const CohortDataset& dataset,
                                const CalibrationTarget& target,
                                const ReplaySettings& settings) {
  target.validate();
  if (dataset.years.empty()) {
    throw CalibrationError("dataset contains no years");
  }
  ReplayCache cache(dataset, settings);
  std::vector<YearRun> runs;
  std::optional<int> previous;
  for (const auto& [year, records] : dataset.years) {
    YearRun run;
    run.year = year;
    run.q_th_used = target.q_th_0;
    if (previous) {
      try {
        run.calibration = calibrate_year(cache, *previous, target);
        run.q_th_used = run.calibration->q_th;
      } catch (const CalibrationError&) {
        // Fewer than two earlier years: keep the starting threshold.
      }
    }
    run.outcomes = resolve_all(cache.year(year).streams, run.q_th_used);
    run.truth = cache.year(year).truth;
    runs.push_back(std::move(run));
    previous = year;
  }
  return runs;
}

std::vector<SweepCell> sweep(ReplayCache& cache, const std::vector<int>& years,
                             const std::vector<double>& grid) {
  std::vector<SweepCell> cells;
  for (double q : grid) {
    SweepCell cell;
    cell.q_th = q;
    for (int y : years) {
      auto part = resolve_all(cache.year(y).streams, q);
      cell.outcomes.insert(cell.outcomes.end(), part.begin(), part.end());
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace gradepred
