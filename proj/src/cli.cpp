#include "gradepred/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "gradepred/io.hpp"

namespace gradepred {

namespace {

struct DataArgs {
  std::string schedule;
  std::string scores;
};

struct ModelArgs {
  std::string mode = "regression";
  double epsilon = kDefaultEpsilon;
  std::optional<int> window;
  std::string bands_path;
  std::string upper_grade = "B-";
  std::string lower_grade = "C+";
};

void add_data(CLI::App* cmd, DataArgs& d) {
  cmd->add_option("--schedule", d.schedule, "schedule CSV")->required();
  cmd->add_option("--scores", d.scores, "scores CSV")->required();
}

void add_model(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--mode", m.mode, "regression or binary")
      ->check(CLI::IsMember({"regression", "binary"}));
  cmd->add_option("--epsilon", m.epsilon, "error tolerance of the confidence");
  cmd->add_option("--window", m.window, "past years in the knowledge base");
  cmd->add_option("--bands", m.bands_path, "class bands file (key=value)");
  cmd->add_option("--upper-grade", m.upper_grade, "lowest 'well' letter grade");
  cmd->add_option("--lower-grade", m.lower_grade, "highest 'poorly' letter grade");
}

ReplaySettings replay_settings(const ModelArgs& m) {
  ReplaySettings s;
  s.epsilon = m.epsilon;
  s.window = m.window;
  s.classification = m.mode == "binary";
  s.upper_grade = m.upper_grade;
  s.lower_grade = m.lower_grade;
  if (!m.bands_path.empty()) {
    if (!s.classification) {
      throw InvalidArgument("--bands requires --mode binary");
    }
    s.bands = bands_from_kv(read_kv_file(m.bands_path), m.bands_path);
  }
  return s;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

int last_year(const CohortDataset& data) {
  if (data.years.empty()) throw InvalidArgument("dataset contains no students");
  return data.years.rbegin()->first;
}

std::vector<int> years_with_history(const CohortDataset& data) {
  std::vector<int> out;
  for (const auto& [y, records] : data.years) {
    if (y == data.years.begin()->first) continue;
    out.push_back(y);
  }
  return out;
}

// "constant:v:n", "uniform:lo:hi:n" or "two_point:lo:hi:p:n", comma separated.
NestedResidualModel parse_groups(const std::string& text) {
  NestedResidualModel model;
  std::stringstream list(text);
  std::string item;
  while (std::getline(list, item, ',')) {
    std::vector<std::string> parts;
    std::stringstream fields(item);
    std::string f;
    while (std::getline(fields, f, ':')) parts.push_back(f);
    ResidualGroup g;
    auto num = [&](std::size_t i) {
      try {
        std::size_t used = 0;
        const double v = std::stod(parts.at(i), &used);
        if (used != parts[i].size()) throw std::invalid_argument("trailing");
        return v;
      } catch (const std::exception&) {
        throw InvalidArgument("bad residual group '" + item + "'");
      }
    };
    auto count = [&](std::size_t i) {
      const double v = num(i);
      if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw InvalidArgument("bad group size in '" + item + "'");
      }
      return static_cast<std::size_t>(v);
    };
    if (parts.size() == 3 && parts[0] == "constant") {
      g.kind = ResidualGroup::Kind::constant;
      g.lo = g.hi = num(1);
      g.count = count(2);
    } else if (parts.size() == 4 && parts[0] == "uniform") {
      g.kind = ResidualGroup::Kind::uniform;
      g.lo = num(1);
      g.hi = num(2);
      g.count = count(3);
    } else if (parts.size() == 5 && parts[0] == "two_point") {
      g.kind = ResidualGroup::Kind::two_point;
      g.lo = num(1);
      g.hi = num(2);
      g.p_hi = num(3);
      g.count = count(4);
    } else {
      throw InvalidArgument("bad residual group '" + item + "'");
    }
    model.groups.push_back(g);
  }
  return model;
}

void print_bound(const TheoremBound& b, std::ostream& out) {
  out << "chebyshev_term=" << format_number(b.chebyshev_term) << "\n"
      << "hoeffding_term=" << format_number(b.hoeffding_term) << "\n"
      << "lemma1_term=" << format_number(b.lemma1_term) << "\n"
      << "uncapped=" << format_number(b.uncapped) << "\n"
      << "bound=" << format_number(b.value) << "\n"
      << "degenerate_gap=" << (b.degenerate_gap ? 1 : 0) << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Timeliness-aware grade prediction", "gradepred"};
  app.require_subcommand(1);

  DataArgs data;
  ModelArgs model;
  std::string out_path;
  std::uint64_t seed = 1;
  bool seed_given = false;

  auto* ingest_cmd = app.add_subcommand("ingest", "validate a schedule and scores");
  add_data(ingest_cmd, data);

  std::string synth_config;
  std::string out_dir;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset");
  synth_cmd->add_option("--config", synth_config, "SynthConfig file (key=value)");
  synth_cmd->add_option("--out-dir", out_dir, "output directory")->required();
  synth_cmd->add_option("--seed", seed, "random seed")
      ->each([&](const std::string&) { seed_given = true; });

  double q_th = 0.9;
  std::optional<int> year;
  auto* predict_cmd = app.add_subcommand("predict", "predict one year");
  add_data(predict_cmd, data);
  add_model(predict_cmd, model);
  predict_cmd->add_option("--q-th", q_th, "confidence threshold");
  predict_cmd->add_option("--year", year, "year to predict (default: last)");
  predict_cmd->add_option("--out", out_path, "predictions CSV (default: stdout)");

  CalibrationTarget target;
  std::string grid_text = "0:0.05:1";
  auto* calibrate_cmd = app.add_subcommand("calibrate", "learn the threshold");
  add_data(calibrate_cmd, data);
  add_model(calibrate_cmd, model);
  calibrate_cmd->add_option("--p-min", target.p_min, "coverage target");
  calibrate_cmd->add_option("--e-max", target.e_max, "error cap");
  calibrate_cmd->add_option("--q-th-0", target.q_th_0, "starting threshold");
  calibrate_cmd->add_option("--grid", grid_text, "lo:step:hi or comma list");
  calibrate_cmd->add_option("--year", year, "last year of history (default: last)");
  calibrate_cmd->add_option("--out", out_path, "frontier CSV (default: stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "frontier over a threshold grid");
  add_data(sweep_cmd, data);
  add_model(sweep_cmd, model);
  sweep_cmd->add_option("--grid", grid_text, "lo:step:hi or comma list");
  sweep_cmd->add_option("--out", out_path, "curve CSV (default: stdout)");

  std::size_t k_neighbors = 7;
  auto* bench_cmd = app.add_subcommand("bench", "benchmarks at every fixed k");
  add_data(bench_cmd, data);
  add_model(bench_cmd, model);
  bench_cmd->add_option("--k-neighbors", k_neighbors, "knn neighbor count");
  bench_cmd->add_option("--out", out_path, "metrics CSV (default: stdout)");

  BoundInputs bound_in;
  std::vector<std::size_t> sizes;
  auto* bound_cmd = app.add_subcommand("bound", "evaluate the error bound");
  bound_cmd->add_option("--epsilon", bound_in.epsilon, "tolerance")->required();
  bound_cmd->add_option("--var-star", bound_in.var_star, "smallest true variance")
      ->required();
  bound_cmd->add_option("--sizes", sizes, "neighborhood sizes")
      ->delimiter(',')
      ->required();
  bound_cmd->add_option("--delta", bound_in.delta, "residual sd gap")->required();

  std::string groups = "uniform:0.45:0.55:200,two_point:0:1:0.5:200";
  double mc_epsilon = 0.5;
  std::size_t trials = 100000;
  auto* validate_cmd =
      app.add_subcommand("validate-bound", "Monte Carlo check of the bound");
  validate_cmd->add_option("--groups", groups,
                           "constant:v:n, uniform:lo:hi:n, two_point:lo:hi:p:n");
  validate_cmd->add_option("--epsilon", mc_epsilon, "tolerance");
  validate_cmd->add_option("--trials", trials, "trial count (>= 10000)");
  validate_cmd->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "error: Usage: " << msg << "\n";
    return 2;
  }

  try {
    if (ingest_cmd->parsed()) {
      const CohortDataset ds = ingest(data.schedule, data.scores);
      out << "assessments=" << ds.schedule.size() << "\n"
          << "students=" << ds.student_count() << "\n";
      for (const auto& [y, stats] : ds.normalization) {
        out << "year=" << y << " students=" << ds.years.at(y).size()
            << " overall_std=" << format_number(stats.overall_std) << "\n";
      }
      return 0;
    }

    if (synth_cmd->parsed()) {
      SynthConfig cfg;
      if (!synth_config.empty()) {
        cfg = synth_config_from_kv(read_kv_file(synth_config), synth_config);
      }
      if (seed_given) cfg.seed = seed;
      const CohortDataset ds = generate(cfg);
      std::filesystem::create_directories(out_dir);
      const auto dir = std::filesystem::path(out_dir);
      write_file_atomic((dir / "schedule.csv").string(), schedule_csv(ds.schedule));
      write_file_atomic((dir / "scores.csv").string(), scores_csv(ds));
      out << "wrote " << ds.student_count() << " students to " << out_dir << "\n";
      return 0;
    }

    if (predict_cmd->parsed()) {
      const CohortDataset ds = ingest(data.schedule, data.scores);
      const ReplaySettings settings = replay_settings(model);
      const int y = year.value_or(last_year(ds));
      auto it = ds.years.find(y);
      if (it == ds.years.end()) {
        throw InvalidArgument("year " + std::to_string(y) + " not in the dataset");
      }
      PredictorConfig config;
      config.epsilon = settings.epsilon;
      config.q_th = q_th;
      config.bands = bands_for_year(ds, y, settings);
      config.validate();
      const KnowledgeBase kb = knowledge_base(ds, y, settings.window);
      emit(out_path, predictions_csv(predict_cohort(it->second, kb, config)), out);
      return 0;
    }

    if (calibrate_cmd->parsed()) {
      const CohortDataset ds = ingest(data.schedule, data.scores);
      target.grid = parse_grid(grid_text);
      ReplayCache cache(ds, replay_settings(model));
      const CalibrationResult r =
          calibrate_year(cache, year.value_or(last_year(ds)), target);
      emit(out_path, frontier_csv(r.frontier), out);
      out << "q_th=" << format_number(r.q_th) << "\n"
          << "k_y=" << r.k_y << "\n"
          << "feasible=" << (r.feasible ? 1 : 0) << "\n";
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const CohortDataset ds = ingest(data.schedule, data.scores);
      const auto grid = parse_grid(grid_text);
      ReplayCache cache(ds, replay_settings(model));
      const auto years = years_with_history(ds);
      if (years.empty()) {
        throw InsufficientHistory("sweep needs at least two years of data");
      }
      std::vector<Truth> truth;
      for (int y : years) {
        const auto& t = cache.year(y).truth;
        truth.insert(truth.end(), t.begin(), t.end());
      }
      const auto cells = sweep(cache, years, grid);
      emit(out_path, sweep_csv(frontier_points(cells, truth)), out);
      return 0;
    }

    if (bench_cmd->parsed()) {
      const CohortDataset ds = ingest(data.schedule, data.scores);
      BenchmarkOptions opts;
      opts.replay = replay_settings(model);
      opts.k_neighbors = k_neighbors;
      emit(out_path, bench_csv(run_benchmarks(ds, opts)), out);
      return 0;
    }

    if (bound_cmd->parsed()) {
      bound_in.neighborhood_sizes = sizes;
      const TheoremBound b = theorem_bound(bound_in);
      print_bound(b, out);
      const std::size_t n_min =
          *std::min_element(sizes.begin(), sizes.end());
      out << "hoeffding_fact=" << format_number(hoeffding_bound(n_min, bound_in.epsilon))
          << "\n"
          << "bernstein_fact=" << format_number(bernstein_std_bound(n_min, bound_in.epsilon))
          << "\n"
          << "lemma1=" << format_number(lemma1_bound(sizes.size(), bound_in.delta, sizes))
          << "\n";
      return 0;
    }

    if (validate_cmd->parsed()) {
      const NestedResidualModel m = parse_groups(groups);
      const MonteCarloReport r =
          monte_carlo_validate(m, m.true_inputs(mc_epsilon), trials, seed);
      out << "trials=" << r.trials << "\n"
          << "violations=" << r.violations << "\n"
          << "wrong_neighborhood=" << r.wrong_neighborhood << "\n"
          << "frequency=" << format_number(r.frequency) << "\n";
      print_bound(r.bound, out);
      out << "slack=" << format_number(r.slack) << "\n"
          << "within_bound=" << (r.within_bound ? 1 : 0) << "\n";
      return r.within_bound ? 0 : 1;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const WeightSumError& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace gradepred
