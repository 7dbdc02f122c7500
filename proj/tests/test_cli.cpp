#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "gradepred/cli.hpp"
#include "gradepred/io.hpp"

using namespace gradepred;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gradepred");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Small synthetic dataset written once per test binary.
const std::filesystem::path& data_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "gradepred_cli_tests";
    std::filesystem::create_directories(d);
    write_file_atomic((d / "synth.cfg").string(),
                      "years = 3\nstudents = 40\nseed = 5\n");
    const auto r = cli({"synth", "--config", (d / "synth.cfg").string(),
                        "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> data_args() {
  return {"--schedule", (data_dir() / "schedule.csv").string(), "--scores",
          (data_dir() / "scores.csv").string()};
}

std::vector<std::string> with_data(std::vector<std::string> head) {
  for (auto& a : data_args()) head.push_back(a);
  return head;
}

}  // namespace

TEST_CASE("ingest summary") {
  const auto r = cli(with_data({"ingest"}));
  CHECK(r.code == 0);
  CHECK(r.out.find("students=120") != std::string::npos);
}

TEST_CASE("q_th = 1 forces every student to the final assessment") {
  const auto r = cli(with_data({"predict", "--q-th", "1.0"}));
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "student_id,stop_k,z_hat,class_hat,confidence,forced_final");
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto f = split_csv_line(line);
    CHECK(f[1] == "10");
    CHECK(f[5] == "1");
    ++n;
  }
  CHECK(n == 40);
}

TEST_CASE("sweep and calibrate are reproducible") {
  const auto a = cli(with_data({"sweep", "--grid", "0:0.1:1"}));
  const auto b = cli(with_data({"sweep", "--grid", "0:0.1:1"}));
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto c = cli(with_data({"calibrate", "--mode", "binary"}));
  CHECK(c.code == 0);
  CHECK(c.out.find("q_th=") != std::string::npos);
  CHECK(c.out == cli(with_data({"calibrate", "--mode", "binary"})).out);
}

TEST_CASE("bench writes one row per method and k") {
  const auto p = data_dir() / "bench.csv";
  const auto r = cli(with_data({"bench", "--mode", "binary", "--out", p.string()}));
  REQUIRE(r.code == 0);
  std::istringstream in(read_file(p.string()));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 1 + 5 * 10);
}

TEST_CASE("usage and input errors exit with 2") {
  CHECK(cli({"predict", "--bogus"}).code == 2);
  CHECK(cli({}).code == 2);
  const auto e = cli(with_data({"predict", "--mode", "ternary"}));
  CHECK(e.code == 2);
  CHECK(e.err.rfind("error: ", 0) == 0);

  const auto bad = data_dir() / "bad_schedule.csv";
  write_file_atomic(bad.string(), "id,kind,topic,weight\nH1,take_home,hw,0.9\n");
  const auto w = cli({"ingest", "--schedule", bad.string(), "--scores",
                      (data_dir() / "scores.csv").string()});
  CHECK(w.code == 2);
  CHECK(w.err.find("WeightSum") != std::string::npos);

  CHECK(cli({"ingest", "--schedule", "/nonexistent/s.csv", "--scores", "x"}).code == 1);
}

TEST_CASE("bound subcommand") {
  const auto r = cli({"bound", "--epsilon", "0.2", "--var-star", "0.0025", "--sizes",
                      "200,300,400", "--delta", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("chebyshev_term=0.25\n") != std::string::npos);
  CHECK(r.out.find("degenerate_gap=0") != std::string::npos);
  const auto v = cli({"validate-bound", "--groups", "uniform:0:1:5,two_point:0:1:0.5:20",
                      "--epsilon", "0.3", "--trials", "10000", "--seed", "3"});
  CHECK(v.code == 0);
  CHECK(v.out.find("within_bound=1") != std::string::npos);
}
