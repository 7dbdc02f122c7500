#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "gradepred/io.hpp"

using namespace gradepred;

namespace {

const char* kSchedule =
    "id,kind,topic,weight\n"
    "H1,take_home,homework,0.3\n"
    "M,in_class,midterm,0.3\n"
    "F,in_class,final,0.4\n";

AssessmentSchedule schedule() {
  std::istringstream in(kSchedule);
  return read_schedule(in, "schedule.csv");
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "gradepred_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("csv line splitting") {
  CHECK(split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split_csv_line("\"x,y\",\"say \"\"hi\"\"\"") ==
        std::vector<std::string>{"x,y", "say \"hi\""});
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("schedule parsing") {
  const auto s = schedule();
  REQUIRE(s.size() == 3);
  CHECK(s.assessments()[1].kind == AssessmentKind::in_class);

  std::istringstream off("id,kind,topic,weight\nH1,take_home,hw,0.5\nF,in_class,f,0.4\n");
  CHECK_THROWS_AS(read_schedule(off, "s.csv"), WeightSumError);
  std::istringstream kind("id,kind,topic,weight\nH1,oral,hw,1.0\n");
  CHECK_THROWS_AS(read_schedule(kind, "s.csv"), ParseError);

  std::istringstream again(schedule_csv(s));
  const auto back = read_schedule(again, "back.csv");
  CHECK(back.size() == 3);
  CHECK(back.assessments()[2].weight == doctest::Approx(0.4));
}

TEST_CASE("scores parsing errors name the row and column") {
  const auto s = schedule();
  std::istringstream missing("student_id,year,H1,F\n");
  try {
    read_scores(missing, "scores.csv", s);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'M'") != std::string::npos);
    CHECK(e.column() == 4);
  }

  std::istringstream dup("student_id,year,H1,M,F\na,1,1,2,3\na,1,4,5,6\n");
  try {
    read_scores(dup, "scores.csv", s);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
  }

  std::istringstream bad("student_id,year,H1,M,F\na,1,1,x,3\n");
  try {
    read_scores(bad, "scores.csv", s);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == 4);
  }

  std::istringstream gaps("student_id,year,H1,M,F,letter_grade\na,1,1,,3,B\n");
  const auto recs = read_scores(gaps, "scores.csv", s);
  REQUIRE(recs.size() == 1);
  CHECK_FALSE(recs[0].raw_scores[1].has_value());
  CHECK(*recs[0].letter_grade == "B");
}

TEST_CASE("synthetic dataset round-trips through csv") {
  SynthConfig c;
  c.seed = 77;
  c.years = 3;
  c.students_min = 15;
  c.students_max = 30;
  const auto d = generate(c);
  std::istringstream sin(schedule_csv(d.schedule));
  const auto s = read_schedule(sin, "schedule.csv");
  std::istringstream rin(scores_csv(d));
  const auto back = build_dataset(s, read_scores(rin, "scores.csv", s));
  REQUIRE(back.student_count() == d.student_count());
  for (const auto& [y, recs] : d.years) {
    const auto& other = back.years.at(y);
    REQUIRE(other.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(other[i].student_id == recs[i].student_id);
      CHECK(other[i].letter_grade == recs[i].letter_grade);
      for (std::size_t l = 0; l < s.size(); ++l) {
        CHECK(std::abs(*other[i].raw_scores[l] - *recs[i].raw_scores[l]) <= 1e-9);
        CHECK(std::abs(*other[i].scores[l] - *recs[i].scores[l]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("key = value configuration") {
  std::istringstream in("# comment\nseed = 9\nstudents = 40\nnoise_in_class=0.2 # trailing\n");
  const auto kv = parse_kv(in, "synth.cfg");
  const auto c = synth_config_from_kv(kv, "synth.cfg");
  CHECK(c.seed == 9);
  CHECK(c.students_min == 40);
  CHECK(c.students_max == 40);
  CHECK(c.noise_in_class == 0.2);

  std::istringstream unknown("colour = red\n");
  CHECK_THROWS_AS(synth_config_from_kv(parse_kv(unknown, "x"), "x"), ParseError);
  std::istringstream junk("just words\n");
  CHECK_THROWS_AS(parse_kv(junk, "x"), ParseError);

  std::istringstream bands("thresholds = 0.1\nlabels = well,poorly\n");
  const auto b = bands_from_kv(parse_kv(bands, "b"), "b");
  CHECK(b.class_count() == 2);
}

TEST_CASE("threshold grids") {
  const auto g = parse_grid("0:0.05:1");
  REQUIRE(g.size() == 21);
  CHECK(g[3] == 0.15);
  CHECK(g.back() == 1.0);
  CHECK(parse_grid("0.2,0.5,0.9") == std::vector<double>{0.2, 0.5, 0.9});
  CHECK_THROWS(parse_grid("0:0:1"));
  CHECK_THROWS(parse_grid("a,b"));
}

TEST_CASE("atomic file writes") {
  const auto p = scratch("atomic.txt");
  write_file_atomic(p.string(), "first\n");
  write_file_atomic(p.string(), "second\n");
  CHECK(read_file(p.string()) == "second\n");
  for (const auto& e : std::filesystem::directory_iterator(p.parent_path())) {
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }
  CHECK_THROWS_AS(read_file((p.parent_path() / "nope.txt").string()), IoError);
}
