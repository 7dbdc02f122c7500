#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gradepred/neighborhoods.hpp"
#include "oracles.hpp"

using namespace gradepred;

TEST_CASE("distance") {
  const std::vector<double> eq = {0.5, 0.5};
  const std::vector<double> a = {1, 0}, b = {0, 1};
  CHECK(distance(a, a, eq) == 0.0);
  CHECK(distance(a, b, eq) == doctest::Approx(1.0));
  const std::vector<double> w = {0.2, 0.4, 0.4};
  const std::vector<double> x = {1, 0.5}, y = {0, 0.5};
  CHECK(distance(x, y, w) == doctest::Approx(1.0 / 3.0));
  const std::vector<double> z = {1};
  CHECK_THROWS_AS(distance(x, z, w), DimensionError);
}

TEST_CASE("radius ladder examples") {
  const std::vector<double> d = {0.1, 0.2, 0.3, 0.4, 0.5};
  const auto l = radius_ladder(d);
  REQUIRE(l.rungs.size() == 3);
  CHECK(l.rungs[0].radius == 0.3);
  CHECK(l.rungs[0].count == 3);
  CHECK(l.rungs[2].count == 5);

  const std::vector<double> three = {0.3, 0.1, 0.2};
  CHECK(radius_ladder(three).rungs.size() == 1);

  const std::vector<double> tied = {0.1, 0.2, 0.2, 0.5};
  const auto t = radius_ladder(tied);
  REQUIRE(t.rungs.size() == 2);
  CHECK(t.rungs[0].radius == 0.2);
  CHECK(t.rungs[0].count == 3);
  CHECK(t.rungs[1].count == 4);

  const std::vector<double> two = {0.1, 0.2};
  CHECK_THROWS_AS(radius_ladder(two), InsufficientNeighbors);
  CHECK(radius_ladder(d, 2).rungs.size() == 2);
}

TEST_CASE("neighborhood stats") {
  const std::vector<double> c = {0.2, 0.4, 0.6};
  const auto s = neighborhood_stats(c);
  CHECK(s.mean == doctest::Approx(0.4));
  CHECK(s.variance == doctest::Approx(0.04));
  const std::vector<double> same = {0.3, 0.3, 0.3};
  CHECK(neighborhood_stats(same).variance == 0.0);
  const std::vector<double> one = {0.3};
  CHECK_THROWS_AS(neighborhood_stats(one), InsufficientNeighbors);
}

TEST_CASE("neighborhood stats match a two-pass oracle on random sets") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> c(2 + rep % 40);
    for (auto& v : c) v = u(rng);
    std::vector<double> d(c.size(), 0.0);
    const auto hoods = oracle::all_hoods(d, c);
    const auto s = neighborhood_stats(c);
    if (c.size() >= 3) {
      CHECK(s.mean == hoods[0].mean);
      CHECK(s.variance == hoods[0].variance);
    }
    double m = 0.0;
    for (double v : c) m += v;
    m /= c.size();
    CHECK(s.mean == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("confidence and binary confidence") {
  CHECK(confidence(0.0, 0.5) == 1.0);
  CHECK(confidence(0.04, 0.4) == doctest::Approx(0.75));
  CHECK(confidence(0.25, 0.5) == doctest::Approx(0.0));
  CHECK(binary_confidence(0.04, 0.4, 0.0) == confidence(0.04, 0.4));
  CHECK(binary_confidence(0.04, 0.4, std::log(2.0)) == doctest::Approx(0.875));
  CHECK(binary_confidence(0.0, 0.4, 3.0) == 1.0);
  CHECK_THROWS_AS(confidence(0.1, 0.0), InvalidArgument);
}

TEST_CASE("select_best") {
  auto hood = [](double v) { return Neighborhood{0, 3, 0, v, 0}; };
  std::vector<Neighborhood> one = {hood(0.3)};
  CHECK(select_best(one) == 0);
  std::vector<Neighborhood> v = {hood(0.05), hood(0.01), hood(0.03)};
  CHECK(select_best(v) == 1);
  std::vector<Neighborhood> tie = {hood(0.02), hood(0.02)};
  CHECK(select_best(tie) == 0);
}

TEST_CASE("ladder evaluation matches brute force on random pools") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rep % 28;
    std::uniform_int_distribution<int> coarse(0, 6);
    std::normal_distribution<double> n01;
    std::vector<double> d(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = coarse(rng) * 0.125;  // coarse grid forces ties
      c[i] = n01(rng);
    }
    const auto ladder = radius_ladder(d);
    const auto got = evaluate_ladder(ladder, c, 0.5);
    const auto want = oracle::all_hoods(d, c);
    REQUIRE(got.size() == want.size());
    for (std::size_t m = 0; m < got.size(); ++m) {
      CHECK(got[m].radius == want[m].radius);
      CHECK(got[m].count == want[m].members.size());
      CHECK(got[m].mean == want[m].mean);
      CHECK(got[m].variance == want[m].variance);
    }
    CHECK(select_best(got) == oracle::best(want));
  }
}
