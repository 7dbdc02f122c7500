#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "gradepred/domain.hpp"

namespace fx {

inline gradepred::AssessmentSchedule schedule(const std::vector<double>& w) {
  std::vector<gradepred::AssessmentDesc> items;
  for (std::size_t l = 0; l < w.size(); ++l) {
    items.push_back({"A" + std::to_string(l + 1),
                     gradepred::AssessmentKind::take_home, "t", w[l]});
  }
  return gradepred::AssessmentSchedule(std::move(items));
}

inline gradepred::StudentRecord record(const std::string& id, int year,
                                       const std::vector<double>& scores) {
  gradepred::StudentRecord r;
  r.student_id = id;
  r.year = year;
  for (double s : scores) {
    r.scores.push_back(s);
    r.raw_scores.push_back(s);
  }
  return r;
}

inline std::string id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%03zu", i);
  return buf;
}

// Random weights summing to 1 (last weight absorbs the rounding).
inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t K) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(K);
  double total = 0.0;
  for (auto& x : w) total += (x = u(rng));
  double acc = 0.0;
  for (std::size_t l = 0; l + 1 < K; ++l) acc += (w[l] /= total);
  w[K - 1] = 1.0 - acc;
  return w;
}

}  // namespace fx
