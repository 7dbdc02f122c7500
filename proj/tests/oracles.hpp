#pragma once

// Brute-force reference implementations used by the tests. They share no
// code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

struct Hood {
  double radius;
  std::vector<std::size_t> members;  // sorted by (distance, index)
  double mean;
  double variance;
};

inline double weighted_l1(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& w) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    num += w[l] * std::abs(a[l] - b[l]);
    den += w[l];
  }
  return num / den;
}

// Every distinct distance holding at least three members is a rung: the
// count grows strictly from one distinct radius to the next.
inline std::vector<Hood> all_hoods(const std::vector<double>& d,
                                   const std::vector<double>& residuals) {
  std::set<double> radii(d.begin(), d.end());
  std::vector<Hood> out;
  for (double r : radii) {
    std::vector<std::pair<double, std::size_t>> in;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] <= r) in.push_back({d[i], i});
    }
    if (in.size() < 3) continue;
    std::sort(in.begin(), in.end());
    Hood h;
    h.radius = r;
    double sum = 0.0;
    for (const auto& [dist, i] : in) {
      h.members.push_back(i);
      sum += residuals[i];
    }
    const double n = static_cast<double>(in.size());
    h.mean = sum / n;
    double ss = 0.0;
    for (std::size_t i : h.members) ss += (residuals[i] - h.mean) * (residuals[i] - h.mean);
    h.variance = ss / (n - 1.0);
    out.push_back(std::move(h));
  }
  return out;
}

inline std::size_t best(const std::vector<Hood>& hoods) {
  auto it = std::min_element(hoods.begin(), hoods.end(),
                             [](const Hood& a, const Hood& b) {
                               return a.variance < b.variance;
                             });
  return static_cast<std::size_t>(it - hoods.begin());
}

inline double tail(const std::vector<double>& a, const std::vector<double>& w,
                   std::size_t k) {
  double c = 0.0;
  for (std::size_t l = k; l < a.size(); ++l) c += w[l] * a[l];
  return c;
}

inline double head(const std::vector<double>& a, const std::vector<double>& w,
                   std::size_t k) {
  double s = 0.0;
  for (std::size_t l = 0; l < k; ++l) s += w[l] * a[l];
  return s;
}

struct Stop {
  std::size_t k;
  double z_hat;
};

// Evaluates every rung at every k = 1..K-1 and returns the first k whose best
// rung clears q_th, or the exact overall score at K.
inline Stop replay(const std::vector<double>& student,
                   const std::vector<std::vector<double>>& pool,
                   const std::vector<double>& w, double epsilon, double q_th,
                   std::optional<double> z_th = std::nullopt) {
  const std::size_t K = w.size();
  for (std::size_t k = 1; k < K; ++k) {
    if (pool.size() < 3) continue;
    std::vector<double> x(student.begin(), student.begin() + k);
    std::vector<double> wk(w.begin(), w.begin() + k);
    std::vector<double> d;
    std::vector<double> c;
    for (const auto& p : pool) {
      d.push_back(weighted_l1(x, std::vector<double>(p.begin(), p.begin() + k), wk));
      c.push_back(tail(p, w, k));
    }
    const auto hoods = all_hoods(d, c);
    const Hood& h = hoods[best(hoods)];
    const double z_hat = head(student, w, k) + h.mean;
    double gate = 1.0 - h.variance / (epsilon * epsilon);
    if (z_th) {
      gate = 1.0 - std::exp(-std::abs(z_hat - *z_th)) * h.variance / (epsilon * epsilon);
    }
    if (gate >= q_th) return {k, z_hat};
  }
  return {K, head(student, w, K)};
}

}  // namespace oracle
