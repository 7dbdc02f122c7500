#include "gradepred/neighborhoods.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gradepred {

double distance(std::span<const double> a, std::span<const double> b,
                std::span<const double> weights) {
  if (a.size() != b.size()) {
    throw DimensionError("distance between feature vectors of length " +
                         std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  if (a.empty() || a.size() > weights.size()) {
    throw DimensionError("feature length " + std::to_string(a.size()) +
                         " outside 1.." + std::to_string(weights.size()));
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    num += weights[l] * std::abs(a[l] - b[l]);
    den += weights[l];
  }
  return num / den;
}

double distance(const FeatureVector& a, const FeatureVector& b,
                const AssessmentSchedule& schedule) {
  return distance(a.entries(), b.entries(), schedule.weights());
}

std::vector<double> pool_distances(std::span<const double> center,
                                   const KnowledgeBase& kb) {
  const std::size_t k = center.size();
  const auto w = kb.schedule().weights();
  std::vector<double> out(kb.size());
  for (std::size_t i = 0; i < kb.size(); ++i) {
    out[i] = distance(center, kb.features(i, k), w);
  }
  return out;
}

RadiusLadder radius_ladder(std::span<const double> distances,
                           std::optional<std::size_t> max_rungs) {
  if (distances.size() < kMinNeighbors) {
    throw InsufficientNeighbors("pool has " + std::to_string(distances.size()) +
                                " members, need at least " +
                                std::to_string(kMinNeighbors));
  }
  RadiusLadder ladder;
  ladder.order.resize(distances.size());
  std::iota(ladder.order.begin(), ladder.order.end(), std::size_t{0});
  std::sort(ladder.order.begin(), ladder.order.end(),
            [&](std::size_t a, std::size_t b) {
              if (distances[a] != distances[b]) {
                return distances[a] < distances[b];
              }
              return a < b;
            });
  ladder.sorted_distances.reserve(distances.size());
  for (std::size_t i : ladder.order) {
    ladder.sorted_distances.push_back(distances[i]);
  }

  const auto& d = ladder.sorted_distances;
  const std::size_t n = d.size();
  // The smallest radius covering the first `need` members is d[need-1];
  // ties pull in every equidistant member.
  std::size_t need = kMinNeighbors;
  while (need <= n) {
    if (max_rungs && ladder.rungs.size() >= *max_rungs) break;
    const double r = d[need - 1];
    std::size_t count = need;
    while (count < n && d[count] == r) ++count;
    ladder.rungs.push_back({r, count});
    need = count + 1;
  }
  return ladder;
}

ResidualStats neighborhood_stats(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  if (n < 2) {
    throw InsufficientNeighbors("variance needs at least two residuals, got " +
                                std::to_string(n));
  }
  double sum = 0.0;
  for (double c : residuals) sum += c;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double c : residuals) ss += (c - mean) * (c - mean);
  return {mean, ss / static_cast<double>(n - 1)};
}

double confidence(double variance, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  return 1.0 - variance / (epsilon * epsilon);
}

double binary_confidence(double variance, double epsilon, double distance) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  return 1.0 - std::exp(-distance) * variance / (epsilon * epsilon);
}

std::vector<Neighborhood> evaluate_ladder(const RadiusLadder& ladder,
                                          std::span<const double> pool_residuals,
                                          double epsilon) {
  std::vector<Neighborhood> out;
  out.reserve(ladder.rungs.size());
  std::vector<double> buffer;
  buffer.reserve(ladder.order.size());
  for (std::size_t m = 0; m < ladder.rungs.size(); ++m) {
    // Members are a prefix of `order`, so extend the buffer incrementally.
    for (std::size_t i = buffer.size(); i < ladder.rungs[m].count; ++i) {
      buffer.push_back(pool_residuals[ladder.order[i]]);
    }
    const ResidualStats s = neighborhood_stats(buffer);
    out.push_back({ladder.rungs[m].radius, ladder.rungs[m].count, s.mean,
                   s.variance, confidence(s.variance, epsilon)});
  }
  return out;
}

std::size_t select_best(std::span<const Neighborhood> ladder) {
  if (ladder.empty()) throw InvalidArgument("select_best on an empty ladder");
  std::size_t best = 0;
  for (std::size_t m = 1; m < ladder.size(); ++m) {
    if (ladder[m].variance < ladder[best].variance) best = m;
  }
  return best;
}

}  // namespace gradepred
