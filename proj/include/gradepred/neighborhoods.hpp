#pragma once

// Weighted distance, the recursive radius ladder, and the per-neighborhood
// residual statistics that drive both neighborhood selection and the
// stopping decision.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gradepred/domain.hpp"

namespace gradepred {

inline constexpr std::size_t kMinNeighbors = 3;
inline constexpr double kDefaultEpsilon = 0.5;

// Weighted L1 distance normalized by the prefix weight:
//   sum_l w_l |a_l - b_l| / sum_l w_l  over l = 1..k.
// Throws DimensionError when the lengths differ or exceed the weights.
double distance(std::span<const double> a, std::span<const double> b,
                std::span<const double> weights);
double distance(const FeatureVector& a, const FeatureVector& b,
                const AssessmentSchedule& schedule);

// Distances from `center` (length k) to every knowledge-base prefix X^k.
std::vector<double> pool_distances(std::span<const double> center,
                                   const KnowledgeBase& kb);

struct Rung {
  double radius = 0.0;
  std::size_t count = 0;  // members with distance <= radius
};

// Pool indices sorted by (distance, index) and the nested balls built on
// them: rung 1 is the smallest radius holding kMinNeighbors members, each
// later rung the smallest radius holding strictly more. Equidistant members
// enter together.
struct RadiusLadder {
  std::vector<std::size_t> order;
  std::vector<double> sorted_distances;
  std::vector<Rung> rungs;

  // Pool indices of the members of rung m (0-based), nearest first.
  std::span<const std::size_t> members(std::size_t m) const {
    return std::span<const std::size_t>(order).first(rungs[m].count);
  }
};

// `max_rungs` truncates the ladder after that many rungs (unlimited when
// empty). Throws InsufficientNeighbors when the pool has fewer than three
// members.
RadiusLadder radius_ladder(std::span<const double> distances,
                           std::optional<std::size_t> max_rungs = std::nullopt);

struct ResidualStats {
  double mean = 0.0;
  double variance = 0.0;  // (n-1) denominator
};

// Two-pass sample mean and variance, summed in the given order.
// Throws InsufficientNeighbors for fewer than two values.
ResidualStats neighborhood_stats(std::span<const double> residuals);

// q = 1 - variance / eps^2. Not floored at zero.
double confidence(double variance, double epsilon);

// q_bin = 1 - exp(-d) variance / eps^2, d = distance of the predicted score
// to the nearest class threshold.
double binary_confidence(double variance, double epsilon, double distance);

struct Neighborhood {
  double radius = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double confidence = 0.0;
};

// Statistics of every rung; `pool_residuals` is indexed like the pool.
std::vector<Neighborhood> evaluate_ladder(const RadiusLadder& ladder,
                                          std::span<const double> pool_residuals,
                                          double epsilon);

// argmax confidence == argmin variance; ties go to the smaller radius.
// Returns a 0-based rung index. The ladder must be nonempty.
std::size_t select_best(std::span<const Neighborhood> ladder);

}  // namespace gradepred
