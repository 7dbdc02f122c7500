#pragma once

// Probability bounds on the prediction error of the neighborhood estimator
// and a Monte Carlo check of the combined bound.
//
// The combined bound is
//   P[|z - z_hat| >= eps] <= 4 Var* / eps^2
//                           + 2 exp(-eps^2 min_m |B_m| / 2)
//                           + 2 M exp(-Delta^2 min_m (|B_m| - 1) / 8)
// where Var* is the smallest true residual variance among the M candidate
// neighborhoods and Delta the gap between the two smallest residual standard
// deviations. It assumes scores scaled to [0, 1].

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gradepred/neighborhoods.hpp"

namespace gradepred {

struct BoundInputs {
  double epsilon = 0.0;
  double var_star = 0.0;
  std::vector<std::size_t> neighborhood_sizes;  // |B(x, r_m)|, m = 1..M
  double delta = 0.0;

  std::size_t M() const noexcept { return neighborhood_sizes.size(); }
  void validate() const;
};

struct TheoremBound {
  double chebyshev_term = 0.0;  // 4 Var* / eps^2
  double hoeffding_term = 0.0;  // 2 exp(-eps^2 min|B| / 2)
  double lemma1_term = 0.0;     // 2 M exp(-Delta^2 min(|B|-1) / 8)
  double uncapped = 0.0;
  double value = 0.0;  // min(1, uncapped)
  bool degenerate_gap = false;  // Delta == 0
  bool plug_in = false;  // built from sample estimates; not a rigorous bound
};

TheoremBound theorem_bound(const BoundInputs& inputs);

// Plug-in version over an evaluated ladder: Var* and Delta come from the
// sample variances, so the result is labeled plug_in. A single-rung ladder
// cannot pick a wrong neighborhood and gets a zero lemma term.
TheoremBound plug_in_theorem_bound(std::span<const Neighborhood> ladder,
                                   double epsilon);

// Lower bound on P[|C - mu| < eps]: 1 - variance / eps^2, floored at 0.
double chebyshev_bound(double variance, double epsilon);

// Upper bound on P[|mean_n - mu| >= eps] for [0,1] variables:
// 2 exp(-2 n eps^2), capped at 1. Requires n >= 1.
double hoeffding_bound(std::size_t n, double epsilon);

// Upper bound on P[|sd_hat - sd| >= eps] for [0,1] variables:
// 2 exp(-(n-1) eps^2 / 2), capped at 1. Requires n >= 2.
double bernstein_std_bound(std::size_t n, double epsilon);

// Upper bound on choosing a neighborhood other than the lowest-variance one:
// 2 M exp(-Delta^2 min_m(|B_m| - 1) / 8), capped at 1.
double lemma1_bound(std::size_t M, double delta,
                    std::span<const std::size_t> neighborhood_sizes);

// --- Monte Carlo validation -----------------------------------------------

// A block of pool members sharing one residual distribution on [0, 1].
struct ResidualGroup {
  enum class Kind { constant, uniform, two_point };
  Kind kind = Kind::uniform;
  double lo = 0.0;  // constant value, uniform lower end, or two-point low
  double hi = 0.0;  // uniform upper end or two-point high
  double p_hi = 0.5;  // two-point probability of `hi`
  std::size_t count = 0;

  double mean() const;
  double variance() const;
  double sample(std::mt19937_64& rng) const;
};

// Nested candidate neighborhoods: group m sits at distance m + 1 (in units
// of 0.1) from the student, so rung m of the radius ladder contains groups
// 0..m. The student's own residual is drawn from the rung with the smallest
// true variance.
struct NestedResidualModel {
  std::vector<ResidualGroup> groups;

  // Throws ValidityError when any group leaves [0, 1] or the first rung has
  // fewer than three members.
  void validate() const;
  std::vector<std::size_t> rung_sizes() const;
  double rung_mean(std::size_t m) const;
  double rung_variance(std::size_t m) const;
  std::size_t best_rung() const;  // m*, ties to the smaller rung
  // Exact theorem inputs of the model at `epsilon`.
  BoundInputs true_inputs(double epsilon) const;
};

struct MonteCarloReport {
  std::size_t trials = 0;
  std::size_t violations = 0;        // |z - z_hat| >= eps
  std::size_t wrong_neighborhood = 0;  // selected rung != m*
  double frequency = 0.0;
  TheoremBound bound;
  double slack = 0.0;  // 3 binomial standard deviations at the bound
  bool within_bound = false;
};

// Each trial samples fresh pool residuals, runs ladder construction, rung
// statistics and best-rung selection, predicts z_hat = prefix + c_hat and
// compares it with z = prefix + c for a freshly drawn student residual c.
MonteCarloReport monte_carlo_validate(const NestedResidualModel& model,
                                      const BoundInputs& inputs,
                                      std::size_t trials, std::uint64_t seed);

}  // namespace gradepred
