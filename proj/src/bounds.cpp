#include "gradepred/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradepred {

namespace {

double cap(double p) { return std::min(1.0, p); }

std::size_t min_size(std::span<const std::size_t> sizes) {
  return *std::min_element(sizes.begin(), sizes.end());
}

double lemma1_uncapped(std::size_t M, double delta,
                       std::span<const std::size_t> sizes) {
  const double m = static_cast<double>(min_size(sizes)) - 1.0;
  return 2.0 * static_cast<double>(M) * std::exp(-delta * delta * m / 8.0);
}

}  // namespace

void BoundInputs::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(var_star >= 0.0)) throw InvalidArgument("var_star must be >= 0");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
  if (neighborhood_sizes.empty()) {
    throw InvalidArgument("at least one neighborhood size is required");
  }
  for (std::size_t n : neighborhood_sizes) {
    if (n < 2) throw InvalidArgument("neighborhood sizes must be >= 2");
  }
}

TheoremBound theorem_bound(const BoundInputs& in) {
  in.validate();
  TheoremBound b;
  const double eps2 = in.epsilon * in.epsilon;
  b.chebyshev_term = 4.0 * in.var_star / eps2;
  b.hoeffding_term =
      2.0 * std::exp(-eps2 * static_cast<double>(min_size(in.neighborhood_sizes)) / 2.0);
  b.lemma1_term = std::isinf(in.delta)
                      ? 0.0
                      : lemma1_uncapped(in.M(), in.delta, in.neighborhood_sizes);
  b.uncapped = b.chebyshev_term + b.hoeffding_term + b.lemma1_term;
  b.value = cap(b.uncapped);
  b.degenerate_gap = in.delta == 0.0;
  return b;
}

TheoremBound plug_in_theorem_bound(std::span<const Neighborhood> ladder,
                                   double epsilon) {
  if (ladder.empty()) throw InvalidArgument("plug-in bound on an empty ladder");
  BoundInputs in;
  in.epsilon = epsilon;
  std::vector<double> sds;
  for (const auto& h : ladder) {
    in.neighborhood_sizes.push_back(h.count);
    sds.push_back(std::sqrt(h.variance));
  }
  std::sort(sds.begin(), sds.end());
  in.var_star = sds[0] * sds[0];
  in.delta = sds.size() > 1 ? sds[1] - sds[0]
                            : std::numeric_limits<double>::infinity();
  TheoremBound b = theorem_bound(in);
  b.plug_in = true;
  return b;
}

double chebyshev_bound(double variance, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  return std::max(0.0, 1.0 - variance / (epsilon * epsilon));
}

double hoeffding_bound(std::size_t n, double epsilon) {
  if (n < 1) throw InvalidArgument("Hoeffding bound needs n >= 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  return cap(2.0 * std::exp(-2.0 * static_cast<double>(n) * epsilon * epsilon));
}

double bernstein_std_bound(std::size_t n, double epsilon) {
  if (n < 2) throw InvalidArgument("empirical Bernstein bound needs n >= 2");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  return cap(2.0 * std::exp(-static_cast<double>(n - 1) * epsilon * epsilon / 2.0));
}

double lemma1_bound(std::size_t M, double delta,
                    std::span<const std::size_t> sizes) {
  if (M < 1 || sizes.empty()) {
    throw InvalidArgument("lemma bound needs at least one neighborhood");
  }
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
  for (std::size_t n : sizes) {
    if (n < 2) throw InvalidArgument("neighborhood sizes must be >= 2");
  }
  return cap(lemma1_uncapped(M, delta, sizes));
}

// --- Monte Carlo -----------------------------------------------------------

double ResidualGroup::mean() const {
  switch (kind) {
    case Kind::constant:
      return lo;
    case Kind::uniform:
      return (lo + hi) / 2.0;
    case Kind::two_point:
      return (1.0 - p_hi) * lo + p_hi * hi;
  }
  return 0.0;
}

double ResidualGroup::variance() const {
  switch (kind) {
    case Kind::constant:
      return 0.0;
    case Kind::uniform:
      return (hi - lo) * (hi - lo) / 12.0;
    case Kind::two_point:
      return p_hi * (1.0 - p_hi) * (hi - lo) * (hi - lo);
  }
  return 0.0;
}

double ResidualGroup::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::constant:
      return lo;
    case Kind::uniform:
      return std::uniform_real_distribution<double>(lo, hi)(rng);
    case Kind::two_point:
      return std::bernoulli_distribution(p_hi)(rng) ? hi : lo;
  }
  return 0.0;
}

void NestedResidualModel::validate() const {
  if (groups.empty()) throw ValidityError("model has no residual groups");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& gr = groups[g];
    const double top = gr.kind == ResidualGroup::Kind::constant ? gr.lo : gr.hi;
    if (gr.lo < 0.0 || top > 1.0 || top < gr.lo) {
      throw ValidityError("residual group " + std::to_string(g) +
                          " has support outside [0, 1]");
    }
    if (gr.kind == ResidualGroup::Kind::two_point &&
        !(gr.p_hi >= 0.0 && gr.p_hi <= 1.0)) {
      throw ValidityError("residual group " + std::to_string(g) +
                          " has an invalid probability");
    }
    if (gr.count == 0) {
      throw ValidityError("residual group " + std::to_string(g) + " is empty");
    }
  }
  if (groups[0].count < kMinNeighbors) {
    throw ValidityError("the innermost neighborhood needs at least three members");
  }
}

std::vector<std::size_t> NestedResidualModel::rung_sizes() const {
  std::vector<std::size_t> out;
  std::size_t n = 0;
  for (const auto& g : groups) {
    n += g.count;
    out.push_back(n);
  }
  return out;
}

double NestedResidualModel::rung_mean(std::size_t m) const {
  double n = 0.0;
  double s = 0.0;
  for (std::size_t g = 0; g <= m; ++g) {
    n += static_cast<double>(groups[g].count);
    s += static_cast<double>(groups[g].count) * groups[g].mean();
  }
  return s / n;
}

double NestedResidualModel::rung_variance(std::size_t m) const {
  double n = 0.0;
  double second = 0.0;
  for (std::size_t g = 0; g <= m; ++g) {
    const double c = static_cast<double>(groups[g].count);
    const double mu = groups[g].mean();
    n += c;
    second += c * (groups[g].variance() + mu * mu);
  }
  const double mu = rung_mean(m);
  return std::max(0.0, second / n - mu * mu);
}

std::size_t NestedResidualModel::best_rung() const {
  std::size_t best = 0;
  for (std::size_t m = 1; m < groups.size(); ++m) {
    if (rung_variance(m) < rung_variance(best)) best = m;
  }
  return best;
}

BoundInputs NestedResidualModel::true_inputs(double epsilon) const {
  validate();
  BoundInputs in;
  in.epsilon = epsilon;
  in.neighborhood_sizes = rung_sizes();
  std::vector<double> sds;
  for (std::size_t m = 0; m < groups.size(); ++m) {
    sds.push_back(std::sqrt(rung_variance(m)));
  }
  std::sort(sds.begin(), sds.end());
  in.var_star = sds[0] * sds[0];
  in.delta = sds.size() > 1 ? sds[1] - sds[0]
                            : std::numeric_limits<double>::infinity();
  return in;
}

MonteCarloReport monte_carlo_validate(const NestedResidualModel& model,
                                      const BoundInputs& inputs,
                                      std::size_t trials, std::uint64_t seed) {
  model.validate();
  if (trials < 10000) {
    throw InvalidArgument("Monte Carlo validation needs at least 10^4 trials");
  }

  // Fixed geometry: every member of group g is at distance 0.1 (g + 1).
  std::vector<double> distances;
  std::vector<std::size_t> group_of;
  for (std::size_t g = 0; g < model.groups.size(); ++g) {
    for (std::size_t i = 0; i < model.groups[g].count; ++i) {
      distances.push_back(0.1 * static_cast<double>(g + 1));
      group_of.push_back(g);
    }
  }
  const RadiusLadder ladder = radius_ladder(distances);
  const std::size_t m_star = model.best_rung();

  // Student residual: a draw from rung m*'s mixture.
  std::vector<double> mix_weights;
  for (std::size_t g = 0; g <= m_star; ++g) {
    mix_weights.push_back(static_cast<double>(model.groups[g].count));
  }
  std::discrete_distribution<std::size_t> pick_group(mix_weights.begin(),
                                                     mix_weights.end());

  const double prefix = 0.25;
  std::mt19937_64 rng(seed);
  std::vector<double> residuals(distances.size());
  MonteCarloReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < residuals.size(); ++i) {
      residuals[i] = model.groups[group_of[i]].sample(rng);
    }
    const auto hoods = evaluate_ladder(ladder, residuals, inputs.epsilon);
    const std::size_t chosen = select_best(hoods);
    if (chosen != m_star) ++report.wrong_neighborhood;
    const double z_hat = prefix + hoods[chosen].mean;
    const double z = prefix + model.groups[pick_group(rng)].sample(rng);
    if (std::abs(z - z_hat) >= inputs.epsilon) ++report.violations;
  }
  report.frequency =
      static_cast<double>(report.violations) / static_cast<double>(trials);
  report.bound = theorem_bound(inputs);
  const double b = report.bound.value;
  report.slack = 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
  report.within_bound = report.frequency <= b + report.slack;
  return report;
}

}  // namespace gradepred
