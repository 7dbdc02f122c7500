#pragma once

// Comparison methods. Each predicts every student at one fixed assessment k
// from the normalized score prefix a_1..a_k; none has a stopping rule.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradepred/calibrate.hpp"
#include "gradepred/domain.hpp"

namespace gradepred {

enum class BenchmarkMethod { last_score, weighted_prefix, knn, ols, logistic };

std::string to_string(BenchmarkMethod method);

struct BenchmarkSpec {
  BenchmarkMethod method = BenchmarkMethod::weighted_prefix;
  std::size_t k_neighbors = 7;  // knn only
  std::size_t fixed_k = 1;

  void validate(std::size_t K) const;
};

// z_hat = a_k
double last_score_predict(const StudentRecord& record, std::size_t k);

// z_hat = sum_{l<=k} w_l a_l / sum_{l<=k} w_l
double weighted_prefix_predict(const StudentRecord& record, std::size_t k,
                               const AssessmentSchedule& schedule);

// The k_neighbors nearest pool members under the weighted L1 distance. Ties
// at the cut-off go to the earlier knowledge-base entry, i.e. the smaller
// (year, student_id).
std::vector<std::size_t> knn_members(std::span<const double> center,
                                     const KnowledgeBase& kb,
                                     std::size_t k_neighbors);

// prefix score + mean residual of the k_neighbors nearest pool members.
double knn_predict(const StudentRecord& record, std::size_t k,
                   const KnowledgeBase& kb, std::size_t k_neighbors = 7);

// --- linear regression -----------------------------------------------------

inline constexpr double kRidgeFallback = 1e-8;

struct LinearModel {
  std::vector<double> coefficients;  // intercept first
  bool ridge = false;                // fitted with the ridge fallback

  double predict(std::span<const double> x) const;
};

// Least squares through the normal equations. A rank-deficient design is
// refitted with kRidgeFallback added to the diagonal, or rejected with
// SingularDesign when allow_ridge is false.
LinearModel ols_fit(const std::vector<std::vector<double>>& x,
                    std::span<const double> z, bool allow_ridge = true);

double ols_predict(const LinearModel& model, std::span<const double> x);

// --- logistic regression ---------------------------------------------------

inline constexpr double kLogisticTolerance = 1e-6;
inline constexpr std::size_t kLogisticMaxIterations = 500;
inline constexpr double kLogisticNormCap = 100.0;
inline constexpr double kSeparationMargin = 1e-3;

// Models P[class == 1 | x]; class 1 is "does poorly".
struct LogisticModel {
  std::vector<double> coefficients;  // intercept first
  std::size_t iterations = 0;
  bool converged = false;
  // Perfectly separated training data: the fit hit the norm cap or assigns
  // every row its class with probability >= 1 - kSeparationMargin.
  bool separated = false;
  std::vector<double> log_likelihood_trace;

  double probability(std::span<const double> x) const;
  std::size_t classify(std::span<const double> x) const;  // p >= 0.5 -> 1
};

double log_likelihood(std::span<const double> beta,
                      const std::vector<std::vector<double>>& x,
                      std::span<const std::size_t> labels);
std::vector<double> log_likelihood_gradient(
    std::span<const double> beta, const std::vector<std::vector<double>>& x,
    std::span<const std::size_t> labels);

// Newton iterations with step halving, stopping when the gradient infinity
// norm drops below kLogisticTolerance, after kLogisticMaxIterations, or when
// the coefficient norm reaches kLogisticNormCap (separable data).
LogisticModel logistic_fit(const std::vector<std::vector<double>>& x,
                           std::span<const std::size_t> labels);

// --- harness -----------------------------------------------------------------

struct BenchmarkRow {
  BenchmarkMethod method = BenchmarkMethod::weighted_prefix;
  std::size_t k = 0;
  std::size_t n = 0;
  std::optional<double> mean_abs_error;  // absent for logistic
  std::optional<double> accuracy;        // present with class bands
  std::size_t failed = 0;                // students the method could not score
};

struct BenchmarkOptions {
  ReplaySettings replay;  // window and class bands
  std::size_t k_neighbors = 7;
};

// Every year with an earlier year is predicted from the knowledge base of
// its past, at each fixed k = 1..K, by every method. Rows are pooled over
// years and ordered by (method, k).
std::vector<BenchmarkRow> run_benchmarks(const CohortDataset& dataset,
                                         const BenchmarkOptions& options);

}  // namespace gradepred
