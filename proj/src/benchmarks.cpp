#include "gradepred/benchmarks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace gradepred {

std::string to_string(BenchmarkMethod method) {
  switch (method) {
    case BenchmarkMethod::last_score:
      return "last_score";
    case BenchmarkMethod::weighted_prefix:
      return "weighted_prefix";
    case BenchmarkMethod::knn:
      return "knn";
    case BenchmarkMethod::ols:
      return "ols";
    case BenchmarkMethod::logistic:
      return "logistic";
  }
  return "unknown";
}

void BenchmarkSpec::validate(std::size_t K) const {
  if (method == BenchmarkMethod::knn && k_neighbors < 1) {
    throw InvalidArgument("knn needs k_neighbors >= 1");
  }
  if (fixed_k < 1 || fixed_k > K) {
    throw IndexError("fixed_k " + std::to_string(fixed_k) + " outside 1.." +
                     std::to_string(K));
  }
}

double last_score_predict(const StudentRecord& record, std::size_t k) {
  if (k < 1 || k > record.scores.size()) {
    throw IndexError("k = " + std::to_string(k) + " outside 1.." +
                     std::to_string(record.scores.size()));
  }
  if (!record.scores[k - 1]) {
    throw MissingScores("student '" + record.student_id +
                        "' has no score at assessment " + std::to_string(k));
  }
  return *record.scores[k - 1];
}

double weighted_prefix_predict(const StudentRecord& record, std::size_t k,
                               const AssessmentSchedule& schedule) {
  return prefix_score(record, k, schedule) / schedule.prefix_weight(k);
}

std::vector<std::size_t> knn_members(std::span<const double> center,
                                     const KnowledgeBase& kb,
                                     std::size_t k_neighbors) {
  if (k_neighbors < 1) throw InvalidArgument("knn needs k_neighbors >= 1");
  if (kb.size() < k_neighbors) {
    throw InsufficientNeighbors("pool has " + std::to_string(kb.size()) +
                                " members, knn needs " +
                                std::to_string(k_neighbors));
  }
  const auto d = pool_distances(center, kb);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + k_neighbors, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (d[a] != d[b]) return d[a] < d[b];
                      return a < b;
                    });
  order.resize(k_neighbors);
  return order;
}

double knn_predict(const StudentRecord& record, std::size_t k,
                   const KnowledgeBase& kb, std::size_t k_neighbors) {
  const FeatureVector x = feature_prefix(record, k);
  const auto members = knn_members(x.entries(), kb, k_neighbors);
  double sum = 0.0;
  for (std::size_t i : members) sum += kb.residual(i, k);
  return prefix_score(record, k, kb.schedule()) +
         sum / static_cast<double>(members.size());
}

// --- linear regression -----------------------------------------------------

namespace {

Eigen::MatrixXd design(const std::vector<std::vector<double>>& x) {
  if (x.empty()) throw InvalidArgument("no training rows");
  const std::size_t p = x[0].size();
  Eigen::MatrixXd d(static_cast<Eigen::Index>(x.size()),
                    static_cast<Eigen::Index>(p + 1));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != p) {
      throw DimensionError("training row " + std::to_string(i + 1) +
                           " has " + std::to_string(x[i].size()) +
                           " features, expected " + std::to_string(p));
    }
    const auto r = static_cast<Eigen::Index>(i);
    d(r, 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      d(r, static_cast<Eigen::Index>(j + 1)) = x[i][j];
    }
  }
  return d;
}

double linear(std::span<const double> beta, std::span<const double> x) {
  if (x.size() + 1 != beta.size()) {
    throw DimensionError("model expects " + std::to_string(beta.size() - 1) +
                         " features, got " + std::to_string(x.size()));
  }
  double t = beta[0];
  for (std::size_t j = 0; j < x.size(); ++j) t += beta[j + 1] * x[j];
  return t;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

double LinearModel::predict(std::span<const double> x) const {
  return linear(coefficients, x);
}

LinearModel ols_fit(const std::vector<std::vector<double>>& x,
                    std::span<const double> z, bool allow_ridge) {
  if (x.size() != z.size()) {
    throw DimensionError("feature rows and targets differ in length");
  }
  const Eigen::MatrixXd d = design(x);
  const Eigen::Map<const Eigen::VectorXd> y(z.data(),
                                            static_cast<Eigen::Index>(z.size()));
  Eigen::MatrixXd gram = d.transpose() * d;
  const Eigen::VectorXd rhs = d.transpose() * y;

  LinearModel model;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (lu.rank() == gram.cols()) {
    model.coefficients = to_vector(gram.ldlt().solve(rhs));
    return model;
  }
  if (!allow_ridge) {
    throw SingularDesign("design matrix has rank " + std::to_string(lu.rank()) +
                         " < " + std::to_string(gram.cols()));
  }
  gram.diagonal().array() += kRidgeFallback;
  model.coefficients = to_vector(gram.ldlt().solve(rhs));
  model.ridge = true;
  return model;
}

double ols_predict(const LinearModel& model, std::span<const double> x) {
  return model.predict(x);
}

// --- logistic regression ---------------------------------------------------

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_labels(const std::vector<std::vector<double>>& x,
                  std::span<const std::size_t> labels) {
  if (x.size() != labels.size()) {
    throw DimensionError("feature rows and labels differ in length");
  }
  for (std::size_t y : labels) {
    if (y > 1) throw InvalidArgument("logistic labels must be 0 or 1");
  }
}

}  // namespace

double log_likelihood(std::span<const double> beta,
                      const std::vector<std::vector<double>>& x,
                      std::span<const std::size_t> labels) {
  check_labels(x, labels);
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = linear(beta, x[i]);
    ll += labels[i] == 1 ? -softplus(-t) : -softplus(t);
  }
  return ll;
}

std::vector<double> log_likelihood_gradient(
    std::span<const double> beta, const std::vector<std::vector<double>>& x,
    std::span<const std::size_t> labels) {
  check_labels(x, labels);
  std::vector<double> g(beta.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = static_cast<double>(labels[i]) - sigmoid(linear(beta, x[i]));
    g[0] += r;
    for (std::size_t j = 0; j < x[i].size(); ++j) g[j + 1] += r * x[i][j];
  }
  return g;
}

double LogisticModel::probability(std::span<const double> x) const {
  return sigmoid(linear(coefficients, x));
}

std::size_t LogisticModel::classify(std::span<const double> x) const {
  return probability(x) >= 0.5 ? kDoesPoorly : kDoesWell;
}

LogisticModel logistic_fit(const std::vector<std::vector<double>>& x,
                           std::span<const std::size_t> labels) {
  check_labels(x, labels);
  const Eigen::MatrixXd d = design(x);
  const bool has0 = std::find(labels.begin(), labels.end(), 0) != labels.end();
  const bool has1 = std::find(labels.begin(), labels.end(), 1) != labels.end();
  if (!has0 || !has1) {
    throw DegenerateLabels("logistic regression needs both classes in training");
  }

  const auto p = d.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  LogisticModel model;
  auto ll_at = [&](const Eigen::VectorXd& b) {
    return log_likelihood(std::span<const double>(b.data(), b.size()), x, labels);
  };
  double ll = ll_at(beta);
  model.log_likelihood_trace.push_back(ll);

  for (std::size_t it = 0; it < kLogisticMaxIterations; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const double mu = sigmoid(d.row(i).dot(beta));
      grad += (static_cast<double>(labels[static_cast<std::size_t>(i)]) - mu) *
              d.row(i).transpose();
      hess += mu * (1.0 - mu) * d.row(i).transpose() * d.row(i);
    }
    if (grad.lpNorm<Eigen::Infinity>() < kLogisticTolerance) {
      model.converged = true;
      break;
    }
    hess.diagonal().array() += kRidgeFallback;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) step = grad;

    double scale = 1.0;
    bool improved = false;
    Eigen::VectorXd next;
    double next_ll = ll;
    for (int h = 0; h < 60; ++h) {
      next = beta + scale * step;
      next_ll = ll_at(next);
      if (next_ll >= ll) {
        improved = true;
        break;
      }
      scale /= 2.0;
    }
    model.iterations = it + 1;
    if (!improved) break;

    if (next.norm() >= kLogisticNormCap) {
      next *= kLogisticNormCap / next.norm();
      beta = next;
      ll = ll_at(beta);
      model.log_likelihood_trace.push_back(ll);
      model.separated = true;
      break;
    }
    beta = next;
    ll = next_ll;
    model.log_likelihood_trace.push_back(ll);
  }
  if (!model.separated) {
    // Every training row on its side with near-certain probability: the
    // likelihood has no finite maximizer and the iterate only stopped early.
    bool all_sure = true;
    for (Eigen::Index i = 0; i < d.rows() && all_sure; ++i) {
      const double mu = sigmoid(d.row(i).dot(beta));
      const double p_true = labels[static_cast<std::size_t>(i)] == 1 ? mu : 1.0 - mu;
      all_sure = p_true >= 1.0 - kSeparationMargin;
    }
    model.separated = all_sure;
  }
  model.coefficients = to_vector(beta);
  return model;
}

// --- harness -----------------------------------------------------------------

namespace {

struct Accumulator {
  std::size_t n = 0;
  std::size_t failed = 0;
  double abs_error = 0.0;
  std::size_t classified = 0;
  std::size_t correct = 0;
};

constexpr BenchmarkMethod kMethods[] = {
    BenchmarkMethod::last_score, BenchmarkMethod::weighted_prefix,
    BenchmarkMethod::knn, BenchmarkMethod::ols, BenchmarkMethod::logistic};

}  // namespace

std::vector<BenchmarkRow> run_benchmarks(const CohortDataset& dataset,
                                         const BenchmarkOptions& options) {
  const std::size_t K = dataset.schedule.size();
  std::map<std::pair<BenchmarkMethod, std::size_t>, Accumulator> acc;

  for (const auto& [year, records] : dataset.years) {
    const KnowledgeBase kb = knowledge_base(dataset, year, options.replay.window);
    if (kb.empty()) continue;
    const auto bands = bands_for_year(dataset, year, options.replay);
    const bool binary = bands && bands->class_count() == 2;

    std::vector<const StudentRecord*> test;
    for (const auto& r : records) {
      if (r.is_complete()) test.push_back(&r);
    }
    if (test.empty()) continue;

    for (std::size_t k = 1; k <= K; ++k) {
      std::vector<std::vector<double>> train_x;
      std::vector<double> train_z;
      std::vector<std::size_t> train_y;
      for (std::size_t i = 0; i < kb.size(); ++i) {
        const auto f = kb.features(i, k);
        train_x.emplace_back(f.begin(), f.end());
        train_z.push_back(kb.entries()[i].overall);
        if (bands) train_y.push_back(classify_score(kb.entries()[i].overall, *bands));
      }
      std::optional<LinearModel> ols;
      try {
        ols = ols_fit(train_x, train_z);
      } catch (const Error&) {
      }
      std::optional<LogisticModel> logit;
      if (binary) {
        try {
          logit = logistic_fit(train_x, train_y);
        } catch (const Error&) {
        }
      }

      for (BenchmarkMethod m : kMethods) {
        if (m == BenchmarkMethod::logistic && !binary) continue;
        Accumulator& a = acc[{m, k}];
        for (const StudentRecord* r : test) {
          const double z = overall_score(*r, dataset.schedule);
          const FeatureVector x = feature_prefix(*r, k);
          std::optional<double> z_hat;
          std::optional<std::size_t> cls;
          try {
            switch (m) {
              case BenchmarkMethod::last_score:
                z_hat = last_score_predict(*r, k);
                break;
              case BenchmarkMethod::weighted_prefix:
                z_hat = weighted_prefix_predict(*r, k, dataset.schedule);
                break;
              case BenchmarkMethod::knn:
                z_hat = knn_predict(*r, k, kb, options.k_neighbors);
                break;
              case BenchmarkMethod::ols:
                if (ols) z_hat = ols->predict(x.entries());
                break;
              case BenchmarkMethod::logistic:
                if (logit) cls = logit->classify(x.entries());
                break;
            }
          } catch (const Error&) {
          }
          if (z_hat && bands) cls = classify_score(*z_hat, *bands);
          if (!z_hat && !cls) {
            ++a.failed;
            continue;
          }
          ++a.n;
          if (z_hat) a.abs_error += std::abs(z - *z_hat);
          if (cls) {
            ++a.classified;
            if (*cls == classify_score(z, *bands)) ++a.correct;
          }
        }
      }
    }
  }

  std::vector<BenchmarkRow> rows;
  for (const auto& [key, a] : acc) {
    BenchmarkRow row;
    row.method = key.first;
    row.k = key.second;
    row.n = a.n;
    row.failed = a.failed;
    if (key.first != BenchmarkMethod::logistic && a.n > 0) {
      row.mean_abs_error = a.abs_error / static_cast<double>(a.n);
    }
    if (a.classified > 0) {
      row.accuracy =
          static_cast<double>(a.correct) / static_cast<double>(a.classified);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gradepred
