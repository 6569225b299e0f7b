#include "evtlearn/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evtlearn {

namespace {

const Eigen::VectorXd& require_targets(const TailSample& sample, const char* where) {
  if (!sample.targets) throw std::invalid_argument(std::string(where) + ": sample has no real targets");
  return *sample.targets;
}

AngularLinearModel model_shell(const TailSample& sample, double lambda) {
  AngularLinearModel m;
  m.lambda = lambda;
  m.k = sample.k();
  m.norm = sample.norm;
  m.standardization = sample.standardization;
  return m;
}

}  // namespace

double soft_threshold(double z, double lam) {
  if (z > lam) return z - lam;
  if (z < -lam) return z + lam;
  return 0.0;
}

double lasso_objective(const TailSample& sample, const Eigen::VectorXd& beta, double lambda) {
  const auto& y = require_targets(sample, "lasso_objective");
  const double k = static_cast<double>(sample.k());
  return (y - sample.angles * beta).squaredNorm() / (2.0 * k) + lambda * beta.lpNorm<1>();
}

AngularLinearModel fit_ols_angles(const TailSample& sample) {
  const auto& y = require_targets(sample, "fit_ols_angles");
  if (sample.k() == 0) throw std::invalid_argument("fit_ols_angles: empty sample");
  AngularLinearModel m = model_shell(sample, 0.0);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sample.angles);
  m.beta = cod.solve(y);
  m.converged = true;
  m.objective = lasso_objective(sample, m.beta, 0.0);
  return m;
}

double lambda_max(const TailSample& sample) {
  const auto& y = require_targets(sample, "lambda_max");
  return (sample.angles.transpose() * y).lpNorm<Eigen::Infinity>() / static_cast<double>(sample.k());
}

AngularLinearModel fit_xlasso(const TailSample& sample, double lambda, const LassoOptions& options,
                              const std::optional<Eigen::VectorXd>& warm_start) {
  const auto& y = require_targets(sample, "fit_xlasso");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("fit_xlasso: lambda must be >= 0");
  if (!y.allFinite()) throw std::invalid_argument("fit_xlasso: non-finite target");
  if (sample.k() == 0) throw std::invalid_argument("fit_xlasso: empty sample");

  const Eigen::Index d = sample.angles.cols();
  const double k = static_cast<double>(sample.k());
  const Eigen::MatrixXd gram = sample.angles.transpose() * sample.angles / k;
  const Eigen::VectorXd corr = sample.angles.transpose() * y / k;

  AngularLinearModel m = model_shell(sample, lambda);
  m.beta = Eigen::VectorXd::Zero(d);
  if (warm_start) {
    if (warm_start->size() != d) throw std::invalid_argument("fit_xlasso: warm start has wrong size");
    m.beta = *warm_start;
  }
  // grad = W^T (y - W beta) / k, kept up to date after every coordinate move.
  Eigen::VectorXd grad = corr - gram * m.beta;

  const auto update = [&](Eigen::Index j) {
    const double gjj = gram(j, j);
    const double old = m.beta(j);
    const double next = gjj > 0.0 ? soft_threshold(grad(j) + gjj * old, lambda) / gjj : 0.0;
    const double delta = next - old;
    if (delta != 0.0) {
      grad.noalias() -= gram.col(j) * delta;
      m.beta(j) = next;
    }
    return std::abs(delta);
  };
  const auto record = [&] {
    if (options.record_objective) m.objective_trace.push_back(lasso_objective(sample, m.beta, lambda));
  };

  if (options.record_objective) m.objective_trace.push_back(lasso_objective(sample, m.beta, lambda));
  std::vector<Eigen::Index> active;
  while (m.iterations < options.max_sweeps) {
    double full_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) full_change = std::max(full_change, update(j));
    ++m.iterations;
    record();
    if (full_change < options.tolerance) {
      m.converged = true;
      break;
    }
    active.clear();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (m.beta(j) != 0.0) active.push_back(j);
    }
    while (m.iterations < options.max_sweeps) {
      double change = 0.0;
      for (auto j : active) change = std::max(change, update(j));
      ++m.iterations;
      record();
      if (change < options.tolerance) break;
    }
  }
  m.objective = lasso_objective(sample, m.beta, lambda);
  return m;
}

KktReport kkt_certificate(const TailSample& sample, const AngularLinearModel& model, double tol) {
  const auto& y = require_targets(sample, "kkt_certificate");
  if (model.beta.size() != sample.angles.cols()) throw std::invalid_argument("kkt_certificate: dimension mismatch");
  const double k = static_cast<double>(sample.k());
  const Eigen::VectorXd g = sample.angles.transpose() * (y - sample.angles * model.beta) / k;

  KktReport r;
  r.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    double violation = std::max(0.0, std::abs(g(j)) - model.lambda);
    if (model.beta(j) != 0.0) {
      r.active_set.push_back(static_cast<std::size_t>(j));
      const double sgn = model.beta(j) > 0.0 ? 1.0 : -1.0;
      violation = std::max(violation, std::abs(g(j) - model.lambda * sgn));
    }
    r.max_violation = std::max(r.max_violation, violation);
  }
  r.pass = r.max_violation <= tol;
  return r;
}

double tail_mse(const AngularLinearModel& model, const TailSample& test) {
  const auto& y = require_targets(test, "tail_mse");
  if (test.k() == 0) throw std::invalid_argument("tail_mse: empty test tail");
  if (model.beta.size() != test.angles.cols()) throw std::invalid_argument("tail_mse: dimension mismatch");
  return (y - test.angles * model.beta).squaredNorm() / static_cast<double>(test.k());
}

double residual_score(const TailSample& sample, const Eigen::VectorXd& beta_star) {
  const auto& y = require_targets(sample, "residual_score");
  return (sample.angles.transpose() * (y - sample.angles * beta_star)).lpNorm<Eigen::Infinity>() /
         static_cast<double>(sample.k());
}

PredictionLemmaReport check_prediction_lemma(const TailSample& sample, const Eigen::VectorXd& beta_star,
                                             double lambda, const LassoOptions& options) {
  PredictionLemmaReport r;
  r.lambda_threshold = 2.0 * residual_score(sample, beta_star);
  r.applicable = lambda >= r.lambda_threshold;
  r.rhs = 12.0 * beta_star.lpNorm<1>() * lambda;
  if (!r.applicable) return r;

  const AngularLinearModel fit = fit_xlasso(sample, lambda, options);
  r.lhs = (sample.angles * (fit.beta - beta_star)).squaredNorm() / static_cast<double>(sample.k());
  // The inequality is exact at the minimizer; allow only solver round-off.
  r.holds = r.lhs <= r.rhs + 1e-9 * std::max(1.0, r.rhs);
  return r;
}

}  // namespace evtlearn
