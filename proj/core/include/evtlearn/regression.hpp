#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "evtlearn/geometry.hpp"
#include "evtlearn/tail.hpp"

namespace evtlearn {

struct LassoOptions {
  double tolerance = 1e-8;          // max coefficient change over a full sweep
  std::size_t max_sweeps = 100'000;
  bool record_objective = false;    // fill AngularLinearModel::objective_trace (costs O(kd) per sweep)
};

/// Linear predictor on angles, h(x) = <beta, theta(x)>. No intercept.
struct AngularLinearModel {
  Eigen::VectorXd beta;
  double lambda = 0.0;
  std::size_t k = 0;
  NormSpec norm;
  Standardization standardization = Standardization::kNone;
  std::size_t iterations = 0;
  bool converged = false;
  double objective = 0.0;  // (2k)^-1 ||y - W beta||^2 + lambda ||beta||_1 on the training tail
  std::vector<double> objective_trace;

  double predict_angle(const Eigen::Ref<const Eigen::VectorXd>& angle) const { return beta.dot(angle); }
};

double soft_threshold(double z, double lam);

/// (2k)^-1 ||y - W beta||_2^2 + lambda ||beta||_1
double lasso_objective(const TailSample& sample, const Eigen::VectorXd& beta, double lambda);

/// Least squares on the angles; minimum l2-norm solution when W is rank deficient.
AngularLinearModel fit_ols_angles(const TailSample& sample);

/// ||W^T y||_inf / k, the smallest penalty with a zero solution.
double lambda_max(const TailSample& sample);

/// Cyclic coordinate descent with soft-thresholding on the Gram matrix W^T W / k.
/// Returns converged = false (not an exception) when max_sweeps is hit.
AngularLinearModel fit_xlasso(const TailSample& sample, double lambda, const LassoOptions& options = {},
                              const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

struct KktReport {
  double grad_inf_norm = 0.0;  // ||W^T (y - W beta)||_inf / k
  double max_violation = 0.0;
  std::vector<std::size_t> active_set;
  bool pass = false;
};

KktReport kkt_certificate(const TailSample& sample, const AngularLinearModel& model, double tol);

/// k_test^-1 sum (y_i - <beta, theta_i>)^2 over a test tail.
double tail_mse(const AngularLinearModel& model, const TailSample& test);

/// ||W^T (y - W beta_star)||_inf / k
double residual_score(const TailSample& sample, const Eigen::VectorXd& beta_star);

struct PredictionLemmaReport {
  bool applicable = false;
  double lambda_threshold = 0.0;  // 2 ||W^T e||_inf / k
  double lhs = 0.0;               // k^-1 ||W (beta_hat - beta_star)||^2
  double rhs = 0.0;               // 12 ||beta_star||_1 lambda
  bool holds = false;
};

/// Fits XLASSO at `lambda` when lambda >= 2 ||W^T e||_inf / k and compares the in-sample
/// prediction error with 12 ||beta_star||_1 lambda.
PredictionLemmaReport check_prediction_lemma(const TailSample& sample, const Eigen::VectorXd& beta_star,
                                             double lambda, const LassoOptions& options = {});

}  // namespace evtlearn
