#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "evtlearn/geometry.hpp"
#include "evtlearn/tail.hpp"

namespace evtlearn {

enum class PenaltyMode { kLagrangian, kConstrained };

/// lagrangian(lambda): loss + lambda ||beta||_1.  constrained(u): loss s.t. ||beta||_1 <= u.
struct ClassifierMode {
  PenaltyMode kind = PenaltyMode::kLagrangian;
  double value = 0.0;

  static ClassifierMode lagrangian(double lambda) { return {PenaltyMode::kLagrangian, lambda}; }
  static ClassifierMode constrained(double u) { return {PenaltyMode::kConstrained, u}; }
};

struct LogisticOptions {
  double tolerance = 1e-9;  // sup-norm of the gradient mapping
  std::size_t max_iterations = 200'000;
  bool record_objective = false;
};

struct AngularClassifier {
  Eigen::VectorXd beta;
  ClassifierMode mode;
  std::size_t k = 0;
  NormSpec norm;
  Standardization standardization = Standardization::kNone;
  bool converged = false;
  bool single_class = false;  // training tail had only one label
  std::size_t iterations = 0;
  double objective = 0.0;     // mean logistic loss, plus the penalty in lagrangian mode
  std::vector<double> objective_trace;

  /// sign(<beta, angle>) with sign(0) = +1.
  int classify_angle(const Eigen::Ref<const Eigen::VectorXd>& angle) const {
    return beta.dot(angle) >= 0.0 ? 1 : -1;
  }
};

/// log(1 + exp(-margin)), evaluated without overflow.
double logistic_loss(double margin);

/// k^-1 sum_i log(1 + exp(-y_i <beta, theta_i>))
double logistic_risk(const TailSample& sample, const Eigen::VectorXd& beta);

/// Euclidean projection onto {b : ||b||_1 <= radius} (sort-based, exact).
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

/// Accelerated proximal (lagrangian) or projected (constrained) gradient from beta = 0,
/// backtracking from step 1 by halving, with a monotone safeguard on the objective.
/// Throws std::invalid_argument when a label is not +-1.
AngularClassifier fit_logistic_lasso(const TailSample& sample, ClassifierMode mode,
                                     const LogisticOptions& options = {});

/// Label of a point given in the model's (standardized) coordinates. x = 0 throws.
int classify(const AngularClassifier& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Misclassified fraction among the sample's extremes.
double empirical_tail_risk_01(const AngularClassifier& model, const TailSample& sample);

}  // namespace evtlearn
