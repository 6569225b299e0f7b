#include "evtlearn/classification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace evtlearn {

namespace {

const std::vector<int>& require_labels(const TailSample& sample, const char* where) {
  if (!sample.labels) throw std::invalid_argument(std::string(where) + ": sample has no labels");
  for (int y : *sample.labels) {
    if (y != 1 && y != -1) throw std::invalid_argument(std::string(where) + ": labels must be -1 or +1");
  }
  return *sample.labels;
}

// d/dm log(1 + exp(-m)) = -1 / (1 + exp(m))
double logistic_slope(double margin) {
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

}  // namespace

double logistic_loss(double margin) {
  if (margin > 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

double logistic_risk(const TailSample& sample, const Eigen::VectorXd& beta) {
  const auto& y = require_labels(sample, "logistic_risk");
  const Eigen::VectorXd scores = sample.angles * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) s += logistic_loss(y[static_cast<std::size_t>(i)] * scores(i));
  return s / static_cast<double>(sample.k());
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("project_l1_ball: radius must be >= 0");
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Eigen::VectorXd::Zero(v.size());

  std::vector<double> u(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) u[static_cast<std::size_t>(j)] = std::abs(v(j));
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) shift = candidate;
  }
  Eigen::VectorXd w(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::max(std::abs(v(j)) - shift, 0.0);
    w(j) = v(j) >= 0.0 ? mag : -mag;
  }
  return w;
}

AngularClassifier fit_logistic_lasso(const TailSample& sample, ClassifierMode mode, const LogisticOptions& options) {
  const auto& labels = require_labels(sample, "fit_logistic_lasso");
  if (sample.k() == 0) throw std::invalid_argument("fit_logistic_lasso: empty sample");
  if (!(mode.value >= 0.0)) throw std::invalid_argument("fit_logistic_lasso: penalty/constraint must be >= 0");

  const Eigen::Index d = sample.angles.cols();
  const double k = static_cast<double>(sample.k());
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];

  AngularClassifier model;
  model.mode = mode;
  model.k = sample.k();
  model.norm = sample.norm;
  model.standardization = sample.standardization;
  model.single_class = (y.array() > 0).all() || (y.array() < 0).all();

  const bool lagrangian = mode.kind == PenaltyMode::kLagrangian;
  const auto smooth = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd margins = y.cwiseProduct(sample.angles * b);
    double s = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) s += logistic_loss(margins(i));
    return s / k;
  };
  const auto gradient = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd margins = y.cwiseProduct(sample.angles * b);
    Eigen::VectorXd w(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) w(i) = logistic_slope(margins(i)) * y(i);
    return Eigen::VectorXd(sample.angles.transpose() * w / k);
  };
  const auto penalty = [&](const Eigen::VectorXd& b) { return lagrangian ? mode.value * b.lpNorm<1>() : 0.0; };
  const auto prox = [&](const Eigen::VectorXd& v, double step) -> Eigen::VectorXd {
    if (!lagrangian) return project_l1_ball(v, mode.value);
    Eigen::VectorXd out(v.size());
    const double t = step * mode.value;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      out(j) = v(j) > t ? v(j) - t : (v(j) < -t ? v(j) + t : 0.0);
    }
    return out;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd z = x;
  Eigen::VectorXd point = x;
  double fx = smooth(x) + penalty(x);
  double momentum = 1.0;
  double step = 1.0;
  bool at_best = true;  // point == x
  if (options.record_objective) model.objective_trace.push_back(fx);

  for (model.iterations = 0; model.iterations < options.max_iterations;) {
    ++model.iterations;
    const double f_point = smooth(point);
    const Eigen::VectorXd g = gradient(point);
    double f_z = 0.0;
    for (;;) {
      z = prox(point - step * g, step);
      const Eigen::VectorXd diff = z - point;
      f_z = smooth(z);
      if (f_z <= f_point + g.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-15 * std::abs(f_point)) break;
      step *= 0.5;
      if (step < 1e-20) break;
    }
    const double mapping = (z - point).lpNorm<Eigen::Infinity>() / step;

    const double fz = f_z + penalty(z);
    x_prev = x;
    const bool descent = fz <= fx;
    if (descent) {
      x = z;
      fx = fz;
    }
    if (options.record_objective) model.objective_trace.push_back(fx);
    if (mapping < options.tolerance) {
      model.converged = true;
      break;
    }
    if (!descent) {
      // A plain proximal step from the best iterate can only fail to descend through
      // round-off, so x is stationary to working precision.
      if (at_best) {
        model.converged = true;
        break;
      }
      // Adaptive restart: drop the momentum and continue from the best iterate.
      at_best = true;
      momentum = 1.0;
      point = x;
      continue;
    }
    at_best = false;
    const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    point = x + (momentum / next) * (z - x) + ((momentum - 1.0) / next) * (x - x_prev);
    momentum = next;
  }
  model.beta = x;
  model.objective = fx;
  return model;
}

int classify(const AngularClassifier& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const PolarPoint p = polar(x, model.norm);
  return model.classify_angle(p.angle);
}

double empirical_tail_risk_01(const AngularClassifier& model, const TailSample& sample) {
  const auto& y = require_labels(sample, "empirical_tail_risk_01");
  if (sample.k() == 0) throw std::invalid_argument("empirical_tail_risk_01: empty sample");
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < sample.angles.rows(); ++i) {
    if (model.classify_angle(sample.angles.row(i).transpose()) != y[static_cast<std::size_t>(i)]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(sample.k());
}

}  // namespace evtlearn
