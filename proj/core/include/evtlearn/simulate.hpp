#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "evtlearn/dataset.hpp"

namespace evtlearn {

/// Deterministic stream keyed by (seed, stream). Different stream indices give
/// independent substreams; replications use stream = replication index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng substream(std::uint64_t index) const { return Rng(key_, index); }

  double uniform();       // (0, 1)
  double exponential();   // rate 1
  double normal();        // standard
  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Positive a-stable draw with Laplace transform exp(-t^a), via Kanter's
/// representation from one uniform and one exponential. a = 1 returns 1.
double positive_stable(double a, Rng& rng);

/// Symmetric logistic max-stable rows: X_j = (S / W_j)^a with S positive a-stable and
/// W_j unit exponential, so P(X <= x) = exp(-(sum_j x_j^(-1/a))^a), unit Frechet margins.
Eigen::MatrixXd mv_logistic(std::size_t n, std::size_t d, double a, Rng& rng);

/// Standard normal conditioned on [lo, hi], by rejection.
double truncated_gaussian(double lo, double hi, Rng& rng);

struct NoiseSpec {
  double lo = -2.0;
  double hi = 2.0;
};

/// Y = <theta(X), beta0> + <theta(X), beta1> / log(1 + ||X||_2) + eps, theta in l2.
struct AdditiveModelSpec {
  std::size_t d = 100;
  double a = 0.5;
  Eigen::VectorXd beta0;
  Eigen::VectorXd beta1;
  std::optional<NoiseSpec> noise = NoiseSpec{};  // nullopt: eps = 0

  /// beta0 = first five entries one, beta1 = all ones, noise truncated to [-2, 2].
  static AdditiveModelSpec defaults(std::size_t d, double a = 0.5);
  void validate() const;
};

/// Noise-free part of the additive model at covariate x.
double additive_signal(const AdditiveModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

Dataset gen_additive_regression(std::size_t n, const AdditiveModelSpec& spec, Rng& rng);

/// Threshold (1 / (d + 1))^(1/p) of the regularly varying classification example.
double classification_threshold(std::size_t d, double p);

/// Z ~ mv_logistic(n, d + 1, a); X = first d columns; label +1 iff Z_{d+1} / ||Z||_p > c.
Dataset gen_classification_rv(std::size_t n, std::size_t d, double a, double p, Rng& rng);

}  // namespace evtlearn
