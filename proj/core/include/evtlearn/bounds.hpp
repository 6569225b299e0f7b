#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>

#include "evtlearn/simulate.hpp"

namespace evtlearn {

struct BoundInputs {
  std::size_t n = 1;
  std::size_t k = 1;
  std::size_t d = 1;
  double p = 0.1;          // tail probability
  double delta = 0.05;
  std::size_t vc_dim = 1;
  double m_eps = 1.0;      // noise scale
  double beta_star_l1 = 0.0;
  double c_factor = 1.0;
  double b_bar = 0.0;      // bias envelope at the relevant radial threshold

  /// delta in (0, 1], p in [0, 1], k <= n, c_factor >= 1, non-negative scales.
  void validate() const;
};

/// sqrt(2p/n) (sqrt(2 log(1/delta)) + sqrt(log 2 + V log(2np + 1)) + sqrt(2)/2) + 2 log(1/delta) / (3n)
double vc_tail_bound(const BoundInputs& in);

/// B(k, delta) = M_eps sqrt(log(4d/delta) / (2k)). Throws when 4d/delta <= 1.
double b_term(const BoundInputs& in);

/// k (1 + sqrt(3 log(1/delta) / k) + 3 log(1/delta) / k)
double k_tilde(std::size_t k, double delta);

/// b_term + b_bar
double residual_bound(const BoundInputs& in);

/// 24 C ||beta*||_1 b_term
double xlasso_prediction_bound(const BoundInputs& in);

enum class McStatement { kQuantileLemma, kResidualProp, kXlassoTheorem };

std::string_view to_string(McStatement s);
/// "quantile-lemma", "residual-prop", "xlasso-theorem"; anything else throws.
McStatement parse_statement(std::string_view text);

struct McSpec {
  double delta = 0.1;
  std::size_t k = 50;
  std::size_t n = 5000;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// Generator for the regression statements; defaults to the additive model with d = 100, a = 0.5.
  std::optional<AdditiveModelSpec> model;
  /// Noise scale; defaults to max(|lo|, |hi|) of the model noise (0 without noise).
  std::optional<double> m_eps;
};

struct McReport {
  McStatement statement = McStatement::kQuantileLemma;
  double delta = 0.0;
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t replications = 0;
  double coverage = 0.0;
  double target = 0.0;     // 1 - delta
  double threshold = 0.0;  // target - 3 sqrt(delta (1 - delta) / replications)
  bool pass = false;
  bool precondition = true;  // xlasso-theorem: b_bar <= B(k, delta)
};

/// Lower quantile t with P(||X||_2 > t) <= kappa / n for symmetric logistic rows, from
/// ||X||_2 >= max_j X_j whose law is Frechet with scale d^a. Returns 0 when kappa >= n.
double logistic_norm_quantile_lower(std::size_t n, double kappa, std::size_t d, double a);

/// ||beta1||_1 / log(1 + t), the bias envelope of the additive model; +inf at t = 0.
double additive_bias_envelope(const AdditiveModelSpec& spec, double t);

/// Simulates the statement's event over independent replications. Requires replications >= 100.
McReport mc_validate(McStatement statement, const McSpec& spec);

/// CSV header statement,delta,k,n,coverage,target,pass.
void write_mc_report(std::ostream& out, std::span<const McReport> reports);

}  // namespace evtlearn
