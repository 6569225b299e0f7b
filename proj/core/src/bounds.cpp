#include "evtlearn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evtlearn/csv.hpp"
#include "evtlearn/parallel.hpp"
#include "evtlearn/regression.hpp"
#include "evtlearn/tail.hpp"

namespace evtlearn {

void BoundInputs::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (n < 1 || k < 1 || d < 1) throw std::invalid_argument("n, k and d must be >= 1");
  if (k > n) throw std::invalid_argument("k must not exceed n");
  if (!(m_eps >= 0.0) || !(beta_star_l1 >= 0.0) || !(b_bar >= 0.0)) {
    throw std::invalid_argument("scales must be non-negative");
  }
  if (!(c_factor >= 1.0)) throw std::invalid_argument("C must be >= 1");
}

double vc_tail_bound(const BoundInputs& in) {
  const double n = static_cast<double>(in.n);
  const double log_inv = -std::log(in.delta);
  const double v = static_cast<double>(in.vc_dim);
  return std::sqrt(2.0 * in.p / n) *
             (std::sqrt(2.0 * log_inv) + std::sqrt(std::numbers::ln2 + v * std::log(2.0 * n * in.p + 1.0)) +
              std::numbers::sqrt2 / 2.0) +
         2.0 / (3.0 * n) * log_inv;
}

double b_term(const BoundInputs& in) {
  const double ratio = 4.0 * static_cast<double>(in.d) / in.delta;
  if (!(ratio > 1.0)) throw std::invalid_argument("b_term: 4d/delta must exceed 1");
  return in.m_eps * std::sqrt(std::log(ratio) / (2.0 * static_cast<double>(in.k)));
}

double k_tilde(std::size_t k, double delta) {
  if (k < 1) throw std::invalid_argument("k_tilde: k must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("k_tilde: delta must lie in (0, 1]");
  const double kd = static_cast<double>(k);
  const double l = 3.0 * -std::log(delta);
  return kd * (1.0 + std::sqrt(l / kd) + l / kd);
}

double residual_bound(const BoundInputs& in) { return b_term(in) + in.b_bar; }

double xlasso_prediction_bound(const BoundInputs& in) {
  return 24.0 * in.c_factor * in.beta_star_l1 * b_term(in);
}

std::string_view to_string(McStatement s) {
  switch (s) {
    case McStatement::kQuantileLemma: return "quantile-lemma";
    case McStatement::kResidualProp: return "residual-prop";
    case McStatement::kXlassoTheorem: return "xlasso-theorem";
  }
  return "quantile-lemma";
}

McStatement parse_statement(std::string_view text) {
  if (text == "quantile-lemma") return McStatement::kQuantileLemma;
  if (text == "residual-prop") return McStatement::kResidualProp;
  if (text == "xlasso-theorem") return McStatement::kXlassoTheorem;
  throw std::invalid_argument("unknown statement '" + std::string(text) + "'");
}

double logistic_norm_quantile_lower(std::size_t n, double kappa, std::size_t d, double a) {
  const double q = kappa / static_cast<double>(n);
  if (q >= 1.0) return 0.0;
  // P(max_j X_j <= x) = exp(-d^a / x)
  return std::pow(static_cast<double>(d), a) / -std::log1p(-q);
}

double additive_bias_envelope(const AdditiveModelSpec& spec, double t) {
  if (t <= 0.0) return std::numeric_limits<double>::infinity();
  return spec.beta1.lpNorm<1>() / std::log1p(t);
}

namespace {

bool quantile_event(const McSpec& spec, Rng rng, double level) {
  std::vector<double> r(spec.n);
  for (auto& v : r) v = 1.0 / rng.uniform();
  std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(spec.k - 1), r.end(), std::greater<>());
  return r[spec.k - 1] >= level;
}

struct RegressionSetting {
  AdditiveModelSpec model;
  double b_term = 0.0;
  double b_bar = 0.0;
};

RegressionSetting regression_setting(const McSpec& spec) {
  RegressionSetting s{spec.model ? *spec.model : AdditiveModelSpec::defaults(100, 0.5)};
  s.model.validate();
  double m_eps = 0.0;
  if (spec.m_eps) {
    m_eps = *spec.m_eps;
  } else if (s.model.noise) {
    m_eps = std::max(std::abs(s.model.noise->lo), std::abs(s.model.noise->hi));
  }
  BoundInputs in;
  in.n = spec.n;
  in.k = spec.k;
  in.d = s.model.d;
  in.delta = spec.delta;
  in.m_eps = m_eps;
  s.b_term = b_term(in);
  if (s.model.beta1.lpNorm<1>() == 0.0) {
    s.b_bar = 0.0;
  } else {
    const double t = logistic_norm_quantile_lower(spec.n, k_tilde(spec.k, spec.delta / 2.0), s.model.d, s.model.a);
    s.b_bar = additive_bias_envelope(s.model, t);
  }
  return s;
}

TailSample regression_tail(const McSpec& spec, const RegressionSetting& s, Rng rng) {
  const Dataset data = gen_additive_regression(spec.n, s.model, rng);
  return select_extremes(data, spec.k, NormSpec::l2(), Standardization::kNone);
}

}  // namespace

McReport mc_validate(McStatement statement, const McSpec& spec) {
  if (spec.replications < 100) throw std::invalid_argument("mc_validate: need at least 100 replications");
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw std::invalid_argument("mc_validate: delta must lie in (0, 1)");
  if (spec.k < 1 || spec.k > spec.n) throw std::invalid_argument("mc_validate: need 1 <= k <= n");

  McReport report;
  report.statement = statement;
  report.delta = spec.delta;
  report.k = spec.k;
  report.n = spec.n;
  report.replications = spec.replications;
  report.target = 1.0 - spec.delta;
  report.threshold =
      report.target - 3.0 * std::sqrt(spec.delta * (1.0 - spec.delta) / static_cast<double>(spec.replications));

  std::vector<char> hits(spec.replications, 0);
  const Rng root(spec.seed);

  switch (statement) {
    case McStatement::kQuantileLemma: {
      const double q = k_tilde(spec.k, spec.delta) / static_cast<double>(spec.n);
      const double level = q >= 1.0 ? 1.0 : 1.0 / q;  // unit-Pareto F^{<-}(1 - q)
      parallel_for(spec.replications, spec.threads,
                   [&](std::size_t r) { hits[r] = quantile_event(spec, root.substream(r), level); });
      break;
    }
    case McStatement::kResidualProp: {
      const RegressionSetting s = regression_setting(spec);
      const double bound = s.b_term + s.b_bar;
      parallel_for(spec.replications, spec.threads, [&](std::size_t r) {
        const TailSample tail = regression_tail(spec, s, root.substream(r));
        // Slack for the round-off in y - W beta0, which is exactly zero in noiseless models.
        const double slack = 1e-12 * std::max(1.0, tail.targets->lpNorm<Eigen::Infinity>());
        hits[r] = residual_score(tail, s.model.beta0) <= bound + slack;
      });
      break;
    }
    case McStatement::kXlassoTheorem: {
      const RegressionSetting s = regression_setting(spec);
      report.precondition = s.b_bar <= s.b_term;
      // Lambda at twice the residual bound, where the large-penalty prediction inequality applies.
      const double lambda = 2.0 * (s.b_term + s.b_bar);
      const double rhs = 12.0 * s.model.beta0.lpNorm<1>() * lambda;
      parallel_for(spec.replications, spec.threads, [&](std::size_t r) {
        const TailSample tail = regression_tail(spec, s, root.substream(r));
        double lhs = 0.0;
        if (std::isfinite(lambda)) {
          const auto fit = fit_xlasso(tail, lambda);
          lhs = (tail.angles * (fit.beta - s.model.beta0)).squaredNorm() / static_cast<double>(tail.k());
        }
        hits[r] = lhs <= rhs;
      });
      break;
    }
  }

  std::size_t count = 0;
  for (char h : hits) count += h ? 1 : 0;
  report.coverage = static_cast<double>(count) / static_cast<double>(spec.replications);
  report.pass = report.coverage >= report.threshold;
  return report;
}

void write_mc_report(std::ostream& out, std::span<const McReport> reports) {
  write_csv_row(out, {"statement", "delta", "k", "n", "coverage", "target", "pass"});
  for (const auto& r : reports) {
    write_csv_row(out, {std::string(to_string(r.statement)), format_double(r.delta), std::to_string(r.k),
                        std::to_string(r.n), format_double(r.coverage), format_double(r.target),
                        r.pass ? "true" : "false"});
  }
}

}  // namespace evtlearn
