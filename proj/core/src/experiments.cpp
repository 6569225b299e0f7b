#include "evtlearn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "evtlearn/crossval.hpp"
#include "evtlearn/csv.hpp"
#include "evtlearn/parallel.hpp"
#include "evtlearn/regression.hpp"
#include "evtlearn/tail.hpp"
#include "evtlearn/transforms.hpp"

namespace evtlearn {

std::vector<double> log_lambda_grid(double lambda_max, std::size_t points, double ratio) {
  if (points < 1) throw std::invalid_argument("lambda grid needs at least one point");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("lambda grid ratio must lie in (0, 1]");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double step = std::log(ratio) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lambda_max * std::exp(step * static_cast<double>(i));
  return grid;
}

double interpolated_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

struct CvSettings {
  std::size_t folds;
  std::size_t points;
  double ratio;
};

void evaluate_methods(const Dataset& train, const TailSample& test, double tau, std::size_t rep,
                      std::uint64_t cv_seed, const CvSettings& cv, std::vector<MseRow>& out) {
  const NormSpec l2 = NormSpec::l2();
  const std::size_t k = tail_count(train.n(), tau);
  if (k == 0) throw std::invalid_argument("tau = " + format_double(tau) + " leaves no training extremes");
  const TailSample tail = select_extremes(train, k, l2, Standardization::kNone);

  const auto grid = log_lambda_grid(lambda_max(tail), cv.points, cv.ratio);
  const CvPlan plan = make_folds(train.n(), CvScheme::kfold(cv.folds), cv_seed);
  const GridSelection sel = grid_select(xlasso_rule(l2), grid, train, plan, tau, 1);
  const auto lasso = fit_xlasso(tail, sel.best);
  out.push_back({tau, "xlasso", rep, tail_mse(lasso, test), sel.best});

  const auto ols = fit_ols_angles(tail);
  out.push_back({tau, "ols", rep, tail_mse(ols, test), 0.0});
}

std::vector<MseSummary> summarize(const std::vector<MseRow>& rows) {
  std::vector<MseSummary> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<double> values;
    while (j < rows.size() && rows[j].tau == rows[i].tau && rows[j].method == rows[i].method) {
      values.push_back(rows[j].mse);
      ++j;
    }
    MseSummary s;
    s.tau = rows[i].tau;
    s.method = rows[i].method;
    s.count = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.q10 = interpolated_quantile(values, 0.1);
    s.q90 = interpolated_quantile(values, 0.9);
    out.push_back(s);
    i = j;
  }
  return out;
}

ExperimentResult collect(std::vector<std::vector<MseRow>> per_rep) {
  ExperimentResult result;
  for (auto& rows : per_rep) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  std::sort(result.rows.begin(), result.rows.end(), [](const MseRow& a, const MseRow& b) {
    return std::tie(a.tau, a.method, a.rep) < std::tie(b.tau, b.method, b.rep);
  });
  result.summary = summarize(result.rows);
  return result;
}

void check_taus(const std::vector<double>& taus) {
  if (taus.empty()) throw std::invalid_argument("empty tau grid");
  for (double t : taus) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("tau values must lie in (0, 1]");
  }
}

}  // namespace

ExperimentResult run_simulated_xlasso_experiment(const SimExperimentConfig& config) {
  check_taus(config.taus);
  const AdditiveModelSpec model = config.model ? *config.model : AdditiveModelSpec::defaults(config.d, config.a);
  model.validate();
  const std::size_t k_test = tail_count(config.n_test, config.tau_test);
  if (k_test == 0) throw std::invalid_argument("tau_test * n_test leaves no test extremes");
  const CvSettings cv{config.cv_folds, config.lambda_points, config.lambda_ratio};
  const Rng root(config.seed);

  std::vector<std::vector<MseRow>> per_rep(config.replications);
  parallel_for(config.replications, config.threads, [&](std::size_t rep) {
    try {
      Rng train_rng = root.substream(3 * rep);
      Rng test_rng = root.substream(3 * rep + 1);
      const std::uint64_t cv_seed = root.substream(3 * rep + 2).next();
      const Dataset train = gen_additive_regression(config.n, model, train_rng);
      const TailSample test =
          select_extremes(gen_additive_regression(config.n_test, model, test_rng), k_test, NormSpec::l2(),
                          Standardization::kNone);
      for (double tau : config.taus) evaluate_methods(train, test, tau, rep, cv_seed, cv, per_rep[rep]);
    } catch (const std::exception& e) {
      throw std::runtime_error("replication " + std::to_string(rep) + ": " + e.what());
    }
  });
  return collect(std::move(per_rep));
}

PortfolioResult run_portfolio_experiment(const Dataset& data, const PortfolioConfig& config) {
  check_taus(config.taus);
  if (!data.target) throw std::invalid_argument("portfolio data has no target column");
  if (data.d() + 1 != config.expected_columns) {
    throw std::invalid_argument("expected " + std::to_string(config.expected_columns) + " columns, found " +
                                std::to_string(data.d() + 1));
  }
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  const NormSpec l2 = NormSpec::l2();
  const std::size_t n = data.n();

  // Rescaled target Y = Z / max(||X||_2, 1).
  Dataset scaled = data;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    (*scaled.target)(i) = rescale_target(data.x.row(i).transpose(), (*data.target)(i), l2);
  }

  PortfolioResult result;
  {
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = lp_norm(data.x.row(static_cast<Eigen::Index>(i)).transpose(), l2);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    const double max_tau = *std::max_element(config.taus.begin(), config.taus.end());
    const std::size_t kmax = std::max<std::size_t>(1, tail_count(n, max_tau));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= kmax; ++k) {
      const std::size_t i = order[k - 1];
      const double ratio = (*data.target)(static_cast<Eigen::Index>(i)) / norms[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      result.support.push_back({k, lo, hi});
    }
  }

  const auto n_train = static_cast<std::size_t>(std::floor(config.train_fraction * static_cast<double>(n)));
  if (n_train < 2 || n_train >= n) throw std::invalid_argument("portfolio data too small to split");
  const std::size_t k_test = tail_count(n - n_train, config.tau_test);
  if (k_test == 0) throw std::invalid_argument("tau_test leaves no test extremes");
  const CvSettings cv{config.cv_folds, config.lambda_points, config.lambda_ratio};
  const Rng root(config.seed);

  std::vector<std::vector<MseRow>> per_split(config.splits);
  parallel_for(config.splits, config.threads, [&](std::size_t split) {
    try {
      Rng rng = root.substream(split);
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng.engine());
      const std::span<const std::size_t> all(perm);
      const Dataset train = scaled.subset(all.first(n_train));
      const Dataset test_set = scaled.subset(all.subspan(n_train));
      const TailSample test = select_extremes(test_set, k_test, l2, Standardization::kNone);
      const std::uint64_t cv_seed = rng.next();
      for (double tau : config.taus) evaluate_methods(train, test, tau, split, cv_seed, cv, per_split[split]);
    } catch (const std::exception& e) {
      throw std::runtime_error("split " + std::to_string(split) + ": " + e.what());
    }
  });
  result.errors = collect(std::move(per_split));
  return result;
}

void write_mse_rows(std::ostream& out, const std::vector<MseRow>& rows) {
  write_csv_row(out, {"tau", "method", "rep", "mse", "lambda"});
  for (const auto& r : rows) {
    write_csv_row(out, {format_double(r.tau), r.method, std::to_string(r.rep), format_double(r.mse),
                        format_double(r.lambda)});
  }
}

void write_mse_summary(std::ostream& out, const std::vector<MseSummary>& summary) {
  write_csv_row(out, {"tau", "method", "count", "mean", "q10", "q90"});
  for (const auto& s : summary) {
    write_csv_row(out, {format_double(s.tau), s.method, std::to_string(s.count), format_double(s.mean),
                        format_double(s.q10), format_double(s.q90)});
  }
}

void write_support(std::ostream& out, const std::vector<SupportRow>& support) {
  write_csv_row(out, {"k", "min_ratio", "max_ratio"});
  for (const auto& s : support) {
    write_csv_row(out, {std::to_string(s.k), format_double(s.min_ratio), format_double(s.max_ratio)});
  }
}

void emit_bounds_report(std::ostream& out, const std::vector<std::string>& requests, const BoundInputs& inputs,
                        const McSpec& mc) {
  inputs.validate();
  // Resolve every request before computing anything so a typo fails fast.
  for (const auto& r : requests) {
    if (r.rfind("mc:", 0) == 0) {
      parse_statement(std::string_view(r).substr(3));
    } else if (r != "vc_tail_bound" && r != "b_term" && r != "k_tilde" && r != "residual_bound" &&
               r != "xlasso_prediction_bound") {
      throw std::invalid_argument("unknown bound request '" + r + "'");
    }
  }
  write_csv_row(out, {"request", "value", "coverage", "target", "pass"});
  for (const auto& r : requests) {
    if (r.rfind("mc:", 0) == 0) {
      const McReport rep = mc_validate(parse_statement(std::string_view(r).substr(3)), mc);
      write_csv_row(out, {r, format_double(rep.threshold), format_double(rep.coverage), format_double(rep.target),
                          rep.pass ? "true" : "false"});
      continue;
    }
    double value = 0.0;
    if (r == "vc_tail_bound") value = vc_tail_bound(inputs);
    if (r == "b_term") value = b_term(inputs);
    if (r == "k_tilde") value = k_tilde(inputs.k, inputs.delta);
    if (r == "residual_bound") value = residual_bound(inputs);
    if (r == "xlasso_prediction_bound") value = xlasso_prediction_bound(inputs);
    write_csv_row(out, {r, format_double(value), "", "", ""});
  }
}

}  // namespace evtlearn
