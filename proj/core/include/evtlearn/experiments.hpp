#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evtlearn/bounds.hpp"
#include "evtlearn/dataset.hpp"
#include "evtlearn/simulate.hpp"

namespace evtlearn {

/// 50 log-spaced values from lambda_max down to ratio * lambda_max, decreasing.
std::vector<double> log_lambda_grid(double lambda_max, std::size_t points = 50, double ratio = 1e-3);

/// Quantile with linear interpolation between order statistics.
double interpolated_quantile(std::vector<double> values, double q);

struct SimExperimentConfig {
  std::size_t n = 10'000;
  std::size_t d = 100;
  double a = 0.5;
  std::size_t replications = 20;
  std::size_t n_test = 1'000'000;
  double tau_test = 0.01;
  std::vector<double> taus{0.011, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04, 0.045, 0.05};
  std::size_t cv_folds = 5;
  std::size_t lambda_points = 50;
  double lambda_ratio = 1e-3;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::optional<AdditiveModelSpec> model;  // default: AdditiveModelSpec::defaults(d, a)
};

struct MseRow {
  double tau = 0.0;
  std::string method;  // "xlasso" or "ols"
  std::size_t rep = 0;
  double mse = 0.0;
  double lambda = 0.0;  // selected penalty (0 for ols)
};

struct MseSummary {
  double tau = 0.0;
  std::string method;
  std::size_t count = 0;
  double mean = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct ExperimentResult {
  std::vector<MseRow> rows;          // sorted by (tau, method, rep)
  std::vector<MseSummary> summary;   // sorted by (tau, method)
};

/// For every replication and tau: XLASSO with lambda chosen by tail K-fold CV (p = tau) and
/// OLS on the floor(tau n) extremes of a fresh training set, scored by tail MSE on the
/// floor(tau_test n_test) extremes of a fresh test set.
ExperimentResult run_simulated_xlasso_experiment(const SimExperimentConfig& config);

struct PortfolioConfig {
  std::size_t expected_columns = 49;  // target included
  std::size_t splits = 50;
  double train_fraction = 0.2;
  std::vector<double> taus{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  double tau_test = 0.005;
  std::size_t cv_folds = 5;
  std::size_t lambda_points = 50;
  double lambda_ratio = 1e-3;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct SupportRow {
  std::size_t k = 0;
  double min_ratio = 0.0;  // min over the k largest-norm rows of Z / ||X||_2
  double max_ratio = 0.0;
};

struct PortfolioResult {
  ExperimentResult errors;
  std::vector<SupportRow> support;  // k = 1 .. floor(max tau * n)
};

/// `data.target` is the raw Z column; covariates are the other columns. Requires
/// data.d() + 1 == expected_columns.
PortfolioResult run_portfolio_experiment(const Dataset& data, const PortfolioConfig& config);

void write_mse_rows(std::ostream& out, const std::vector<MseRow>& rows);
void write_mse_summary(std::ostream& out, const std::vector<MseSummary>& summary);
void write_support(std::ostream& out, const std::vector<SupportRow>& support);

/// Requests: vc_tail_bound, b_term, k_tilde, residual_bound, xlasso_prediction_bound, or
/// mc:<statement>. Output columns request,value,coverage,target,pass in request order.
void emit_bounds_report(std::ostream& out, const std::vector<std::string>& requests, const BoundInputs& inputs,
                        const McSpec& mc);

}  // namespace evtlearn
