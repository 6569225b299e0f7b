// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../support/cli_runner.hpp"
#include "../support/oracles.hpp"
#include "evtlearn/anomaly.hpp"
#include "evtlearn/bounds.hpp"
#include "evtlearn/classification.hpp"
#include "evtlearn/crossval.hpp"
#include "evtlearn/experiments.hpp"
#include "evtlearn/parallel.hpp"
#include "evtlearn/regression.hpp"
#include "evtlearn/simulate.hpp"
#include "evtlearn/tail.hpp"

namespace {

using namespace evtlearn;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

// ---- 1. KKT certificates

Outcome kkt_certification() {
  Rng root(101);
  std::size_t converged = 0;
  std::size_t certified = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    Rng rng = root.substream(i);
    const std::size_t k = uniform_int(rng, 50, 500);
    const std::size_t d = uniform_int(rng, 5, 100);
    const auto spec = AdditiveModelSpec::defaults(d, 0.2 + 0.7 * rng.uniform());
    const Dataset data = gen_additive_regression(4 * k, spec, rng);
    const TailSample tail = select_extremes(data, k, NormSpec::l2());
    const double lambda = rng.uniform() * lambda_max(tail);
    const AngularLinearModel fit = fit_xlasso(tail, lambda);
    if (!fit.converged) continue;
    ++converged;
    const KktReport kkt = kkt_certificate(tail, fit, 1e-6);
    worst = std::max(worst, kkt.max_violation);
    if (kkt.pass) ++certified;
  }
  return {converged > 0 && certified == converged,
          std::to_string(certified) + "/" + std::to_string(converged) + " converged fits certified, worst violation " +
              fmt("%.2e", worst)};
}

// ---- 2. prediction inequality at large penalties

Outcome prediction_lemma() {
  Rng root(202);
  std::size_t applicable = 0;
  std::size_t holds = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng = root.substream(i);
    const auto spec = AdditiveModelSpec::defaults(20);
    const Dataset data = gen_additive_regression(5000, spec, rng);
    const TailSample tail = select_extremes(data, 100, NormSpec::l2());
    const double threshold = 2.0 * residual_score(tail, spec.beta0);
    const double lambda = threshold * (1.0 + rng.uniform());
    const PredictionLemmaReport r = check_prediction_lemma(tail, spec.beta0, lambda);
    if (!r.applicable) continue;
    ++applicable;
    if (r.holds) ++holds;
  }
  return {applicable == 100 && holds == applicable,
          std::to_string(holds) + "/" + std::to_string(applicable) + " applicable instances satisfy the inequality"};
}

// ---- 3, 4. Monte-Carlo coverage

Outcome coverage(McStatement statement, std::size_t replications, std::uint64_t seed) {
  McSpec spec;
  spec.delta = 0.1;
  spec.k = 50;
  spec.n = 5000;
  spec.replications = replications;
  spec.seed = seed;
  spec.threads = worker_count();
  const McReport r = mc_validate(statement, spec);
  std::string detail = std::string(to_string(statement)) + " coverage " + fmt("%.3f", r.coverage) + " over " +
                       std::to_string(replications) + " replications, need >= 0.870";
  if (!r.precondition) detail += " (bias precondition not met)";
  return {r.coverage >= 0.9 - 0.03 && r.pass, detail};
}

// ---- 5. simulated experiment ordering

Outcome simulated_ordering() {
  SimExperimentConfig cfg;
  cfg.n = 5000;
  cfg.d = 50;
  cfg.replications = 20;
  cfg.taus = {0.011, 0.02, 0.035, 0.05};
  cfg.n_test = 100'000;
  cfg.tau_test = 0.01;
  cfg.seed = 505;
  cfg.threads = worker_count();
  const ExperimentResult r = run_simulated_xlasso_experiment(cfg);
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i + 1 < r.summary.size(); i += 2) {
    const MseSummary& ols = r.summary[i];
    const MseSummary& xl = r.summary[i + 1];
    if (ols.method != "ols" || xl.method != "xlasso" || ols.tau != xl.tau) return {false, "unexpected summary layout"};
    ok = ok && xl.mean <= ols.mean;
    detail << "tau " << xl.tau << ": xlasso " << fmt("%.4f", xl.mean) << " ols " << fmt("%.4f", ols.mean) << "; ";
  }
  return {ok && r.summary.size() == 8, detail.str()};
}

// ---- 6. MV-set selection and holdout guarantee

std::size_t exhaustive_min_cells(const std::vector<double>& masses, double target) {
  const std::size_t c = masses.size();
  std::size_t best = c + 1;
  for (std::size_t mask = 1; mask < (std::size_t{1} << c); ++mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (mask >> j & 1u) {
        sum += masses[j];
        ++count;
      }
    }
    if (sum >= target - 1e-12) best = std::min(best, count);
  }
  return best;
}

Outcome mvset_correctness() {
  Rng rng(606);
  std::size_t optimal = 0;
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{{2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5},
                                                                {2, 6}, {3, 1}, {3, 2}, {4, 1}};
  for (std::size_t i = 0; i < 100; ++i) {
    const auto [d, m] = shapes[i % shapes.size()];
    const AngularGrid grid = build_grid(d, m);
    std::vector<double> masses(grid.cell_count());
    for (auto& v : masses) v = rng.uniform() < 0.25 ? 0.0 : rng.exponential();
    masses[0] += 0.01;
    const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    for (auto& v : masses) v /= total;
    const double alpha = 0.5 + 0.5 * rng.uniform();
    const double psi = 0.3 * rng.uniform() * alpha;
    const MvSetModel model = select_mv_cells(masses, grid, alpha, psi);
    const bool enough = model.achieved_mass >= alpha - psi - 1e-12;
    if (enough && model.selected_cells.size() == exhaustive_min_cells(masses, alpha - psi)) ++optimal;
  }

  const std::size_t k = 500;
  const std::size_t n = 10'000;
  const double psi = std::sqrt(std::log(10.0) / static_cast<double>(k));
  const AngularGrid grid = build_grid(3, 4);
  Rng root(607);
  std::vector<char> passed(100, 0);
  parallel_for(passed.size(), worker_count(), [&](std::size_t r) {
    Rng stream = root.substream(r);
    Dataset train;
    train.x = mv_logistic(n, 3, 0.5, stream);
    Dataset holdout;
    holdout.x = mv_logistic(n, 3, 0.5, stream);
    const MvSetModel model = angular_mvset(train, k, 0.9, psi, grid);
    passed[r] = mvset_mass_check(model, holdout, k).pass ? 1 : 0;
  });
  const double rate = static_cast<double>(std::count(passed.begin(), passed.end(), 1)) / 100.0;
  return {optimal == 100 && rate >= 0.9, std::to_string(optimal) + "/100 greedy selections optimal, holdout pass rate " +
                                             fmt("%.2f", rate)};
}

// ---- 7. sampler fidelity

std::vector<double> column(const Eigen::MatrixXd& x, Eigen::Index j) {
  return {x.col(j).data(), x.col(j).data() + x.rows()};
}

Outcome sampler_fidelity() {
  Rng rng(707);
  double worst_ks = 0.0;
  for (double a : {0.3, 0.5, 1.0}) {
    const Eigen::MatrixXd x = mv_logistic(100'000, 3, a, rng);
    for (Eigen::Index j = 0; j < 3; ++j) {
      worst_ks = std::max(worst_ks, oracle::ks_distance(column(x, j), oracle::unit_frechet_cdf));
    }
  }
  const Eigen::MatrixXd ind = mv_logistic(100'000, 3, 1.0, rng);
  double worst_rho = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = i + 1; j < 3; ++j) {
      worst_rho = std::max(worst_rho, std::abs(oracle::spearman(column(ind, i), column(ind, j))));
    }
  }
  // Componentwise block maxima over m rows, divided by m, share the law of a single row.
  const int m = 10;
  const std::size_t blocks = 100'000;
  const Eigen::MatrixXd raw = mv_logistic(blocks * m, 2, 0.5, rng);
  const Eigen::MatrixXd fresh = mv_logistic(blocks, 2, 0.5, rng);
  std::vector<double> block_margin(blocks);
  std::vector<double> block_min(blocks);
  std::vector<double> fresh_min(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto rows = raw.middleRows(static_cast<Eigen::Index>(b * m), m);
    const double m0 = rows.col(0).maxCoeff() / m;
    const double m1 = rows.col(1).maxCoeff() / m;
    block_margin[b] = m0;
    block_min[b] = std::min(m0, m1);
    fresh_min[b] = fresh.row(static_cast<Eigen::Index>(b)).minCoeff();
  }
  const double ks_margin = oracle::ks_distance(block_margin, oracle::unit_frechet_cdf);
  const double ks_joint = oracle::ks_two_sample(block_min, fresh_min);
  const double worst_max = std::max(ks_margin, ks_joint);
  return {worst_ks < 0.02 && worst_rho < 0.02 && worst_max < 0.02,
          "margin KS " + fmt("%.4f", worst_ks) + ", |rho| " + fmt("%.4f", worst_rho) + ", max-stability KS " +
              fmt("%.4f", worst_max)};
}

// ---- 8. classification against the majority baseline

Outcome classification_gain() {
  const std::size_t n = 50'000;
  const std::size_t k = 500;
  const double p_tail = static_cast<double>(k) / static_cast<double>(n);
  const NormSpec norm(2.0);
  const std::vector<double> grid{0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
  double gain = 0.0;
  double model_risk = 0.0;
  double base_risk = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = Rng(808).substream(seed);
    const Dataset train = gen_classification_rv(n, 5, 0.5, 2.0, rng);
    const Dataset test = gen_classification_rv(n, 5, 0.5, 2.0, rng);
    const CvPlan plan = make_folds(n, CvScheme::kfold(5), seed);
    const GridSelection sel = grid_select(constrained_logistic_rule(norm), grid, train, plan, p_tail, worker_count());
    const TailSample train_tail = select_extremes(train, k, norm);
    const TailSample test_tail = select_extremes(test, k, norm);
    const AngularClassifier model = fit_logistic_lasso(train_tail, ClassifierMode::constrained(sel.best));
    const double risk = empirical_tail_risk_01(model, test_tail);

    const auto positives = std::count(train_tail.labels->begin(), train_tail.labels->end(), 1);
    const int majority = 2 * positives > static_cast<long>(k) ? 1 : -1;
    const auto wrong = std::count_if(test_tail.labels->begin(), test_tail.labels->end(),
                                     [&](int y) { return y != majority; });
    const double baseline = static_cast<double>(wrong) / static_cast<double>(test_tail.k());
    model_risk += risk / 10.0;
    base_risk += baseline / 10.0;
    gain += (baseline - risk) / 10.0;
  }
  return {gain >= 0.02, "mean test risk " + fmt("%.4f", model_risk) + " vs majority " + fmt("%.4f", base_risk) +
                            " (gain " + fmt("%.4f", gain) + ", need >= 0.02)"};
}

// ---- 9. bound identities

Outcome bound_identities() {
  BoundInputs in;
  in.n = 1;
  in.k = 1;
  in.d = 1;
  in.delta = 4.0 * std::exp(-2.0);
  in.m_eps = 1.0;
  const double b = b_term(in);
  double worst = std::abs(b - 1.0);
  for (std::size_t k : {1u, 2u, 7u, 50u, 300u}) {
    const double kd = static_cast<double>(k);
    worst = std::max(worst, std::abs(k_tilde(k, std::exp(-kd / 3.0)) - 3.0 * kd) / kd);
  }
  BoundInputs vc;
  vc.n = 100;
  vc.k = 10;
  vc.p = 0.1;
  vc.vc_dim = 2;
  vc.delta = 1.0;
  const double expected = std::sqrt(2.0 * 0.1 / 100.0) *
                          (std::sqrt(std::log(2.0) + 2.0 * std::log(2.0 * 100.0 * 0.1 + 1.0)) + std::sqrt(2.0) / 2.0);
  worst = std::max(worst, std::abs(vc_tail_bound(vc) - expected));
  return {worst <= 1e-12, "largest deviation " + fmt("%.1e", worst)};
}

// ---- 10. CLI determinism

Outcome cli_determinism() {
  testing::CliRunner cli(EVTLEARN_CLI_PATH, "acceptance");
  if (!testing::prepare_inputs(cli)) return {false, "input preparation failed: " + cli.stderr_text()};
  std::size_t identical = 0;
  std::string failures;
  const auto cases = testing::subcommand_cases(cli);
  for (const auto& c : cases) {
    const std::string problem = testing::check_deterministic(cli, c);
    if (problem.empty()) {
      ++identical;
    } else {
      failures += " [" + problem + "]";
    }
  }
  return {identical == cases.size(),
          std::to_string(identical) + "/" + std::to_string(cases.size()) + " subcommands byte-identical" + failures};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "xlasso KKT certification", 60, kkt_certification},
      {2, "prediction inequality at large penalties", 120, prediction_lemma},
      {3, "empirical quantile coverage", 120, [] { return coverage(McStatement::kQuantileLemma, 1000, 303); }},
      {4, "residual deviation coverage", 300, [] { return coverage(McStatement::kResidualProp, 500, 404); }},
      {5, "xlasso vs ols tail MSE ordering", 900, simulated_ordering},
      {6, "mv-set greedy optimality and holdout mass", 300, mvset_correctness},
      {7, "logistic sampler fidelity", 180, sampler_fidelity},
      {8, "classifier beats majority baseline", 600, classification_gain},
      {9, "bound evaluator identities", 1, bound_identities},
      {10, "cli determinism", 600, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s  %s: %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
