#include "evtlearn/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "evtlearn/classification.hpp"
#include "evtlearn/csv.hpp"
#include "evtlearn/parallel.hpp"
#include "evtlearn/regression.hpp"

namespace evtlearn {

std::vector<std::size_t> CvPlan::training_indices(std::size_t fold) const {
  const auto& held = folds.at(fold);
  std::vector<char> mask(n, 0);
  for (auto i : held) mask[i] = 1;
  std::vector<std::size_t> out;
  out.reserve(n - held.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) out.push_back(i);
  }
  return out;
}

CvPlan make_folds(std::size_t n, CvScheme scheme, std::uint64_t seed) {
  std::size_t k = scheme.folds;
  if (scheme.kind == CvKind::kLeaveOneOut) {
    if (n < 2) throw std::invalid_argument("leave-one-out needs n >= 2");
    k = n;
  } else {
    if (k < 2) throw std::invalid_argument("K-fold needs K >= 2");
    if (k > n) {
      throw std::invalid_argument("K = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
    }
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  std::shuffle(perm.begin(), perm.end(), engine);

  CvPlan plan;
  plan.n = n;
  plan.scheme = scheme;
  plan.folds.resize(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t size = base + (j < extra ? 1 : 0);
    plan.folds[j].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                         perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return plan;
}

CvResult cv_tail_risk(const TailRule& rule, const Dataset& data, const CvPlan& plan, double p, double hyper,
                      std::size_t threads) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("tail fraction p must lie in (0, 1]");
  if (plan.n != data.n()) throw std::invalid_argument("CV plan size does not match the dataset");
  const std::size_t folds = plan.folds.size();
  for (std::size_t j = 0; j < folds; ++j) {
    const std::size_t kv = tail_count(plan.folds[j].size(), p);
    const std::size_t kt = tail_count(plan.n - plan.folds[j].size(), p);
    if (kv == 0 || kt == 0) {
      throw std::invalid_argument("fold " + std::to_string(j + 1) + ": extreme count is 0 (training " +
                                  std::to_string(kt) + ", validation " + std::to_string(kv) + ")");
    }
  }

  CvResult result;
  result.fold_risks.assign(folds, 0.0);
  parallel_for(folds, threads, [&](std::size_t j) {
    const auto train_rows = plan.training_indices(j);
    const Dataset train = data.subset(train_rows);
    const Dataset valid = data.subset(plan.folds[j]);
    const auto evaluate = rule(train, tail_count(train.n(), p), hyper);
    result.fold_risks[j] = evaluate(valid, tail_count(valid.n(), p));
  });
  double sum = 0.0;
  for (double r : result.fold_risks) sum += r;
  result.risk = sum / static_cast<double>(folds);
  return result;
}

GridSelection grid_select(const TailRule& rule, std::vector<double> grid, const Dataset& data,
                          const CvPlan& plan, double p, std::size_t threads) {
  if (grid.empty()) throw std::invalid_argument("grid_select: empty grid");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  GridSelection out;
  out.grid = grid;
  out.table.resize(grid.size());
  // Parallelize over grid points; each rCV then runs its folds sequentially.
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    out.table[g] = cv_tail_risk(rule, data, plan, p, grid[g], 1);
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (out.table[g].risk < out.table[best].risk) best = g;
  }
  out.best = grid[best];
  return out;
}

void write_cv_table(std::ostream& out, const GridSelection& selection) {
  std::vector<std::string> header{"u", "rcv"};
  const std::size_t folds = selection.table.empty() ? 0 : selection.table.front().fold_risks.size();
  for (std::size_t j = 0; j < folds; ++j) header.push_back("fold" + std::to_string(j + 1));
  write_csv_row(out, header);
  for (std::size_t g = 0; g < selection.grid.size(); ++g) {
    std::vector<std::string> row{format_double(selection.grid[g]), format_double(selection.table[g].risk)};
    for (double r : selection.table[g].fold_risks) row.push_back(format_double(r));
    write_csv_row(out, row);
  }
}

namespace {

// Training tail plus whatever is needed to map a holdout set into the same coordinates.
struct Prepared {
  TailSample sample;
  std::shared_ptr<const MarginalModel> margins;
};

Prepared prepare_train(const Dataset& train, std::size_t k, NormSpec norm, Standardization standardization) {
  if (standardization == Standardization::kRank) {
    auto margins = std::make_shared<const MarginalModel>(fit_margins(train.x));
    return {select_extremes(train, k, norm, *margins), margins};
  }
  return {select_extremes(train, k, norm, standardization), nullptr};
}

TailSample prepare_holdout(const Dataset& holdout, std::size_t k, NormSpec norm, Standardization standardization,
                           const std::shared_ptr<const MarginalModel>& margins) {
  if (margins) return select_extremes(holdout, k, norm, *margins);
  return select_extremes(holdout, k, norm, standardization);
}

TailEvaluator squared_error_evaluator(Eigen::VectorXd beta, NormSpec norm, Standardization standardization,
                                      std::shared_ptr<const MarginalModel> margins) {
  return [beta = std::move(beta), norm, standardization, margins](const Dataset& holdout, std::size_t k) {
    if (!holdout.target) throw std::invalid_argument("holdout set has no target column");
    const TailSample test = prepare_holdout(holdout, k, norm, standardization, margins);
    const Eigen::VectorXd resid = *test.targets - test.angles * beta;
    return resid.squaredNorm() / static_cast<double>(test.k());
  };
}

}  // namespace

TailRule xlasso_rule(NormSpec norm, Standardization standardization) {
  return [norm, standardization](const Dataset& train, std::size_t k, double lambda) -> TailEvaluator {
    if (!train.target) throw std::invalid_argument("training set has no target column");
    auto prep = prepare_train(train, k, norm, standardization);
    const auto model = fit_xlasso(prep.sample, lambda);
    return squared_error_evaluator(model.beta, norm, standardization, prep.margins);
  };
}

TailRule ols_rule(NormSpec norm, Standardization standardization) {
  return [norm, standardization](const Dataset& train, std::size_t k, double) -> TailEvaluator {
    if (!train.target) throw std::invalid_argument("training set has no target column");
    auto prep = prepare_train(train, k, norm, standardization);
    const auto model = fit_ols_angles(prep.sample);
    return squared_error_evaluator(model.beta, norm, standardization, prep.margins);
  };
}

TailRule constrained_logistic_rule(NormSpec norm, Standardization standardization) {
  return [norm, standardization](const Dataset& train, std::size_t k, double u) -> TailEvaluator {
    if (!train.labels) throw std::invalid_argument("training set has no label column");
    auto prep = prepare_train(train, k, norm, standardization);
    auto model = fit_logistic_lasso(prep.sample, ClassifierMode::constrained(u));
    return [model = std::move(model), norm, standardization, margins = prep.margins](const Dataset& holdout,
                                                                                     std::size_t kv) {
      if (!holdout.labels) throw std::invalid_argument("holdout set has no label column");
      const TailSample test = prepare_holdout(holdout, kv, norm, standardization, margins);
      return empirical_tail_risk_01(model, test);
    };
  };
}

}  // namespace evtlearn
