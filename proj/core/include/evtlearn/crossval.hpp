#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "evtlearn/dataset.hpp"
#include "evtlearn/geometry.hpp"
#include "evtlearn/tail.hpp"

namespace evtlearn {

enum class CvKind { kKFold, kLeaveOneOut };

struct CvScheme {
  CvKind kind = CvKind::kKFold;
  std::size_t folds = 5;

  static CvScheme kfold(std::size_t k) { return {CvKind::kKFold, k}; }
  static CvScheme leave_one_out() { return {CvKind::kLeaveOneOut, 0}; }
};

/// Validation index sets V_1..V_K; training sets are the complements.
struct CvPlan {
  std::size_t n = 0;
  CvScheme scheme;
  std::vector<std::vector<std::size_t>> folds;

  std::vector<std::size_t> training_indices(std::size_t fold) const;
};

/// Seeded uniform shuffle, then contiguous blocks of size ceil(n/K) or floor(n/K).
CvPlan make_folds(std::size_t n, CvScheme scheme, std::uint64_t seed);

/// Mean tail loss of a fitted predictor on the k largest-norm rows of a holdout set.
using TailEvaluator = std::function<double(const Dataset& holdout, std::size_t k)>;

/// Learning rule Psi: fits on the k extremes of `train` with hyperparameter `hyper`.
/// Must be deterministic in its inputs.
using TailRule = std::function<TailEvaluator(const Dataset& train, std::size_t k, double hyper)>;

struct CvResult {
  double risk = 0.0;               // K^-1 sum_j R_hat(Psi(T_j), V_j)
  std::vector<double> fold_risks;  // in fold order
};

/// rCV: trains on floor(p |T_j|) extremes of each training set, evaluates on the
/// floor(p |V_j|) extremes of the matching validation set, and averages over folds.
CvResult cv_tail_risk(const TailRule& rule, const Dataset& data, const CvPlan& plan, double p, double hyper,
                      std::size_t threads = 1);

struct GridSelection {
  double best = 0.0;
  std::vector<double> grid;          // sorted, deduplicated
  std::vector<CvResult> table;       // aligned with grid
};

/// Evaluates rCV at every grid value and returns the minimizer (ties: smallest value).
GridSelection grid_select(const TailRule& rule, std::vector<double> grid, const Dataset& data, const CvPlan& plan,
                          double p, std::size_t threads = 1);

/// CSV with header u,rcv,fold1..foldK.
void write_cv_table(std::ostream& out, const GridSelection& selection);

// Ready-made rules. Regression rules score squared error; the classifier scores 0-1 loss.
TailRule xlasso_rule(NormSpec norm, Standardization standardization = Standardization::kNone);
TailRule ols_rule(NormSpec norm, Standardization standardization = Standardization::kNone);
TailRule constrained_logistic_rule(NormSpec norm, Standardization standardization = Standardization::kNone);

}  // namespace evtlearn
