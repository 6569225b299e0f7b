#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "evtlearn/geometry.hpp"

namespace evtlearn {

/// Per-column empirical CDFs with denominator n + 1:
///   F_j(x) = #{i : X_ij <= x} / (n + 1).
/// Immutable after fit_margins().
class MarginalModel {
 public:
  MarginalModel() = default;

  std::size_t n() const { return n_; }
  std::size_t d() const { return sorted_.size(); }

  /// #{i : X_ij <= x}
  std::size_t rank(std::size_t column, double x) const;
  double cdf(std::size_t column, double x) const;
  const std::vector<double>& sorted_column(std::size_t column) const { return sorted_.at(column); }

  friend MarginalModel fit_margins(const Eigen::MatrixXd& data);

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<double>> sorted_;
};

/// Throws std::invalid_argument on an empty matrix or a non-finite entry.
MarginalModel fit_margins(const Eigen::MatrixXd& data);

/// v(x)_j = 1 / (1 - F_j(x_j)); every component lies in [1, n + 1].
Eigen::VectorXd rank_transform(const MarginalModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::MatrixXd rank_transform_rows(const MarginalModel& model, const Eigen::MatrixXd& rows);

/// Known marginal CDFs, one per column.
struct KnownMargins {
  std::vector<std::function<double(double)>> cdfs;

  std::size_t d() const { return cdfs.size(); }
  static KnownMargins replicate(std::function<double(double)> cdf, std::size_t d);
};

namespace cdf {
double unit_pareto(double x);   // 1 - 1/x on [1, inf)
double unit_frechet(double x);  // exp(-1/x) on (0, inf)
double standard_uniform(double x);
double exponential(double x);   // rate 1
}  // namespace cdf

/// Throws std::domain_error when some F_j(x_j) >= 1.
Eigen::VectorXd pareto_standardize(const KnownMargins& margins, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::MatrixXd pareto_standardize_rows(const KnownMargins& margins, const Eigen::MatrixXd& rows);

/// y = z / max(||x||, 1)
double rescale_target(const Eigen::Ref<const Eigen::VectorXd>& x, double z, NormSpec spec);
/// z = max(||x||, 1) * y_hat, the inverse of rescale_target at fixed x.
double descale_prediction(const Eigen::Ref<const Eigen::VectorXd>& x, double y_hat, NormSpec spec);

}  // namespace evtlearn
