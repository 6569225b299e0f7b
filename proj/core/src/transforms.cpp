#include "evtlearn/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evtlearn {

std::size_t MarginalModel::rank(std::size_t column, double x) const {
  const auto& col = sorted_.at(column);
  return static_cast<std::size_t>(std::upper_bound(col.begin(), col.end(), x) - col.begin());
}

double MarginalModel::cdf(std::size_t column, double x) const {
  return static_cast<double>(rank(column, x)) / static_cast<double>(n_ + 1);
}

MarginalModel fit_margins(const Eigen::MatrixXd& data) {
  if (data.rows() < 1 || data.cols() < 1) {
    throw std::invalid_argument("fit_margins: need at least one row and one column");
  }
  MarginalModel model;
  model.n_ = static_cast<std::size_t>(data.rows());
  model.sorted_.resize(static_cast<std::size_t>(data.cols()));
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    auto& col = model.sorted_[static_cast<std::size_t>(j)];
    col.resize(model.n_);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const double v = data(i, j);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("fit_margins: non-finite entry at row " + std::to_string(i) +
                                    ", column " + std::to_string(j));
      }
      col[static_cast<std::size_t>(i)] = v;
    }
    std::sort(col.begin(), col.end());
  }
  return model;
}

Eigen::VectorXd rank_transform(const MarginalModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != model.d()) {
    throw std::invalid_argument("rank_transform: dimension mismatch");
  }
  Eigen::VectorXd v(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    // (n + 1) / (n + 1 - rank) equals 1 / (1 - F) without the rounding of 1 - F.
    const auto top = static_cast<double>(model.n() + 1);
    v(j) = top / (top - static_cast<double>(model.rank(static_cast<std::size_t>(j), x(j))));
  }
  return v;
}

Eigen::MatrixXd rank_transform_rows(const MarginalModel& model, const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = rank_transform(model, rows.row(i).transpose()).transpose();
  }
  return out;
}

KnownMargins KnownMargins::replicate(std::function<double(double)> cdf, std::size_t d) {
  KnownMargins m;
  m.cdfs.assign(d, std::move(cdf));
  return m;
}

namespace cdf {
double unit_pareto(double x) { return x <= 1.0 ? 0.0 : 1.0 - 1.0 / x; }
double unit_frechet(double x) { return x <= 0.0 ? 0.0 : std::exp(-1.0 / x); }
double standard_uniform(double x) { return std::clamp(x, 0.0, 1.0); }
double exponential(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }
}  // namespace cdf

Eigen::VectorXd pareto_standardize(const KnownMargins& margins, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != margins.d()) {
    throw std::invalid_argument("pareto_standardize: dimension mismatch");
  }
  Eigen::VectorXd v(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double f = margins.cdfs[static_cast<std::size_t>(j)](x(j));
    if (!(f < 1.0)) {
      throw std::domain_error("pareto_standardize: F_j(x_j) >= 1 in column " + std::to_string(j));
    }
    v(j) = 1.0 / (1.0 - f);
  }
  return v;
}

Eigen::MatrixXd pareto_standardize_rows(const KnownMargins& margins, const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = pareto_standardize(margins, rows.row(i).transpose()).transpose();
  }
  return out;
}

double rescale_target(const Eigen::Ref<const Eigen::VectorXd>& x, double z, NormSpec spec) {
  return z / std::max(lp_norm(x, spec), 1.0);
}

double descale_prediction(const Eigen::Ref<const Eigen::VectorXd>& x, double y_hat, NormSpec spec) {
  return std::max(lp_norm(x, spec), 1.0) * y_hat;
}

}  // namespace evtlearn
