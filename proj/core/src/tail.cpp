#include "evtlearn/tail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace evtlearn {

std::string_view to_string(Standardization s) {
  switch (s) {
    case Standardization::kNone: return "none";
    case Standardization::kKnownPareto: return "known-pareto";
    case Standardization::kRank: return "rank";
  }
  return "none";
}

Standardization parse_standardization(std::string_view text) {
  if (text == "none") return Standardization::kNone;
  if (text == "known-pareto") return Standardization::kKnownPareto;
  if (text == "rank") return Standardization::kRank;
  throw std::invalid_argument("unknown standardization '" + std::string(text) + "'");
}

TailSample select_extremes_prepared(const Eigen::MatrixXd& rows, const Dataset& data, std::size_t k,
                                    NormSpec spec, Standardization tag) {
  const std::size_t n = static_cast<std::size_t>(rows.rows());
  if (k < 1) throw std::invalid_argument("select_extremes: k must be >= 1");
  if (k > n) {
    throw std::invalid_argument("select_extremes: k = " + std::to_string(k) + " exceeds n = " +
                                std::to_string(n));
  }

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = lp_norm(rows.row(static_cast<Eigen::Index>(i)).transpose(), spec);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto larger = [&](std::size_t a, std::size_t b) {
    return norms[a] > norms[b] || (norms[a] == norms[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), larger);
  order.resize(k);

  TailSample out;
  out.norm = spec;
  out.standardization = tag;
  out.angles.resize(static_cast<Eigen::Index>(k), rows.cols());
  out.radii.resize(static_cast<Eigen::Index>(k));
  out.source_indices = order;
  if (data.target) out.targets = Eigen::VectorXd(static_cast<Eigen::Index>(k));
  if (data.labels) out.labels = std::vector<int>(k);

  for (std::size_t i = 0; i < k; ++i) {
    const auto src = static_cast<Eigen::Index>(order[i]);
    const auto ii = static_cast<Eigen::Index>(i);
    const double r = norms[order[i]];
    if (r == 0.0) {
      throw std::invalid_argument("select_extremes: zero row " + std::to_string(order[i]) +
                                  " among the extremes");
    }
    out.radii(ii) = r;
    out.angles.row(ii) = rows.row(src) / r;
    if (data.target) (*out.targets)(ii) = (*data.target)(src);
    if (data.labels) (*out.labels)[i] = (*data.labels)[order[i]];
  }
  out.threshold = out.radii(static_cast<Eigen::Index>(k) - 1);
  return out;
}

TailSample select_extremes(const Dataset& data, std::size_t k, NormSpec spec, Standardization standardization) {
  data.validate();
  switch (standardization) {
    case Standardization::kNone:
      return select_extremes_prepared(data.x, data, k, spec, standardization);
    case Standardization::kRank:
      return select_extremes(data, k, spec, fit_margins(data.x));
    case Standardization::kKnownPareto:
      break;
  }
  throw std::invalid_argument("select_extremes: known-pareto standardization needs KnownMargins");
}

TailSample select_extremes(const Dataset& data, std::size_t k, NormSpec spec, const KnownMargins& margins) {
  data.validate();
  return select_extremes_prepared(pareto_standardize_rows(margins, data.x), data, k, spec,
                                  Standardization::kKnownPareto);
}

TailSample select_extremes(const Dataset& data, std::size_t k, NormSpec spec, const MarginalModel& margins) {
  data.validate();
  return select_extremes_prepared(rank_transform_rows(margins, data.x), data, k, spec, Standardization::kRank);
}

TailSample filter_off_axes(const TailSample& sample, double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("filter_off_axes: tau must lie in [0, 1)");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < sample.angles.rows(); ++i) {
    if (angle_min(sample.angles.row(i).transpose()) >= tau) keep.push_back(i);
  }
  if (keep.empty()) {
    throw std::runtime_error("filter_off_axes: no extreme survives tau = " + std::to_string(tau) + " (0 of " +
                             std::to_string(sample.k()) + " retained)");
  }
  TailSample out;
  out.threshold = sample.threshold;
  out.norm = sample.norm;
  out.standardization = sample.standardization;
  const auto m = static_cast<Eigen::Index>(keep.size());
  out.angles.resize(m, sample.angles.cols());
  out.radii.resize(m);
  if (sample.targets) out.targets = Eigen::VectorXd(m);
  if (sample.labels) out.labels = std::vector<int>();
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto i = keep[static_cast<std::size_t>(r)];
    out.angles.row(r) = sample.angles.row(i);
    out.radii(r) = sample.radii(i);
    out.source_indices.push_back(sample.source_indices[static_cast<std::size_t>(i)]);
    if (sample.targets) (*out.targets)(r) = (*sample.targets)(i);
    if (sample.labels) out.labels->push_back((*sample.labels)[static_cast<std::size_t>(i)]);
  }
  return out;
}

double tail_empirical_measure(const TailSample& sample, const TailRegion& region) {
  if (sample.k() == 0) throw std::invalid_argument("tail_empirical_measure: empty sample");
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < sample.angles.rows(); ++i) {
    if (region(sample.radii(i), sample.angles.row(i).transpose())) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(sample.k());
}

double empirical_angular_measure(const Dataset& data, std::size_t k, const AngularRegion& region, NormSpec spec) {
  const std::size_t n = data.n();
  if (k < 1 || k > n) {
    throw std::invalid_argument("empirical_angular_measure: need 1 <= k <= n, got k = " + std::to_string(k));
  }
  const MarginalModel margins = fit_margins(data.x);
  const double level = static_cast<double>(n) / static_cast<double>(k);
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const Eigen::VectorXd v = rank_transform(margins, data.x.row(i).transpose());
    const double r = lp_norm(v, spec);
    if (r >= level && region(v / r)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(k);
}

std::size_t tail_count(std::size_t n, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("tail fraction must lie in (0, 1]");
  const double raw = p * static_cast<double>(n);
  // p * n can land just below an integer (0.011 * 5000), so absorb a few ulps first.
  return static_cast<std::size_t>(std::floor(raw * (1.0 + 1e-12)));
}

}  // namespace evtlearn
