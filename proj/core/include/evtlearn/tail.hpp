#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "evtlearn/dataset.hpp"
#include "evtlearn/geometry.hpp"
#include "evtlearn/transforms.hpp"

namespace evtlearn {

/// Marginal standardization applied before extremes are selected.
enum class Standardization { kNone, kKnownPareto, kRank };

std::string_view to_string(Standardization s);
Standardization parse_standardization(std::string_view text);

/// The k rows of largest norm, polar-decomposed. Row i of `angles` belongs to
/// source row source_indices[i]; radii are non-increasing and end at `threshold`.
struct TailSample {
  double threshold = 0.0;
  Eigen::MatrixXd angles;
  Eigen::VectorXd radii;
  std::optional<Eigen::VectorXd> targets;
  std::optional<std::vector<int>> labels;
  std::vector<std::size_t> source_indices;
  NormSpec norm;
  Standardization standardization = Standardization::kNone;

  std::size_t k() const { return static_cast<std::size_t>(angles.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(angles.cols()); }
};

/// Standardizes the rows (rank: margins fitted on `data` itself), keeps the k rows
/// of largest norm with ties going to the smaller row index, and polar-decomposes them.
/// kKnownPareto requires the KnownMargins overload.
TailSample select_extremes(const Dataset& data, std::size_t k, NormSpec spec,
                           Standardization standardization = Standardization::kNone);
TailSample select_extremes(const Dataset& data, std::size_t k, NormSpec spec, const KnownMargins& margins);
/// Rank standardization with margins fitted elsewhere (e.g. on a training split).
TailSample select_extremes(const Dataset& data, std::size_t k, NormSpec spec, const MarginalModel& margins);

/// Extremes of rows that are already standardized (or raw, for kNone).
TailSample select_extremes_prepared(const Eigen::MatrixXd& rows, const Dataset& data, std::size_t k,
                                    NormSpec spec, Standardization tag);

/// Keeps rows with angle_min >= tau. The threshold is radial and does not change.
/// Throws std::runtime_error when nothing survives.
TailSample filter_off_axes(const TailSample& sample, double tau);

using TailRegion = std::function<bool(double radius, const Eigen::VectorXd& angle)>;
using AngularRegion = std::function<bool(const Eigen::VectorXd& angle)>;

/// nu_k(A) = k^-1 #{retained points in A}.
double tail_empirical_measure(const TailSample& sample, const TailRegion& region);

/// Phi_hat(A) = k^-1 #{i : ||v_hat(X_i)|| >= n/k and theta(v_hat(X_i)) in A}, with the
/// rank transform fitted on `data`.
double empirical_angular_measure(const Dataset& data, std::size_t k, const AngularRegion& region,
                                 NormSpec spec);

/// floor(p * n), the number of extremes at tail fraction p.
std::size_t tail_count(std::size_t n, double p);

}  // namespace evtlearn
