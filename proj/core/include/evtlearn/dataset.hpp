#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace evtlearn {

/// n x d covariates with an optional real target and an optional +-1 label per row.
struct Dataset {
  Eigen::MatrixXd x;
  std::optional<Eigen::VectorXd> target;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> columns;  // covariate names, size d (may be empty)
  std::string target_name = "y";
  std::string label_name = "label";

  std::size_t n() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(x.cols()); }

  /// Rows selected by `rows`, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Throws std::invalid_argument when target/label sizes disagree with x.
  void validate() const;
};

}  // namespace evtlearn
