#include "evtlearn/dataset.hpp"

#include <stdexcept>

namespace evtlearn {

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.columns = columns;
  out.target_name = target_name;
  out.label_name = label_name;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  if (target) out.target = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
  if (labels) out.labels = std::vector<int>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (r >= n()) throw std::out_of_range("Dataset::subset: row index out of range");
    const auto ri = static_cast<Eigen::Index>(r);
    const auto ii = static_cast<Eigen::Index>(i);
    out.x.row(ii) = x.row(ri);
    if (target) (*out.target)(ii) = (*target)(ri);
    if (labels) (*out.labels)[i] = (*labels)[r];
  }
  return out;
}

void Dataset::validate() const {
  if (target && target->size() != x.rows()) {
    throw std::invalid_argument("Dataset: target length differs from row count");
  }
  if (labels && labels->size() != n()) {
    throw std::invalid_argument("Dataset: label count differs from row count");
  }
  if (!columns.empty() && columns.size() != d()) {
    throw std::invalid_argument("Dataset: column names differ from column count");
  }
}

}  // namespace evtlearn
