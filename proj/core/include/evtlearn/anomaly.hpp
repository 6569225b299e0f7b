#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "evtlearn/dataset.hpp"
#include "evtlearn/geometry.hpp"
#include "evtlearn/tail.hpp"
#include "evtlearn/transforms.hpp"

namespace evtlearn {

/// Equal-measure partition of the positive l_inf sphere faces {x : x_j = 1}.
/// Each face is cut into m^(d-1) cubes, so there are d * m^(d-1) cells of
/// face-Lebesgue measure 1 / m^(d-1).
class AngularGrid {
 public:
  static constexpr std::size_t kDefaultCellCap = 10'000'000;

  AngularGrid() = default;

  std::size_t d() const { return d_; }
  std::size_t m() const { return m_; }
  std::size_t cell_count() const { return d_ * cells_per_face_; }
  std::size_t cells_per_face() const { return cells_per_face_; }
  double cell_measure() const { return cell_measure_; }

  /// Cell index of an angle expressed in any l_p norm (it is rescaled to l_inf).
  /// Max-component ties go to the smallest face; coordinate 1.0 maps to sub-index m - 1.
  std::size_t locate(const Eigen::Ref<const Eigen::VectorXd>& angle) const;

  std::size_t face_of(std::size_t cell) const { return cell / cells_per_face_; }
  /// Sub-indices of the d - 1 free coordinates, in increasing coordinate order.
  std::vector<std::size_t> sub_indices(std::size_t cell) const;

  friend AngularGrid build_grid(std::size_t d, std::size_t m, std::size_t cap);
  friend bool operator==(const AngularGrid&, const AngularGrid&) = default;

 private:
  std::size_t d_ = 0;
  std::size_t m_ = 0;
  std::size_t cells_per_face_ = 0;
  double cell_measure_ = 0.0;
};

/// Throws std::invalid_argument for d < 2, m < 1 or more than `cap` cells.
AngularGrid build_grid(std::size_t d, std::size_t m, std::size_t cap = AngularGrid::kDefaultCellCap);

/// Angular component used by anomaly_score.
enum class AngularScore {
  kCellMass,     // empirical mass of the cell holding the angle
  kNestedLevel,  // 1 - (smallest alpha whose MV-set contains the cell)
};

struct MvSetModel {
  AngularGrid grid;
  std::vector<double> cell_masses;          // normalized, sums to 1
  std::vector<std::size_t> selected_cells;  // in greedy (decreasing mass) order
  double alpha = 0.0;
  double psi = 0.0;
  double achieved_mass = 0.0;
  std::size_t k = 0;
  NormSpec norm = NormSpec::linf();
  Standardization standardization = Standardization::kRank;

  bool contains(std::size_t cell) const;
};

/// psi(delta) = sqrt(log(1/delta) / k)
double default_psi(double delta, std::size_t k);

/// Fraction of the sample's angles falling in each grid cell.
std::vector<double> cell_masses(const TailSample& sample, const AngularGrid& grid);

/// Cells in decreasing mass order (ties: smaller index) until the cumulative mass
/// reaches alpha - psi. With equal cell measures this is the minimum-volume union.
MvSetModel select_mv_cells(std::vector<double> masses, const AngularGrid& grid, double alpha, double psi);

/// Rank-transforms `data`, keeps the k largest l_inf norms and solves the grid MV-set problem.
MvSetModel angular_mvset(const Dataset& data, std::size_t k, double alpha, double psi, const AngularGrid& grid);

struct MassCheck {
  double holdout_mass = 0.0;
  bool pass = false;
};

/// Mass of the selected cells on the k extremes of an independent sample;
/// pass iff it is at least alpha - 2 psi.
MassCheck mvset_mass_check(const MvSetModel& model, const Dataset& holdout, std::size_t k);

/// 1 / ||v_hat(x)||_inf^2 times the angular component; smaller is more anomalous.
double anomaly_score(const MvSetModel& model, const MarginalModel& margins,
                     const Eigen::Ref<const Eigen::VectorXd>& x, AngularScore variant = AngularScore::kCellMass);

}  // namespace evtlearn
