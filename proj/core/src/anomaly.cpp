#include "evtlearn/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace evtlearn {

namespace {
constexpr double kMassSlack = 1e-12;
}

AngularGrid build_grid(std::size_t d, std::size_t m, std::size_t cap) {
  if (d < 2) throw std::invalid_argument("build_grid: d must be >= 2");
  if (m < 1) throw std::invalid_argument("build_grid: m must be >= 1");
  std::size_t per_face = 1;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    if (per_face > cap / m) throw std::invalid_argument("build_grid: cell count exceeds cap");
    per_face *= m;
  }
  if (per_face > cap / d) throw std::invalid_argument("build_grid: cell count exceeds cap");

  AngularGrid g;
  g.d_ = d;
  g.m_ = m;
  g.cells_per_face_ = per_face;
  g.cell_measure_ = 1.0 / static_cast<double>(per_face);
  return g;
}

std::size_t AngularGrid::locate(const Eigen::Ref<const Eigen::VectorXd>& angle) const {
  if (static_cast<std::size_t>(angle.size()) != d_) throw std::invalid_argument("locate: dimension mismatch");
  std::size_t face = 0;
  for (std::size_t j = 1; j < d_; ++j) {
    if (angle(static_cast<Eigen::Index>(j)) > angle(static_cast<Eigen::Index>(face))) face = j;
  }
  const double top = angle(static_cast<Eigen::Index>(face));
  if (!(top > 0.0)) throw std::invalid_argument("locate: angle has no positive component");

  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t j = 0; j < d_; ++j) {
    if (j == face) continue;
    const double u = std::clamp(angle(static_cast<Eigen::Index>(j)) / top, 0.0, 1.0);
    auto sub = static_cast<std::size_t>(std::floor(u * static_cast<double>(m_)));
    sub = std::min(sub, m_ - 1);
    index += sub * stride;
    stride *= m_;
  }
  return face * cells_per_face_ + index;
}

std::vector<std::size_t> AngularGrid::sub_indices(std::size_t cell) const {
  if (cell >= cell_count()) throw std::out_of_range("AngularGrid: cell index out of range");
  std::size_t rest = cell % cells_per_face_;
  std::vector<std::size_t> subs(d_ - 1);
  for (auto& s : subs) {
    s = rest % m_;
    rest /= m_;
  }
  return subs;
}

bool MvSetModel::contains(std::size_t cell) const {
  return std::find(selected_cells.begin(), selected_cells.end(), cell) != selected_cells.end();
}

double default_psi(double delta, std::size_t k) {
  if (!(delta > 0.0 && delta <= 1.0) || k == 0) throw std::invalid_argument("default_psi: need delta in (0,1], k >= 1");
  return std::sqrt(std::log(1.0 / delta) / static_cast<double>(k));
}

std::vector<double> cell_masses(const TailSample& sample, const AngularGrid& grid) {
  if (sample.k() == 0) throw std::invalid_argument("cell_masses: empty sample");
  std::vector<double> counts(grid.cell_count(), 0.0);
  for (Eigen::Index i = 0; i < sample.angles.rows(); ++i) {
    counts[grid.locate(sample.angles.row(i).transpose())] += 1.0;
  }
  const double k = static_cast<double>(sample.k());
  for (auto& c : counts) c /= k;
  return counts;
}

MvSetModel select_mv_cells(std::vector<double> masses, const AngularGrid& grid, double alpha, double psi) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("angular_mvset: alpha must lie in (0, 1]");
  if (!(psi >= 0.0)) throw std::invalid_argument("angular_mvset: psi must be >= 0");
  if (!(alpha - psi > 0.0)) throw std::invalid_argument("angular_mvset: need alpha - psi > 0");
  if (masses.size() != grid.cell_count()) throw std::invalid_argument("angular_mvset: mass table size mismatch");

  std::vector<std::size_t> order(masses.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return masses[a] > masses[b]; });

  MvSetModel model;
  model.grid = grid;
  model.alpha = alpha;
  model.psi = psi;
  const double target = alpha - psi;
  double cumulative = 0.0;
  for (std::size_t cell : order) {
    if (cumulative >= target - kMassSlack) break;
    if (masses[cell] <= 0.0) break;  // only empty cells remain
    model.selected_cells.push_back(cell);
    cumulative += masses[cell];
  }
  if (cumulative < target - kMassSlack) {
    throw std::logic_error("angular_mvset: total mass " + std::to_string(cumulative) + " below alpha - psi");
  }
  model.achieved_mass = cumulative;
  model.cell_masses = std::move(masses);
  return model;
}

MvSetModel angular_mvset(const Dataset& data, std::size_t k, double alpha, double psi, const AngularGrid& grid) {
  if (data.d() != grid.d()) throw std::invalid_argument("angular_mvset: grid dimension differs from data");
  const TailSample sample = select_extremes(data, k, NormSpec::linf(), Standardization::kRank);
  MvSetModel model = select_mv_cells(cell_masses(sample, grid), grid, alpha, psi);
  model.k = k;
  return model;
}

MassCheck mvset_mass_check(const MvSetModel& model, const Dataset& holdout, std::size_t k) {
  if (holdout.n() == 0 || k == 0) throw std::invalid_argument("mvset_mass_check: empty holdout tail");
  const TailSample sample = select_extremes(holdout, k, NormSpec::linf(), Standardization::kRank);
  std::vector<char> selected(model.grid.cell_count(), 0);
  for (auto c : model.selected_cells) selected[c] = 1;
  std::size_t inside = 0;
  for (Eigen::Index i = 0; i < sample.angles.rows(); ++i) {
    if (selected[model.grid.locate(sample.angles.row(i).transpose())]) ++inside;
  }
  MassCheck out;
  out.holdout_mass = static_cast<double>(inside) / static_cast<double>(sample.k());
  out.pass = out.holdout_mass >= model.alpha - 2.0 * model.psi;
  return out;
}

double anomaly_score(const MvSetModel& model, const MarginalModel& margins,
                     const Eigen::Ref<const Eigen::VectorXd>& x, AngularScore variant) {
  if (margins.d() != model.grid.d()) throw std::invalid_argument("anomaly_score: margins and model disagree on d");
  const Eigen::VectorXd v = rank_transform(margins, x);
  const PolarPoint pp = polar(v, NormSpec::linf());
  const std::size_t cell = model.grid.locate(pp.angle);
  const double radial = 1.0 / (pp.radius * pp.radius);

  double angular = 0.0;
  switch (variant) {
    case AngularScore::kCellMass:
      angular = model.cell_masses.at(cell);
      break;
    case AngularScore::kNestedLevel: {
      if (model.cell_masses.at(cell) <= 0.0) break;
      // Mass of every cell that the greedy order places before this one.
      double before = 0.0;
      const double mc = model.cell_masses[cell];
      for (std::size_t c = 0; c < model.cell_masses.size(); ++c) {
        const double mm = model.cell_masses[c];
        if (mm > mc || (mm == mc && c < cell)) before += mm;
      }
      angular = std::max(0.0, 1.0 - before);
      break;
    }
  }
  return radial * angular;
}

}  // namespace evtlearn
