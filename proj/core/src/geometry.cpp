#include "evtlearn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evtlearn {

NormSpec::NormSpec(double p) : p_(p) {
  if (std::isnan(p) || p < 1.0) {
    throw std::invalid_argument("norm exponent must lie in [1, inf], got " + std::to_string(p));
  }
}

double lp_norm(std::span<const double> x, NormSpec spec) {
  if (x.empty()) throw std::invalid_argument("lp_norm: empty vector");
  double scale = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("lp_norm: non-finite component");
    scale = std::max(scale, std::abs(v));
  }
  if (spec.is_inf() || scale == 0.0) return scale;

  const double p = spec.p();
  if (p == 1.0) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  // Scale by the max magnitude so large p cannot overflow.
  double s = 0.0;
  if (p == 2.0) {
    for (double v : x) {
      const double r = v / scale;
      s += r * r;
    }
    return scale * std::sqrt(s);
  }
  for (double v : x) s += std::pow(std::abs(v) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

double lp_norm(const Eigen::Ref<const Eigen::VectorXd>& x, NormSpec spec) {
  return lp_norm(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), spec);
}

PolarPoint polar(const Eigen::Ref<const Eigen::VectorXd>& x, NormSpec spec) {
  const double r = lp_norm(x, spec);
  if (r == 0.0) throw std::invalid_argument("polar: zero vector has no angle");
  PolarPoint out;
  out.radius = r;
  out.angle = x / r;
  return out;
}

double angle_min(const Eigen::Ref<const Eigen::VectorXd>& angle) {
  if (angle.size() == 0) throw std::invalid_argument("angle_min: empty angle");
  return angle.minCoeff();
}

}  // namespace evtlearn
