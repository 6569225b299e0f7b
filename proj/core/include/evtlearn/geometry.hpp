#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace evtlearn {

/// Selects the l_p norm used for polar decomposition. p = infinity is the max norm.
class NormSpec {
 public:
  constexpr NormSpec() = default;
  explicit NormSpec(double p);

  static NormSpec l1() { return NormSpec(1.0); }
  static NormSpec l2() { return NormSpec(2.0); }
  static NormSpec linf() { return NormSpec(std::numeric_limits<double>::infinity()); }

  double p() const { return p_; }
  bool is_inf() const { return p_ == std::numeric_limits<double>::infinity(); }

  friend bool operator==(const NormSpec&, const NormSpec&) = default;

 private:
  double p_ = 2.0;
};

struct PolarPoint {
  double radius = 0.0;
  Eigen::VectorXd angle;
};

/// Throws std::invalid_argument on a non-finite component or an empty vector.
double lp_norm(std::span<const double> x, NormSpec spec);
double lp_norm(const Eigen::Ref<const Eigen::VectorXd>& x, NormSpec spec);

/// Radius ||x||_p and angle x / ||x||_p. The zero vector has no angle and throws.
PolarPoint polar(const Eigen::Ref<const Eigen::VectorXd>& x, NormSpec spec);

/// Smallest angle component; small values mean the point is close to an axis.
double angle_min(const Eigen::Ref<const Eigen::VectorXd>& angle);

}  // namespace evtlearn
