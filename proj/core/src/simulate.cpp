#include "evtlearn/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "evtlearn/geometry.hpp"

namespace evtlearn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {
  std::seed_seq seq{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() {
  for (;;) {
    // 53 random bits; reject 0 so log() and 1/u stay finite.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal() { return normal_(engine_); }

double positive_stable(double a, Rng& rng) {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("positive_stable: a must lie in (0, 1]");
  if (a == 1.0) return 1.0;
  const double u = std::numbers::pi * rng.uniform();
  const double w = rng.exponential();
  // S = sin(aU) / sin(U)^(1/a) * (sin((1-a)U) / W)^((1-a)/a)
  const double head = std::sin(a * u) / std::pow(std::sin(u), 1.0 / a);
  const double tail = std::pow(std::sin((1.0 - a) * u) / w, (1.0 - a) / a);
  return head * tail;
}

Eigen::MatrixXd mv_logistic(std::size_t n, std::size_t d, double a, Rng& rng) {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("mv_logistic: a must lie in (0, 1]");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double s = positive_stable(a, rng);
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = std::pow(s / rng.exponential(), a);
  }
  return x;
}

double truncated_gaussian(double lo, double hi, Rng& rng) {
  if (!(lo < hi)) throw std::invalid_argument("truncated_gaussian: need lo < hi");
  for (;;) {
    const double z = rng.normal();
    if (z >= lo && z <= hi) return z;
  }
}

AdditiveModelSpec AdditiveModelSpec::defaults(std::size_t d, double a) {
  AdditiveModelSpec s;
  s.d = d;
  s.a = a;
  s.beta0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  s.beta0.head(std::min<Eigen::Index>(5, static_cast<Eigen::Index>(d))).setOnes();
  s.beta1 = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));
  return s;
}

void AdditiveModelSpec::validate() const {
  if (d < 1) throw std::invalid_argument("AdditiveModelSpec: d must be >= 1");
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("AdditiveModelSpec: a must lie in (0, 1]");
  if (beta0.size() != static_cast<Eigen::Index>(d) || beta1.size() != static_cast<Eigen::Index>(d)) {
    throw std::invalid_argument("AdditiveModelSpec: beta0 and beta1 must have length d");
  }
  if (noise && !(noise->lo < noise->hi)) throw std::invalid_argument("AdditiveModelSpec: need noise lo < hi");
}

double additive_signal(const AdditiveModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const PolarPoint p = polar(x, NormSpec::l2());
  return p.angle.dot(spec.beta0) + p.angle.dot(spec.beta1) / std::log1p(p.radius);
}

Dataset gen_additive_regression(std::size_t n, const AdditiveModelSpec& spec, Rng& rng) {
  spec.validate();
  Dataset out;
  out.x = mv_logistic(n, spec.d, spec.a, rng);
  out.target = Eigen::VectorXd(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.x.rows(); ++i) {
    const double eps = spec.noise ? truncated_gaussian(spec.noise->lo, spec.noise->hi, rng) : 0.0;
    (*out.target)(i) = additive_signal(spec, out.x.row(i).transpose()) + eps;
  }
  for (std::size_t j = 0; j < spec.d; ++j) out.columns.push_back("x" + std::to_string(j + 1));
  return out;
}

double classification_threshold(std::size_t d, double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("classification threshold: p must lie in [1, inf)");
  return std::pow(1.0 / static_cast<double>(d + 1), 1.0 / p);
}

Dataset gen_classification_rv(std::size_t n, std::size_t d, double a, double p, Rng& rng) {
  const double c = classification_threshold(d, p);
  const Eigen::MatrixXd z = mv_logistic(n, d + 1, a, rng);
  const NormSpec norm(p);
  Dataset out;
  out.x = z.leftCols(static_cast<Eigen::Index>(d));
  out.labels = std::vector<int>(n);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double ratio = z(i, static_cast<Eigen::Index>(d)) / lp_norm(z.row(i).transpose(), norm);
    (*out.labels)[static_cast<std::size_t>(i)] = ratio > c ? 1 : -1;
  }
  for (std::size_t j = 0; j < d; ++j) out.columns.push_back("x" + std::to_string(j + 1));
  return out;
}

}  // namespace evtlearn
