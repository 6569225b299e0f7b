#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "evtlearn/regression.hpp"
#include "evtlearn/simulate.hpp"

namespace evtlearn {
namespace {

// A TailSample built directly from a design matrix and targets.
TailSample make_sample(const Eigen::MatrixXd& w, const Eigen::VectorXd& y) {
  TailSample s;
  s.angles = w;
  s.radii = Eigen::VectorXd::Ones(w.rows());
  s.targets = y;
  s.threshold = 1.0;
  return s;
}

TailSample random_sample(std::size_t k, std::size_t d, std::uint64_t seed, double noise = 0.5) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = u(gen);
    w.row(i) /= w.row(i).norm();
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(w.cols());
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(5, w.cols()); ++j) beta(j) = 1.0 + j;
  Eigen::VectorXd y = w * beta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise * nd(gen);
  return make_sample(w, y);
}

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(3, 1), 2);
  EXPECT_EQ(soft_threshold(-0.5, 1), 0);
  EXPECT_EQ(soft_threshold(-2.5, 0), -2.5);
  EXPECT_EQ(soft_threshold(-2.5, 1), -1.5);
}

TEST(FitOls, InterpolatesExactData) {
  const auto s = random_sample(40, 4, 1, 0.0);
  const auto m = fit_ols_angles(s);
  EXPECT_NEAR(m.beta(0), 1.0, 1e-8);
  EXPECT_NEAR(m.beta(3), 4.0, 1e-8);
}

TEST(FitOls, ScalarLeastSquares) {
  Eigen::MatrixXd w(3, 1);
  w << 0.2, 0.5, 1.0;
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 4.0;
  const auto m = fit_ols_angles(make_sample(w, y));
  EXPECT_NEAR(m.beta(0), w.col(0).dot(y) / w.col(0).squaredNorm(), 1e-14);
}

TEST(FitOls, OrthogonalTargetAndMinimumNorm) {
  Eigen::MatrixXd w(2, 2);
  w << 1, 0, 1, 0;
  Eigen::VectorXd y(2);
  y << 1, -1;
  EXPECT_LE(fit_ols_angles(make_sample(w, y)).beta.norm(), 1e-14);

  // duplicated column: minimum-norm solution splits the weight evenly
  Eigen::MatrixXd dup(3, 2);
  dup << 1, 1, 2, 2, 3, 3;
  const Eigen::VectorXd yd = dup.col(0) * 2.0;
  const auto m = fit_ols_angles(make_sample(dup, yd));
  EXPECT_NEAR(m.beta(0), 1.0, 1e-10);
  EXPECT_NEAR(m.beta(1), 1.0, 1e-10);
}

TEST(FitOls, MissingTargetsThrow) {
  TailSample s = random_sample(10, 2, 2);
  s.targets.reset();
  EXPECT_THROW(fit_ols_angles(s), std::invalid_argument);
}

TEST(LambdaMax, ZeroAndLinearity) {
  auto s = random_sample(30, 5, 3);
  const double lm = lambda_max(s);
  const auto at_max = fit_xlasso(s, lm);
  EXPECT_EQ(at_max.beta.lpNorm<1>(), 0.0);
  s.targets = *s.targets * 2.0;
  EXPECT_NEAR(lambda_max(s), 2.0 * lm, 1e-14);
  s.targets = Eigen::VectorXd::Zero(30);
  EXPECT_EQ(lambda_max(s), 0.0);
}

TEST(FitXlasso, ZeroPenaltyMatchesOls) {
  const auto s = random_sample(200, 8, 4);
  const auto lasso = fit_xlasso(s, 0.0);
  EXPECT_TRUE(lasso.converged);
  EXPECT_LE((lasso.beta - fit_ols_angles(s).beta).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(FitXlasso, ScalarClosedForm) {
  Eigen::MatrixXd w(4, 1);
  w << 0.3, 0.9, 1.0, 0.6;
  Eigen::VectorXd y(4);
  y << 0.5, 2.0, 1.0, -0.2;
  const double k = 4.0;
  for (double lam : {0.0, 0.1, 0.4, 2.0}) {
    const double expected = soft_threshold(w.col(0).dot(y) / k, lam) / (w.col(0).squaredNorm() / k);
    EXPECT_NEAR(fit_xlasso(make_sample(w, y), lam).beta(0), expected, 1e-12);
  }
}

TEST(FitXlasso, ObjectiveMonotoneAndBelowReferencePoints) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_sample(80, 30, 100 + seed);
    const double lam = 0.05 * lambda_max(s);
    LassoOptions opt;
    opt.record_objective = true;
    const auto m = fit_xlasso(s, lam, opt);
    for (std::size_t i = 1; i < m.objective_trace.size(); ++i) {
      ASSERT_LE(m.objective_trace[i], m.objective_trace[i - 1] + 1e-12);
    }
    EXPECT_NEAR(m.objective, lasso_objective(s, m.beta, lam), 1e-8 * std::max(1.0, m.objective));
    EXPECT_LE(m.objective, lasso_objective(s, Eigen::VectorXd::Zero(30), lam) + 1e-12);
    EXPECT_LE(m.objective, lasso_objective(s, fit_ols_angles(s).beta, lam) + 1e-12);
  }
}

TEST(FitXlasso, PathShrinksL1Norm) {
  const auto s = random_sample(120, 25, 7);
  const double lm = lambda_max(s);
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 30; ++i) {
    const double lam = lm * std::pow(10.0, -3.0 + 0.1 * i);
    const double l1 = fit_xlasso(s, lam).beta.lpNorm<1>();
    EXPECT_LE(l1, prev + 1e-8);
    prev = l1;
  }
}

TEST(FitXlasso, WarmStartReachesSameSolution) {
  const auto s = random_sample(100, 12, 8);
  const double lam = 0.02 * lambda_max(s);
  const auto cold = fit_xlasso(s, lam);
  const auto warm = fit_xlasso(s, lam, {}, Eigen::VectorXd::Constant(12, 3.0));
  EXPECT_LE((cold.beta - warm.beta).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(FitXlasso, Errors) {
  auto s = random_sample(10, 2, 9);
  EXPECT_THROW(fit_xlasso(s, -1.0), std::invalid_argument);
  (*s.targets)(0) = std::nan("");
  EXPECT_THROW(fit_xlasso(s, 0.1), std::invalid_argument);
}

TEST(FitXlasso, IterationCapReportsNonConvergence) {
  const auto s = random_sample(60, 20, 10);
  LassoOptions opt;
  opt.max_sweeps = 1;
  opt.tolerance = 0.0;
  const auto m = fit_xlasso(s, 1e-4, opt);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.iterations, 1u);
}

TEST(Kkt, CertificateCases) {
  const auto s = random_sample(150, 10, 11);
  EXPECT_TRUE(kkt_certificate(s, fit_ols_angles(s), 1e-8).pass);
  auto zero = fit_xlasso(s, 1.5 * lambda_max(s));
  EXPECT_TRUE(kkt_certificate(s, zero, 1e-12).pass);
  auto m = fit_xlasso(s, 0.1 * lambda_max(s));
  const auto ok = kkt_certificate(s, m, 1e-6);
  ASSERT_TRUE(ok.pass);
  ASSERT_FALSE(ok.active_set.empty());
  m.beta(static_cast<Eigen::Index>(ok.active_set.front())) += 0.1;
  EXPECT_FALSE(kkt_certificate(s, m, 1e-6).pass);
  m.beta.resize(3);
  EXPECT_THROW(kkt_certificate(s, m, 1e-6), std::invalid_argument);
}

TEST(TailMse, Examples) {
  Eigen::MatrixXd w(2, 1);
  w << 1.0, 1.0;
  Eigen::VectorXd y(2);
  y << 2.0, 0.0;
  AngularLinearModel m;
  m.beta = Eigen::VectorXd::Constant(1, 1.0);
  EXPECT_DOUBLE_EQ(tail_mse(m, make_sample(w, y)), 1.0);
  m.beta(0) = 0.0;
  EXPECT_DOUBLE_EQ(tail_mse(m, make_sample(w, y)), 2.0);
  m.beta(0) = 1.0;
  EXPECT_EQ(tail_mse(m, make_sample(w, w.col(0))), 0.0);
}

TEST(PredictionInequality, ZeroResidualAndDegenerateCases) {
  const auto exact = random_sample(50, 6, 12, 0.0);
  Eigen::VectorXd beta_star = Eigen::VectorXd::Zero(6);
  for (Eigen::Index j = 0; j < 5; ++j) beta_star(j) = 1.0 + j;
  const auto r = check_prediction_lemma(exact, beta_star, 0.05);
  EXPECT_TRUE(r.applicable);
  EXPECT_TRUE(r.holds);

  auto zero = exact;
  zero.targets = Eigen::VectorXd::Zero(50);
  const auto z = check_prediction_lemma(zero, Eigen::VectorXd::Zero(6), 0.1);
  EXPECT_TRUE(z.applicable);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_TRUE(z.holds);
}

TEST(PredictionInequality, HoldsAtThresholdOnGeneratedData) {
  const auto spec = AdditiveModelSpec::defaults(20);
  const Rng root(13);
  for (std::uint64_t r = 0; r < 30; ++r) {
    Rng rng = root.substream(r);
    const Dataset data = gen_additive_regression(2000, spec, rng);
    const auto tail = select_extremes(data, 100, NormSpec::l2());
    const double lam = 2.0 * residual_score(tail, spec.beta0);
    const auto rep = check_prediction_lemma(tail, spec.beta0, lam);
    ASSERT_TRUE(rep.applicable);
    EXPECT_TRUE(rep.holds) << rep.lhs << " > " << rep.rhs;
  }
}

TEST(AngularDesign, EntriesBounded) {
  Rng rng(14);
  const Dataset data = gen_additive_regression(3000, AdditiveModelSpec::defaults(10), rng);
  for (const NormSpec spec : {NormSpec::l1(), NormSpec::l2(), NormSpec::linf()}) {
    const auto tail = select_extremes(data, 300, spec);
    EXPECT_LE(tail.angles.cwiseAbs().maxCoeff(), 1.0 + 1e-15);
  }
}

}  // namespace
}  // namespace evtlearn
