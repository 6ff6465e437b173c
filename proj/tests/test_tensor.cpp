#include "hspace/tensor.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace hspace;
using namespace hspace::testing;

namespace {

Sym6 diag(double a, double b, double c, double d, double e, double f) {
  return Vec6<double>((Vec6<double>() << a, b, c, d, e, f).finished()).asDiagonal();
}

/// Christoffel symbols from central-difference metric partials, written out
/// with explicit index loops.
Gamma fd_christoffel(const HSpace& s, const Point6& x, double h) {
  std::array<Sym6, 6> dg;
  for (int l = 0; l < 6; ++l) {
    Point6 xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    dg[l] = (metric(s, xp) - metric(s, xm)) / (2 * h);
  }
  const Sym6 ginv = metric(s, x).inverse();
  Gamma out;
  for (int k = 0; k < 6; ++k) {
    out[k].setZero();
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int l = 0; l < 6; ++l)
          out[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  }
  return out;
}

}  // namespace

TEST(Invert, Examples) {
  EXPECT_EQ(invert(Sym6::Identity()), Sym6::Identity());
  EXPECT_LT((invert(diag(2, 2, 2, 2, 2, 2)) - 0.5 * Sym6::Identity()).cwiseAbs().maxCoeff(), 1e-16);

  const Sym6 g = metric(HSpace::build(config_flat()), Point6::Zero());
  EXPECT_LT((g * invert(g) - Sym6::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Invert, SingularThrows) {
  Sym6 g = Sym6::Identity();
  g(5, 5) = 0;
  EXPECT_THROW(invert(g), SingularMatrix);
}

TEST(Invert, InvolutionAndResidualOnSampledMetrics) {
  for (const HSpaceConfig& c : generic_configs()) {
    const HSpace s = HSpace::build(c);
    for (const Point6& x : sample(s, 20)) {
      const Sym6 g = metric(s, x);
      const Sym6 gi = invert(g);
      EXPECT_EQ(gi, gi.transpose());
      EXPECT_LT((g * gi - Sym6::Identity()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT((invert(gi) - g).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + g.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Signature, Examples) {
  EXPECT_EQ(signature(diag(1, 1, -1, -1, -1, -1)), (Signature{2, 4}));
  EXPECT_EQ(signature(Sym6::Identity()), (Signature{6, 0}));
  EXPECT_THROW(signature(diag(1, 1, 0, -1, -1, -1)), DegenerateMetric);

  // Direct eigen-decomposition of the constant metric.
  const Sym6 g = metric(HSpace::build(config_flat()), Point6::Zero());
  Eigen::SelfAdjointEigenSolver<Sym6> es(g);
  const int pos = static_cast<int>((es.eigenvalues().array() > 0).count());
  EXPECT_EQ(pos, 2);
  EXPECT_EQ(signature(g), (Signature{2, 4}));
}

TEST(Christoffel, ConstantMetricIsFlat) {
  const HSpace s = HSpace::build(config_flat());
  EXPECT_EQ(max_abs(christoffel(s, Point6::Random())), 0.0);
}

TEST(Christoffel, SymmetricLowerIndices) {
  for (const HSpaceConfig& c : generic_configs()) {
    const HSpace s = HSpace::build(c);
    for (const Point6& x : sample(s, 10)) {
      const Gamma g = christoffel(s, x);
      for (int k = 0; k < 6; ++k) EXPECT_EQ(g[k], g[k].transpose());
    }
  }
}

TEST(Christoffel, MatchesFiniteDifferences) {
  for (const HSpaceConfig& c : generic_configs()) {
    const HSpace s = HSpace::build(c);
    for (const Point6& x : sample(s, 10)) {
      const Gamma ad = christoffel(s, x);
      const Gamma fd = fd_christoffel(s, x, 1e-5);
      for (int k = 0; k < 6; ++k)
        EXPECT_LT((ad[k] - fd[k]).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + ad[k].cwiseAbs().maxCoeff()))
            << to_string(c.family) << " k=" << k;
    }
  }
}

TEST(CovDeriv, MetricCompatibility) {
  for (const HSpaceConfig& c : generic_configs()) {
    const HSpace s = HSpace::build(c);
    for (const Point6& x : sample(s, 100)) EXPECT_LE(max_abs(cov_deriv(s, Form::kMetric, x)), 1e-9);
  }
}

TEST(CovDeriv, ConstantFormOnConstantMetric) {
  const HSpace s = HSpace::build(config_flat());
  const FormEvaluator constant = [](const Vec6<Dual6>&) {
    Mat6<Dual6> m;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) m(i, j) = Dual6(1.0 + i + j);
    return m;
  };
  EXPECT_EQ(max_abs(cov_deriv(s, constant, Point6::Random())), 0.0);
}

TEST(CovDeriv, AFormIsParallelForConstantPhi) {
  const HSpace s = HSpace::build(config_321());
  for (const Point6& x : sample(s, 20)) {
    EXPECT_LE(max_abs(cov_deriv(s, Form::kA, x)), 1e-9);
    EXPECT_LE(max_abs(cov_deriv(s, Form::kH, x)), 1e-9);
  }
}

TEST(CovDeriv, SymmetricInFormSlots) {
  const HSpace s = HSpace::build(config_3_21());
  const Point6 x = sample(s, 1).front();
  const Cov3 t = cov_deriv(s, Form::kA, x);
  for (int k = 0; k < 6; ++k) EXPECT_LT((t[k] - t[k].transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CovDeriv, ManualFormulaOnRandomInput) {
  // Independent index-loop evaluation of the defining formula.
  Gamma gamma;
  MatGrad dt;
  for (int k = 0; k < 6; ++k) {
    gamma[k] = Sym6::Random();
    gamma[k] = (gamma[k] + gamma[k].transpose()).eval();
    dt[k] = Sym6::Random();
    dt[k] = (dt[k] + dt[k].transpose()).eval();
  }
  Sym6 t = Sym6::Random();
  t = (t + t.transpose()).eval();
  const Cov3 out = cov_deriv(gamma, t, dt);
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        double v = dt[k](i, j);
        for (int l = 0; l < 6; ++l) v -= gamma[l](k, i) * t(l, j) + gamma[l](k, j) * t(i, l);
        EXPECT_NEAR(out[k](i, j), v, 1e-13);
      }
}
