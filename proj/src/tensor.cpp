#include "hspace/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace hspace {

double max_abs(const Rank3<double>& t) {
  double m = 0.0;
  for (const auto& slice : t) m = std::max(m, slice.cwiseAbs().maxCoeff());
  return m;
}

Sym6 invert(const Sym6& g) {
  Eigen::FullPivLU<Sym6> lu(g);
  const double det = lu.determinant();
  if (!(std::fabs(det) >= kDetDelta)) throw SingularMatrix("near-singular matrix, |det| = " + std::to_string(std::fabs(det)));
  Sym6 inv = lu.inverse();
  return (0.5 * (inv + inv.transpose())).eval();
}

Signature signature(const Sym6& g) {
  Eigen::SelfAdjointEigenSolver<Sym6> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DegenerateMetric("eigenvalue computation failed");
  Signature s;
  for (int i = 0; i < 6; ++i) {
    const double mu = solver.eigenvalues()[i];
    if (std::fabs(mu) < kGuardDelta) throw DegenerateMetric("eigenvalue " + std::to_string(mu) + " is within tolerance of zero");
    (mu > 0.0 ? s.positive : s.negative) += 1;
  }
  return s;
}

void split_dual(const Mat6<Dual6>& m, Sym6* value, MatGrad* grad) {
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const Dual6& d = m(i, j);
      (*value)(i, j) = d.value();
      for (int k = 0; k < 6; ++k) (*grad)[k](i, j) = d.derivatives().size() ? d.derivatives()[k] : 0.0;
    }
  }
}

Gamma christoffel(const Sym6& ginv, const MatGrad& dg) {
  // Lowered symbols first: [ij, l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
  Gamma gamma = zero_rank3<double>();
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      Vec6<double> lowered;
      for (int l = 0; l < 6; ++l) lowered[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      const Vec6<double> raised = ginv * lowered;
      for (int k = 0; k < 6; ++k) {
        gamma[k](i, j) = raised[k];
        gamma[k](j, i) = raised[k];
      }
    }
  }
  return gamma;
}

Gamma christoffel(const HSpace& space, const Point6& x) {
  require_admissible(space, x);
  Sym6 g;
  MatGrad dg;
  split_dual(space.metric<Dual6>(seed_dual(x)), &g, &dg);
  return christoffel(invert(g), dg);
}

Cov3 cov_deriv(const Gamma& gamma, const Sym6& t, const MatGrad& dt) {
  Cov3 out = zero_rank3<double>();
  for (int k = 0; k < 6; ++k) {
    // (Gamma_k)^l_i = gamma[l](k, i); correction_ij = sum_l G(l,i) t(l,j).
    Mat6<double> gk;
    for (int l = 0; l < 6; ++l)
      for (int i = 0; i < 6; ++i) gk(l, i) = gamma[l](k, i);
    const Mat6<double> corr = gk.transpose() * t;
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) {
        const double v = dt[k](i, j) - corr(i, j) - corr(j, i);
        out[k](i, j) = v;
        out[k](j, i) = v;
      }
    }
  }
  return out;
}

FormEvaluator form_evaluator(const HSpace& space, Form form) {
  switch (form) {
    case Form::kMetric:
      return [&space](const Vec6<Dual6>& x) { return space.metric<Dual6>(x); };
    case Form::kA:
      return [&space](const Vec6<Dual6>& x) { return space.aform<Dual6>(x); };
    case Form::kH:
      break;
  }
  return [&space](const Vec6<Dual6>& x) { return space.hform<Dual6>(x); };
}

Cov3 cov_deriv(const HSpace& space, const FormEvaluator& form, const Point6& x) {
  const Gamma gamma = christoffel(space, x);
  Sym6 t;
  MatGrad dt;
  split_dual(form(seed_dual(x)), &t, &dt);
  return cov_deriv(gamma, t, dt);
}

Cov3 cov_deriv(const HSpace& space, Form form, const Point6& x) {
  return cov_deriv(space, form_evaluator(space, form), x);
}

}  // namespace hspace
