#pragma once

#include "hspace/spaces.hpp"

#include <array>
#include <functional>

namespace hspace {

/// Six 6x6 slices of a rank-3 array; which index selects the slice depends
/// on the alias below.
template <typename T>
using Rank3 = std::array<Mat6<T>, 6>;

/// gamma[k](i, j) = Gamma^k_ij, symmetric in (i, j).
using Gamma = Rank3<double>;

/// t[k](i, j) = T_ij;k, the covariant derivative of a symmetric form along x^k.
using Cov3 = Rank3<double>;

/// d[k](i, j) = partial_k M_ij.
using MatGrad = Rank3<double>;

template <typename T>
Rank3<T> zero_rank3() {
  Rank3<T> r;
  for (auto& m : r) m.setZero();
  return r;
}

double max_abs(const Rank3<double>& t);

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inverse of a nondegenerate symmetric matrix; result is exactly symmetric.
Sym6 invert(const Sym6& g);

struct Signature {
  int positive = 0;
  int negative = 0;
  bool operator==(const Signature&) const = default;
};

Signature signature(const Sym6& g);

/// Splits a dual-valued matrix into values and partials.
void split_dual(const Mat6<Dual6>& m, Sym6* value, MatGrad* grad);

/// Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij).
Gamma christoffel(const Sym6& ginv, const MatGrad& dg);
Gamma christoffel(const HSpace& space, const Point6& x);

/// T_ij;k = d_k T_ij - Gamma^l_ki T_lj - Gamma^l_kj T_il.
Cov3 cov_deriv(const Gamma& gamma, const Sym6& t, const MatGrad& dt);

using FormEvaluator = std::function<Mat6<Dual6>(const Vec6<Dual6>&)>;

enum class Form { kMetric, kA, kH };

FormEvaluator form_evaluator(const HSpace& space, Form form);

Cov3 cov_deriv(const HSpace& space, const FormEvaluator& form, const Point6& x);
Cov3 cov_deriv(const HSpace& space, Form form, const Point6& x);

}  // namespace hspace
