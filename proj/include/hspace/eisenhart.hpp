#pragma once

#include "hspace/tensor.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hspace {

/// 1-based component index (i, j; k) of a covariant derivative T_ij;k.
struct Index3 {
  int i = 1;
  int j = 1;
  int k = 1;
  bool operator==(const Index3&) const = default;
};

struct ResidualA {
  Cov3 r;  // R_ijk = a_ij;k - g_ik phi_,j - g_jk phi_,i
  double max_abs = 0.0;
  Index3 worst;
};

/// Which coefficient pattern to use for the h-form identity.
///   kUniform:    h_ij;k = 2 g_ij phi_,k + 2 g_ik phi_,j + 2 g_jk phi_,i
///   kConsistent: h_ij;k = 2 g_ij phi_,k +   g_ik phi_,j +   g_jk phi_,i
enum class Convention { kUniform, kConsistent };

ResidualA residual_a(const HSpace& space, const Point6& x);
double residual_h(const HSpace& space, const Point6& x, Convention convention);

/// The same residual with every partial derivative (metric, a-form, phi)
/// taken by central differences, evaluated in Real (double or long double).
template <typename Real = double>
ResidualA residual_a_fd(const HSpace& space, const Point6& x, double step);

extern template ResidualA residual_a_fd<double>(const HSpace&, const Point6&, double);
extern template ResidualA residual_a_fd<long double>(const HSpace&, const Point6&, double);

struct VerifyOptions {
  std::uint64_t seed = 42;
  int n_points = 100;
  double tol = 1e-9;
  std::optional<Box> box;  // default_box(space) when empty
};

struct ComponentResidual {
  Index3 index;
  double value = 0.0;
};

/// Result for the other reading of the printed formulas, attached when a
/// printed-reading verification fails.
struct AlternateReading {
  Reading reading = Reading::kAmended;
  double max_residual_a = 0.0;
  double max_residual_h_consistent = 0.0;
  bool pass = false;
};

struct EisenhartReport {
  Family family = Family::k321;
  Reading reading = Reading::kAmended;
  std::uint64_t seed = 0;
  int points = 0;
  double tol = 0.0;
  double max_residual_a = 0.0;
  double max_residual_h_uniform = 0.0;
  double max_residual_h_consistent = 0.0;
  Point6 worst_point = Point6::Zero();
  Index3 worst_component;
  /// Components (i <= j) whose residual exceeds tol at some sampled point,
  /// with the maximum over points; largest first.
  std::vector<ComponentResidual> failing_components;
  bool pass = false;
  std::optional<AlternateReading> alternate;
};

EisenhartReport verify(const HSpace& space, const VerifyOptions& options);

}  // namespace hspace
