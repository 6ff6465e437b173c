#pragma once

#include "hspace/scalar_field.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hspace {

template <typename T>
using Mat6 = Eigen::Matrix<T, 6, 6>;

/// Values of g, a or h at a point. Only ever filled through set_sym.
using Sym6 = Mat6<double>;

template <typename T>
inline void set_sym(Mat6<T>& m, int i, int j, const T& v) {
  m(i - 1, j - 1) = v;
  m(j - 1, i - 1) = v;
}

template <typename T>
inline void add_sym(Mat6<T>& m, int i, int j, const T& v) {
  m(i - 1, j - 1) += v;
  if (i != j) m(j - 1, i - 1) += v;
}

/// Segre type of the h-space family.
enum class Family { k3_21, k32_1, k321 };

/// How to read the two printed formulas that fail the Eisenhart identity
/// as typeset. kAmended multiplies the 4A eps x1 (dx3)^2 term of the [3(21)]
/// a-form by e3, and pairs dx1 with dx3 (not dx2) in the [(32)1] metric.
/// Everything else is identical between the two readings.
enum class Reading { kPrinted, kAmended };

std::string to_string(Family f);         // "3(21)", "(32)1", "(321)"
std::string segre_label(Family f);       // "[3(21)]", ...
std::optional<Family> family_from_string(const std::string& s);
std::string to_string(Reading r);
std::optional<Reading> reading_from_string(const std::string& s);

struct Signs {
  int e3 = -1;
  int e4 = 1;
  int e5 = 1;
  int e6 = -1;
};

struct HSpaceConfig {
  Family family = Family::k321;
  Signs signs;
  double lambda = 0.0;
  double c = 0.0;
  int epsilon = 1;  // [3(21)] only
  Reading reading = Reading::kAmended;
  /// Slot name -> expression. Slots: [3(21)] theta(x3), omega(x5,x6);
  /// [(32)1] f6(x6), omega(x3,x5); [(321)] theta, omega of (x3,x5,x6).
  /// Missing slots default to "0".
  std::map<std::string, std::string> functions;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InadmissiblePoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kGuardDelta = 1e-6;
inline constexpr double kDetDelta = 1e-10;

struct Admissibility {
  bool ok = false;
  double margin = 0.0;  // smallest guard quantity
  /// Bit n set when the n-th guard quantity (family guards, then det g) is
  /// negative. Points with different patterns lie in different components
  /// of the chart.
  unsigned chart = 0;
};

/// Scalar field phi and its gradient.
struct PhiValue {
  double value = 0.0;
  Point6 grad = Point6::Zero();
};

/// An immutable, validated h-space.
class HSpace {
 public:
  /// Validates the config and parses every function slot.
  static HSpace build(const HSpaceConfig& config);

  const HSpaceConfig& config() const { return config_; }
  Family family() const { return config_.family; }

  template <typename T>
  Mat6<T> metric(const Vec6<T>& x) const;
  template <typename T>
  Mat6<T> aform(const Vec6<T>& x) const;
  template <typename T>
  Mat6<T> hform(const Vec6<T>& x) const;
  template <typename T>
  T phi(const Vec6<T>& x) const;
  /// The coefficient s(x) in h = a + s g.
  template <typename T>
  T h_shift(const Vec6<T>& x) const;

  const ScalarField& theta() const { return theta_; }
  const ScalarField& omega() const { return omega_; }
  const ScalarField& f6() const { return f6_; }

 private:
  HSpaceConfig config_;
  ScalarField theta_;
  ScalarField omega_;
  ScalarField f6_;
};

Sym6 metric(const HSpace& space, const Point6& x);
Sym6 aform(const HSpace& space, const Point6& x);
Sym6 hform(const HSpace& space, const Point6& x);
PhiValue phi(const HSpace& space, const Point6& x);
Admissibility admissible(const HSpace& space, const Point6& x);

/// Throws InadmissiblePoint when admissible() fails.
void require_admissible(const HSpace& space, const Point6& x);

/// Axis-aligned sampling box.
struct Box {
  Point6 lo = Point6::Constant(-1.0);
  Point6 hi = Point6::Constant(1.0);
};

/// [-1,1]^6; for [3(21)] with eps=1 the x3 range is moved to
/// [lambda+0.5, lambda+2.5] so f3-lambda stays positive.
Box default_box(const HSpace& space);

/// Deterministic uniform sampler. Uses the top 53 bits of mt19937_64 so the
/// stream does not depend on the standard library's distributions.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  Point6 point(const Box& box) {
    Point6 p;
    for (int i = 0; i < 6; ++i) p[i] = uniform(box.lo[i], box.hi[i]);
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection-samples n admissible points, giving up after 100 n draws.
std::vector<Point6> sample_admissible(const HSpace& space, const Box& box, Sampler& sampler, int n);

// ---------------------------------------------------------------------------

template <typename T>
Mat6<T> HSpace::metric(const Vec6<T>& x) const {
  const double e3 = config_.signs.e3;
  const double e4 = config_.signs.e4;
  const double e5 = config_.signs.e5;
  const double e6 = config_.signs.e6;
  const double lambda = config_.lambda;
  Mat6<T> g = Mat6<T>::Constant(T(0.0));

  switch (config_.family) {
    case Family::k3_21: {
      const double eps = config_.epsilon;
      const T f3 = eps * x[2];
      const T F = f3 - lambda;
      const T F3 = F * F * F;
      const T A = eps * x[1] + theta_.evaluate(x);
      const T sigma = 3.0 / F;
      const T ex1 = eps * x[0];
      set_sym<T>(g, 1, 3, 2.0 * e3 * A);
      set_sym<T>(g, 2, 2, T(e3));
      set_sym<T>(g, 2, 3, e3 * ex1);
      set_sym<T>(g, 3, 3, e3 * (ex1 * ex1));
      set_sym<T>(g, 4, 5, e4 * F3);
      set_sym<T>(g, 5, 5, -e4 * F3 * (sigma + omega_.evaluate(x)));
      set_sym<T>(g, 6, 6, e6 * F3);
      break;
    }
    case Family::k32_1: {
      const T F = f6_.evaluate(x) - lambda;
      const T w = omega_.evaluate(x);
      set_sym<T>(g, 2, 2, e3 * F);
      if (config_.reading == Reading::kPrinted)
        set_sym<T>(g, 1, 2, e3 * F);
      else
        set_sym<T>(g, 1, 3, e3 * F);
      set_sym<T>(g, 3, 3, e3 * F * w);
      set_sym<T>(g, 2, 3, T(-e3));
      set_sym<T>(g, 4, 5, e4 * F);
      set_sym<T>(g, 5, 5, -e4 * F * w - e5);
      set_sym<T>(g, 6, 6, T(e6));
      break;
    }
    case Family::k321: {
      set_sym<T>(g, 2, 2, T(e3));
      set_sym<T>(g, 1, 3, T(e3));
      set_sym<T>(g, 2, 3, T(-e3));
      set_sym<T>(g, 3, 3, e3 * theta_.evaluate(x));
      set_sym<T>(g, 4, 5, T(e4));
      set_sym<T>(g, 5, 5, -e4 * omega_.evaluate(x));
      set_sym<T>(g, 6, 6, T(e6));
      break;
    }
  }
  return g;
}

template <typename T>
Mat6<T> HSpace::aform(const Vec6<T>& x) const {
  const double e3 = config_.signs.e3;
  const double e4 = config_.signs.e4;
  const double e6 = config_.signs.e6;
  const double lambda = config_.lambda;
  const Mat6<T> g = metric(x);
  Mat6<T> a = Mat6<T>::Constant(T(0.0));

  switch (config_.family) {
    case Family::k3_21: {
      const double eps = config_.epsilon;
      const T f3 = eps * x[2];
      const T A = eps * x[1] + theta_.evaluate(x);
      a.template topLeftCorner<3, 3>() = g.template topLeftCorner<3, 3>() * f3;
      a.template bottomRightCorner<3, 3>() = g.template bottomRightCorner<3, 3>() * T(lambda);
      const double factor = config_.reading == Reading::kAmended ? 4.0 * e3 : 4.0;
      add_sym<T>(a, 2, 3, g(0, 2));
      add_sym<T>(a, 3, 3, factor * A * (eps * x[0]));
      add_sym<T>(a, 5, 5, g(3, 4));
      break;
    }
    case Family::k32_1: {
      a.template topLeftCorner<5, 5>() = g.template topLeftCorner<5, 5>() * T(lambda);
      add_sym<T>(a, 2, 3, g(1, 1));
      add_sym<T>(a, 3, 3, g(1, 2));
      add_sym<T>(a, 5, 5, g(3, 4));
      add_sym<T>(a, 6, 6, e6 * f6_.evaluate(x));
      break;
    }
    case Family::k321: {
      a = g * T(lambda);
      add_sym<T>(a, 2, 3, T(e3));
      add_sym<T>(a, 3, 3, T(e3));
      add_sym<T>(a, 5, 5, T(e4));
      break;
    }
  }
  return a;
}

template <typename T>
T HSpace::h_shift(const Vec6<T>& x) const {
  switch (config_.family) {
    case Family::k3_21:
      return 3.0 * config_.epsilon * x[2] + config_.c;
    case Family::k32_1:
      return f6_.evaluate(x) + config_.c;
    case Family::k321:
      break;
  }
  return T(config_.c);
}

template <typename T>
Mat6<T> HSpace::hform(const Vec6<T>& x) const {
  const T s = h_shift(x);
  return aform(x) + metric(x) * s;
}

template <typename T>
T HSpace::phi(const Vec6<T>& x) const {
  switch (config_.family) {
    case Family::k3_21:
      return 1.5 * config_.epsilon * x[2] + config_.c;
    case Family::k32_1:
      return 0.5 * f6_.evaluate(x) + config_.c;
    case Family::k321:
      break;
  }
  return T(config_.c);
}

}  // namespace hspace
