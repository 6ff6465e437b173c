#pragma once

#include "hspace/tensor.hpp"

#include <ostream>
#include <vector>

namespace hspace {

struct GeodesicState {
  Point6 x = Point6::Zero();
  Vec6<double> v = Vec6<double>::Zero();
};

struct StateRate {
  Vec6<double> dx;
  Vec6<double> dv;
};

/// dx = v, dv^k = -Gamma^k_ij v^i v^j. Throws InadmissiblePoint off-chart.
StateRate rhs(const HSpace& space, const GeodesicState& s);

/// E = g(v, v) and I = (h - 4 phi g)(v, v).
struct FirstIntegrals {
  double E = 0.0;
  double I = 0.0;
};

FirstIntegrals invariants(const HSpace& space, const GeodesicState& s);

enum class Method { kRK4, kRK45 };

std::string to_string(Method m);

struct IntegrateOptions {
  double dt = 1e-3;
  int n_steps = 1000;
  Method method = Method::kRK4;
  /// RK45 only: absolute and relative error target per step.
  double rk45_tol = 1e-10;
};

struct TrajectorySample {
  double t = 0.0;
  GeodesicState state;
  double E = 0.0;
  double I = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  Method method = Method::kRK4;
  /// Set when the curve reached the edge of the chart; the last sample is
  /// then the final admissible point found by bisecting the failed step.
  bool chart_exit = false;

  double last_t() const { return samples.empty() ? 0.0 : samples.back().t; }
};

class StepUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// RK4 takes n_steps fixed steps of dt. RK45 (Dormand-Prince) adapts its
/// step to rk45_tol, starting from dt, until t = n_steps * dt.
Trajectory integrate(const HSpace& space, const GeodesicState& s0, const IntegrateOptions& options);

struct Drift {
  double E = 0.0;
  double I = 0.0;
};

/// max_t |Q(t) - Q(0)| / (1 + |Q(0)|) for Q in {E, I}.
Drift drift_report(const Trajectory& traj);

/// Drifts at or below this are treated as roundoff.
inline constexpr double kDriftFloor = 1e-14;

struct OrderStudy {
  std::vector<double> dts;
  std::vector<double> drifts;  // drift of I per dt
  double slope = 0.0;          // least-squares slope of log drift vs log dt
  int points_used = 0;         // drifts above kDriftFloor, the ones fitted
  bool floor_limited = false;  // fewer than three usable drifts; slope unset
};

/// Integrates to total_time at every dt and fits the drift of I, skipping
/// drifts at the roundoff floor. Throws InadmissiblePoint on a chart exit.
OrderStudy order_study(const HSpace& space, const GeodesicState& s0, const std::vector<double>& dts,
                       double total_time = 1.0, Method method = Method::kRK4);

/// Initial states with x uniform in the middle half of box (per axis) and
/// v uniform in [-speed, speed]^6; x is rejection-sampled for admissibility.
std::vector<GeodesicState> sample_initial_states(const HSpace& space, const Box& box, Sampler& sampler, int n,
                                                 double speed = 0.25);

/// True when an RK45 reference integration at rk45_tol reaches total_time
/// without leaving the chart or collapsing its step (a blow-up).
bool extends_to(const HSpace& space, const GeodesicState& s0, double total_time, double rk45_tol = 1e-10);

/// max |Gamma^k_ij| * max |v^i| over an RK45 reference run to total_time;
/// 1 / rate is the shortest time scale of the flow. A fixed step dt
/// resolves the curve when dt * rate <= 1. Throws InadmissiblePoint on a
/// chart exit and StepUnderflow on a blow-up.
double flow_rate(const HSpace& space, const GeodesicState& s0, double total_time, double rk45_tol = 1e-10);

/// Header t,x1..x6,v1..v6,E,I; one row per sample, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& out);

}  // namespace hspace
