#include "hspace/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

namespace hspace {

namespace {

using Vec12 = Eigen::Matrix<double, 12, 1>;

Vec12 pack(const GeodesicState& s) {
  Vec12 y;
  y << s.x, s.v;
  return y;
}

GeodesicState unpack(const Vec12& y) { return {y.head<6>(), y.tail<6>()}; }

Vec12 rate(const HSpace& space, const Vec12& y) {
  const StateRate r = rhs(space, unpack(y));
  Vec12 out;
  out << r.dx, r.dv;
  return out;
}

/// Admissible and in the same chart component as y.
bool stays_on_chart(const HSpace& space, const Vec12& y, const Vec12& next) {
  if (!next.allFinite()) return false;
  const Admissibility to = admissible(space, next.head<6>());
  return to.ok && to.chart == admissible(space, y.head<6>()).chart;
}

/// One classical RK4 step; empty if any stage or the result is off-chart.
/// A step that jumps across a singular locus counts as off-chart.
std::optional<Vec12> rk4_step(const HSpace& space, const Vec12& y, double h) {
  try {
    const Vec12 k1 = rate(space, y);
    const Vec12 k2 = rate(space, y + 0.5 * h * k1);
    const Vec12 k3 = rate(space, y + 0.5 * h * k2);
    const Vec12 k4 = rate(space, y + h * k3);
    Vec12 next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!stays_on_chart(space, y, next)) return std::nullopt;
    return next;
  } catch (const InadmissiblePoint&) {
    return std::nullopt;
  }
}

struct DopriResult {
  Vec12 y5;
  Vec12 err;
};

std::optional<DopriResult> dopri_step(const HSpace& space, const Vec12& y, double h) {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                          b6 = 11.0 / 84.0;
  // 5th minus embedded 4th order weights.
  static constexpr double d1 = b1 - 5179.0 / 57600.0, d3 = b3 - 7571.0 / 16695.0, d4 = b4 - 393.0 / 640.0,
                          d5 = b5 + 92097.0 / 339200.0, d6 = b6 - 187.0 / 2100.0, d7 = -1.0 / 40.0;
  try {
    const Vec12 k1 = rate(space, y);
    const Vec12 k2 = rate(space, y + h * (a21 * k1));
    const Vec12 k3 = rate(space, y + h * (a31 * k1 + a32 * k2));
    const Vec12 k4 = rate(space, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec12 k5 = rate(space, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec12 k6 = rate(space, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec12 y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (!stays_on_chart(space, y, y5)) return std::nullopt;
    const Vec12 k7 = rate(space, y5);
    return DopriResult{y5, h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)};
  } catch (const InadmissiblePoint&) {
    return std::nullopt;
  }
}

TrajectorySample make_sample(const HSpace& space, double t, const Vec12& y) {
  const GeodesicState s = unpack(y);
  const FirstIntegrals fi = invariants(space, s);
  return {t, s, fi.E, fi.I};
}

void integrate_rk4(const HSpace& space, const IntegrateOptions& options, Trajectory* traj) {
  Vec12 y = pack(traj->samples.back().state);
  double t = traj->samples.back().t;
  const double h = options.dt;
  for (int n = 1; n <= options.n_steps; ++n) {
    if (auto next = rk4_step(space, y, h)) {
      y = *next;
      t = options.dt * n;
      traj->samples.push_back(make_sample(space, t, y));
      continue;
    }
    // Bisect the failed step down to the chart boundary.
    double lo = 0.0;
    double hi = 1.0;
    std::optional<Vec12> best;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (auto trial = rk4_step(space, y, mid * h)) {
        lo = mid;
        best = trial;
      } else {
        hi = mid;
      }
    }
    if (best && lo > 0.0) traj->samples.push_back(make_sample(space, t + lo * h, *best));
    traj->chart_exit = true;
    return;
  }
}

void integrate_rk45(const HSpace& space, const IntegrateOptions& options, Trajectory* traj) {
  Vec12 y = pack(traj->samples.back().state);
  double t = 0.0;
  const double t_end = options.dt * options.n_steps;
  const double tol = options.rk45_tol;
  const double h_min = 1e-12 * std::max(1.0, t_end);
  double h = options.dt;
  while (t < t_end) {
    const bool last = t + h >= t_end;
    const double step = last ? t_end - t : h;
    auto result = dopri_step(space, y, step);
    if (!result) {
      h = 0.5 * step;
      if (h < h_min) {
        traj->chart_exit = true;
        return;
      }
      continue;
    }
    double err = 0.0;
    for (int i = 0; i < 12; ++i) {
      const double sc = tol + tol * std::max(std::fabs(y[i]), std::fabs(result->y5[i]));
      err = std::max(err, std::fabs(result->err[i]) / sc);
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      y = result->y5;
      t = last ? t_end : t + step;
      traj->samples.push_back(make_sample(space, t, y));
      h = step * factor;
    } else {
      h = step * factor;
      if (h < h_min) throw StepUnderflow("RK45 step size underflow at t = " + std::to_string(t));
    }
  }
}

}  // namespace

StateRate rhs(const HSpace& space, const GeodesicState& s) {
  const Gamma gamma = christoffel(space, s.x);
  StateRate r;
  r.dx = s.v;
  for (int k = 0; k < 6; ++k) r.dv[k] = -s.v.dot(gamma[k] * s.v);
  return r;
}

FirstIntegrals invariants(const HSpace& space, const GeodesicState& s) {
  require_admissible(space, s.x);
  const Sym6 g = space.metric<double>(s.x);
  const Sym6 h = space.hform<double>(s.x);
  const double p = space.phi<double>(s.x);
  const double E = s.v.dot(g * s.v);
  const double I = s.v.dot((h - 4.0 * p * g) * s.v);
  return {E, I};
}

std::string to_string(Method m) { return m == Method::kRK4 ? "rk4" : "rk45"; }

Trajectory integrate(const HSpace& space, const GeodesicState& s0, const IntegrateOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (options.n_steps < 0) throw std::invalid_argument("integrate: n_steps must be non-negative");
  require_admissible(space, s0.x);
  if (!s0.v.allFinite()) throw std::invalid_argument("integrate: initial velocity must be finite");

  Trajectory traj;
  traj.dt = options.dt;
  traj.method = options.method;
  traj.samples.push_back(make_sample(space, 0.0, pack(s0)));
  if (options.method == Method::kRK4)
    integrate_rk4(space, options, &traj);
  else
    integrate_rk45(space, options, &traj);
  return traj;
}

Drift drift_report(const Trajectory& traj) {
  if (traj.samples.empty()) throw std::invalid_argument("drift_report: empty trajectory");
  const double e0 = traj.samples.front().E;
  const double i0 = traj.samples.front().I;
  Drift d;
  for (const auto& s : traj.samples) {
    d.E = std::max(d.E, std::fabs(s.E - e0) / (1.0 + std::fabs(e0)));
    d.I = std::max(d.I, std::fabs(s.I - i0) / (1.0 + std::fabs(i0)));
  }
  return d;
}

OrderStudy order_study(const HSpace& space, const GeodesicState& s0, const std::vector<double>& dts,
                       double total_time, Method method) {
  if (dts.size() < 3) throw std::invalid_argument("order_study needs at least three step sizes");
  OrderStudy study;
  study.dts = dts;
  for (double dt : dts) {
    if (!(dt > 0.0)) throw std::invalid_argument("order_study: step sizes must be positive");
    IntegrateOptions opts;
    opts.dt = dt;
    opts.n_steps = static_cast<int>(std::lround(total_time / dt));
    opts.method = method;
    const Trajectory traj = integrate(space, s0, opts);
    if (traj.chart_exit)
      throw InadmissiblePoint("order_study: trajectory left the chart at t = " + std::to_string(traj.last_t()) +
                              " with dt = " + std::to_string(dt));
    study.drifts.push_back(drift_report(traj).I);
  }
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < dts.size(); ++i)
    if (study.drifts[i] > kDriftFloor) used.push_back(i);
  study.points_used = static_cast<int>(used.size());
  if (used.size() < 3) {
    study.floor_limited = true;
    return study;
  }

  const double n = static_cast<double>(used.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i : used) {
    const double lx = std::log(dts[i]);
    const double ly = std::log(study.drifts[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return study;
}

std::vector<GeodesicState> sample_initial_states(const HSpace& space, const Box& box, Sampler& sampler, int n,
                                                 double speed) {
  Box inner;
  inner.lo = 0.75 * box.lo + 0.25 * box.hi;
  inner.hi = 0.25 * box.lo + 0.75 * box.hi;
  const std::vector<Point6> points = sample_admissible(space, inner, sampler, n);
  std::vector<GeodesicState> out;
  out.reserve(points.size());
  for (const Point6& x : points) {
    GeodesicState s;
    s.x = x;
    for (int i = 0; i < 6; ++i) s.v[i] = sampler.uniform(-speed, speed);
    out.push_back(s);
  }
  return out;
}

bool extends_to(const HSpace& space, const GeodesicState& s0, double total_time, double rk45_tol) {
  IntegrateOptions opts;
  opts.method = Method::kRK45;
  opts.n_steps = 100;
  opts.dt = total_time / opts.n_steps;
  opts.rk45_tol = rk45_tol;
  try {
    return !integrate(space, s0, opts).chart_exit;
  } catch (const StepUnderflow&) {
    return false;
  }
}

double flow_rate(const HSpace& space, const GeodesicState& s0, double total_time, double rk45_tol) {
  IntegrateOptions opts;
  opts.method = Method::kRK45;
  opts.n_steps = 100;
  opts.dt = total_time / opts.n_steps;
  opts.rk45_tol = rk45_tol;
  const Trajectory traj = integrate(space, s0, opts);
  if (traj.chart_exit) throw InadmissiblePoint("geodesic leaves the chart before total_time");
  double rate = 0.0;
  for (const auto& s : traj.samples)
    rate = std::max(rate, max_abs(christoffel(space, s.state.x)) * s.state.v.cwiseAbs().maxCoeff());
  return rate;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,x1,x2,x3,x4,x5,x6,v1,v2,v3,v4,v5,v6,E,I\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (const auto& s : traj.samples) {
    put(s.t, ',');
    for (int i = 0; i < 6; ++i) put(s.state.x[i], ',');
    for (int i = 0; i < 6; ++i) put(s.state.v[i], ',');
    put(s.E, ',');
    put(s.I, '\n');
  }
}

}  // namespace hspace
