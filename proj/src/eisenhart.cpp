#include "hspace/eisenhart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

namespace hspace {

namespace {

ResidualA assemble_residual(const Sym6& g, const Cov3& cov_a, const Point6& dphi) {
  ResidualA out;
  out.r = zero_rank3<double>();
  for (int k = 0; k < 6; ++k) {
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) {
        const double v = cov_a[k](i, j) - g(i, k) * dphi[j] - g(j, k) * dphi[i];
        out.r[k](i, j) = v;
        out.r[k](j, i) = v;
        if (std::fabs(v) > out.max_abs) {
          out.max_abs = std::fabs(v);
          out.worst = {i + 1, j + 1, k + 1};
        }
      }
    }
  }
  return out;
}

}  // namespace

ResidualA residual_a(const HSpace& space, const Point6& x) {
  require_admissible(space, x);
  const Vec6<Dual6> xd = seed_dual(x);
  Sym6 g;
  MatGrad dg;
  split_dual(space.metric<Dual6>(xd), &g, &dg);
  Sym6 a;
  MatGrad da;
  split_dual(space.aform<Dual6>(xd), &a, &da);
  const Dual6 p = space.phi<Dual6>(xd);
  const Cov3 cov_a = cov_deriv(christoffel(invert(g), dg), a, da);
  return assemble_residual(g, cov_a, p.derivatives());
}

double residual_h(const HSpace& space, const Point6& x, Convention convention) {
  require_admissible(space, x);
  const Vec6<Dual6> xd = seed_dual(x);
  Sym6 g;
  MatGrad dg;
  split_dual(space.metric<Dual6>(xd), &g, &dg);
  Sym6 h;
  MatGrad dh;
  split_dual(space.hform<Dual6>(xd), &h, &dh);
  const Point6 dphi = space.phi<Dual6>(xd).derivatives();
  const Cov3 cov_h = cov_deriv(christoffel(invert(g), dg), h, dh);
  const double mixed = convention == Convention::kUniform ? 2.0 : 1.0;
  double m = 0.0;
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) {
        const double v =
            cov_h[k](i, j) - 2.0 * g(i, j) * dphi[k] - mixed * (g(i, k) * dphi[j] + g(j, k) * dphi[i]);
        m = std::max(m, std::fabs(v));
      }
  return m;
}

template <typename Real>
ResidualA residual_a_fd(const HSpace& space, const Point6& x, double step) {
  using M = Mat6<Real>;
  require_admissible(space, x);
  const Vec6<Real> xr = x.cast<Real>();
  const Real h = static_cast<Real>(step);
  const M g = space.metric<Real>(xr);
  const M a = space.aform<Real>(xr);
  std::array<M, 6> dg;
  std::array<M, 6> da;
  Vec6<Real> dphi;
  for (int l = 0; l < 6; ++l) {
    Vec6<Real> fwd = xr;
    Vec6<Real> bwd = xr;
    fwd[l] += h;
    bwd[l] -= h;
    dg[l] = (space.metric<Real>(fwd) - space.metric<Real>(bwd)) / (2 * h);
    da[l] = (space.aform<Real>(fwd) - space.aform<Real>(bwd)) / (2 * h);
    dphi[l] = (space.phi<Real>(fwd) - space.phi<Real>(bwd)) / (2 * h);
  }
  const M ginv = g.inverse();

  // Plain index loops, kept apart from christoffel()/cov_deriv().
  Real gam[6][6][6];
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        Real s = 0;
        for (int l = 0; l < 6; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gam[k][i][j] = s / 2;
      }
  ResidualA out;
  out.r = zero_rank3<double>();
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        Real s = da[k](i, j) - g(i, k) * dphi[j] - g(j, k) * dphi[i];
        for (int l = 0; l < 6; ++l) s -= gam[l][k][i] * a(l, j) + gam[l][k][j] * a(i, l);
        const double v = static_cast<double>(s);
        out.r[k](i, j) = v;
        if (j >= i && std::fabs(v) > out.max_abs) {
          out.max_abs = std::fabs(v);
          out.worst = {i + 1, j + 1, k + 1};
        }
      }
  return out;
}

template ResidualA residual_a_fd<double>(const HSpace&, const Point6&, double);
template ResidualA residual_a_fd<long double>(const HSpace&, const Point6&, double);

EisenhartReport verify(const HSpace& space, const VerifyOptions& options) {
  if (options.n_points < 1) throw std::invalid_argument("verify: n_points must be at least 1");
  const Box box = options.box.value_or(default_box(space));
  Sampler sampler(options.seed);
  const std::vector<Point6> points = sample_admissible(space, box, sampler, options.n_points);

  EisenhartReport report;
  report.family = space.family();
  report.reading = space.config().reading;
  report.seed = options.seed;
  report.points = options.n_points;
  report.tol = options.tol;

  report.worst_point = points.front();
  std::map<std::tuple<int, int, int>, double> per_component;
  for (const Point6& x : points) {
    const ResidualA r = residual_a(space, x);
    if (r.max_abs > report.max_residual_a) {
      report.max_residual_a = r.max_abs;
      report.worst_point = x;
      report.worst_component = r.worst;
    }
    for (int k = 0; k < 6; ++k)
      for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
          const double v = std::fabs(r.r[k](i, j));
          if (v <= options.tol) continue;
          double& slot = per_component[{i + 1, j + 1, k + 1}];
          slot = std::max(slot, v);
        }
    report.max_residual_h_uniform = std::max(report.max_residual_h_uniform, residual_h(space, x, Convention::kUniform));
    report.max_residual_h_consistent =
        std::max(report.max_residual_h_consistent, residual_h(space, x, Convention::kConsistent));
  }
  for (const auto& [idx, value] : per_component)
    report.failing_components.push_back({{std::get<0>(idx), std::get<1>(idx), std::get<2>(idx)}, value});
  std::stable_sort(report.failing_components.begin(), report.failing_components.end(),
                   [](const ComponentResidual& l, const ComponentResidual& r) { return l.value > r.value; });
  report.pass = report.max_residual_a <= options.tol;

  if (!report.pass && report.reading == Reading::kPrinted && report.family != Family::k321) {
    HSpaceConfig cfg = space.config();
    cfg.reading = Reading::kAmended;
    const HSpace other = HSpace::build(cfg);
    VerifyOptions opts = options;
    opts.box = box;
    const EisenhartReport alt = verify(other, opts);
    report.alternate = AlternateReading{alt.reading, alt.max_residual_a, alt.max_residual_h_consistent, alt.pass};
  }
  return report;
}

}  // namespace hspace
