#include "hspace/cli.hpp"

#include "hspace/eisenhart.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

namespace hspace {

namespace {

using Json = nlohmann::ordered_json;

Json to_json(const Vec6<double>& v) {
  Json a = Json::array();
  for (int i = 0; i < 6; ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Index3& idx) { return Json{{"i", idx.i}, {"j", idx.j}, {"k", idx.k}}; }

bool is_scalar_array(const Json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [key, value] : j.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, rows);
  } else if (j.is_array() && !is_scalar_array(j)) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

void emit(const Json& report, Format format, std::ostream& out) {
  if (format == Format::kJson) {
    out << report.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& [key, value] : rows) out << key << std::string(width - key.size() + 2, ' ') << value << "\n";
}

/// Runs body and maps exceptions onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InadmissiblePoint& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SamplingError& e) {
    err << "sampling error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

GeodesicState initial_state(const RunConfig& config, const HSpace& space, const std::optional<Point6>& x0,
                            const std::optional<Vec6<double>>& v0) {
  GeodesicState s;
  if (x0 && v0) {
    s.x = *x0;
    s.v = *v0;
  } else {
    Sampler sampler(config.seed);
    s = sample_initial_states(space, sampling_box(config, space), sampler, 1).front();
    if (x0) s.x = *x0;
    if (v0) s.v = *v0;
  }
  if (!admissible(space, s.x).ok) throw InadmissiblePoint("initial point is not admissible");
  if (!s.v.allFinite()) throw std::invalid_argument("initial velocity must be finite");
  return s;
}

}  // namespace

Vec6<double> parse_vec6(const std::string& text) {
  const std::string message = "expected 6 comma-separated reals, got '" + text + "'";
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    fields.push_back(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (fields.size() != 6) throw std::invalid_argument(message);
  Vec6<double> v;
  for (int i = 0; i < 6; ++i) {
    const std::string& f = fields[i];
    const std::size_t a = f.find_first_not_of(' ');
    const std::size_t b = f.find_last_not_of(' ');
    if (a == std::string::npos) throw std::invalid_argument(message);
    const char* first = f.data() + a;
    const char* last = f.data() + b + 1;
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v[i]);
    if (ec != std::errc() || ptr != last || !std::isfinite(v[i])) throw std::invalid_argument(message);
  }
  return v;
}

int cmd_verify(const RunConfig& config, int n_points, Format format, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (n_points < 1) throw std::invalid_argument("--points must be at least 1");
    const HSpace space = HSpace::build(config.space);
    VerifyOptions opts;
    opts.seed = config.seed;
    opts.n_points = n_points;
    opts.tol = config.tol_residual;
    opts.box = sampling_box(config, space);
    const EisenhartReport r = verify(space, opts);

    Json report;
    report["command"] = "verify";
    report["family"] = segre_label(r.family);
    report["reading"] = to_string(r.reading);
    report["seed"] = r.seed;
    report["points"] = r.points;
    report["tol"] = r.tol;
    report["max_residual_a"] = r.max_residual_a;
    report["max_residual_h"] = {{"uniform", r.max_residual_h_uniform}, {"consistent", r.max_residual_h_consistent}};
    report["worst_point"] = to_json(r.worst_point);
    report["worst_component"] = to_json(r.worst_component);
    Json failing = Json::array();
    for (const auto& c : r.failing_components) {
      Json e = to_json(c.index);
      e["max"] = c.value;
      failing.push_back(e);
    }
    report["failing_components"] = failing;
    if (r.alternate) {
      report["alternate"] = {{"reading", to_string(r.alternate->reading)},
                             {"max_residual_a", r.alternate->max_residual_a},
                             {"max_residual_h_consistent", r.alternate->max_residual_h_consistent},
                             {"pass", r.alternate->pass}};
    }
    report["pass"] = r.pass;
    emit(report, format, out);
    return r.pass ? kExitOk : kExitFailure;
  });
}

int cmd_classify(const RunConfig& config, const std::optional<Point6>& point, Format format, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const HSpace space = HSpace::build(config.space);
    Point6 x;
    if (point) {
      x = *point;
      if (!admissible(space, x).ok) throw InadmissiblePoint("point is not admissible (singular locus or domain error)");
    } else {
      Sampler sampler(config.seed);
      x = sample_admissible(space, sampling_box(config, space), sampler, 1).front();
    }
    const Classification c = classify(space, x, config.segre);
    const Signature sig = signature(space.metric<double>(x));

    Json report;
    report["command"] = "classify";
    report["family"] = segre_label(config.space.family);
    report["point"] = to_json(x);
    report["segre"] = render(c.segre);
    report["matches_family"] = render(c.segre) == segre_label(config.space.family);
    Json roots = Json::array();
    for (std::size_t i = 0; i < c.roots.size(); ++i) {
      roots.push_back({{"value", c.roots[i].value},
                       {"multiplicity", c.roots[i].multiplicity},
                       {"ranks", c.profiles[i].ranks},
                       {"blocks", c.profiles[i].sizes}});
    }
    report["roots"] = roots;
    report["signature"] = {{"positive", sig.positive}, {"negative", sig.negative}};
    emit(report, format, out);
    return kExitOk;
  });
}

int cmd_geodesic(const RunConfig& config, const std::optional<Point6>& x0, const std::optional<Vec6<double>>& v0,
                 const std::optional<std::string>& dump_path, Format format, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const HSpace space = HSpace::build(config.space);
    const GeodesicState s0 = initial_state(config, space, x0, v0);

    Json warnings = Json::array();
    if (s0.v.isZero(0.0)) {
      warnings.push_back("v0 = 0: degenerate rest trajectory");
      err << "warning: v0 = 0: degenerate rest trajectory\n";
    }

    Json report;
    report["command"] = "geodesic";
    report["family"] = segre_label(config.space.family);
    report["method"] = to_string(config.integration.method);
    report["dt"] = config.integration.dt;
    report["steps"] = config.integration.n_steps;
    report["x0"] = to_json(s0.x);
    report["v0"] = to_json(s0.v);
    report["note"] =
        "I uses the family's h and phi as given; its constant-term offset from a + 2 phi g adds a multiple of E, "
        "which is conserved separately";

    Trajectory traj;
    try {
      traj = integrate(space, s0, config.integration);
    } catch (const StepUnderflow& e) {
      report["error"] = e.what();
      report["pass"] = false;
      emit(report, format, out);
      err << "error: " << e.what() << "\n";
      return kExitFailure;
    }
    if (dump_path) {
      std::ofstream csv(*dump_path);
      if (!csv) throw std::invalid_argument("cannot write '" + *dump_path + "'");
      write_csv(traj, csv);
    }
    const Drift d = drift_report(traj);
    report["samples"] = traj.samples.size();
    report["t_end"] = traj.last_t();
    report["chart_exit"] = traj.chart_exit;
    report["E0"] = traj.samples.front().E;
    report["I0"] = traj.samples.front().I;
    report["rel_drift_E"] = d.E;
    report["rel_drift_I"] = d.I;
    report["tol_drift"] = config.tol_drift;
    if (traj.chart_exit)
      warnings.push_back("left the chart; last admissible t = " + Json(traj.last_t()).dump());
    report["warnings"] = warnings;
    const bool pass = !traj.chart_exit && d.E <= config.tol_drift && d.I <= config.tol_drift;
    report["pass"] = pass;
    emit(report, format, out);
    return pass ? kExitOk : kExitFailure;
  });
}

int cmd_order(const RunConfig& config, const std::optional<Point6>& x0, const std::optional<Vec6<double>>& v0,
              const std::vector<double>& dts, Format format, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (dts.size() < 3) throw std::invalid_argument("order study needs at least three step sizes");
    const HSpace space = HSpace::build(config.space);
    const GeodesicState s0 = initial_state(config, space, x0, v0);
    const double total_time = config.integration.dt * config.integration.n_steps;
    const OrderStudy study = order_study(space, s0, dts, total_time, config.integration.method);

    Json report;
    report["command"] = "order";
    report["family"] = segre_label(config.space.family);
    report["method"] = to_string(config.integration.method);
    report["total_time"] = total_time;
    report["x0"] = to_json(s0.x);
    report["v0"] = to_json(s0.v);
    report["dts"] = study.dts;
    report["drifts_I"] = study.drifts;
    report["drift_floor"] = kDriftFloor;
    report["points_used"] = study.points_used;
    report["floor_limited"] = study.floor_limited;
    if (study.floor_limited)
      report["slope"] = "floor-limited";
    else
      report["slope"] = study.slope;
    bool pass = true;
    if (config.integration.method == Method::kRK4 && !study.floor_limited)
      pass = study.slope >= 3.5 && study.slope <= 4.5;
    report["pass"] = pass;
    emit(report, format, out);
    return pass ? kExitOk : kExitFailure;
  });
}

}  // namespace hspace
