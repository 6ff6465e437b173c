#include "hspace/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

struct Common {
  std::string config_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> dt;
  std::optional<int> steps;
  std::optional<std::string> method;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON run configuration")->required();
  cmd->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--seed", c.seed, "Sampling seed (overrides the config)");
}

void add_integration(CLI::App* cmd, Common& c) {
  cmd->add_option("--dt", c.dt, "Step size");
  cmd->add_option("--steps", c.steps, "Number of steps");
  cmd->add_option("--method", c.method, "Integrator")->check(CLI::IsMember({"rk4", "rk45"}));
}

std::optional<hspace::Vec6<double>> vec_option(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return hspace::parse_vec6(text);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad step size '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eisenhart h-space verification, classification and geodesic tools"};
  app.require_subcommand(1);

  Common common;
  int points = 100;
  std::string point, x0, v0, dump;
  std::string dts = "0.1,0.05,0.025,0.0125";

  auto* verify = app.add_subcommand("verify", "Check the Eisenhart identity at seeded random points");
  add_common(verify, common);
  verify->add_option("--points", points, "Number of sample points");
  verify->add_option("--tol", common.tol, "Residual tolerance (overrides the config)");

  auto* classify = app.add_subcommand("classify", "Segre characteristic of the (h, g) pencil at a point");
  add_common(classify, common);
  classify->add_option("--point", point, "6 comma-separated coordinates");

  auto* geodesic = app.add_subcommand("geodesic", "Integrate a geodesic and report first-integral drift");
  add_common(geodesic, common);
  add_integration(geodesic, common);
  geodesic->add_option("--x0", x0, "Initial point, 6 comma-separated reals");
  geodesic->add_option("--v0", v0, "Initial velocity, 6 comma-separated reals");
  geodesic->add_option("--dump", dump, "Write the trajectory as CSV");

  auto* order = app.add_subcommand("order", "Observed order of the first-integral drift");
  add_common(order, common);
  add_integration(order, common);
  order->add_option("--x0", x0, "Initial point, 6 comma-separated reals");
  order->add_option("--v0", v0, "Initial velocity, 6 comma-separated reals");
  order->add_option("--dts", dts, "Comma-separated step sizes (at least 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hspace::kExitUsage;
  }

  hspace::RunConfig config;
  std::optional<hspace::Vec6<double>> px, vx, vv;
  std::vector<double> steps;
  try {
    config = hspace::load_run_config(common.config_path);
    if (common.seed) config.seed = *common.seed;
    if (common.tol) config.tol_residual = *common.tol;
    if (common.dt) config.integration.dt = *common.dt;
    if (common.steps) config.integration.n_steps = *common.steps;
    if (common.method) config.integration.method = *common.method == "rk4" ? hspace::Method::kRK4 : hspace::Method::kRK45;
    hspace::validate(config);
    px = vec_option(point);
    vx = vec_option(x0);
    vv = vec_option(v0);
    if (order->parsed()) steps = parse_list(dts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hspace::kExitUsage;
  }

  const auto format = common.format == "text" ? hspace::Format::kText : hspace::Format::kJson;
  if (verify->parsed()) return hspace::cmd_verify(config, points, format, std::cout, std::cerr);
  if (classify->parsed()) return hspace::cmd_classify(config, px, format, std::cout, std::cerr);
  if (geodesic->parsed()) {
    const std::optional<std::string> dump_path = dump.empty() ? std::nullopt : std::optional<std::string>(dump);
    return hspace::cmd_geodesic(config, vx, vv, dump_path, format, std::cout, std::cerr);
  }
  return hspace::cmd_order(config, vx, vv, steps, format, std::cout, std::cerr);
}
