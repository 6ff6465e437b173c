#pragma once

#include "hspace/run_config.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hspace {

enum class Format { kJson, kText };

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // verification or conservation failed
inline constexpr int kExitUsage = 2;    // bad config, flags or point

/// Reports go to out, diagnostics and warnings to err. Every command is
/// deterministic for a given config.

int cmd_verify(const RunConfig& config, int n_points, Format format, std::ostream& out, std::ostream& err);

/// Without a point, classifies at the first admissible point drawn from the
/// config's seed.
int cmd_classify(const RunConfig& config, const std::optional<Point6>& point, Format format, std::ostream& out,
                 std::ostream& err);

/// Without x0/v0, uses the first state of sample_initial_states() for the
/// config's seed. Exit 1 on a chart exit or a drift above tol_drift.
int cmd_geodesic(const RunConfig& config, const std::optional<Point6>& x0, const std::optional<Vec6<double>>& v0,
                 const std::optional<std::string>& dump_path, Format format, std::ostream& out, std::ostream& err);

/// RK4 studies fail (exit 1) when the slope is measured and outside [3.5, 4.5].
int cmd_order(const RunConfig& config, const std::optional<Point6>& x0, const std::optional<Vec6<double>>& v0,
              const std::vector<double>& dts, Format format, std::ostream& out, std::ostream& err);

/// "1,2,3,4,5,6" -> vector; throws std::invalid_argument.
Vec6<double> parse_vec6(const std::string& text);

}  // namespace hspace
