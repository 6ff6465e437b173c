#include "hspace/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hspace {

namespace {

struct Slot {
  const char* name;
  std::uint8_t allowed;  // bit i-1 for xi
};

constexpr std::uint8_t bits(std::initializer_list<int> coords) {
  std::uint8_t m = 0;
  for (int c : coords) m |= static_cast<std::uint8_t>(1u << (c - 1));
  return m;
}

std::vector<Slot> slots_for(Family f) {
  switch (f) {
    case Family::k3_21:
      return {{"theta", bits({3})}, {"omega", bits({5, 6})}};
    case Family::k32_1:
      return {{"f6", bits({6})}, {"omega", bits({3, 5})}};
    case Family::k321:
      break;
  }
  return {{"theta", bits({3, 5, 6})}, {"omega", bits({3, 5, 6})}};
}

std::string describe_mask(std::uint8_t m) {
  std::string out;
  for (int i = 1; i <= 6; ++i) {
    if (!((m >> (i - 1)) & 1u)) continue;
    if (!out.empty()) out += ",";
    out += "x" + std::to_string(i);
  }
  return out.empty() ? "none" : out;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::k3_21:
      return "3(21)";
    case Family::k32_1:
      return "(32)1";
    case Family::k321:
      break;
  }
  return "(321)";
}

std::string segre_label(Family f) { return "[" + to_string(f) + "]"; }

std::optional<Family> family_from_string(const std::string& s) {
  std::string t = s;
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
  for (Family f : {Family::k3_21, Family::k32_1, Family::k321})
    if (to_string(f) == t) return f;
  return std::nullopt;
}

std::string to_string(Reading r) { return r == Reading::kPrinted ? "printed" : "amended"; }

std::optional<Reading> reading_from_string(const std::string& s) {
  if (s == "printed") return Reading::kPrinted;
  if (s == "amended") return Reading::kAmended;
  return std::nullopt;
}

HSpace HSpace::build(const HSpaceConfig& config) {
  const Signs& e = config.signs;
  for (int v : {e.e3, e.e4, e.e5, e.e6})
    if (v != 1 && v != -1) throw ConfigError("sign entries must be +1 or -1");
  if (e.e4 != e.e5) throw ConfigError("invalid sign pattern: e4 must equal e5");
  if (config.epsilon != 0 && config.epsilon != 1) throw ConfigError("epsilon must be 0 or 1");
  if (!std::isfinite(config.lambda) || !std::isfinite(config.c)) throw ConfigError("lambda and c must be finite");

  const auto slots = slots_for(config.family);
  for (const auto& [name, source] : config.functions) {
    const bool known = std::any_of(slots.begin(), slots.end(), [&](const Slot& s) { return name == s.name; });
    if (!known) throw ConfigError("unknown function slot '" + name + "' for family " + segre_label(config.family));
  }

  HSpace space;
  space.config_ = config;
  for (const Slot& slot : slots) {
    auto it = config.functions.find(slot.name);
    ScalarField f;
    if (it != config.functions.end()) {
      try {
        f = parse(it->second);
      } catch (const ParseError& err) {
        throw ConfigError("slot '" + std::string(slot.name) + "': " + err.what());
      }
    }
    const std::uint8_t forbidden = f.coordinate_mask() & static_cast<std::uint8_t>(~slot.allowed);
    if (forbidden != 0)
      throw ConfigError("slot '" + std::string(slot.name) + "' may depend on " + describe_mask(slot.allowed) +
                        " only, but references " + describe_mask(forbidden));
    const std::string name = slot.name;
    if (name == "theta")
      space.theta_ = f;
    else if (name == "omega")
      space.omega_ = f;
    else
      space.f6_ = f;
  }
  return space;
}

Admissibility admissible(const HSpace& space, const Point6& x) {
  if (!x.allFinite()) return {false, 0.0};
  const HSpaceConfig& cfg = space.config();
  double margin = std::numeric_limits<double>::infinity();
  bool ok = true;
  unsigned chart = 0;
  unsigned bit = 1;
  auto guard = [&](double quantity, double delta) {
    if (quantity < 0.0) chart |= bit;
    bit <<= 1;
    const double q = std::fabs(quantity);
    if (!(q >= delta)) ok = false;
    margin = std::min(margin, std::isnan(q) ? 0.0 : q);
  };
  try {
    switch (cfg.family) {
      case Family::k3_21: {
        const double f3 = cfg.epsilon * x[2];
        guard(cfg.epsilon * x[1] + eval(space.theta(), x), kGuardDelta);
        guard(f3 - cfg.lambda, kGuardDelta);
        break;
      }
      case Family::k32_1:
        guard(eval(space.f6(), x) - cfg.lambda, kGuardDelta);
        break;
      case Family::k321:
        break;
    }
    if (!ok) return {false, margin, chart};
    const Sym6 g = space.metric<double>(x);
    if (!g.allFinite()) return {false, 0.0};
    guard(g.determinant(), kDetDelta);
    // aform/hform can touch functions the metric does not (f6 in a66).
    if (!space.hform<double>(x).allFinite()) return {false, 0.0};
  } catch (const DomainError&) {
    return {false, 0.0};
  }
  return {ok, margin, chart};
}

void require_admissible(const HSpace& space, const Point6& x) {
  if (!admissible(space, x).ok) {
    std::string s = "inadmissible point (";
    for (int i = 0; i < 6; ++i) s += (i ? ", " : "") + std::to_string(x[i]);
    throw InadmissiblePoint(s + ")");
  }
}

Sym6 metric(const HSpace& space, const Point6& x) {
  require_admissible(space, x);
  return space.metric<double>(x);
}

Sym6 aform(const HSpace& space, const Point6& x) {
  require_admissible(space, x);
  return space.aform<double>(x);
}

Sym6 hform(const HSpace& space, const Point6& x) {
  require_admissible(space, x);
  return space.hform<double>(x);
}

PhiValue phi(const HSpace& space, const Point6& x) {
  require_admissible(space, x);
  const Dual6 p = space.phi<Dual6>(seed_dual(x));
  return {p.value(), p.derivatives()};
}

Box default_box(const HSpace& space) {
  Box box;
  const HSpaceConfig& cfg = space.config();
  if (cfg.family == Family::k3_21 && cfg.epsilon == 1) {
    box.lo[2] = cfg.lambda + 0.5;
    box.hi[2] = cfg.lambda + 2.5;
  }
  return box;
}

std::vector<Point6> sample_admissible(const HSpace& space, const Box& box, Sampler& sampler, int n) {
  std::vector<Point6> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  const long budget = 100L * n;
  for (long attempt = 0; attempt < budget && static_cast<int>(out.size()) < n; ++attempt) {
    Point6 p = sampler.point(box);
    if (admissible(space, p).ok) out.push_back(p);
  }
  if (static_cast<int>(out.size()) < n)
    throw SamplingError("found only " + std::to_string(out.size()) + " admissible points of " + std::to_string(n) +
                        " requested in " + std::to_string(budget) + " attempts");
  return out;
}

}  // namespace hspace
