#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "paraxial/core.hpp"
#include "paraxial/field.hpp"
#include "paraxial/solver.hpp"

namespace paraxial {

enum class Workflow { propagate, predict, compare, sweep, analyze_tof };

std::string_view to_string(Workflow w) noexcept;
std::optional<Workflow> parse_workflow(std::string_view name) noexcept;

using Medium = std::variant<ParaxialParams, OpticalBeamSpec, AtomicBeamSpec>;

struct RunSection {
  double u_span = 0.0;
  std::optional<Workflow> workflow;
  std::vector<double> snapshots;
  /// Step of the analytic integrators (moment ODE, matrix ODE).
  double ode_step = 1e-3;
  bool operator==(const RunSection&) const = default;
};

struct ChecksSection {
  double w2_rel_tol = 1e-2;
  double mi4_rel_tol = 1e-3;
  bool operator==(const ChecksSection&) const = default;
};

struct SweepSection {
  /// "<section>.<key>" of a numeric entry, e.g. "raw.gamma" or "atomic.n1d".
  std::string parameter;
  std::vector<double> values;
  Workflow workflow = Workflow::compare;
  bool operator==(const SweepSection&) const = default;
};

struct TofSection {
  std::vector<double> tau;
  std::vector<double> w2;
  bool operator==(const TofSection&) const = default;
};

/// A fully resolved run description: every default has been filled in, so
/// echo_config(cfg) re-parses to an equal value.
struct RunConfig {
  std::optional<GaussianBeam> gaussian;
  std::optional<std::filesystem::path> field_file;
  Medium medium;
  GridSpec grid;
  RunSection run;
  ChecksSection checks;
  std::optional<SweepSection> sweep;
  std::optional<TofSection> tof;

  bool operator==(const RunConfig&) const = default;
};

/// INI-style file: [section] headers, key = value lines, ';' or '#' comments.
/// Unknown sections or keys are a config error listing all of them.
/// Overrides replace (or add) "<section>.<key>" entries before defaults are
/// resolved; the sweep workflow uses them to vary one parameter.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

RunConfig parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = ".",
                            const ConfigOverrides& overrides = {});

std::string echo_config(const RunConfig& cfg);

ParaxialParams resolve_params(const RunConfig& cfg);
TransverseField initial_field(const RunConfig& cfg);

}  // namespace paraxial
