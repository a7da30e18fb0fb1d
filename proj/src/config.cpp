#include "paraxial/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "paraxial/error.hpp"
#include "paraxial/format.hpp"
#include "paraxial/io.hpp"
#include "paraxial/moments.hpp"

namespace paraxial {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"beam", {"sigma", "x0", "y0", "px", "py", "curvature_radius", "field_file"}},
      {"raw", {"k", "epsilon", "gamma", "alpha"}},
      {"optical", {"epsilon_r0", "omega", "c", "chi3", "beta"}},
      {"atomic", {"mass", "hbar", "n1d", "a_s", "omega_perp", "flux", "energy"}},
      {"grid", {"n", "extent", "du", "record_stride"}},
      {"run", {"u_span", "workflow", "snapshots", "ode_step"}},
      {"checks", {"w2_rel_tol", "mi4_rel_tol"}},
      {"sweep", {"parameter", "values", "workflow"}},
      {"tof", {"tau", "w2"}},
  };
  return keys;
}

// Typed access to one section with section/key diagnostics.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }
  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string text(const std::string& key) const {
    auto s = tree_->get<std::string>(key);
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }

  double number(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(text(key), v)) bad(key, "expected a number");
    return v;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::optional<double> optional_number(const std::string& key) const {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }
  double required(const std::string& key) const {
    if (!has(key)) bad(key, "missing required key");
    return number(key);
  }
  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) bad(key, "expected an integer");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& key) const {
    if (!has(key)) return {};
    std::string s = text(key);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
      double v = 0.0;
      if (!parse_double(token, v)) bad(key, "bad list entry '" + token + "'");
      out.push_back(v);
    }
    return out;
  }
  Profile profile(const std::string& key, const Profile& fallback) const {
    if (!has(key)) return fallback;
    try {
      return Profile::parse(text(key));
    } catch (const Error& e) {
      bad(key, e.what());
    }
  }

  [[noreturn]] void bad(const std::string& key, const std::string& why) const {
    fail(ErrorKind::config, "[" + name_ + "] " + key + ": " + why);
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
};

Section section(const pt::ptree& root, const std::string& name) {
  auto it = root.find(name);
  return Section(name, it == root.not_found() ? nullptr : &it->second);
}

std::string strip_hash_comments(std::string_view text) {
  std::string out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') continue;
    // Trailing comments need whitespace before the '#'.
    for (std::size_t i = 1; i < line.size(); ++i) {
      if (line[i] == '#' && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<std::string> section_headers(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t");
    auto e = line.find_last_not_of(" \t\r");
    if (b == std::string::npos || line[b] != '[' || line[e] != ']') continue;
    out.push_back(line.substr(b + 1, e - b - 1));
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += format_double(xs[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_spec: return "invalid_spec";
    case ErrorKind::turning_point: return "turning_point";
    case ErrorKind::wkb_invalid: return "wkb_invalid";
    case ErrorKind::division_by_zero: return "division_by_zero";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::degenerate_beam: return "degenerate_beam";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::not_attractive: return "not_attractive";
    case ErrorKind::singular_propagation: return "singular_propagation";
    case ErrorKind::collapse_regime: return "collapse_regime";
    case ErrorKind::thin_element: return "thin_element";
    case ErrorKind::grid_too_coarse: return "grid_too_coarse";
    case ErrorKind::grid_too_small: return "grid_too_small";
    case ErrorKind::domain_overflow: return "domain_overflow";
    case ErrorKind::instability: return "instability";
    case ErrorKind::config: return "config";
    case ErrorKind::invariant_violation: return "invariant_violation";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

std::string_view to_string(Workflow w) noexcept {
  switch (w) {
    case Workflow::propagate: return "propagate";
    case Workflow::predict: return "predict";
    case Workflow::compare: return "compare";
    case Workflow::sweep: return "sweep";
    case Workflow::analyze_tof: return "analyze-tof";
  }
  return "unknown";
}

std::optional<Workflow> parse_workflow(std::string_view name) noexcept {
  for (Workflow w : {Workflow::propagate, Workflow::predict, Workflow::compare, Workflow::sweep,
                     Workflow::analyze_tof}) {
    if (to_string(w) == name) return w;
  }
  return std::nullopt;
}

ParaxialParams resolve_params(const RunConfig& cfg) {
  return std::visit(
      [](const auto& medium) -> ParaxialParams {
        using T = std::decay_t<decltype(medium)>;
        if constexpr (std::is_same_v<T, ParaxialParams>) {
          medium.validate();
          return medium;
        } else if constexpr (std::is_same_v<T, OpticalBeamSpec>) {
          return map_optical(medium);
        } else {
          return map_atomic(medium);
        }
      },
      cfg.medium);
}

TransverseField initial_field(const RunConfig& cfg) {
  if (cfg.gaussian) {
    const ParaxialParams params = resolve_params(cfg);
    return make_gaussian(*cfg.gaussian, cfg.grid, params.k, params.epsilon);
  }
  require(cfg.field_file.has_value(), ErrorKind::config, "[beam] needs sigma or field_file");
  auto loaded = read_field_binary(*cfg.field_file);
  const double norm = loaded.field.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    fail(ErrorKind::normalization, "field file " + cfg.field_file->string() + " is not normalized");
  }
  return std::move(loaded.field);
}

RunConfig parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  return parse_config_text(read_text_file(path), path.parent_path().empty() ? "." : path.parent_path(),
                           overrides);
}

RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                            const ConfigOverrides& overrides) {
  pt::ptree root;
  const std::string stripped = strip_hash_comments(text);
  try {
    std::istringstream in(stripped);
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::config, std::string("malformed config: ") + e.what());
  }
  // The INI reader drops sections without keys; an empty [raw] still selects a medium.
  for (const auto& name : section_headers(stripped)) {
    if (root.find(name) == root.not_found()) root.push_back({name, pt::ptree()});
  }
  for (const auto& [key, value] : overrides) {
    auto dot = key.find('.');
    if (dot == std::string::npos) fail(ErrorKind::config, "override '" + key + "' is not <section>.<key>");
    root.put(pt::ptree::path_type(key, '.'), value);
  }

  std::vector<std::string> unknown;
  for (const auto& [name, tree] : root) {
    auto it = schema().find(name);
    if (it == schema().end()) {
      unknown.push_back("[" + name + "]");
      continue;
    }
    if (!tree.data().empty()) unknown.push_back(name + " (top-level key)");
    for (const auto& [key, _] : tree) {
      if (!it->second.count(key)) unknown.push_back(name + "." + key);
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    fail(ErrorKind::config, "unknown config entries: " + list);
  }

  RunConfig cfg;

  const Section raw = section(root, "raw"), optical = section(root, "optical"), atomic = section(root, "atomic");
  const int media = int(raw.present()) + int(optical.present()) + int(atomic.present());
  if (media != 1) {
    fail(ErrorKind::config, "exactly one of [raw], [optical], [atomic] must be present (found " +
                                std::to_string(media) + ")");
  }
  if (raw.present()) {
    ParaxialParams p;
    p.k = raw.number("k", 1.0);
    const int eps = raw.integer("epsilon", 1);
    if (eps != 1 && eps != -1) raw.bad("epsilon", "must be +1 or -1");
    p.epsilon = eps;
    p.gamma = raw.number("gamma", 0.0);
    p.alpha = raw.profile("alpha", Profile::constant(0.0));
    p.axis = eps < 0 ? AxisLabel::z_axis : AxisLabel::tau_axis;
    if (!(p.k > 0.0)) raw.bad("k", "must be positive");
    cfg.medium = p;
  } else if (optical.present()) {
    OpticalBeamSpec o;
    o.epsilon_r0 = optical.number("epsilon_r0", 1.0);
    o.omega = optical.required("omega");
    o.c = optical.number("c", constants::speed_of_light);
    o.chi3 = optical.number("chi3", 0.0);
    o.beta = optical.profile("beta", Profile::constant(0.0));
    if (!(o.epsilon_r0 > 0.0)) optical.bad("epsilon_r0", "must be positive");
    if (!(o.omega > 0.0)) optical.bad("omega", "must be positive");
    cfg.medium = o;
  } else {
    AtomicBeamSpec a;
    a.mass = atomic.required("mass");
    a.hbar = atomic.number("hbar", constants::hbar);
    a.n1d = atomic.number("n1d", 0.0);
    a.a_s = atomic.number("a_s", 0.0);
    a.omega_perp = atomic.profile("omega_perp", Profile::constant(0.0));
    a.flux = atomic.optional_number("flux");
    a.energy = atomic.optional_number("energy");
    if (!(a.mass > 0.0)) atomic.bad("mass", "must be positive");
    if (!(a.hbar > 0.0)) atomic.bad("hbar", "must be positive");
    if (!(a.n1d >= 0.0)) atomic.bad("n1d", "must be non-negative");
    cfg.medium = a;
  }
  const ParaxialParams params = resolve_params(cfg);

  const Section beam = section(root, "beam");
  if (!beam.present()) fail(ErrorKind::config, "missing [beam] section");
  const Section grid = section(root, "grid");
  if (beam.has("sigma") == beam.has("field_file")) {
    beam.bad(beam.has("sigma") ? "field_file" : "sigma", "give exactly one of sigma and field_file");
  }
  if (beam.has("sigma")) {
    GaussianBeam g;
    g.sigma = beam.number("sigma");
    g.centroid = {beam.number("x0", 0.0), beam.number("y0", 0.0)};
    g.tilt = {beam.number("px", 0.0), beam.number("py", 0.0)};
    g.curvature_radius = beam.number("curvature_radius", std::numeric_limits<double>::infinity());
    if (!(g.sigma > 0.0)) beam.bad("sigma", "must be positive");
    if (g.curvature_radius == 0.0) beam.bad("curvature_radius", "must be non-zero (inf for a flat phase)");
    cfg.gaussian = g;
    cfg.grid.n = grid.integer("n", 256);
    cfg.grid.extent = grid.number("extent", 16.0 * g.sigma);
  } else {
    std::filesystem::path file = beam.text("field_file");
    if (file.is_relative()) file = base_dir / file;
    file = std::filesystem::absolute(file).lexically_normal();
    if (!std::filesystem::exists(file)) beam.bad("field_file", "file not found: " + file.string());
    for (const char* key : {"x0", "y0", "px", "py", "curvature_radius"}) {
      if (beam.has(key)) beam.bad(key, "only valid with a Gaussian beam");
    }
    cfg.field_file = file;
    const auto loaded = read_field_binary(file);
    cfg.grid.n = grid.integer("n", loaded.field.size());
    cfg.grid.extent = grid.number("extent", loaded.field.extent());
    if (cfg.grid.n != loaded.field.size() || cfg.grid.extent != loaded.field.extent()) {
      grid.bad("n", "does not match the field file grid");
    }
  }
  if (!is_power_of_two(cfg.grid.n) || cfg.grid.n < 64) grid.bad("n", "must be a power of two >= 64");
  if (!(cfg.grid.extent > 0.0)) grid.bad("extent", "must be positive");

  const TransverseField field = initial_field(cfg);
  const MomentSet m0 = compute_moments(field, params, 0.0);

  const Section run = section(root, "run");
  if (run.has("u_span")) {
    cfg.run.u_span = run.number("u_span");
  } else if (params.alpha(0.0) > 0.0) {
    cfg.run.u_span = 2.0 * std::numbers::pi / params.alpha(0.0);
  } else {
    cfg.run.u_span = 3.0 * params.k * std::sqrt(m0.r2 / m0.K);
  }
  if (!(cfg.run.u_span > 0.0) || !std::isfinite(cfg.run.u_span)) run.bad("u_span", "must be positive");
  params.validate_on(0.0, cfg.run.u_span);
  if (run.has("workflow")) {
    auto w = parse_workflow(run.text("workflow"));
    if (!w) run.bad("workflow", "unknown workflow '" + run.text("workflow") + "'");
    cfg.run.workflow = w;
  }
  cfg.run.snapshots = run.list("snapshots");
  for (double u : cfg.run.snapshots) {
    if (u < 0.0 || u > cfg.run.u_span) run.bad("snapshots", "entries must lie in [0, u_span]");
  }

  cfg.grid.du = grid.has("du") ? grid.number("du") : suggest_step(field, params, cfg.run.u_span);
  if (!(cfg.grid.du > 0.0)) grid.bad("du", "must be positive");
  const double steps = std::ceil(cfg.run.u_span / cfg.grid.du - 1e-9);
  cfg.grid.record_stride = grid.integer("record_stride", std::max(1, static_cast<int>(steps / 200.0)));
  if (cfg.grid.record_stride < 1) grid.bad("record_stride", "must be >= 1");
  cfg.run.ode_step = run.number("ode_step", cfg.grid.du);
  if (!(cfg.run.ode_step > 0.0)) run.bad("ode_step", "must be positive");

  const Section checks = section(root, "checks");
  cfg.checks.w2_rel_tol = checks.number("w2_rel_tol", cfg.checks.w2_rel_tol);
  cfg.checks.mi4_rel_tol = checks.number("mi4_rel_tol", cfg.checks.mi4_rel_tol);

  const Section sweep = section(root, "sweep");
  if (sweep.present()) {
    SweepSection s;
    if (!sweep.has("parameter")) sweep.bad("parameter", "missing required key");
    s.parameter = sweep.text("parameter");
    auto dot = s.parameter.find('.');
    if (dot == std::string::npos) sweep.bad("parameter", "expected <section>.<key>");
    auto sec = schema().find(s.parameter.substr(0, dot));
    if (sec == schema().end() || !sec->second.count(s.parameter.substr(dot + 1)) ||
        sec->first == "sweep" || sec->first == "tof") {
      sweep.bad("parameter", "'" + s.parameter + "' is not a sweepable key");
    }
    s.values = sweep.list("values");
    if (s.values.empty()) sweep.bad("values", "needs at least one value");
    if (sweep.has("workflow")) {
      auto w = parse_workflow(sweep.text("workflow"));
      if (!w || *w == Workflow::sweep || *w == Workflow::analyze_tof) {
        sweep.bad("workflow", "must be propagate, predict or compare");
      }
      s.workflow = *w;
    }
    cfg.sweep = s;
  }

  const Section tof = section(root, "tof");
  if (tof.present()) {
    TofSection t;
    t.tau = tof.list("tau");
    t.w2 = tof.list("w2");
    if (t.tau.size() != t.w2.size()) tof.bad("w2", "needs one entry per tau");
    cfg.tof = t;
  }
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto line = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [&](const char* key, double value) { line(key, format_double(value)); };

  out << "[beam]\n";
  if (cfg.gaussian) {
    const auto& g = *cfg.gaussian;
    num("sigma", g.sigma);
    num("x0", g.centroid[0]);
    num("y0", g.centroid[1]);
    num("px", g.tilt[0]);
    num("py", g.tilt[1]);
    num("curvature_radius", g.curvature_radius);
  } else if (cfg.field_file) {
    line("field_file", cfg.field_file->string());
  }
  out << '\n';

  std::visit(
      [&](const auto& medium) {
        using T = std::decay_t<decltype(medium)>;
        if constexpr (std::is_same_v<T, ParaxialParams>) {
          out << "[raw]\n";
          num("k", medium.k);
          line("epsilon", std::to_string(medium.epsilon));
          num("gamma", medium.gamma);
          line("alpha", medium.alpha.to_string());
        } else if constexpr (std::is_same_v<T, OpticalBeamSpec>) {
          out << "[optical]\n";
          num("epsilon_r0", medium.epsilon_r0);
          num("omega", medium.omega);
          num("c", medium.c);
          num("chi3", medium.chi3);
          line("beta", medium.beta.to_string());
        } else {
          out << "[atomic]\n";
          num("mass", medium.mass);
          num("hbar", medium.hbar);
          num("n1d", medium.n1d);
          num("a_s", medium.a_s);
          line("omega_perp", medium.omega_perp.to_string());
          if (medium.flux) num("flux", *medium.flux);
          if (medium.energy) num("energy", *medium.energy);
        }
      },
      cfg.medium);
  out << '\n';

  out << "[grid]\n";
  line("n", std::to_string(cfg.grid.n));
  num("extent", cfg.grid.extent);
  num("du", cfg.grid.du);
  line("record_stride", std::to_string(cfg.grid.record_stride));
  out << '\n';

  out << "[run]\n";
  num("u_span", cfg.run.u_span);
  if (cfg.run.workflow) line("workflow", std::string(to_string(*cfg.run.workflow)));
  if (!cfg.run.snapshots.empty()) line("snapshots", join(cfg.run.snapshots));
  num("ode_step", cfg.run.ode_step);
  out << '\n';

  out << "[checks]\n";
  num("w2_rel_tol", cfg.checks.w2_rel_tol);
  num("mi4_rel_tol", cfg.checks.mi4_rel_tol);

  if (cfg.sweep) {
    out << "\n[sweep]\n";
    line("parameter", cfg.sweep->parameter);
    line("values", join(cfg.sweep->values));
    line("workflow", std::string(to_string(cfg.sweep->workflow)));
  }
  if (cfg.tof) {
    out << "\n[tof]\n";
    line("tau", join(cfg.tof->tau));
    line("w2", join(cfg.tof->w2));
  }
  return out.str();
}

}  // namespace paraxial
