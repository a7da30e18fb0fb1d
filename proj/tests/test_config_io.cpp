#include <doctest.h>

#include <cstring>
#include <fstream>
#include <limits>

#include "paraxial/config.hpp"
#include "paraxial/error.hpp"
#include "paraxial/format.hpp"
#include "paraxial/io.hpp"
#include "support.hpp"

using namespace paraxial;
using testing::pi;

namespace {

std::string error_text(auto&& fn, ErrorKind expected) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

const char* raw_config = R"(# comment with a hash
[beam]
sigma = 1.0
; semicolon comment
[raw]
k = 1
epsilon = 1
gamma = 3
alpha = constant 0.7
[grid]
n = 64
extent = 12
)";

}  // namespace

TEST_CASE("minimal atomic config resolves every default") {
  const auto cfg = parse_config_text(R"(
[beam]
sigma = 2e-6
[atomic]
mass = 1.443e-25
n1d = 5e6
a_s = 5.3e-9
omega_perp = constant 628.3185307179586
)");
  REQUIRE(std::holds_alternative<AtomicBeamSpec>(cfg.medium));
  const auto& a = std::get<AtomicBeamSpec>(cfg.medium);
  CHECK(a.hbar == constants::hbar);
  CHECK_FALSE(a.flux.has_value());
  CHECK(cfg.grid.n == 256);
  CHECK(cfg.grid.extent == doctest::Approx(32e-6));
  CHECK(cfg.run.u_span == doctest::Approx(2 * pi / 628.3185307179586));
  CHECK(cfg.grid.du > 0.0);
  CHECK(cfg.grid.du < cfg.run.u_span);
  CHECK(cfg.grid.record_stride >= 1);
  CHECK(cfg.run.ode_step == cfg.grid.du);
  CHECK(cfg.checks.w2_rel_tol == 1e-2);
  const auto p = resolve_params(cfg);
  CHECK(p.epsilon == 1);
  CHECK(p.gamma == doctest::Approx(8 * pi * 5e6 * 5.3e-9));
  CHECK(initial_field(cfg).norm() == doctest::Approx(1.0));
}

TEST_CASE("free-space default span is three diffraction lengths") {
  const auto cfg = parse_config_text("[beam]\nsigma = 1.5\n[raw]\nk = 2\n[grid]\nn = 128\n");
  CHECK(cfg.run.u_span == doctest::Approx(3.0 * 2.0 * 1.5 * 1.5).epsilon(1e-6));
  CHECK(cfg.grid.extent == 24.0);
}

TEST_CASE("exactly one medium") {
  const auto both = std::string(raw_config) + "[atomic]\nmass = 1\n";
  auto msg = error_text([&] { parse_config_text(both); }, ErrorKind::config);
  CHECK(msg.find("exactly one") != std::string::npos);
  error_text([] { parse_config_text("[beam]\nsigma = 1\n"); }, ErrorKind::config);
}

TEST_CASE("unknown keys are listed together") {
  const auto text = std::string(raw_config) + "colour = blue\n[extras]\nx = 1\n[run]\nspan = 3\n";
  const auto msg = error_text([&] { parse_config_text(text); }, ErrorKind::config);
  CHECK(msg.find("grid.colour") != std::string::npos);
  CHECK(msg.find("[extras]") != std::string::npos);
  CHECK(msg.find("run.span") != std::string::npos);
}

TEST_CASE("diagnostics name the section and key") {
  auto msg = error_text([] { parse_config_text("[beam]\nsigma = wide\n[raw]\nk = 1\n"); }, ErrorKind::config);
  CHECK(msg.find("[beam] sigma") != std::string::npos);
  msg = error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\nepsilon = 2\n"); }, ErrorKind::config);
  CHECK(msg.find("[raw] epsilon") != std::string::npos);
  msg = error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\nalpha = cubic 1\n"); }, ErrorKind::config);
  CHECK(msg.find("[raw] alpha") != std::string::npos);
  msg = error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\n[grid]\nn = 100\n"); }, ErrorKind::config);
  CHECK(msg.find("[grid] n") != std::string::npos);
  error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\nalpha = constant -1\n"); }, ErrorKind::invalid_spec);
  error_text([] { parse_config_text("[beam]\nsigma = 1\nfield_file = x.bin\n[raw]\n"); }, ErrorKind::config);
  error_text([] { parse_config_text("[beam]\nfield_file = missing.bin\n[raw]\n"); }, ErrorKind::config);
  error_text([] { parse_config_text("[beam\nsigma = 1\n"); }, ErrorKind::config);
  error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\n[run]\nworkflow = dance\n"); }, ErrorKind::config);
  error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\n[sweep]\nparameter = raw.colour\nvalues = 1\n"); },
             ErrorKind::config);
  error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\n[tof]\ntau = 0 1\nw2 = 1\n"); }, ErrorKind::config);
}

TEST_CASE("grid guards surface from the beam model") {
  error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\n[grid]\nn = 64\nextent = 20\n"); },
             ErrorKind::grid_too_coarse);
  error_text([] { parse_config_text("[beam]\nsigma = 1\n[raw]\n[grid]\nextent = 6\n"); }, ErrorKind::grid_too_small);
}

TEST_CASE("overrides replace entries before defaults resolve") {
  const auto cfg = parse_config_text(raw_config, ".", {{"raw.gamma", "5"}, {"beam.sigma", "1.2"}, {"run.u_span", "2"}});
  CHECK(std::get<ParaxialParams>(cfg.medium).gamma == 5.0);
  CHECK(cfg.gaussian->sigma == 1.2);
  CHECK(cfg.run.u_span == 2.0);
  error_text([] { parse_config_text(raw_config, ".", {{"gamma", "5"}}); }, ErrorKind::config);
  error_text([] { parse_config_text(raw_config, ".", {{"raw.nonsense", "5"}}); }, ErrorKind::config);
}

TEST_CASE("echo re-parses to an identical config") {
  const std::vector<std::string> texts{
      raw_config,
      std::string(raw_config) + "[run]\nu_span = 4\nworkflow = compare\nsnapshots = 0 1.5 4\n[checks]\nw2_rel_tol = 0.02\n"
                                "[sweep]\nparameter = raw.gamma\nvalues = 0, 1, 2.5\nworkflow = propagate\n",
      "[beam]\nsigma = 1.3\nx0 = 0.2\npy = -0.1\ncurvature_radius = -7\n[optical]\nomega = 2\nc = 1\nchi3 = 0.01\n"
      "beta = piecewise 3 ; 0.5 0.9\n[grid]\nn = 128\n",
      "[beam]\nsigma = 1\n[atomic]\nmass = 1\nhbar = 1\nn1d = 0.09\na_s = 1\nflux = 3\nenergy = 50\n"
      "[grid]\nn = 128\n[tof]\ntau = 0 1 2\nw2 = 1 3.36 10.44\n",
  };
  for (const auto& text : texts) {
    const auto cfg = parse_config_text(text);
    const auto echoed = echo_config(cfg);
    const auto again = parse_config_text(echoed);
    CHECK(again == cfg);
    CHECK(echo_config(again) == echoed);
  }
}

TEST_CASE("field files") {
  const auto dir = testing::scratch_dir("field_files");
  auto f = testing::analytic_gaussian(64, 12.0, 1.0);
  f.normalize();
  f(3, 5) = {0.25, -0.5};
  f.normalize();
  write_field_binary(dir / "psi.bin", f, 1.25);
  CHECK_FALSE(std::filesystem::exists(dir / "psi.bin.tmp"));

  const auto bytes = read_text_file(dir / "psi.bin");
  REQUIRE(bytes.size() == 24 + 64 * 64 * 16);
  std::uint64_t n = 0;
  std::memcpy(&n, bytes.data(), 8);
  CHECK(n == 64);
  double extent = 0.0, re = 0.0;
  std::memcpy(&extent, bytes.data() + 8, 8);
  CHECK(extent == 12.0);
  std::memcpy(&re, bytes.data() + 24 + (5 * 64 + 3) * 16, 8);
  CHECK(re == f(3, 5).real());

  const auto back = read_field_binary(dir / "psi.bin");
  CHECK(back.u == 1.25);
  CHECK(back.field.size() == 64);
  CHECK(std::equal(back.field.values().begin(), back.field.values().end(), f.values().begin()));
  error_text([&] { decode_field(std::string_view(bytes).substr(0, bytes.size() - 1)); }, ErrorKind::io);
  error_text([&] { decode_field("abc"); }, ErrorKind::io);

  // A config can start from a saved field; the grid comes from the file.
  std::ofstream(dir / "run.ini") << "[beam]\nfield_file = psi.bin\n[raw]\ngamma = 1\n";
  const auto cfg = parse_config(dir / "run.ini");
  CHECK(cfg.grid.n == 64);
  CHECK(cfg.grid.extent == 12.0);
  CHECK(cfg.field_file->is_absolute());
  CHECK(parse_config_text(echo_config(cfg)) == cfg);
  error_text([&] { parse_config_text("[beam]\nfield_file = " + (dir / "psi.bin").string() + "\n[raw]\n[grid]\nn = 128\n"); },
             ErrorKind::config);

  auto loose = f;
  for (auto& v : loose.values()) v *= 2.0;
  write_field_binary(dir / "loose.bin", loose, 0.0);
  error_text([&] { parse_config_text("[beam]\nfield_file = " + (dir / "loose.bin").string() + "\n[raw]\n"); },
             ErrorKind::normalization);
}

TEST_CASE("trajectory CSV") {
  MomentTrajectory t;
  MomentSet m{};
  m.r2 = 2.0;
  m.w2 = 2.0;
  m.Q = 0.5;
  m.K = 1.0;
  m.H0 = 1.0;
  t.push({0.0, m, 1.75});
  m.K = std::numeric_limits<double>::quiet_NaN();
  t.push({0.1, m, 1.75});
  ParaxialParams p;
  p.k = 2.0;
  const auto csv = trajectory_csv(t, p);
  CHECK(csv.rfind("u,r2,w2,Q,K,V,U,H0,MI4,invR\n", 0) == 0);
  CHECK(csv.find("0,2,2,0.5,1,0,0,1,1.75,0.125\n") != std::string::npos);
  CHECK(csv.find("0.10000000000000001,2,2,0.5,nan,") != std::string::npos);
}

TEST_CASE("number formatting round-trips") {
  auto g = testing::rng(3);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::ldexp(testing::uniform(g, -1.0, 1.0), static_cast<int>(testing::uniform(g, -300, 300)));
    double y = 0.0;
    REQUIRE(parse_double(format_double(x), y));
    CHECK(y == x);
  }
  double y = 0.0;
  CHECK(parse_double("inf", y));
  CHECK(std::isinf(y));
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK_FALSE(parse_double("1.5x", y));
  CHECK_FALSE(parse_double("", y));
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("workflow names") {
  for (auto w : {Workflow::propagate, Workflow::predict, Workflow::compare, Workflow::sweep, Workflow::analyze_tof}) {
    CHECK(parse_workflow(to_string(w)) == w);
  }
  CHECK_FALSE(parse_workflow("fly").has_value());
  CHECK(to_string(ErrorKind::domain_overflow) == "domain_overflow");
}

TEST_CASE("trailing comments are stripped") {
  const auto cfg = parse_config_text(
      "[beam]\nsigma = 1.5   # rms radius\n[raw]\t# medium, no keys\ngamma = 2\t# repulsive\n"
      "alpha = piecewise 3 ; 0.5 1 # two segments\n[grid] # box\nn = 128\n[checks] # empty\n");
  CHECK(cfg.gaussian->sigma == 1.5);
  CHECK(resolve_params(cfg).gamma == 2.0);
  CHECK(resolve_params(cfg).alpha == Profile::piecewise_constant({3.0}, {0.5, 1.0}));
  CHECK(cfg.grid.n == 128);
  // A header-only section with a comment still selects the medium.
  CHECK(std::holds_alternative<ParaxialParams>(parse_config_text("[beam]\nsigma = 1\n[raw] # defaults\n").medium));
}
