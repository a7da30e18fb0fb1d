#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "paraxial/abcd.hpp"
#include "paraxial/config.hpp"
#include "paraxial/moments.hpp"
#include "paraxial/workflows.hpp"

using namespace paraxial;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

struct Criterion {
  Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

  int id;
  std::string title;
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Least-squares c0 + c1 u + c2 u^2 via normal equations in long double.
struct QuadFit {
  double c0, c1, c2, rms;
};

QuadFit fit_quadratic(const std::vector<double>& u, const std::vector<double>& y) {
  long double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    long double p = 1.0L;
    for (int j = 0; j < 5; ++j) {
      s[j] += p;
      if (j < 3) t[j] += p * y[i];
      p *= u[i];
    }
  }
  long double a[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
  for (int c = 0; c < 3; ++c) {
    for (int r = c + 1; r < 3; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
    }
  }
  long double x[3];
  for (int r = 2; r >= 0; --r) {
    long double v = a[r][3];
    for (int j = r + 1; j < 3; ++j) v -= a[r][j] * x[j];
    x[r] = v / a[r][r];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = y[i] - static_cast<double>(x[0] + x[1] * u[i] + x[2] * u[i] * u[i]);
    ss += e * e;
  }
  return {double(x[0]), double(x[1]), double(x[2]), std::sqrt(ss / u.size())};
}

std::vector<double> r2_of(const MomentTrajectory& t) {
  std::vector<double> out;
  for (const auto& s : t.samples()) out.push_back(s.moments.r2);
  return out;
}

std::string raw_config(double sigma, double gamma, const std::string& alpha, int n, double extent, double du,
                       double span, int stride) {
  return fmt("[beam]\nsigma = %.17g\n[raw]\ngamma = %.17g\nalpha = %s\n[grid]\nn = %d\nextent = %.17g\n"
             "du = %.17g\nrecord_stride = %d\n[run]\nu_span = %.17g\n",
             sigma, gamma, alpha.c_str(), n, extent, du, stride, span);
}

// Runs shared by criteria 1, 2 and 3.
std::vector<double> mi4_drifts;

Criterion parabolic_expansion() {
  Criterion c{1, "parabolic free expansion"};
  for (double gamma : {0.0, 2.0, 4.0 * pi}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = parse_config_text(raw_config(1.0, gamma, "constant 0", 256, 64.0, 2e-3, 3.0, 10));
    const auto res = run_propagate(cfg);
    const double elapsed = seconds_since(t0);
    const auto& traj = res.record.trajectory;
    const auto fit = fit_quadratic(traj.u_values(), r2_of(traj));
    const auto params = resolve_params(cfg);
    const double expected = params.epsilon * traj.front().moments.H0 / (params.k * params.k);
    const double rms = fit.rms / traj.back().moments.r2;
    const double coef = std::abs(fit.c2 - expected) / std::abs(expected);
    mi4_drifts.push_back(traj.max_relative_mi4_drift());
    c.require(rms < 1e-4 && coef < 5e-3 && elapsed < 60.0,
              fmt("gamma=%.4g rms/r2=%.2e coef_err=%.2e %.1fs", gamma, rms, coef, elapsed));
  }
  return c;
}

Criterion oscillation_frequency_check() {
  Criterion c{3, "oscillation frequency independent of nonlinearity"};
  const double alpha0 = 1.0;
  for (double gamma : {0.0, 1.0, 5.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = parse_config_text(raw_config(1.5, gamma, "constant 1", 128, 20.0, 2e-3, 4.0 * pi, 1));
    const auto res = run_propagate(cfg);
    const double elapsed = seconds_since(t0);
    const auto& traj = res.record.trajectory;
    std::vector<double> q;
    for (const auto& s : traj.samples()) q.push_back(s.moments.Q);
    const double freq = oscillation_frequency(traj.u_values(), q);
    const double err = std::abs(freq - 2.0 * alpha0) / (2.0 * alpha0);
    mi4_drifts.push_back(traj.max_relative_mi4_drift());
    c.require(err < 2e-3 && elapsed < 120.0, fmt("gamma=%g freq=%.6f err=%.2e %.1fs", gamma, freq, err, elapsed));
  }
  return c;
}

Criterion invariance() {
  Criterion c{2, "quality factor invariance"};
  for (double d : mi4_drifts) c.require(d < 1e-3, fmt("%.2e", d));
  c.require(mi4_drifts.size() == 6, fmt("%zu runs", mi4_drifts.size()));
  return c;
}

Criterion nonlinear_abcd() {
  Criterion c{4, "nonlinear ABCD law"};
  const double span = 2.0 * 2.0 * pi / 0.7;
  const std::vector<std::pair<std::string, std::string>> cases{
      {"constant", "constant 0.7"}, {"piecewise", fmt("piecewise %.17g ; 0.7 1.2", span / 2.0)}};
  for (const auto& [name, alpha] : cases) {
    const auto cfg = parse_config_text(raw_config(1.5, 3.0, alpha, 256, 24.0, 2e-3, span, 10));
    const auto rep = run_compare(cfg);
    c.require(rep.max_rel_err < 1e-2, fmt("%s max_rel_err=%.2e", name.c_str(), rep.max_rel_err));
  }
  return c;
}

RunConfig atomic_gaussian(double n1d, double a_s) {
  return parse_config_text(fmt("[beam]\nsigma = 1\n[atomic]\nmass = 1\nhbar = 1\nn1d = %.17g\na_s = %.17g\n"
                               "[grid]\nn = 256\nextent = 16\n",
                               n1d, a_s));
}

double gaussian_mi4(const RunConfig& cfg) {
  const auto params = resolve_params(cfg);
  return quality_factor(compute_moments(initial_field(cfg), params, 0.0), params.epsilon);
}

Criterion gaussian_quality() {
  Criterion c{5, "Gaussian quality factor"};
  for (double na : {0.01, 0.09, 0.3}) {
    const double err = std::abs(gaussian_mi4(atomic_gaussian(na, 1.0)) - (1.0 + 2.0 * na));
    c.require(err < 1e-4, fmt("n1d*a_s=%g err=%.2e", na, err));
  }
  return c;
}

Criterion time_of_flight() {
  Criterion c{6, "time-of-flight correction"};
  const auto cfg = atomic_gaussian(0.09, 1.0);
  const auto params = resolve_params(cfg);
  const auto m0 = compute_moments(initial_field(cfg), params, 0.0);
  std::vector<double> tau, w2;
  for (int i = 0; i <= 8; ++i) {
    tau.push_back(0.25 * i);
    w2.push_back(tof_width(m0, params.k, tau.back()));
  }
  const auto a = run_tof(cfg, tau, w2);
  const double err = std::abs(a.overestimation - 1.18);
  c.require(err < 1e-6, fmt("factor=%.9f err=%.2e", a.overestimation, err));
  return c;
}

cd field_1d(double x, const InverseCurvature& q, double k, int eps) {
  const cd s = eps > 0 ? q.inverse_q() : std::conj(q.inverse_q());
  return std::exp(cd(0, 1) * double(eps) * k * x * x * s / 2.0);
}

Criterion linear_equivalence() {
  Criterion c{7, "linear Gaussian equivalence"};
  const double k = 1.0;
  struct Case {
    const char* name;
    double sigma, alpha, extent, span;
  };
  for (const Case& cs : {Case{"free", 1.0, 0.0, 40.0, 3.0}, Case{"harmonic", 1.5, 0.8, 24.0, 2.0 * pi / 0.8}}) {
    const auto cfg = parse_config_text(
        raw_config(cs.sigma, 0.0, fmt("constant %.17g", cs.alpha), 256, cs.extent, 5e-3, cs.span, 20));
    const auto res = run_propagate(cfg);
    const double w1 = std::sqrt(2.0) * cs.sigma;
    const InverseCurvature q1(0.0, 2.0 / (k * w1 * w1));
    double worst = 0.0;
    for (const auto& s : res.record.trajectory.samples()) {
      const RayMatrix m = cs.alpha > 0.0 ? harmonic_matrix(cs.alpha, s.u) : free_matrix(s.u);
      const auto lin = linear_gaussian_propagate(q1, w1, m, k, 1);
      worst = std::max(worst, std::abs(2.0 * s.moments.r2 - lin.w * lin.w) / (lin.w * lin.w));
    }
    c.require(worst < 1e-4, fmt("%s width_err=%.2e", cs.name, worst));
  }

  const double w1 = 1.0;
  const InverseCurvature q1(0.25, 2.0 / (k * w1 * w1));
  const RayMatrix m = compose(free_matrix(0.7), harmonic_matrix(1.3, 0.4));
  double worst = 0.0;
  for (auto [flavor, eps] : {std::pair{KernelFlavor::optical, -1}, std::pair{KernelFlavor::atomic, 1}}) {
    const auto expected = linear_gaussian_propagate(q1, w1, m, k, eps);
    for (double x : {-1.5, -0.2, 0.0, 0.9, 2.1}) {
      const int panels = 40000;
      const double half = 9.0, h = 2.0 * half / panels;
      cd sum = 0.0;
      for (int i = 0; i <= panels; ++i) {
        const double xi = -half + i * h;
        const double wt = (i == 0 || i == panels) ? 0.5 : 1.0;
        sum += wt * propagator_kernel(x, xi, m, k, flavor) * field_1d(xi, q1, k, eps);
      }
      const cd oracle = expected.amplitude * field_1d(x, expected.q, k, eps);
      worst = std::max(worst, std::abs(sum * h - oracle));
    }
  }
  c.require(worst < 1e-6, fmt("kernel_err=%.2e", worst));
  return c;
}

Criterion matrix_ode_check() {
  Criterion c{8, "matrix ODE vs closed forms"};
  auto entry_err = [](const RayMatrix& a, const RayMatrix& b) {
    return std::max({std::abs(a.a() - b.a()), std::abs(a.b() - b.b()), std::abs(a.c() - b.c()),
                     std::abs(a.d() - b.d())});
  };
  double worst = 0.0;
  for (double u : {0.5, 2.0, 7.0}) {
    worst = std::max(worst, entry_err(matrix_ode(Profile::constant(0.0), 0.0, u, 1e-3), free_matrix(u)));
    for (double a : {0.3, 1.0, 2.5}) {
      worst = std::max(worst, entry_err(matrix_ode(Profile::constant(a), 0.0, u, 1e-3), harmonic_matrix(a, u)));
    }
  }
  c.require(worst < 1e-8, fmt("entry_err=%.2e", worst));
  const auto long_run = matrix_ode_detailed(Profile::sinusoidal(1.0, 0.2, 1.3), 0.0, 100.0, 1e-3);
  c.require(long_run.steps >= 100000 && long_run.max_det_drift < 1e-9,
            fmt("steps=%lld det_drift=%.2e", long_run.steps, long_run.max_det_drift));
  return c;
}

Criterion self_trapping() {
  Criterion c{9, "self-trapping threshold"};
  const double a_s = -1.0;
  const double threshold = self_trapping_threshold(a_s);
  const double at = gaussian_mi4(atomic_gaussian(threshold, a_s));
  c.require(std::abs(at) < 1e-6, fmt("M_I^4 at threshold=%.2e", at));
  std::string signs;
  bool ok = true;
  for (double f : {0.5, 0.75, 1.0, 1.25, 1.5}) {
    const double v = gaussian_mi4(atomic_gaussian(f * threshold, a_s));
    if (f < 1.0) ok = ok && v > 0.0;
    if (f > 1.0) ok = ok && v < 0.0;
    signs += f == 1.0 ? '0' : (v > 0.0 ? '+' : '-');
  }
  c.require(ok, "scan " + signs);
  return c;
}

Criterion moment_ode_vs_pde() {
  Criterion c{10, "moment ODE vs PDE"};
  const double w = 1.3;
  const double span = 3.0 * 2.0 * pi / w;
  const auto cfg = parse_config_text(
      raw_config(1.2, 2.0, fmt("sinusoidal 1 0.2 %.17g", w), 128, 20.0, 2e-3, span, 20));
  const auto res = run_propagate(cfg);
  const auto& traj = res.record.trajectory;
  const auto params = resolve_params(cfg);
  const auto ode = moment_ode_solve(traj.front().moments, params, 0.0, span, 2e-3, 20);
  double worst = 0.0;
  const std::size_t n = std::min(ode.size(), traj.size());
  bool aligned = ode.size() == traj.size();
  for (std::size_t i = 0; i < n; ++i) {
    aligned = aligned && std::abs(ode[i].u - traj[i].u) < 1e-9;
    worst = std::max(worst, std::abs(ode[i].moments.r2 - traj[i].moments.r2) / traj[i].moments.r2);
  }
  c.require(aligned && worst < 5e-3, fmt("samples=%zu r2_err=%.2e", n, worst));
  return c;
}

}  // namespace

int main() {
  // Criterion 2 reuses the runs of criteria 1 and 3.
  const std::vector<std::pair<int, std::function<Criterion()>>> runs{
      {1, parabolic_expansion}, {3, oscillation_frequency_check}, {2, invariance},       {4, nonlinear_abcd},
      {5, gaussian_quality},    {6, time_of_flight},              {7, linear_equivalence}, {8, matrix_ode_check},
      {9, self_trapping},       {10, moment_ode_vs_pde}};
  std::vector<Criterion> results;
  for (const auto& [id, run] : runs) {
    Criterion c{id, ""};
    try {
      c = run();
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("error: ") + e.what();
    }
    results.push_back(c);
  }
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  bool all = true;
  for (const auto& c : results) {
    std::printf("%s criterion %d (%s): %s\n", c.passed ? "PASS" : "FAIL", c.id, c.title.c_str(), c.detail.c_str());
    all = all && c.passed;
  }
  return all ? 0 : 1;
}
