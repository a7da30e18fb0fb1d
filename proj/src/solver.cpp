#include "paraxial/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "paraxial/error.hpp"

namespace paraxial {

TransverseField make_gaussian(const GaussianBeam& beam, const GridSpec& grid, double k, int epsilon) {
  require(beam.sigma > 0.0, ErrorKind::parameter, "sigma must be positive");
  require(k > 0.0, ErrorKind::parameter, "k must be positive");
  require(epsilon == 1 || epsilon == -1, ErrorKind::parameter, "epsilon must be +1 or -1");
  require(is_power_of_two(grid.n), ErrorKind::parameter, "grid size must be a power of two");
  require(grid.extent > 0.0, ErrorKind::parameter, "grid extent must be positive");
  if (beam.sigma < 4.0 * grid.spacing()) {
    fail(ErrorKind::grid_too_coarse, "sigma " + std::to_string(beam.sigma) + " is below 4 grid cells");
  }
  if (grid.extent < 8.0 * beam.sigma) {
    fail(ErrorKind::grid_too_small, "extent " + std::to_string(grid.extent) + " is below 8 sigma");
  }
  TransverseField field(grid.n, grid.extent);
  const double inv_2s2 = 1.0 / (2.0 * beam.sigma * beam.sigma);
  const double curvature = std::isinf(beam.curvature_radius) ? 0.0 : epsilon * k / (2.0 * beam.curvature_radius);
  for (int iy = 0; iy < grid.n; ++iy) {
    const double y = field.coordinate(iy);
    for (int ix = 0; ix < grid.n; ++ix) {
      const double x = field.coordinate(ix);
      const double dx = x - beam.centroid[0], dy = y - beam.centroid[1];
      const double rr = dx * dx + dy * dy;
      const double phase = curvature * rr + beam.tilt[0] * x + beam.tilt[1] * y;
      field(ix, iy) = std::polar(std::exp(-rr * inv_2s2), phase);
    }
  }
  field.normalize();
  return field;
}

double effective_energy(const MomentSet& m, int epsilon) { return epsilon * m.K + m.V + epsilon * m.U; }

double effective_energy(const TransverseField& field, const ParaxialParams& params, double u) {
  return effective_energy(compute_moments(field, params, u), params.epsilon);
}

double suggest_step(const TransverseField& field, const ParaxialParams& params, double u_span, double max_phase) {
  params.validate();
  require(u_span > 0.0 && max_phase > 0.0, ErrorKind::parameter, "span and phase bound must be positive");
  const int n = field.size();
  const auto vals = field.values();
  double peak = 0.0;
  for (const cplx& v : vals) peak = std::max(peak, std::norm(v));
  double r2max = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      if (std::norm(field(ix, iy)) > 1e-12 * peak) {
        const double x = field.coordinate(ix), y = field.coordinate(iy);
        r2max = std::max(r2max, x * x + y * y);
      }
    }
  }
  std::vector<cplx> spectrum(vals.begin(), vals.end());
  Fft2d fft(n);
  fft.forward(spectrum);
  double speak = 0.0;
  for (const cplx& v : spectrum) speak = std::max(speak, std::norm(v));
  const auto kappa = wavenumbers(n, field.extent());
  double k2max = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      if (std::norm(spectrum[static_cast<std::size_t>(iy) * n + ix]) > 1e-12 * speak) {
        const double kx = kappa[static_cast<std::size_t>(ix)], ky = kappa[static_cast<std::size_t>(iy)];
        k2max = std::max(k2max, kx * kx + ky * ky);
      }
    }
  }
  const double amax = params.alpha.max_abs_on(0.0, u_span);
  const double k = params.k;
  const double pointwise_rate = (std::abs(params.gamma) * peak + k * k * amax * amax * r2max) / (2.0 * k);
  const double kinetic_rate = k2max / (2.0 * k);
  const double rate = std::max(pointwise_rate, kinetic_rate);
  return rate > 0.0 ? std::min(u_span, max_phase / rate) : u_span;
}

PropagationRecord split_step_propagate(const TransverseField& field0, const ParaxialParams& params,
                                       const GridSpec& grid, double u_span, const SolverOptions& options) {
  grid.validate();
  require(u_span > 0.0 && std::isfinite(u_span), ErrorKind::parameter, "propagation span must be positive");
  params.validate_on(0.0, u_span);
  require(field0.size() == grid.n && std::abs(field0.extent() - grid.extent) <= 1e-12 * grid.extent,
          ErrorKind::parameter, "field does not match the grid specification");
  const double norm0 = field0.norm();
  if (!(std::abs(norm0 - 1.0) <= 1e-9)) {
    fail(ErrorKind::normalization, "initial field norm " + std::to_string(norm0) + " differs from 1");
  }

  const int n = grid.n;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  const long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(u_span / grid.du - 1e-9)));
  const double du = u_span / static_cast<double>(steps);
  const double k = params.k;
  const double eps = params.epsilon;
  const double gamma = params.gamma;
  const Profile& alpha = params.alpha;
  const bool constant_alpha = alpha.is_constant();

  TransverseField psi = field0;
  std::vector<double> radius2(cells);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = psi.coordinate(ix), y = psi.coordinate(iy);
      radius2[static_cast<std::size_t>(iy) * n + ix] = x * x + y * y;
    }
  }
  std::vector<cplx> kinetic(cells);
  {
    const auto kappa = wavenumbers(n, grid.extent);
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const double kk = kappa[static_cast<std::size_t>(ix)] * kappa[static_cast<std::size_t>(ix)] +
                          kappa[static_cast<std::size_t>(iy)] * kappa[static_cast<std::size_t>(iy)];
        kinetic[static_cast<std::size_t>(iy) * n + ix] = std::polar(1.0, -eps * kk * du / (2.0 * k));
      }
    }
  }
  const Fft2d fft(n);

  auto alpha2 = [&](double u) {
    const double a = alpha(u);
    return a * a;
  };
  // psi *= exp(-i (nl_weight gamma |psi|^2 + pot_weight eps k^2 r^2))
  auto pointwise = [&](double nl_weight, double pot_weight) {
    auto vals = psi.values();
    const double g = nl_weight * gamma;
    const double p = pot_weight * eps * k * k;
    for (std::size_t i = 0; i < cells; ++i) {
      const double phase = g * std::norm(vals[i]) + p * radius2[i];
      vals[i] *= cplx(std::cos(phase), -std::sin(phase));
    }
  };

  std::vector<long long> snapshot_steps;
  for (double u : options.snapshot_u) {
    require(u >= 0.0 && u <= u_span, ErrorKind::parameter, "snapshot u outside the propagation span");
    snapshot_steps.push_back(std::llround(u / du));
  }
  std::sort(snapshot_steps.begin(), snapshot_steps.end());
  snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()), snapshot_steps.end());
  auto wants_snapshot = [&](long long s) {
    return std::binary_search(snapshot_steps.begin(), snapshot_steps.end(), s);
  };

  PropagationRecord record;
  PropagationDiagnostics& diag = record.diagnostics;
  diag.du = du;

  double energy0 = 0.0;
  auto observe = [&](double u) {
    const MomentSet m = compute_moments(psi, params, u, fft);
    const double mi4 = quality_factor(m, params.epsilon);
    record.trajectory.push({u, m, mi4});
    if (constant_alpha) {
      const double energy = effective_energy(m, params.epsilon);
      if (record.trajectory.size() == 1) {
        energy0 = energy;
        diag.energy_drift = 0.0;
      } else {
        const double scale = energy0 != 0.0 ? std::abs(energy0) : 1.0;
        diag.energy_drift = std::max(*diag.energy_drift, std::abs(energy - energy0) / scale);
      }
    }
  };
  auto guard = [&](double u) {
    const double ratio = psi.boundary_ratio();
    diag.max_boundary_ratio = std::max(diag.max_boundary_ratio, ratio);
    if (!(ratio < options.boundary_threshold)) {
      throw PropagationError(ErrorKind::domain_overflow, u,
                             "field reached the grid boundary at u = " + std::to_string(u) +
                                 " (edge/peak = " + std::to_string(ratio) + ")");
    }
  };

  guard(0.0);
  observe(0.0);
  if (wants_snapshot(0)) record.snapshots.push_back({0.0, psi});

  const double half = du / 2.0 / (2.0 * k);
  pointwise(half, half * alpha2(0.25 * du));
  double previous_norm = norm0;
  for (long long s = 0; s < steps; ++s) {
    const double u = du * static_cast<double>(s);
    const double u_next = du * static_cast<double>(s + 1);
    fft.forward(psi.values());
    auto spec = psi.values();
    for (std::size_t i = 0; i < cells; ++i) spec[i] *= kinetic[i];
    fft.backward(psi.values());

    const double norm = psi.norm();
    if (!std::isfinite(norm)) {
      throw PropagationError(ErrorKind::instability, u_next,
                             "non-finite field at u = " + std::to_string(u_next));
    }
    diag.max_step_norm_drift = std::max(diag.max_step_norm_drift, std::abs(norm - previous_norm));
    diag.norm_drift = std::max(diag.norm_drift, std::abs(norm - norm0));
    previous_norm = norm;
    guard(u_next);

    const bool last = s + 1 == steps;
    const bool boundary = last || (s + 1) % grid.record_stride == 0 || wants_snapshot(s + 1);
    const double a_end = alpha2(u + 0.75 * du);
    if (boundary) {
      pointwise(half, half * a_end);
      const double u_rec = last ? u_span : u_next;
      observe(u_rec);
      if (wants_snapshot(s + 1)) record.snapshots.push_back({u_rec, psi});
      if (!last) pointwise(half, half * alpha2(u_next + 0.25 * du));
    } else {
      // Adjacent half steps fuse exactly: the phases leave |psi| unchanged.
      pointwise(2.0 * half, half * (a_end + alpha2(u_next + 0.25 * du)));
    }
  }
  diag.steps = steps;
  diag.mi4_drift = record.trajectory.max_relative_mi4_drift();
  record.final_field = std::move(psi);
  return record;
}

}  // namespace paraxial
