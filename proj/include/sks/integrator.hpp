// Tamed explicit Euler-Maruyama time stepping for the SPDE, in two drive
// modes: self-consistent (xi = rho at the start of each macro step) and
// frozen (xi read from a stored trajectory, piecewise constant between its
// save times).  A macro step whose explicit diffusion bound is violated is
// split in half recursively; the discarded increment is redrawn as two
// independent N(0, dt/2) draws from the same stream, so runs stay
// reproducible from the seed alone.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sks/drift.hpp"

namespace sks {

struct IntegratorConfig {
  double dt = 1e-4;
  double horizon = 0.25;       // T
  int save_every = 0;          // macro steps between saves; 0 = auto (~64 saves)
  bool taming = true;
  double cfl_safety = 0.15;    // in (0,1]; calibrated so dt_eff * m|rho|^{m-1} lambda_max stays < 2
  int max_splits = 24;
  double blowup_factor = 1e6;  // blow-up when max|rho| exceeds this times max|rho0|

  int steps() const { return static_cast<int>(std::llround(horizon / dt)); }

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("integrator: dt must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("integrator: horizon must be positive");
    const int n = steps();
    if (n < 1 || std::abs(n * dt - horizon) > 1e-12 * std::max(1.0, horizon))
      throw std::invalid_argument("integrator: dt must divide horizon");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
      throw std::invalid_argument("integrator: cfl_safety must be in (0,1]");
    if (save_every < 0) throw std::invalid_argument("integrator: save_every must be >= 0");
  }

  int effective_save_every() const {
    if (save_every > 0) return save_every;
    return std::max(1, steps() / 64);
  }
};

// Header metadata carried by every path and written to the "SKS1" dump.
struct PathMeta {
  std::uint64_t dim = 0, grid_n = 0, trunc_k = 0;
  double m = 0, chi = 0, sigma = 0, decay_a = 0;
  std::uint64_t noise_modes = 0;
  double dt = 0, horizon = 0;
  std::uint64_t seed = 0;
};

struct PathSample {
  PathMeta meta;
  IntegratorConfig config;
  std::vector<double> save_times;
  std::vector<std::vector<double>> coeffs;  // spectral coefficients per save time
  std::vector<double> beta_total;           // accumulated dbeta per retained mode
  bool blown = false;
  double blowup_time = -1.0;
  long split_events = 0;

  // Index of the latest save time <= t (piecewise-constant lookup).
  size_t floor_index(double t) const {
    size_t lo = 0;
    for (size_t i = 0; i < save_times.size(); ++i) {
      if (save_times[i] <= t + 1e-12) lo = i;
      else break;
    }
    return lo;
  }
};

// One explicit step rho + dt * D_tamed + rho * g, exposed for tests; the
// integrator below goes through this same routine.
inline Field em_step(const Domain& dom, Field& rho, const Field& xi, const ModelParams& p,
                     const NoiseModes& modes, const NoiseIncrement& inc, double dt, bool taming) {
  if (!(dt > 0.0)) throw std::domain_error("em_step: dt must be positive");
  Field drift = frozen_drift(dom, rho, xi, p);
  double scale = 1.0;
  if (taming) scale = 1.0 / (1.0 + dt * dom.norm_l2_spectral(drift));
  Field out = dom.lin_comb(1.0, rho, dt * scale, drift);
  if (p.noise.sigma != 0.0) {
    Field dm = apply_noise(dom, rho, inc, modes, p.noise.sigma);
    out = dom.lin_comb(1.0, out, 1.0, dm);
  }
  return out;
}

struct StepRecord {
  double t = 0.0;   // substep start time
  double dt = 0.0;  // substep size actually taken
  const Field& before;
  const Field& xi;
  const NoiseIncrement& inc;
  const Field& after;
};
using StepObserver = std::function<void(const StepRecord&)>;

namespace detail {

inline bool spec_finite(const Field& f) {
  for (double v : f.spec)
    if (!std::isfinite(v)) return false;
  return true;
}

struct Stepper {
  const Domain& dom;
  const ModelParams& params;
  const IntegratorConfig& cfg;
  const NoiseModes& modes;
  GaussianStream& stream;
  PathSample& path;
  const StepObserver& observer;
  double max0 = 0.0;

  double cfl_allowed(Field& rho) const {
    if (!params.porous_enabled) return std::numeric_limits<double>::infinity();
    double diffusivity = params.m;
    if (params.m > 1.0) {
      const double amp = dom.max_abs_grid(rho);
      if (amp == 0.0) return std::numeric_limits<double>::infinity();
      diffusivity = params.m * std::pow(amp, params.m - 1.0);
    }
    const double h = dom.cell();
    return cfg.cfl_safety * h * h / diffusivity;
  }

  // Returns false once the path has blown up.
  bool advance(Field& rho, const Field& xi, double t, double dt, int depth) {
    NoiseIncrement inc = sample_increment(modes, dt, stream);
    if (depth < cfg.max_splits && dt > cfl_allowed(rho)) {
      // Discard inc; replace by two independent half-step draws.
      ++path.split_events;
      if (!advance(rho, xi, t, 0.5 * dt, depth + 1)) return false;
      return advance(rho, xi, t + 0.5 * dt, 0.5 * dt, depth + 1);
    }
    Field next = em_step(dom, rho, xi, params, modes, inc, dt, cfg.taming);
    if (!spec_finite(next)) {
      path.blown = true;
      path.blowup_time = t + dt;
      return false;
    }
    dom.ensure_grid(next);
    if (dom.max_abs_grid(next) > cfg.blowup_factor * std::max(max0, 1e-300)) {
      path.blown = true;
      path.blowup_time = t + dt;
      return false;
    }
    for (int i = 0; i < modes.count(); ++i) path.beta_total[i] += inc.dbeta[i];
    if (observer) observer(StepRecord{t, dt, rho, xi, inc, next});
    rho = std::move(next);
    return true;
  }
};

}  // namespace detail

// Integrates one path.  frozen_xi == nullptr gives the self-consistent mode
// (the chemotactic input is the state at the start of each macro step);
// otherwise xi is read from the given trajectory.  The noise stream is a
// function of stream_seed only, so the same seed drives both modes with the
// same Brownian path.
inline PathSample integrate_path(const Domain& dom, const Field& rho0, const ModelParams& params,
                                 const IntegratorConfig& cfg, std::uint64_t stream_seed,
                                 const PathSample* frozen_xi = nullptr,
                                 const StepObserver& observer = {}) {
  cfg.validate();
  params.validate(dom.dim());
  const NoiseModes modes = build_noise_modes(params.noise, dom.basis());

  PathSample path;
  path.config = cfg;
  path.meta = PathMeta{static_cast<std::uint64_t>(dom.dim()),
                       static_cast<std::uint64_t>(dom.spec().grid_n),
                       static_cast<std::uint64_t>(dom.spec().trunc_k),
                       params.m,
                       params.chi,
                       params.noise.sigma,
                       params.noise.decay_a,
                       static_cast<std::uint64_t>(modes.count()),
                       cfg.dt,
                       cfg.horizon,
                       stream_seed};
  path.beta_total.assign(modes.count(), 0.0);

  GaussianStream stream(stream_seed);
  Field rho = dom.to_spectral(rho0);
  dom.ensure_grid(rho);

  detail::Stepper stepper{dom, params, cfg, modes, stream, path, observer};
  stepper.max0 = dom.max_abs_grid(rho);

  const int nsteps = cfg.steps();
  const int save_every = cfg.effective_save_every();
  path.save_times.push_back(0.0);
  path.coeffs.push_back(rho.spec);

  for (int n = 0; n < nsteps; ++n) {
    const double t = n * cfg.dt;
    bool ok;
    if (frozen_xi) {
      Field xi = dom.from_coeffs(frozen_xi->coeffs[frozen_xi->floor_index(t)]);
      ok = stepper.advance(rho, xi, t, cfg.dt, 0);
    } else {
      const Field xi_snapshot = rho;  // frozen over the macro step
      ok = stepper.advance(rho, xi_snapshot, t, cfg.dt, 0);
    }
    if (!ok) break;
    if ((n + 1) % save_every == 0 || n + 1 == nsteps) {
      path.save_times.push_back((n + 1) * cfg.dt);
      path.coeffs.push_back(rho.spec);
    }
  }
  return path;
}

// ---- "SKS1" binary dump --------------------------------------------------
// Layout: magic "SKS1"; header d, N, K, m, chi, sigma, a, K_W, dt, T, seed
// as little-endian 64-bit values (integers as uint64, reals as IEEE f64);
// then one K^d array of f64 spectral coefficients per save time.

static_assert(std::endian::native == std::endian::little, "dump format assumes little-endian host");

inline void write_path_dump(const PathSample& path, const std::string& filename) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + filename);
  out.write("SKS1", 4);
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  const PathMeta& h = path.meta;
  put_u64(h.dim);
  put_u64(h.grid_n);
  put_u64(h.trunc_k);
  put_f64(h.m);
  put_f64(h.chi);
  put_f64(h.sigma);
  put_f64(h.decay_a);
  put_u64(h.noise_modes);
  put_f64(h.dt);
  put_f64(h.horizon);
  put_u64(h.seed);
  for (const auto& c : path.coeffs)
    out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * 8));
  if (!out) throw std::runtime_error("write failed: " + filename);
}

inline PathSample read_path_dump(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + filename);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SKS1", 4) != 0)
    throw std::runtime_error("not an SKS1 dump: " + filename);
  auto get_u64 = [&]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto get_f64 = [&]() {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  PathSample path;
  PathMeta& h = path.meta;
  h.dim = get_u64();
  h.grid_n = get_u64();
  h.trunc_k = get_u64();
  h.m = get_f64();
  h.chi = get_f64();
  h.sigma = get_f64();
  h.decay_a = get_f64();
  h.noise_modes = get_u64();
  h.dt = get_f64();
  h.horizon = get_f64();
  h.seed = get_u64();
  if (!in) throw std::runtime_error("truncated SKS1 header: " + filename);
  size_t block = 1;
  for (std::uint64_t i = 0; i < h.dim; ++i) block *= static_cast<size_t>(h.trunc_k);
  std::vector<double> buf(block);
  while (in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(block * 8)))
    path.coeffs.push_back(buf);
  if (in.gcount() != 0) throw std::runtime_error("truncated SKS1 payload: " + filename);
  return path;
}

}  // namespace sks
