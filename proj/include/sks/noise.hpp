// Cylindrical Wiener forcing on the Dirichlet eigenbasis: retained modes,
// the coefficient sequence mu_k = lambda_k^{-a}, the trace-type constant
// C1 = sum mu_k^2 lambda_k^2, Gaussian increment sampling, and the
// multiplicative noise increment rho * sum sigma mu_k dbeta_k e_k together
// with its Hilbert-Schmidt norm.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sks/field.hpp"

namespace sks {

struct NoiseSpec {
  double sigma = 0.1;               // noise intensity
  double decay_a = 1.5;             // mu_k = lambda_k^{-decay_a}
  int modes = 64;                   // K_W; 0 = all per-axis resolvable modes (= K)
  std::uint64_t base_seed = 0x5eed5eedULL;

  // Convergence of the full series sum mu_k^2 lambda_k^2 = sum lambda_k^{2-2a}
  // under Weyl growth lambda_k ~ k^{2/d} requires a > 1 + d/4.
  void validate(int dim) const {
    if (sigma < 0.0) throw std::invalid_argument("noise: sigma must be >= 0");
    if (modes < 0) throw std::invalid_argument("noise: modes must be >= 0");
    if (!(decay_a > 1.0 + 0.25 * dim))
      throw std::invalid_argument("noise: divergent C1 (need decay_a > 1 + d/4)");
  }
};

struct NoiseIncrement {
  std::vector<double> dbeta;  // one Gaussian increment per retained mode
  double dt = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic Gaussian stream: splitmix64-derived state feeding a
// Box-Muller transform.  Bit-identical across runs and platforms for a
// given seed, which the reproducibility contract depends on.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(splitmix64(seed ^ 0xA0761D6478BD642FULL)) {}

  // Stream derivation for ensemble member `path`: mix(base_seed, path).
  static std::uint64_t derive(std::uint64_t base_seed, std::uint64_t path) {
    return splitmix64(base_seed + 0x9E3779B97F4A7C15ULL * (path + 1));
  }

  double uniform() { return next_unit(); }  // [0,1)

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * kPi * u2);
    have_cached_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t next_u64() {
    state_ = splitmix64(state_);
    return state_;
  }
  double next_unit() { return (next_u64() >> 11) * 0x1.0p-53; }          // [0,1)
  double next_unit_open() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }  // (0,1]

  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Retained noise modes, smoothest first (ascending eigenvalue, ties by flat
// index) so that a truncation keeps the dominant mu_k.
struct NoiseModes {
  std::vector<int> mode;   // flat basis indices
  std::vector<double> mu;  // lambda^{-a}
  double c1 = 0.0;         // truncated sum mu^2 lambda^2

  int count() const { return static_cast<int>(mode.size()); }
};

inline NoiseModes build_noise_modes(const NoiseSpec& spec, const Basis& basis) {
  spec.validate(basis.spec.dim);
  int kw = spec.modes == 0 ? basis.spec.trunc_k : spec.modes;
  kw = std::min(kw, basis.mode_count());
  NoiseModes nm;
  nm.mode.reserve(kw);
  nm.mu.reserve(kw);
  for (int i = 0; i < kw; ++i) {
    const int flat = basis.sorted_modes[i];
    const double lam = basis.eigenvalues[flat];
    const double mu = std::pow(lam, -spec.decay_a);
    nm.mode.push_back(flat);
    nm.mu.push_back(mu);
    nm.c1 += mu * mu * lam * lam;
  }
  return nm;
}

inline double c1_constant(const NoiseSpec& spec, const Basis& basis) {
  return build_noise_modes(spec, basis).c1;
}

inline NoiseIncrement sample_increment(const NoiseModes& modes, double dt, GaussianStream& stream) {
  if (!(dt > 0.0)) throw std::domain_error("sample_increment: dt must be positive");
  NoiseIncrement inc;
  inc.dt = dt;
  inc.dbeta.resize(modes.count());
  const double sd = std::sqrt(dt);
  for (double& b : inc.dbeta) b = sd * stream.normal();
  return inc;
}

// Euler increment of the stochastic integral: the grid field
// rho(x) * g(x), g = sum sigma mu_k dbeta_k e_k.  The product is taken on
// the native grid (pointwise), which keeps the scalar-SDE limit exact.
inline Field apply_noise(const Domain& dom, Field& rho, const NoiseIncrement& inc, const NoiseModes& modes, double sigma) {
  if (static_cast<int>(inc.dbeta.size()) != modes.count())
    throw std::invalid_argument("apply_noise: increment size mismatch");
  Field g = dom.zero_field();
  for (int i = 0; i < modes.count(); ++i) g.spec[modes.mode[i]] = sigma * modes.mu[i] * inc.dbeta[i];
  return dom.multiply_native(rho, g);
}

// Hilbert-Schmidt norm of B(rho): (sum_k sigma^2 mu_k^2 ||rho e_k||_{H^-1}^2)^{1/2}.
// Products rho * e_k use the same native-grid discretization as apply_noise,
// so E || apply_noise ||_{H^-1}^2 = hs_norm_B^2 * dt holds exactly.
inline double hs_norm_B(const Domain& dom, Field& rho, const NoiseModes& modes, double sigma) {
  dom.ensure_grid(rho);
  double total = 0.0;
  for (int i = 0; i < modes.count(); ++i) {
    Field e = dom.eigenmode(modes.mode[i]);
    Field prod = dom.multiply_native(rho, e);
    const double nrm = dom.norm_hminus1(prod);
    total += sigma * sigma * modes.mu[i] * modes.mu[i] * nrm * nrm;
  }
  return std::sqrt(total);
}

}  // namespace sks
