#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sks/diagnostics.hpp"

using namespace sks;

namespace {

PathSample constant_path(const Domain& dom, const Field& f, const std::vector<double>& times) {
  PathSample p;
  Field fs = dom.to_spectral(f);
  p.save_times = times;
  p.coeffs.assign(times.size(), fs.spec);
  return p;
}

}  // namespace

TEST_CASE("energy report on handcrafted paths") {
  const Domain dom({1, kPi, 128, 127});

  PathSample zero = constant_path(dom, dom.zero_field(), {0.0, 0.5, 1.0});
  EnergyReport ez = energy_report(dom, zero, 3.0);
  CHECK(ez.sup_h1_sq == 0.0);
  CHECK(ez.int_lm1 == 0.0);
  CHECK(ez.sup_lm1 == 0.0);
  CHECK(ez.int_gradm == 0.0);
  CHECK(ez.r1_composite == 0.0);
  CHECK(ez.r2_composite == 0.0);
  CHECK(ez.mass_drift == 0.0);

  // constant path rho = e1 over [0,1], m = 3
  PathSample e1path = constant_path(dom, dom.eigenmode(0), {0.0, 0.25, 0.5, 0.75, 1.0});
  EnergyReport er = energy_report(dom, e1path, 3.0);
  CHECK(er.sup_h1_sq == Catch::Approx(1.0).epsilon(1e-12));
  const double l4 = std::sqrt(2.0 / kPi) * std::pow(3.0 * kPi / 8.0, 0.25);
  CHECK(er.int_lm1 == Catch::Approx(std::pow(l4, 4.0)).epsilon(1e-10));
  CHECK(er.int_lm1 == Catch::Approx(0.4775).margin(2e-4));
  CHECK(er.sup_lm1 == Catch::Approx(std::pow(l4, 4.0)).epsilon(1e-10));
  CHECK(er.r1_composite == Catch::Approx(1.0 + 4.0 * er.int_lm1).epsilon(1e-12));
  CHECK(er.r2_composite == Catch::Approx(er.sup_lm1 + 9.0 * 4.0 * er.int_gradm).epsilon(1e-12));
  CHECK(er.mass_drift == Catch::Approx(0.0).margin(1e-13));

  // int || |rho|^{m-1} grad rho ||^2 for rho = e1, m = 3:
  // (2/pi)^3 int sin^4 cos^2 = (2/pi)^3 * pi/16
  const double grad_sq = std::pow(2.0 / kPi, 3.0) * kPi / 16.0;
  CHECK(er.int_gradm == Catch::Approx(grad_sq).epsilon(1e-8));
}

TEST_CASE("weighted gradient norm: m = 1 boundary weights") {
  const Domain dom({1, kPi, 128, 127});
  // || grad e1 ||_{L^2} = 1 (cos has the same normalization), boundary included
  const double wg = dom.weighted_gradient_l2(dom.eigenmode(0), 1.0);
  CHECK(wg == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("heat decay: sup attained at t = 0 and H^-1 norm monotone") {
  const Domain dom({1, kPi, 128, 127});
  ModelParams p;
  p.m = 1.0;
  p.chi = 0.0;
  p.noise.sigma = 0.0;
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  cfg.save_every = 50;
  PathSample path = integrate_path(dom, dom.eigenmode(0), p, cfg, 1);
  EnergyReport er = energy_report(dom, path, 1.0);
  CHECK(er.sup_h1_sq == Catch::Approx(1.0).epsilon(1e-12));
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& c : path.coeffs) {
    const double h1 = dom.norm_hminus1(dom.from_coeffs(c));
    CHECK(h1 * h1 <= prev + 1e-8);
    prev = h1 * h1;
  }
  BlowupPositivity bp = blowup_and_positivity(dom, path);
  CHECK_FALSE(bp.blown);
  CHECK(bp.t_blow < 0.0);
  CHECK(bp.min_value >= -1e-10);
  // Dirichlet heat flow loses mass monotonically from nonnegative data
  EnergyReport er2 = energy_report(dom, path, 1.0);
  for (size_t i = 0; i + 1 < er2.mass_trace.size(); ++i)
    CHECK(er2.mass_trace[i + 1] <= er2.mass_trace[i] + 1e-12);
}

TEST_CASE("energy monotonicity for the deterministic porous flow") {
  const Domain dom({1, kPi, 128, 127});
  ModelParams p;
  p.m = 3.0;
  p.chi = 0.0;
  p.noise.sigma = 0.0;
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.horizon = 0.2;
  cfg.save_every = 100;
  Field rho0 = dom.from_function([](double x) {
    const double w = kPi / 8.0;
    return std::exp(-0.5 * (x - 0.5 * kPi) * (x - 0.5 * kPi) / (w * w));
  });
  PathSample path = integrate_path(dom, rho0, p, cfg, 1);
  REQUIRE_FALSE(path.blown);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& c : path.coeffs) {
    const double h1 = dom.norm_hminus1(dom.from_coeffs(c));
    CHECK(h1 * h1 <= prev + 1e-8);
    prev = h1 * h1;
  }
}

TEST_CASE("Ito residual: deterministic heat case has pure O(dt) bias") {
  const Domain dom({1, kPi, 64, 63});
  ModelParams p;
  p.m = 1.0;
  p.chi = 0.0;
  p.noise.sigma = 0.0;
  p.noise.modes = 4;
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 0.5;
  cfg.save_every = cfg.steps();
  cfg.taming = false;
  cfg.cfl_safety = 1.0;  // single decoupled mode; keep the macro grid exact
  PathSample path = integrate_path(dom, dom.eigenmode(0), p, cfg, 3);
  ItoPathResidual res = ito_residual(dom, path, nullptr, p);
  // per step: ||rho_{n+1}||^2 - ||rho_n||^2 - 2<Lap rho, rho> dt = dt^2 c_n^2 exactly
  double expected = 0.0;
  double c = 1.0;
  for (int n = 0; n < cfg.steps(); ++n) {
    expected += cfg.dt * cfg.dt * c * c;
    c *= (1.0 - cfg.dt);
  }
  CHECK(res.total == Catch::Approx(expected).epsilon(1e-8));
  CHECK(res.per_step.front() == Catch::Approx(cfg.dt * cfg.dt).epsilon(1e-8));

  PathSample zero = integrate_path(dom, dom.zero_field(), p, cfg, 3);
  ItoPathResidual rz = ito_residual(dom, zero, nullptr, p);
  CHECK(rz.total == 0.0);
}

TEST_CASE("Ito residual centering for the stochastic benchmark") {
  const Domain dom({1, kPi, 128, 127});
  ModelParams p;
  p.m = 3.0;
  p.chi = 0.5;
  p.noise.sigma = 0.1;
  p.noise.modes = 16;
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.horizon = 0.25;
  cfg.save_every = cfg.steps();
  // modest amplitude keeps the O(dt) drift bias inside the statistical band
  Field rho0 = dom.eigenmode(0, 0.25);

  const int ensemble = 64;
  std::vector<PathSample> paths(ensemble);
  parallel_for(ensemble, [&](int i) {
    paths[i] = integrate_path(dom, rho0, p, cfg, GaussianStream::derive(2025, i));
  });
  for (const auto& path : paths) REQUIRE_FALSE(path.blown);
  ItoResidualReport rep = ito_residual_ensemble(dom, paths, p);
  INFO("mean=" << rep.mean << " se=" << rep.std_error);
  CHECK(std::abs(rep.mean) <= 3.0 * rep.std_error);
}

TEST_CASE("blowup report fields") {
  const Domain dom({1, kPi, 128, 127});
  PathSample zero;
  zero.save_times = {0.0, 1.0};
  zero.coeffs.assign(2, std::vector<double>(dom.spec_size(), 0.0));
  BlowupPositivity bp = blowup_and_positivity(dom, zero);
  CHECK_FALSE(bp.blown);
  CHECK(bp.t_blow < 0.0);
  CHECK(bp.min_value == 0.0);
  CHECK(bp.mass_drift == 0.0);
}
