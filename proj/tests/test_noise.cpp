#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sks/noise.hpp"

using namespace sks;

namespace {

// Simpson quadrature of f * e_k on (0, pi), independent of the DST path.
double mode_integral(const std::function<double(double)>& f, int k, int panels = 20000) {
  const double h = kPi / panels;
  auto g = [&](double x) { return f(x) * std::sqrt(2.0 / kPi) * std::sin(k * x); };
  double s = g(0.0) + g(kPi);
  for (int i = 1; i < panels; ++i) s += 2.0 * (1 + i % 2) * g(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("C1 constant: truncated series and tail") {
  // d=1, L=pi, a=3/2: mu_k^2 lambda_k^2 = k^{-2}; the full series is pi^2/6.
  const Basis big = build_basis({1, kPi, 4096, 4095});
  NoiseSpec spec;
  spec.decay_a = 1.5;
  spec.modes = 4095;
  const double c1 = c1_constant(spec, big);
  const double tail = 1.0 / 4095.0 - 1.0 / (2.0 * 4095.0 * 4095.0);  // Richardson estimate
  CHECK(c1 + tail == Catch::Approx(kPi * kPi / 6.0).epsilon(1e-8));

  // K_W = 1: mu_1^2 lambda_1^2 = 1 regardless of a
  NoiseSpec one;
  one.decay_a = 1.5;
  one.modes = 1;
  CHECK(c1_constant(one, big) == Catch::Approx(1.0).epsilon(1e-14));

  // a = 1 in d=1 diverges (mu_k^2 lambda_k^2 = 1 per mode); the validator flags it
  NoiseSpec bad;
  bad.decay_a = 1.0;
  REQUIRE_THROWS_AS(bad.validate(1), std::invalid_argument);
  NoiseSpec borderline;
  borderline.decay_a = 1.25;
  REQUIRE_THROWS_AS(borderline.validate(1), std::invalid_argument);
  NoiseSpec ok2d;
  ok2d.decay_a = 2.0;
  REQUIRE_NOTHROW(ok2d.validate(2));
  NoiseSpec bad2d;
  bad2d.decay_a = 1.5;
  REQUIRE_THROWS_AS(bad2d.validate(2), std::invalid_argument);
}

TEST_CASE("noise modes are selected by ascending eigenvalue") {
  const Basis b2 = build_basis({2, kPi, 32, 31});
  NoiseSpec spec;
  spec.decay_a = 2.0;
  spec.modes = 5;
  const NoiseModes nm = build_noise_modes(spec, b2);
  REQUIRE(nm.count() == 5);
  // lambda: (1,1)=2, (1,2)=(2,1)=5, (2,2)=8, (1,3)=(3,1)=10
  CHECK(b2.eigenvalues[nm.mode[0]] == Catch::Approx(2.0));
  CHECK(b2.eigenvalues[nm.mode[1]] == Catch::Approx(5.0));
  CHECK(b2.eigenvalues[nm.mode[2]] == Catch::Approx(5.0));
  CHECK(b2.eigenvalues[nm.mode[3]] == Catch::Approx(8.0));
  CHECK(b2.eigenvalues[nm.mode[4]] == Catch::Approx(10.0));
  for (int i = 0; i < nm.count(); ++i)
    CHECK(nm.mu[i] == Catch::Approx(std::pow(b2.eigenvalues[nm.mode[i]], -2.0)).epsilon(1e-14));
}

TEST_CASE("increment sampling: determinism and moments") {
  const Basis b = build_basis({1, kPi, 128, 127});
  NoiseSpec spec;
  spec.modes = 8;
  const NoiseModes nm = build_noise_modes(spec, b);

  GaussianStream s1(42), s2(42);
  const NoiseIncrement i1 = sample_increment(nm, 0.01, s1);
  const NoiseIncrement i2 = sample_increment(nm, 0.01, s2);
  REQUIRE(i1.dbeta.size() == 8);
  for (size_t k = 0; k < i1.dbeta.size(); ++k) CHECK(i1.dbeta[k] == i2.dbeta[k]);  // bit-identical

  GaussianStream s3(7);
  REQUIRE_THROWS_AS(sample_increment(nm, 0.0, s3), std::domain_error);
  REQUIRE_THROWS_AS(sample_increment(nm, -1.0, s3), std::domain_error);

  const double dt = 0.01;
  const int n = 100000;
  GaussianStream s4(123);
  double sum1 = 0.0, sum_sq1 = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    const NoiseIncrement inc = sample_increment(nm, dt, s4);
    sum1 += inc.dbeta[0];
    sum_sq1 += inc.dbeta[0] * inc.dbeta[0];
    cross += inc.dbeta[0] * inc.dbeta[1];
  }
  const double mean = sum1 / n;
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(dt / n));
  const double var = sum_sq1 / n - mean * mean;
  CHECK(var == Catch::Approx(dt).epsilon(0.05));
  const double corr = (cross / n) / dt;  // both variances ~ dt
  CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("apply_noise") {
  const Domain dom({1, kPi, 128, 127});
  NoiseSpec spec;
  spec.modes = 4;
  const NoiseModes nm = build_noise_modes(spec, dom.basis());

  Field e1 = dom.eigenmode(0);
  NoiseIncrement zero{std::vector<double>(4, 0.0), 0.01};
  Field z = apply_noise(dom, e1, zero, nm, 1.0);
  CHECK(dom.norm_l2_spectral(z) == 0.0);

  NoiseIncrement one{std::vector<double>{1.0, 0.0, 0.0, 0.0}, 0.01};
  Field zs = apply_noise(dom, e1, one, nm, 0.0);  // sigma = 0
  CHECK(dom.norm_l2_spectral(zs) == 0.0);

  // rho = e1, only dbeta_1 = 1, sigma = mu_1 = 1: the result is e1^2, whose
  // sine coefficients are quadrature integrals of (2/pi) sin^2 against e_k.
  Field out = apply_noise(dom, e1, one, nm, 1.0);
  // the midpoint quadrature of triple-sine integrands carries an O(h^4)
  // error against the exact integrals, ~3e-9 at N = 128
  auto e1sq = [](double x) { return (2.0 / kPi) * std::sin(x) * std::sin(x); };
  for (int k = 1; k <= 9; ++k)
    CHECK(out.spec[k - 1] == Catch::Approx(mode_integral(e1sq, k)).margin(1e-7).epsilon(0));
  // closed form for k = 1: (1/pi) sqrt(2/pi) (2 - 2/(1-4)) = (8/3) / (pi sqrt(pi/2))
  const double closed = (1.0 / kPi) * std::sqrt(2.0 / kPi) * (8.0 / 3.0);
  CHECK(out.spec[0] == Catch::Approx(closed).margin(2e-8).epsilon(0));
}

TEST_CASE("apply_noise is linear in rho") {
  const Domain dom({1, kPi, 64, 63});
  NoiseSpec spec;
  spec.modes = 16;
  const NoiseModes nm = build_noise_modes(spec, dom.basis());
  GaussianStream g(9);
  const NoiseIncrement inc = sample_increment(nm, 1e-3, g);

  Field a = dom.eigenmode(0, 0.7);
  Field b = dom.eigenmode(4, -1.3);
  Field combo = dom.lin_comb(2.0, a, 3.0, b);
  Field lhs = apply_noise(dom, combo, inc, nm, 0.3);
  Field ra = apply_noise(dom, a, inc, nm, 0.3);
  Field rb = apply_noise(dom, b, inc, nm, 0.3);
  Field rhs = dom.lin_comb(2.0, ra, 3.0, rb);
  for (size_t k = 0; k < lhs.spec.size(); ++k)
    CHECK(lhs.spec[k] == Catch::Approx(rhs.spec[k]).margin(1e-12));
}

TEST_CASE("Hilbert-Schmidt norm of B") {
  const Domain dom({1, kPi, 128, 127});
  NoiseSpec spec;
  spec.decay_a = 1.5;
  spec.modes = 16;
  const NoiseModes nm = build_noise_modes(spec, dom.basis());

  Field zero = dom.zero_field();
  CHECK(hs_norm_B(dom, zero, nm, 1.0) == 0.0);

  Field e1 = dom.eigenmode(0);
  const double h1 = hs_norm_B(dom, e1, nm, 1.0);
  const double h2 = hs_norm_B(dom, e1, nm, 2.0);
  CHECK(h2 == Catch::Approx(2.0 * h1).epsilon(1e-12));

  // quadrature oracle: ||P_K(e1 e_k)||_{H^-1}^2 from Simpson coefficients
  double oracle_sq = 0.0;
  for (int i = 0; i < nm.count(); ++i) {
    const int kmode = nm.mode[i] + 1;
    auto prod = [&](double x) {
      return (2.0 / kPi) * std::sin(x) * std::sin(kmode * x);
    };
    double h1sq = 0.0;
    for (int j = 1; j <= 127; ++j) {
      const double c = mode_integral(prod, j);
      h1sq += c * c / (double(j) * j);
    }
    oracle_sq += nm.mu[i] * nm.mu[i] * h1sq;
  }
  CHECK(h1 == Catch::Approx(std::sqrt(oracle_sq)).epsilon(5e-8));
  // frozen regression value for this configuration
  CHECK(h1 == Catch::Approx(0.679697).margin(1e-5));
}

TEST_CASE("HS/Lipschitz ratio is bounded and refinement-stable") {
  const Domain coarse({1, kPi, 64, 48});
  const Domain fine({1, kPi, 128, 48});
  NoiseSpec spec;
  spec.decay_a = 1.5;
  spec.modes = 32;
  const NoiseModes nmc = build_noise_modes(spec, coarse.basis());
  const NoiseModes nmf = build_noise_modes(spec, fine.basis());
  GaussianStream g(77);
  double max_c = 0.0, max_f = 0.0;
  for (int rep = 0; rep < 60; ++rep) {
    Field f = coarse.zero_field();
    for (int k = 0; k < 48; ++k) f.spec[k] = g.normal() * std::pow(coarse.eigenvalue(k), -0.5);
    Field f2 = fine.from_coeffs(f.spec);
    max_c = std::max(max_c, hs_norm_B(coarse, f, nmc, 1.0) / coarse.norm_hminus1(f));
    max_f = std::max(max_f, hs_norm_B(fine, f2, nmf, 1.0) / fine.norm_hminus1(f2));
  }
  CHECK(max_c > 0.0);
  CHECK(std::abs(max_f - max_c) / max_c < 0.10);
}

TEST_CASE("stream derivation separates paths") {
  const std::uint64_t base = 99;
  GaussianStream a(GaussianStream::derive(base, 0));
  GaussianStream b(GaussianStream::derive(base, 1));
  int equal = 0;
  for (int i = 0; i < 100; ++i)
    if (a.normal() == b.normal()) ++equal;
  CHECK(equal == 0);
}
