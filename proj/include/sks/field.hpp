// Field representations on the Dirichlet box and the spectral calculus used
// everywhere else: sine analysis/synthesis at native and 2x-oversampled
// resolution, mixed sine/cosine transforms for gradients and divergences,
// the L^p / H^-1 norms and the (-Delta)^{-1} dual pairing.
//
// Grid convention: the native grid holds the N^d cell midpoints
// x_i = (i + 1/2) L/N, and all quadrature is the midpoint rule h^d * sum.
// On this grid the rule integrates constants exactly and the DST-II/DST-III
// pair diagonalizes the sine basis exactly, so ||e_k||_{L^2} = 1 and
// Parseval hold to rounding.  Nonlinear terms are formed on the 2x midpoint
// grid and projected back (dealiasing).
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sks/domain.hpp"
#include "sks/transforms.hpp"

namespace sks {

struct Field {
  std::vector<double> grid;  // N^d midpoint values, row-major (x slow)
  std::vector<double> spec;  // K^d sine coefficients, row-major (j slow)
  bool grid_ok = false;
  bool spec_ok = false;
};

struct GradField {
  std::vector<std::vector<double>> comp;  // d arrays of N^d midpoint values
};

inline double sup_magnitude(const GradField& g) {
  double best = 0.0;
  const size_t n = g.comp.empty() ? 0 : g.comp[0].size();
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& c : g.comp) s += c[i] * c[i];
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

namespace detail {
inline void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::runtime_error(std::string("non-finite value in ") + what);
}
}  // namespace detail

class Domain {
 public:
  explicit Domain(DomainSpec spec) : spec_(spec), basis_(build_basis(spec)) {
    const int d = spec_.dim;
    native_ = Level(spec_.grid_n, spec_.length);
    over_ = Level(2 * spec_.grid_n, spec_.length);
    for (Level* lv : {&native_, &over_}) {
      const int n = lv->points;
      if (d == 1) {
        lv->sine_an = R2RPlan({n}, {FFTW_RODFT10});
        lv->sine_syn = R2RPlan({n}, {FFTW_RODFT01});
        lv->cos_an[0] = R2RPlan({n}, {FFTW_REDFT10});
        lv->cos_syn[0] = R2RPlan({n}, {FFTW_REDFT01});
      } else {
        lv->sine_an = R2RPlan({n, n}, {FFTW_RODFT10, FFTW_RODFT10});
        lv->sine_syn = R2RPlan({n, n}, {FFTW_RODFT01, FFTW_RODFT01});
        lv->cos_an[0] = R2RPlan({n, n}, {FFTW_REDFT10, FFTW_RODFT10});
        lv->cos_syn[0] = R2RPlan({n, n}, {FFTW_REDFT01, FFTW_RODFT01});
        lv->cos_an[1] = R2RPlan({n, n}, {FFTW_RODFT10, FFTW_REDFT10});
        lv->cos_syn[1] = R2RPlan({n, n}, {FFTW_RODFT01, FFTW_REDFT01});
      }
    }
  }

  const DomainSpec& spec() const { return spec_; }
  const Basis& basis() const { return basis_; }
  int dim() const { return spec_.dim; }
  double length() const { return spec_.length; }
  int modes_per_axis() const { return spec_.trunc_k; }
  int mode_count() const { return basis_.mode_count(); }
  int grid_per_axis() const { return spec_.grid_n; }
  size_t grid_size() const { return pow_dim(grid_per_axis()); }
  size_t spec_size() const { return pow_dim(modes_per_axis()); }
  double cell() const { return native_.h; }
  double grid_coord(int i) const { return (i + 0.5) * native_.h; }
  double eigenvalue(int flat) const { return basis_.eigenvalues[flat]; }

  // ---- field factories -----------------------------------------------

  Field zero_field() const {
    Field f;
    f.spec.assign(spec_size(), 0.0);
    f.spec_ok = true;
    return f;
  }

  Field from_coeffs(std::vector<double> coeffs) const {
    if (coeffs.size() != spec_size())
      throw std::invalid_argument("from_coeffs: wrong coefficient count");
    Field f;
    f.spec = std::move(coeffs);
    f.spec_ok = true;
    return f;
  }

  Field eigenmode(int flat, double amplitude = 1.0) const {
    Field f = zero_field();
    f.spec.at(flat) = amplitude;
    return f;
  }

  // Samples the function on the native midpoint grid and projects; the grid
  // values are re-synthesized so both representations describe P_K f even
  // when K < N-1.
  Field from_function(const std::function<double(double)>& f1) const {
    if (dim() != 1) throw std::invalid_argument("from_function: 1d overload on 2d domain");
    Field f;
    f.grid.resize(grid_size());
    for (int i = 0; i < grid_per_axis(); ++i) f.grid[i] = f1(grid_coord(i));
    f.grid_ok = true;
    ensure_spec(f);
    f.grid_ok = false;
    ensure_grid(f);
    return f;
  }

  Field from_function(const std::function<double(double, double)>& f2) const {
    if (dim() != 2) throw std::invalid_argument("from_function: 2d overload on 1d domain");
    Field f;
    const int m = grid_per_axis();
    f.grid.resize(grid_size());
    for (int ix = 0; ix < m; ++ix)
      for (int iy = 0; iy < m; ++iy)
        f.grid[static_cast<size_t>(ix) * m + iy] = f2(grid_coord(ix), grid_coord(iy));
    f.grid_ok = true;
    ensure_spec(f);
    f.grid_ok = false;
    ensure_grid(f);
    return f;
  }

  // ---- representation management ---------------------------------------

  void ensure_spec(Field& f) const {
    if (f.spec_ok) return;
    if (!f.grid_ok) throw std::invalid_argument("field has no valid representation");
    detail::check_finite(f.grid, "grid values");
    f.spec.assign(spec_size(), 0.0);
    sine_analyze(native_, f.grid.data(), f.spec.data());
    f.spec_ok = true;
  }

  void ensure_grid(Field& f) const {
    if (f.grid_ok) return;
    if (!f.spec_ok) throw std::invalid_argument("field has no valid representation");
    detail::check_finite(f.spec, "spectral coefficients");
    f.grid.assign(grid_size(), 0.0);
    sine_synth(native_, f.spec.data(), f.grid.data());
    f.grid_ok = true;
  }

  Field to_spectral(Field f) const {
    ensure_spec(f);
    return f;
  }

  Field to_grid(Field f) const {
    ensure_grid(f);
    return f;
  }

  // ---- norms and pairings ------------------------------------------------

  // (int |f|^p dx)^{1/p} by the midpoint rule on the native grid.
  double norm_lp(Field& f, double p) const {
    if (p < 1.0) throw std::domain_error("norm_lp: p must be >= 1");
    ensure_grid(f);
    double s = 0.0;
    for (double v : f.grid) s += std::pow(std::abs(v), p);
    return std::pow(s * cell_volume(native_), 1.0 / p);
  }
  double norm_lp(const Field& f, double p) const {
    Field tmp = f;
    return norm_lp(tmp, p);
  }

  double norm_l2_spectral(const Field& f) const {
    require_spec(f);
    double s = 0.0;
    for (double a : f.spec) s += a * a;
    return std::sqrt(s);
  }

  // ||f||_{H^-1} = || (-Delta)^{-1/2} f ||_{L^2} = sqrt(sum a_k^2 / lambda_k).
  double norm_hminus1(const Field& f) const {
    require_spec(f);
    double s = 0.0;
    for (size_t k = 0; k < f.spec.size(); ++k) s += f.spec[k] * f.spec[k] / basis_.eigenvalues[k];
    return std::sqrt(s);
  }

  // int ((-Delta)^{-1} u) w dx = sum u_k w_k / lambda_k.
  double dual_pairing(const Field& u, const Field& w) const {
    require_spec(u);
    require_spec(w);
    double s = 0.0;
    for (size_t k = 0; k < u.spec.size(); ++k) s += u.spec[k] * w.spec[k] / basis_.eigenvalues[k];
    return s;
  }

  double integral(Field& f) const {
    ensure_grid(f);
    double s = 0.0;
    for (double v : f.grid) s += v;
    return s * cell_volume(native_);
  }

  double min_grid(Field& f) const {
    ensure_grid(f);
    double m = std::numeric_limits<double>::infinity();
    for (double v : f.grid) m = std::min(m, v);
    return m;
  }

  double max_abs_grid(Field& f) const {
    ensure_grid(f);
    double m = 0.0;
    for (double v : f.grid) m = std::max(m, std::abs(v));
    return m;
  }

  // ---- linear spectral calculus ----------------------------------------

  Field laplacian(Field f) const {
    require_spec(f);
    Field out = zero_field();
    for (size_t k = 0; k < f.spec.size(); ++k) out.spec[k] = -basis_.eigenvalues[k] * f.spec[k];
    return out;
  }

  Field inv_laplacian(Field f) const {
    require_spec(f);
    Field out = zero_field();
    for (size_t k = 0; k < f.spec.size(); ++k) out.spec[k] = f.spec[k] / basis_.eigenvalues[k];
    return out;
  }

  // Spectral gradient evaluated on the native midpoint grid.
  GradField gradient(const Field& f) const {
    require_spec(f);
    detail::check_finite(f.spec, "spectral coefficients");
    GradField g;
    g.comp.resize(dim());
    std::vector<double> dcoef(spec_size());
    for (int a = 0; a < dim(); ++a) {
      derivative_coeffs(f.spec, a, dcoef);
      g.comp[a].assign(grid_size(), 0.0);
      cos_synth_axis(native_, a, dcoef.data(), g.comp[a].data());
    }
    return g;
  }

  // || |rho|^{m-1} grad rho ||_{L^2} by the midpoint rule on the
  // oversampled grid.
  double weighted_gradient_l2(const Field& rho, double m) const {
    require_spec(rho);
    std::vector<double> rg(pow_dim(over_.points), 0.0);
    sine_synth(over_, rho.spec.data(), rg.data());
    std::vector<double> dcoef(spec_size());
    std::vector<double> dbuf(rg.size());
    double total = 0.0;
    for (int a = 0; a < dim(); ++a) {
      derivative_coeffs(rho.spec, a, dcoef);
      cos_synth_axis(over_, a, dcoef.data(), dbuf.data());
      for (size_t i = 0; i < rg.size(); ++i) {
        const double w = (m == 1.0 ? 1.0 : std::pow(std::abs(rg[i]), m - 1.0)) * dbuf[i];
        total += w * w;
      }
    }
    return std::sqrt(total * cell_volume(over_));
  }

  // ---- pointwise nonlinearities (dealiased) ------------------------------

  // P_K [ op(f) ] with op applied on the 2x oversampled grid.
  Field project_pointwise(const Field& f, const std::function<double(double)>& op) const {
    require_spec(f);
    std::vector<double> g(pow_dim(over_.points), 0.0);
    sine_synth(over_, f.spec.data(), g.data());
    for (double& v : g) v = op(v);
    Field out = zero_field();
    sine_analyze(over_, g.data(), out.spec.data());
    return out;
  }

  // P_K [ a * b ] with the product formed on the oversampled grid.
  Field multiply_dealiased(const Field& a, const Field& b) const {
    require_spec(a);
    require_spec(b);
    std::vector<double> ga(pow_dim(over_.points), 0.0), gb(ga.size(), 0.0);
    sine_synth(over_, a.spec.data(), ga.data());
    sine_synth(over_, b.spec.data(), gb.data());
    for (size_t i = 0; i < ga.size(); ++i) ga[i] *= gb[i];
    Field out = zero_field();
    sine_analyze(over_, ga.data(), out.spec.data());
    return out;
  }

  // Pointwise product on the native grid (no dealiasing); keeps grid values
  // exact, which the Euler noise increment relies on.
  Field multiply_native(Field& a, Field& b) const {
    ensure_grid(a);
    ensure_grid(b);
    Field out;
    out.grid.resize(grid_size());
    for (size_t i = 0; i < out.grid.size(); ++i) out.grid[i] = a.grid[i] * b.grid[i];
    out.grid_ok = true;
    ensure_spec(out);
    return out;
  }

  // P_K [ div (a grad c) ]: the transported-density building block of the
  // chemotactic term, through the weak form d_k = -(k_a pi/L) <a d_a c>_cos
  // per axis on the oversampled grid.
  Field divergence_of_gradient_product(const Field& a, const Field& c) const {
    require_spec(a);
    require_spec(c);
    std::vector<double> ag(pow_dim(over_.points), 0.0);
    sine_synth(over_, a.spec.data(), ag.data());
    std::vector<double> dcoef(spec_size()), wq(spec_size());
    std::vector<double> buf(ag.size());
    Field out = zero_field();
    const double fac = kPi / length();
    const int K = modes_per_axis();
    for (int ax = 0; ax < dim(); ++ax) {
      derivative_coeffs(c.spec, ax, dcoef);
      cos_synth_axis(over_, ax, dcoef.data(), buf.data());
      for (size_t i = 0; i < buf.size(); ++i) buf[i] *= ag[i];
      cos_analyze_axis(over_, ax, buf.data(), wq.data());
      if (dim() == 1) {
        for (int k = 1; k <= K; ++k) out.spec[k - 1] -= fac * k * wq[k - 1];
      } else {
        for (int j = 1; j <= K; ++j)
          for (int k = 1; k <= K; ++k) {
            const int mult = (ax == 0) ? j : k;
            out.spec[(j - 1) * K + (k - 1)] -= fac * mult * wq[(j - 1) * K + (k - 1)];
          }
      }
    }
    return out;
  }

  // ---- linear combinations ----------------------------------------------

  Field lin_comb(double alpha, const Field& x, double beta, const Field& y) const {
    require_spec(x);
    require_spec(y);
    Field out = zero_field();
    for (size_t k = 0; k < out.spec.size(); ++k) out.spec[k] = alpha * x.spec[k] + beta * y.spec[k];
    return out;
  }

  Field scaled(double alpha, const Field& x) const {
    require_spec(x);
    Field out = zero_field();
    for (size_t k = 0; k < out.spec.size(); ++k) out.spec[k] = alpha * x.spec[k];
    return out;
  }

 private:
  struct Level {
    Level() = default;
    Level(int points_, double L) : points(points_), h(L / points_) {}
    int points = 0;  // midpoints per axis
    double h = 0.0;
    R2RPlan sine_an, sine_syn;
    R2RPlan cos_an[2], cos_syn[2];
  };

  size_t pow_dim(int n) const {
    size_t s = static_cast<size_t>(n);
    return dim() == 1 ? s : s * s;
  }

  double cell_volume(const Level& lv) const { return dim() == 1 ? lv.h : lv.h * lv.h; }

  void require_spec(const Field& f) const {
    if (!f.spec_ok) throw std::invalid_argument("field: spectral representation required");
    if (f.spec.size() != spec_size()) throw std::invalid_argument("field: wrong spectral size");
  }

  double synth_scale(const Level&) const {
    const double s = std::sqrt(2.0 / length()) / 2.0;
    return dim() == 1 ? s : s * s;
  }

  double analyze_scale(const Level& lv) const {
    const double s = std::sqrt(2.0 / length()) * lv.h / 2.0;
    return dim() == 1 ? s : s * s;
  }

  // Scatter K^d coefficients into an n^d transform buffer; sine modes sit at
  // index (mode - 1), cosine modes at index (mode), both per axis.
  void scatter(const Level& lv, const double* coeffs, double* buf, int cos_axis) const {
    const int K = modes_per_axis();
    const int n = lv.points;
    std::fill(buf, buf + pow_dim(n), 0.0);
    if (dim() == 1) {
      const int off = cos_axis == 0 ? 1 : 0;
      for (int k = 0; k < K; ++k) buf[k + off] = coeffs[k];
      return;
    }
    const int offx = cos_axis == 0 ? 1 : 0;
    const int offy = cos_axis == 1 ? 1 : 0;
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        buf[static_cast<size_t>(j + offx) * n + (k + offy)] = coeffs[static_cast<size_t>(j) * K + k];
  }

  // Gather the low K^d block from an n^d transform output.
  void gather(const Level& lv, const double* buf, double* coeffs, int cos_axis, double scale) const {
    const int K = modes_per_axis();
    const int n = lv.points;
    if (dim() == 1) {
      const int off = cos_axis == 0 ? 1 : 0;
      for (int k = 0; k < K; ++k) coeffs[k] = scale * buf[k + off];
      return;
    }
    const int offx = cos_axis == 0 ? 1 : 0;
    const int offy = cos_axis == 1 ? 1 : 0;
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        coeffs[static_cast<size_t>(j) * K + k] =
            scale * buf[static_cast<size_t>(j + offx) * n + (k + offy)];
  }

  // K^d coefficients -> n^d midpoint values.
  void sine_synth(const Level& lv, const double* coeffs, double* grid) const {
    std::vector<double> in(pow_dim(lv.points));
    scatter(lv, coeffs, in.data(), -1);
    lv.sine_syn.execute(in.data(), grid);
    const double s = synth_scale(lv);
    const size_t n = pow_dim(lv.points);
    for (size_t i = 0; i < n; ++i) grid[i] *= s;
  }

  // n^d midpoint values -> K^d coefficients (projection).
  void sine_analyze(const Level& lv, const double* grid, double* coeffs) const {
    std::vector<double> out(pow_dim(lv.points));
    lv.sine_an.execute(grid, out.data());
    gather(lv, out.data(), coeffs, -1, analyze_scale(lv));
  }

  // Per-axis derivative in coefficient space: sine mode k along `axis` maps
  // to cosine mode k with factor k*pi/L; other axes stay sine.
  void derivative_coeffs(const std::vector<double>& spec, int axis, std::vector<double>& out) const {
    const int K = modes_per_axis();
    const double fac = kPi / length();
    out.resize(spec.size());
    if (dim() == 1) {
      for (int k = 1; k <= K; ++k) out[k - 1] = fac * k * spec[k - 1];
      return;
    }
    for (int j = 1; j <= K; ++j)
      for (int k = 1; k <= K; ++k) {
        const int mult = (axis == 0) ? j : k;
        out[(j - 1) * K + (k - 1)] = fac * mult * spec[(j - 1) * K + (k - 1)];
      }
  }

  // Coefficients (cosine along `axis`, sine along the rest, sine-mode
  // numbering) -> values on the midpoint grid.
  void cos_synth_axis(const Level& lv, int axis, const double* coeffs, double* out) const {
    std::vector<double> in(pow_dim(lv.points));
    scatter(lv, coeffs, in.data(), axis);
    lv.cos_syn[axis].execute(in.data(), out);
    const double s = synth_scale(lv);
    const size_t n = pow_dim(lv.points);
    for (size_t i = 0; i < n; ++i) out[i] *= s;
  }

  // Midpoint values -> coefficients (cosine along `axis`), truncated to K.
  void cos_analyze_axis(const Level& lv, int axis, const double* vals, double* coeffs) const {
    std::vector<double> out(pow_dim(lv.points));
    lv.cos_an[axis].execute(vals, out.data());
    gather(lv, out.data(), coeffs, axis, analyze_scale(lv));
  }

  DomainSpec spec_;
  Basis basis_;
  Level native_;
  Level over_;
};

}  // namespace sks
