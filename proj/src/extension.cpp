#include "peakforge/extension.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "peakforge/quad.hpp"

namespace peakforge {

double kappa_s(double s) {
  return std::pow(2.0, 1.0 - 2.0 * s) * gamma_ratio(1.0 - s, s);
}

double normalization_d(int N, double s) {
  if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::BadArgument, "normalization_d: need 0 < s < 1");
  double err = 0.0;
  double mass = radial_integrate(
      [&](double r) { return std::pow(1.0 + r * r, -0.5 * (N + 2.0 * s)); }, N, 200, &err);
  if (err > 1e-10)
    fail(ErrorCode::QuadratureNonConvergent, "normalization_d: radial quadrature did not settle");
  return 1.0 / (unit_sphere_area(N) * mass);
}

double poisson_kernel(int dim, const Point& x, double t, double s) {
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> cache;
  double dns;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, s);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, normalization_d(dim, s)).first;
    dns = it->second;
  }
  return dns * std::pow(t, 2.0 * s) * std::pow(r2 + t * t, -0.5 * (dim + 2.0 * s));
}

// --- ThetaProfile -------------------------------------------------------------

ThetaProfile::ThetaProfile(double s) : s_(s) {
  a_.resize(24);
  c_.resize(24);
  a_[0] = 1.0;
  c_[0] = -std::pow(2.0, 1.0 - 2.0 * s) * gamma_ratio(1.0 - s, s) / (2.0 * s);
  for (int m = 0; m + 1 < 24; ++m) {
    a_[m + 1] = a_[m] / ((2.0 * m + 2.0) * (2.0 * m + 2.0 - 2.0 * s));
    c_[m + 1] = c_[m] / ((2.0 * m + 2.0) * (2.0 * m + 2.0 + 2.0 * s));
  }
  const int n = 16385;
  tab_dx_ = (tab_hi_ - tab_lo_) / (n - 1);
  tab_th_.resize(n);
  tab_ps_.resize(n);
  const double cs = std::pow(2.0, 1.0 - s) / std::tgamma(s);
  for (int i = 0; i < n; ++i) {
    double rho = tab_lo_ + i * tab_dx_;
    double ks = std::cyl_bessel_k(s, rho);
    double ksm = std::cyl_bessel_k(1.0 - s, rho);
    double ksp = std::cyl_bessel_k(1.0 + s, rho);
    tab_th_[i] = cs * std::pow(rho, s) * ks;
    tab_ps_[i] = cs * (std::pow(rho, 1.0 - s) * 0.5 * (ksm + ksp) - s * std::pow(rho, -s) * ks);
  }
}

double ThetaProfile::series_theta(double rho) const {
  double r2 = rho * rho;
  double pa = 1.0, sa = 0.0, sc = 0.0;
  for (int m = 0; m < 24; ++m) {
    sa += a_[m] * pa;
    sc += c_[m] * pa;
    pa *= r2;
  }
  return sa + std::pow(rho, 2.0 * s_) * sc;
}

double ThetaProfile::series_psi(double rho) const {
  double r2 = rho * rho;
  // -rho^{2-2s} sum_{m>=1} 2m a_m rho^{2m-2} - sum_{m>=0} (2s+2m) c_m rho^{2m}
  double pa = 1.0, sa = 0.0, sc = 0.0;
  for (int m = 1; m < 24; ++m) {
    sa += 2.0 * m * a_[m] * pa;
    pa *= r2;
  }
  pa = 1.0;
  for (int m = 0; m < 24; ++m) {
    sc += (2.0 * s_ + 2.0 * m) * c_[m] * pa;
    pa *= r2;
  }
  return -std::pow(rho, 2.0 - 2.0 * s_) * sa - sc;
}

namespace {
inline double cubic_table(const std::vector<double>& tab, double lo, double dx, double x) {
  double u = (x - lo) / dx;
  int i = static_cast<int>(u);
  if (i < 1) i = 1;
  if (i > static_cast<int>(tab.size()) - 3) i = static_cast<int>(tab.size()) - 3;
  double f = u - i;
  double ym = tab[i - 1], y0 = tab[i], y1 = tab[i + 1], y2 = tab[i + 2];
  // Catmull-Rom
  double a0 = -0.5 * ym + 1.5 * y0 - 1.5 * y1 + 0.5 * y2;
  double a1 = ym - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
  double a2 = -0.5 * ym + 0.5 * y1;
  return ((a0 * f + a1) * f + a2) * f + y0;
}
}  // namespace

double ThetaProfile::theta(double rho) const {
  if (rho <= 0.0) return 1.0;
  if (rho < tab_lo_) return series_theta(rho);
  if (rho >= tab_hi_) return 0.0;
  return cubic_table(tab_th_, tab_lo_, tab_dx_, rho);
}

double ThetaProfile::psi(double rho) const {
  if (rho <= 0.0) return kappa_s(s_);
  if (rho < tab_lo_) return series_psi(rho);
  if (rho >= tab_hi_) return 0.0;
  return cubic_table(tab_ps_, tab_lo_, tab_dx_, rho);
}

const ThetaProfile& theta_profile(double s) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<ThetaProfile>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(s);
  if (it == cache.end()) it = cache.emplace(s, std::make_unique<ThetaProfile>(s)).first;
  return *it->second;
}

// --- SpectralExtension1D -------------------------------------------------------

SpectralExtension1D::SpectralExtension1D(const Field& u, double s)
    : modes_(mode_expansion_1d(u)), s_(s), prof_(&theta_profile(s)) {
  k2s_.resize(modes_.k.size());
  for (std::size_t m = 0; m < modes_.k.size(); ++m)
    k2s_[m] = (m == 0) ? 0.0 : std::pow(modes_.k[m], 2.0 * s);
}

void SpectralExtension1D::eval_all(double x, double t, double* val, double* dx, double* wdt) const {
  const std::size_t n = modes_.k.size();
  const double dk = (n > 1) ? modes_.k[1] : 0.0;
  double v = modes_.A[0], gx = 0.0, wt = 0.0;
  double c = std::cos(dk * x), sn = std::sin(dk * x);
  double cm = 1.0, sm = 0.0;  // cos(k_m x), sin(k_m x) by rotation
  for (std::size_t m = 1; m < n; ++m) {
    double cn = cm * c - sm * sn;
    double snn = sm * c + cm * sn;
    cm = cn;
    sm = snn;
    if ((m & 4095u) == 0) {  // resync rotation
      cm = std::cos(modes_.k[m] * x);
      sm = std::sin(modes_.k[m] * x);
    }
    double rho = modes_.k[m] * t;
    if (rho >= 50.0) break;  // theta decays like e^{-rho}
    double amp = modes_.A[m] * cm + modes_.B[m] * sm;
    double damp = modes_.k[m] * (-modes_.A[m] * sm + modes_.B[m] * cm);
    double th = prof_->theta(rho);
    v += amp * th;
    gx += damp * th;
    wt -= amp * k2s_[m] * prof_->psi(rho);
  }
  if (val) *val = v;
  if (dx) *dx = gx;
  if (wdt) *wdt = wt;
}

double SpectralExtension1D::value(double x, double t) const {
  double v;
  eval_all(x, t, &v, nullptr, nullptr);
  return v;
}

double SpectralExtension1D::weighted_dt(double x, double t) const {
  double w;
  eval_all(x, t, nullptr, nullptr, &w);
  return w;
}

void SpectralExtension1D::grad(double x, double t, double* dx, double* dt) const {
  if (!(t > 0.0)) fail(ErrorCode::BadArgument, "SpectralExtension1D::grad needs t > 0");
  double w;
  eval_all(x, t, nullptr, dx, &w);
  if (dt) *dt = w * std::pow(t, 2.0 * s_ - 1.0);
}

// --- Physical-space extension ---------------------------------------------------

namespace {

constexpr int kImages = 128;

// Image sum sum_{|n|<=N} P(y+2Ln, t) plus midpoint-consistent integral tails
// on both sides (the midpoint rule makes the sum-vs-integral mismatch O(N^-3)).
double periodized_kernel(double y, double t, double s, double L, double dns) {
  const double p = 1.0 + 2.0 * s;
  double acc = 0.0;
  for (int n = -kImages; n <= kImages; ++n) {
    double yy = y + 2.0 * L * n;
    acc += std::pow(yy * yy + t * t, -0.5 * p);
  }
  const double E = 2.0 * L * (kImages + 0.5);
  acc += (std::pow(E - y, 1.0 - p) + std::pow(E + y, 1.0 - p)) / ((p - 1.0) * 2.0 * L);
  return dns * std::pow(t, 2.0 * s) * acc;
}

}  // namespace

double extend_grid(const Field& u, const HalfSpacePoint& X, double s) {
  const Grid& g = u.grid;
  if (g.dim != 1) fail(ErrorCode::BadArgument, "extend_grid: 1-D grids only");
  if (X.t < 2.0 * g.spacing)
    fail(ErrorCode::KernelUnderresolved, "extend_grid: t below 2h, kernel not resolvable");
  const double dns = normalization_d(1, s);
  double acc = 0.0;
  for (int j = 0; j < g.points_per_dim; ++j)
    acc += periodized_kernel(X.x[0] - g.coord(j), X.t, s, g.half_length, dns) * u.values[j];
  return acc * g.spacing;
}

std::vector<double> extension_gradient_grid(const Field& u, const HalfSpacePoint& X, double s) {
  const Grid& g = u.grid;
  if (g.dim != 1) fail(ErrorCode::BadArgument, "extension_gradient_grid: 1-D grids only");
  if (X.t < 2.0 * g.spacing)
    fail(ErrorCode::KernelUnderresolved, "extension_gradient_grid: t below 2h");
  const double dns = normalization_d(1, s);
  const double t = X.t, L = g.half_length, p = 1.0 + 2.0 * s;
  const double E = 2.0 * L * (kImages + 0.5);
  const double t2s = std::pow(t, 2.0 * s);
  double gx = 0.0, gt = 0.0;
  for (int j = 0; j < g.points_per_dim; ++j) {
    double y0 = X.x[0] - g.coord(j);
    double sx = 0.0, st = 0.0;
    for (int n = -kImages; n <= kImages; ++n) {
      double y = y0 + 2.0 * L * n;
      double q = y * y + t * t;
      double qp = std::pow(q, -0.5 * p - 1.0);
      sx += -p * y * qp * t2s;
      st += (2.0 * s * std::pow(t, 2.0 * s - 1.0) * q - p * std::pow(t, 2.0 * s + 1.0)) * qp;
    }
    // tail pieces: T(y) = [(E-y)^{1-p} + (E+y)^{1-p}] / ((p-1) 2L)
    double T = (std::pow(E - y0, 1.0 - p) + std::pow(E + y0, 1.0 - p)) / ((p - 1.0) * 2.0 * L);
    double Tp = (std::pow(E - y0, -p) - std::pow(E + y0, -p)) / (2.0 * L);
    sx += t2s * Tp;
    st += 2.0 * s * std::pow(t, 2.0 * s - 1.0) * T;
    gx += dns * sx * u.values[j];
    gt += dns * st * u.values[j];
  }
  return {gx * g.spacing, gt * g.spacing};
}

// --- Closed-form extension -------------------------------------------------------

double extend_closed(const ScalarFn& fn, const HalfSpacePoint& X, double s, double rel_tol) {
  if (!(X.t > 0.0)) fail(ErrorCode::BadArgument, "extend_closed: need t > 0");
  const double dns = normalization_d(1, s);
  const double t = X.t, x = X.x[0];
  // z = x + t sinh(w): P dz = d_{1,s} cosh(w)^{-2s} dw
  auto integrand = [&](double w) {
    double z = x + t * std::sinh(w);
    return dns * std::pow(std::cosh(w), -2.0 * s) * fn(make_point(z));
  };
  double W = 3.0 + std::log(1e8) / std::max(0.2, 2.0 * s) + std::abs(std::asinh((40.0 + std::abs(x)) / t));
  return adaptive_integrate(integrand, -W, W, rel_tol);
}

std::vector<double> extension_gradient_closed(const ScalarFn& fn, const HalfSpacePoint& X, double s,
                                              double rel_tol) {
  if (!(X.t > 0.0)) fail(ErrorCode::BadArgument, "extension_gradient_closed: need t > 0");
  const double dns = normalization_d(1, s);
  const double t = X.t, x = X.x[0], p = 1.0 + 2.0 * s;
  // dP/dx and dP/dt at y = x - z = -t sinh(w); dz = t cosh(w) dw
  auto ix = [&](double w) {
    double sh = std::sinh(w), ch = std::cosh(w);
    double z = x + t * sh;
    double q = t * t * ch * ch;
    double dpdx = -p * (-t * sh) * std::pow(q, -0.5 * p - 1.0) * std::pow(t, 2.0 * s);
    return dpdx * fn(make_point(z)) * t * ch;
  };
  auto it_ = [&](double w) {
    double sh = std::sinh(w), ch = std::cosh(w);
    double z = x + t * sh;
    double q = t * t * ch * ch;
    double dpdt = (2.0 * s * std::pow(t, 2.0 * s - 1.0) * q - p * std::pow(t, 2.0 * s + 1.0)) *
                  std::pow(q, -0.5 * p - 1.0);
    return dpdt * fn(make_point(z)) * t * ch;
  };
  double W = 3.0 + std::log(1e9) / std::max(0.2, 2.0 * s) + std::abs(std::asinh((40.0 + std::abs(x)) / t));
  double gx = dns * adaptive_integrate(ix, -W, W, rel_tol);
  double gt = dns * adaptive_integrate(it_, -W, W, rel_tol);
  return {gx, gt};
}

// --- DtN residual ------------------------------------------------------------------

namespace {

// Fit g(t) = g0 + sum_j c_j t^{p_j} through the sampled values and return g0.
double power_law_extrapolate(const std::vector<double>& ts, const std::vector<double>& gs,
                             const std::vector<double>& powers) {
  int n = static_cast<int>(ts.size());
  int m = static_cast<int>(powers.size()) + 1;
  if (m > n) m = n;
  // Normal equations of the (possibly overdetermined) Vandermonde fit.
  std::vector<double> Aty(m, 0.0), AtA(m * m, 0.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(m);
    row[0] = 1.0;
    for (int j = 1; j < m; ++j) row[j] = std::pow(ts[i], powers[j - 1]);
    for (int a = 0; a < m; ++a) {
      Aty[a] += row[a] * gs[i];
      for (int b = 0; b < m; ++b) AtA[a * m + b] += row[a] * row[b];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(AtA[r * m + c]) > std::abs(AtA[piv * m + c])) piv = r;
    for (int k = 0; k < m; ++k) std::swap(AtA[c * m + k], AtA[piv * m + k]);
    std::swap(Aty[c], Aty[piv]);
    double d = AtA[c * m + c];
    if (std::abs(d) < 1e-300) fail(ErrorCode::ExtrapolationUnstable, "degenerate extrapolation system");
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      double f = AtA[r * m + c] / d;
      for (int k = 0; k < m; ++k) AtA[r * m + k] -= f * AtA[c * m + k];
      Aty[r] -= f * Aty[c];
    }
  }
  return Aty[0] / AtA[0];
}

}  // namespace

double dtn_residual(const Field& u, double x, double s, const std::vector<double>& t_seq) {
  const Grid& g = u.grid;
  if (g.dim != 1) fail(ErrorCode::BadArgument, "dtn_residual: 1-D fields only");
  if (t_seq.size() < 2) fail(ErrorCode::BadArgument, "dtn_residual: need at least two t values");
  for (std::size_t i = 1; i < t_seq.size(); ++i)
    if (t_seq[i] >= t_seq[i - 1]) fail(ErrorCode::BadArgument, "dtn_residual: t_seq must decrease");
  if (t_seq.back() < 2.0 * g.spacing)
    fail(ErrorCode::KernelUnderresolved, "dtn_residual: min t below 2h");

  std::vector<double> gs;
  gs.reserve(t_seq.size());
  for (double t : t_seq) {
    auto grad = extension_gradient_grid(u, HalfSpacePoint{make_point(x), t}, s);
    gs.push_back(std::pow(t, 1.0 - 2.0 * s) * grad[1]);
  }
  // Successive fits with more correction exponents; instability check on the tail.
  std::vector<double> powers = {2.0 - 2.0 * s, 2.0, 2.0 + 2.0 * s};
  std::vector<double> est;
  for (int m = 0; m <= static_cast<int>(powers.size()); ++m) {
    std::vector<double> pw(powers.begin(), powers.begin() + m);
    if (static_cast<int>(t_seq.size()) < m + 1) break;
    est.push_back(power_law_extrapolate(t_seq, gs, pw));
  }
  if (est.size() >= 3) {
    double d1 = std::abs(est[est.size() - 2] - est[est.size() - 3]);
    double d2 = std::abs(est[est.size() - 1] - est[est.size() - 2]);
    if (d2 > 4.0 * d1 && d2 > 1e-10 * std::abs(est.back()))
      fail(ErrorCode::ExtrapolationUnstable, "dtn_residual: extrapolants diverge");
  }
  double limit = -est.back() / kappa_s(s);

  Field lap = frac_laplacian_spectral(u, s);
  double lap_x = mode_expansion_1d(lap).eval(x);
  return limit - lap_x;
}

// --- Half-sphere quadrature -----------------------------------------------------------

HalfSphereQuad half_sphere_quadrature(int dim, const Point& xi, double rho, int refinement) {
  if (!(rho > 0.0)) fail(ErrorCode::BadArgument, "half_sphere_quadrature: rho must be positive");
  if (refinement < 8) refinement = 8;
  HalfSphereQuad q;
  q.dim = dim;
  q.center = xi;
  q.rho = rho;
  const GaussRule& gl = gauss_legendre(refinement);
  if (dim == 1) {
    // Half circle in R^2: alpha in (0, pi), graded toward both endpoints.
    for (int i = 0; i < refinement; ++i) {
      double v = 0.5 * (gl.nodes[i] + 1.0);
      double alpha = M_PI * graded_map(v);
      double w = 0.5 * gl.weights[i] * M_PI * graded_map_deriv(v) * rho;
      HalfSpacePoint p;
      p.x = make_point(xi[0] + rho * std::cos(alpha));
      p.t = rho * std::sin(alpha);
      q.nodes.push_back(p);
      q.weights.push_back(w);
    }
  } else if (dim == 2) {
    // Hemisphere in R^3: t = rho cos(phi), |x - xi| = rho sin(phi).
    int nphi = refinement, nbeta = 2 * refinement;
    for (int i = 0; i < nphi; ++i) {
      double v = 0.5 * (gl.nodes[i] + 1.0);
      double phi = 0.5 * M_PI * graded_map(v);
      double wphi = 0.5 * gl.weights[i] * 0.5 * M_PI * graded_map_deriv(v);
      for (int j = 0; j < nbeta; ++j) {
        double beta = 2.0 * M_PI * j / nbeta;
        HalfSpacePoint p;
        p.x = make_point(xi[0] + rho * std::sin(phi) * std::cos(beta),
                         xi[1] + rho * std::sin(phi) * std::sin(beta));
        p.t = rho * std::cos(phi);
        q.nodes.push_back(p);
        q.weights.push_back(rho * rho * std::sin(phi) * wphi * (2.0 * M_PI / nbeta));
      }
    }
  } else {
    fail(ErrorCode::BadArgument, "half_sphere_quadrature: dim must be 1 or 2");
  }
  return q;
}

}  // namespace peakforge
