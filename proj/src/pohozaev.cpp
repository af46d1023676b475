#include "peakforge/pohozaev.hpp"

#include <cmath>
#include <functional>

#include "peakforge/norms.hpp"
#include "peakforge/quad.hpp"

namespace peakforge {

namespace {

// Stable per-node extension data: value, x-derivative, and the weighted
// t-derivative Q = t^{1-2s} dt u~ (smooth down to the equator).
struct ExtEval {
  double val = 0.0;
  double P = 0.0;
  double Q = 0.0;
};

using ExtFn = std::function<ExtEval(double x, double t)>;

ExtFn wrap_spectral(const SpectralExtension1D& ext) {
  return [&ext](double x, double t) {
    ExtEval e;
    ext.eval_all(x, t, &e.val, &e.P, &e.Q);
    return e;
  };
}

ExtFn wrap_closed(const ScalarFn& fn, double s, double tol) {
  return [&fn, s, tol](double x, double t) {
    ExtEval e;
    HalfSpacePoint X{make_point(x), t};
    e.val = extend_closed(fn, X, s, tol);
    auto g = extension_gradient_closed(fn, X, s, tol);
    e.P = g[0];
    e.Q = std::pow(t, 1.0 - 2.0 * s) * g[1];
    return e;
  };
}

// All hemisphere integrals needed by either identity, assembled in one sweep.
// Integrands are expressed in (P, Q) with explicit powers of t so that every
// rule-A integrand vanishes algebraically at the equator; the t^{2s-1} Q_u Q_w
// piece is integrated separately with an exact power-law substitution.
struct HemiTerms {
  double S1 = 0.0;       // t^{1-2s} dnu(u) <X-xi, grad w>
  double S2 = 0.0;       // t^{1-2s} dnu(w) <X-xi, grad u>
  double S3a = 0.0;      // t^{1-2s} dnu(u) w
  double S3b = 0.0;      // t^{1-2s} dnu(w) u
  double GG = 0.0;       // t^{1-2s} <grad u, grad w>
  double GG_nu = 0.0;    // same, weighted by nu_x
  double MIX_uw = 0.0;   // t^{1-2s} dx(u) dnu(w)
  double MIX_wu = 0.0;   // t^{1-2s} dx(w) dnu(u)
  double EN = 0.0;       // t^{1-2s}(|grad u|^2 + |grad w|^2)
};

HemiTerms hemisphere_terms(const Point& center, double rho, const ExtFn& eu, const ExtFn& ew,
                           double s, int order) {
  HemiTerms T;
  const double xi = center[0];

  // Rule A: graded angular nodes, integrands carrying t^{1-2s} or better.
  HalfSphereQuad quad = half_sphere_quadrature(1, center, rho, order);
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double x = quad.nodes[i].x[0];
    const double t = quad.nodes[i].t;
    const double w = quad.weights[i];
    const double nx = (x - xi) / rho;
    const double nt = t / rho;
    const double w13 = std::pow(t, 1.0 - 2.0 * s);
    const double t2s = std::pow(t, 2.0 * s);
    ExtEval U = eu(x, t);
    ExtEval W = ew(x, t);

    double NU_u = w13 * nx * U.P + nt * U.Q;  // t^{1-2s} dnu(u)
    double NU_w = w13 * nx * W.P + nt * W.Q;
    double XG_u = (x - xi) * U.P + t2s * U.Q;  // <X - (xi,0), grad u>
    double XG_w = (x - xi) * W.P + t2s * W.Q;

    T.S1 += w * NU_u * XG_w;
    T.S2 += w * NU_w * XG_u;
    T.S3a += w * NU_u * W.val;
    T.S3b += w * NU_w * U.val;
    T.GG += w * w13 * U.P * W.P;
    T.GG_nu += w * w13 * U.P * W.P * nx;
    T.MIX_uw += w * (w13 * nx * U.P * W.P + nt * U.P * W.Q);
    T.MIX_wu += w * (w13 * nx * W.P * U.P + nt * W.P * U.Q);
    T.EN += w * w13 * (U.P * U.P + W.P * W.P);
  }

  // Rule B: the t^{2s-1} Q_u Q_w piece of <grad u, grad w> (and the energy).
  // integral over the half circle: rho^{2s} int_0^pi sin^{2s-1}(a) F(a) da.
  const int nB = std::max(16, order / 2);
  const GaussRule& gl = gauss_legendre(nB);
  const double q = 1.0 / (2.0 * s);
  auto accumulate_half = [&](bool left) {
    for (int i = 0; i < nB; ++i) {
      double v = 0.5 * (gl.nodes[i] + 1.0);
      double wv = 0.5 * gl.weights[i];
      double alpha, jac;
      if (s < 0.5) {
        alpha = 0.5 * M_PI * std::pow(v, q);
        jac = std::pow(0.5 * M_PI, 2.0 * s) / (2.0 * s);
        jac *= std::pow(std::sin(alpha) / alpha, 2.0 * s - 1.0);
      } else {
        // integrand is regular; plain graded map
        alpha = 0.5 * M_PI * graded_map(v);
        jac = 0.5 * M_PI * graded_map_deriv(v) * std::pow(std::sin(alpha), 2.0 * s - 1.0);
      }
      double a = left ? alpha : M_PI - alpha;
      double x = xi + rho * std::cos(a);
      double t = rho * std::sin(a);
      double nx = std::cos(a);
      ExtEval U = eu(x, t);
      ExtEval W = ew(x, t);
      double wgt = wv * jac * std::pow(rho, 2.0 * s);
      T.GG += wgt * U.Q * W.Q;
      T.GG_nu += wgt * U.Q * W.Q * nx;
      T.EN += wgt * (U.Q * U.Q + W.Q * W.Q);
    }
  };
  accumulate_half(true);
  accumulate_half(false);
  return T;
}

// Volume sums over the ball (sharp indicator, grid quadrature).
struct BallSums {
  double dmV_uw = 0.0;       // dV/dx_m u w
  double xgradV_uw = 0.0;    // <x-xi, grad V> u w
  double V_uw = 0.0;         // V u w
  double up_w = 0.0;         // (u)_+^{p-eps} w
  double up1 = 0.0;          // (u)_+^{p+1-eps}
};

BallSums ball_sums(const Field& u, const Field& w, const Point& center, double rho, int axis,
                   const IdentityContext& ctx) {
  // Cell-based quadrature over the ball: interior cells carry weight h^N and
  // the cells straddling the boundary carry their exact overlap fraction
  // (1-D), which keeps the boundary error at O(h^2) without any smoothing.
  const Grid& g = u.grid;
  BallSums B;
  const double pm = ctx.p_s - ctx.eps;
  const double h = g.spacing;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point x = g.point(i);
    double r = norm2(sub(x, center), g.dim);
    double wgt;
    if (g.dim == 1) {
      double cell_lo = r - 0.5 * h, cell_hi = r + 0.5 * h;
      if (cell_lo >= rho) continue;
      wgt = (cell_hi <= rho) ? 1.0 : (rho - cell_lo) / h;
    } else {
      if (r > rho) continue;
      wgt = 1.0;
    }
    double ui = u.values[i], wi = w.values[i];
    Point gv = potential_grad(x, ctx.V);
    double vv = potential_value(x, ctx.V);
    double up = ui > 0.0 ? std::pow(ui, pm) : 0.0;
    B.dmV_uw += wgt * gv[axis] * ui * wi;
    B.xgradV_uw += wgt * dot(sub(x, center), gv, g.dim) * ui * wi;
    B.V_uw += wgt * vv * ui * wi;
    B.up_w += wgt * up * wi;
    B.up1 += wgt * up * std::max(ui, 0.0);
  }
  double hN = std::pow(g.spacing, g.dim);
  B.dmV_uw *= hN;
  B.xgradV_uw *= hN;
  B.V_uw *= hN;
  B.up_w *= hN;
  B.up1 *= hN;
  return B;
}

struct SphereVals {
  // N = 1 sphere is the endpoint pair {xi - rho, xi + rho}; nu_x = -1, +1.
  double u_p = 0.0, u_m = 0.0, w_p = 0.0, w_m = 0.0, V_p = 0.0, V_m = 0.0;
  double signed_sum(double gp, double gm) const { return gp - gm; }   // weight nu_m
  double radial_sum(double gp, double gm) const { return gp + gm; }   // weight <x-xi,nu>/rho
};

void require_geometry(const Grid& g, const Point& center, double rho) {
  if (g.dim != 1) fail(ErrorCode::BadArgument, "pohozaev grid route is 1-D");
  if (rho < 8.0 * g.spacing) fail(ErrorCode::BadArgument, "pohozaev: rho below 8h");
  if (!g.contains_ball(center, rho))
    fail(ErrorCode::BallOutsideGrid, "pohozaev: ball B_rho(center) sticks out of the grid");
}

double positive_pow(double v, double p) { return v > 0.0 ? std::pow(v, p) : 0.0; }

}  // namespace

double IdentityReport::term_scale() const {
  double m = 0.0;
  for (const auto& kv : terms)
    if (kv.first[0] != 'X') m = std::max(m, std::abs(kv.second));
  return m;
}

void IdentityReport::finalize() {
  lhs = 0.0;
  rhs = 0.0;
  for (const auto& kv : terms) {
    if (kv.first.rfind("L:", 0) == 0) lhs += kv.second;
    if (kv.first.rfind("R:", 0) == 0) rhs += kv.second;
  }
  residual = lhs - rhs;
}

IdentityReport translation_identity(const Field& u, const Field& w, const Point& center,
                                    double rho, int axis, const IdentityContext& ctx) {
  check_same_grid(u, w);
  require_geometry(u.grid, center, rho);
  const bool self = (u.values == w.values);
  const double kappa = kappa_s(ctx.s);
  const double pm = ctx.p_s - ctx.eps;

  SpectralExtension1D eu(u, ctx.s);
  SpectralExtension1D ew_store = self ? eu : SpectralExtension1D(w, ctx.s);
  const SpectralExtension1D& ew = self ? eu : ew_store;
  HemiTerms H = hemisphere_terms(center, rho, wrap_spectral(eu), wrap_spectral(ew), ctx.s,
                                 ctx.hemisphere_order);
  BallSums B = ball_sums(u, w, center, rho, axis, ctx);

  SphereVals S;
  S.u_p = eu.trace(center[0] + rho);
  S.u_m = eu.trace(center[0] - rho);
  S.w_p = ew.trace(center[0] + rho);
  S.w_m = ew.trace(center[0] - rho);
  S.V_p = potential_value(make_point(center[0] + rho), ctx.V);
  S.V_m = potential_value(make_point(center[0] - rho), ctx.V);

  IdentityReport rep;
  rep.center = center;
  rep.rho = rho;
  rep.kind = "translation[" + std::to_string(axis) + "]";
  rep.two_field = !self;

  if (self) {
    // (1/2) int dV/dxm u^2 = (1/k)[ (1/2) oint t^{1-2s}|grad u|^2 nu_m
    //   - oint t^{1-2s} dx(u) dnu(u) ] + (1/2) oint V u^2 nu_m
    //   - 1/(p+1-eps) oint (u)_+^{p+1-eps} nu_m
    double lhs = 0.5 * B.dmV_uw;
    double grad2_nu = H.GG_nu / kappa;
    double mixed = H.MIX_uw / kappa;
    double sphereV = 0.5 * S.signed_sum(S.V_p * S.u_p * S.u_p, S.V_m * S.u_m * S.u_m);
    double sphereNL = S.signed_sum(positive_pow(S.u_p, pm + 1.0), positive_pow(S.u_m, pm + 1.0)) /
                      (pm + 1.0);
    rep.terms["L:vol_dmV_u2(x1/2)"] = lhs;
    rep.terms["R:hemi_grad2_num(x1/2)"] = 0.5 * grad2_nu;
    rep.terms["R:hemi_mixed"] = -mixed;
    rep.terms["R:sphere_V_u2(x1/2)"] = sphereV;
    rep.terms["R:sphere_nonlinear_flux"] = -sphereNL;
  } else {
    // int dV/dxm u w = oint V u w nu_m - oint (u)_+^{p-eps} w nu_m
    //   + (1/k) [ oint t^{1-2s}<grad u, grad w> nu_m
    //             - oint t^{1-2s} dxm(u) dnu(w) - oint t^{1-2s} dxm(w) dnu(u) ]
    double lhs = B.dmV_uw;
    double sphereV = S.signed_sum(S.V_p * S.u_p * S.w_p, S.V_m * S.u_m * S.w_m);
    double sphereNL = S.signed_sum(positive_pow(S.u_p, pm) * S.w_p, positive_pow(S.u_m, pm) * S.w_m);
    double gg = H.GG_nu / kappa;
    double mix = (H.MIX_uw + H.MIX_wu) / kappa;
    rep.terms["L:vol_dmV_uw"] = lhs;
    rep.terms["R:sphere_V_uw"] = sphereV;
    rep.terms["R:sphere_nonlinear_flux"] = -sphereNL;
    rep.terms["R:hemi_gradgrad_num"] = gg;
    rep.terms["R:hemi_mixed_sum"] = -mix;
  }
  rep.finalize();
  return rep;
}

IdentityReport dilation_identity(const Field& u, const Field& w, const Point& center, double rho,
                                 const IdentityContext& ctx) {
  check_same_grid(u, w);
  require_geometry(u.grid, center, rho);
  const bool self = (u.values == w.values);
  const double kappa = kappa_s(ctx.s);
  const double pm = ctx.p_s - ctx.eps;
  const int N = u.grid.dim;
  const double halfN2s = 0.5 * (N - 2.0 * ctx.s);

  SpectralExtension1D eu(u, ctx.s);
  SpectralExtension1D ew_store = self ? eu : SpectralExtension1D(w, ctx.s);
  const SpectralExtension1D& ew = self ? eu : ew_store;
  HemiTerms H = hemisphere_terms(center, rho, wrap_spectral(eu), wrap_spectral(ew), ctx.s,
                                 ctx.hemisphere_order);
  BallSums B = ball_sums(u, w, center, rho, 0, ctx);

  SphereVals S;
  S.u_p = eu.trace(center[0] + rho);
  S.u_m = eu.trace(center[0] - rho);
  S.w_p = ew.trace(center[0] + rho);
  S.w_m = ew.trace(center[0] - rho);
  S.V_p = potential_value(make_point(center[0] + rho), ctx.V);
  S.V_m = potential_value(make_point(center[0] - rho), ctx.V);

  IdentityReport rep;
  rep.center = center;
  rep.rho = rho;
  rep.kind = "dilation";
  rep.two_field = !self;

  if (self) {
    // (N/(p+1-eps) - (N-2s)/2) int (u)_+^{p+1-eps} - (1/2) int <x-xi, grad V> u^2
    //  - s int V u^2
    //  = 1/(p+1-eps) oint (u)_+^{p+1-eps} rho - (1/2) oint V u^2 rho
    //    + (1/k)[ S1 - (1/2) rho GG + (N-2s)/2 S3a ]
    double c_eps = N / (pm + 1.0) - halfN2s;
    double sphNL = rho * S.radial_sum(positive_pow(S.u_p, pm + 1.0), positive_pow(S.u_m, pm + 1.0)) /
                   (pm + 1.0);
    double sphV = 0.5 * rho * S.radial_sum(S.V_p * S.u_p * S.u_p, S.V_m * S.u_m * S.u_m);
    rep.terms["L:vol_eps_coeff_up1"] = c_eps * B.up1;
    rep.terms["L:vol_xgradV_u2(x1/2)"] = -0.5 * B.xgradV_uw;
    rep.terms["L:vol_sV_u2"] = -ctx.s * B.V_uw;
    rep.terms["R:sphere_nonlinear_flux"] = sphNL;
    rep.terms["R:sphere_V_u2"] = -sphV;
    rep.terms["R:hemi_S1"] = H.S1 / kappa;
    rep.terms["R:hemi_grad2_rho(x1/2)"] = -0.5 * rho * H.GG / kappa;
    rep.terms["R:hemi_S3"] = halfN2s * H.S3a / kappa;
  } else {
    // (N-2s)/2 eps int (u)_+^{p-eps} w - 2s int V u w - int <x-xi, grad V> u w
    //  = (1/k)[ S1 + S2 + (N-2s)/2 (S3a + S3b) - rho GG ]
    //    + oint (u)_+^{p-eps} w rho - oint V u w rho
    double sphNL = rho * S.radial_sum(positive_pow(S.u_p, pm) * S.w_p, positive_pow(S.u_m, pm) * S.w_m);
    double sphV = rho * S.radial_sum(S.V_p * S.u_p * S.w_p, S.V_m * S.u_m * S.w_m);
    rep.terms["L:vol_eps_term"] = halfN2s * ctx.eps * B.up_w;
    rep.terms["L:vol_2sV_uw"] = -2.0 * ctx.s * B.V_uw;
    rep.terms["L:vol_xgradV_uw"] = -B.xgradV_uw;
    rep.terms["R:sphere_nonlinear_flux"] = sphNL;
    rep.terms["R:sphere_V_uw"] = -sphV;
    rep.terms["R:hemi_S1"] = H.S1 / kappa;
    rep.terms["R:hemi_S2"] = H.S2 / kappa;
    rep.terms["R:hemi_S3_sum"] = halfN2s * (H.S3a + H.S3b) / kappa;
    rep.terms["R:hemi_grad2_rho"] = -rho * H.GG / kappa;
    // As-printed variant of the eps coefficient, reported for comparison.
    rep.terms["X:lhs_printed_variant"] =
        0.5 * (N - 2.0) * ctx.eps * B.up_w - 2.0 * ctx.s * B.V_uw - B.xgradV_uw;
  }
  rep.finalize();
  return rep;
}

namespace {

IdentityReport closed_identity(const ScalarFn& u, const Point& center, double rho, int axis,
                               const IdentityContext& ctx, double quad_tol, bool dilation) {
  const double kappa = kappa_s(ctx.s);
  const double pm = ctx.p_s - ctx.eps;
  const int N = 1;
  const double halfN2s = 0.5 * (N - 2.0 * ctx.s);
  ExtFn ext = wrap_closed(u, ctx.s, quad_tol);
  HemiTerms H = hemisphere_terms(center, rho, ext, ext, ctx.s, ctx.hemisphere_order);

  auto ball = [&](const std::function<double(double)>& f) {
    return adaptive_integrate(f, center[0] - rho, center[0] + rho, quad_tol);
  };
  double up1 = ball([&](double x) { return positive_pow(u(make_point(x)), pm + 1.0); });
  double xgradV_u2 = ball([&](double x) {
    Point p = make_point(x);
    double uu = u(p);
    return (x - center[0]) * potential_grad(p, ctx.V)[0] * uu * uu;
  });
  double V_u2 = ball([&](double x) {
    Point p = make_point(x);
    double uu = u(p);
    return potential_value(p, ctx.V) * uu * uu;
  });
  double dmV_u2 = ball([&](double x) {
    Point p = make_point(x);
    double uu = u(p);
    return potential_grad(p, ctx.V)[axis] * uu * uu;
  });

  double up_r = u(make_point(center[0] + rho)), um_r = u(make_point(center[0] - rho));
  double Vp = potential_value(make_point(center[0] + rho), ctx.V);
  double Vm = potential_value(make_point(center[0] - rho), ctx.V);

  IdentityReport rep;
  rep.center = center;
  rep.rho = rho;
  rep.two_field = false;
  if (dilation) {
    rep.kind = "dilation(closed)";
    double c_eps = N / (pm + 1.0) - halfN2s;
    double sphNL =
        rho * (positive_pow(up_r, pm + 1.0) + positive_pow(um_r, pm + 1.0)) / (pm + 1.0);
    double sphV = 0.5 * rho * (Vp * up_r * up_r + Vm * um_r * um_r);
    rep.terms["L:vol_eps_coeff_up1"] = c_eps * up1;
    rep.terms["L:vol_xgradV_u2(x1/2)"] = -0.5 * xgradV_u2;
    rep.terms["L:vol_sV_u2"] = -ctx.s * V_u2;
    rep.terms["R:sphere_nonlinear_flux"] = sphNL;
    rep.terms["R:sphere_V_u2"] = -sphV;
    rep.terms["R:hemi_S1"] = H.S1 / kappa;
    rep.terms["R:hemi_grad2_rho(x1/2)"] = -0.5 * rho * H.GG / kappa;
    rep.terms["R:hemi_S3"] = halfN2s * H.S3a / kappa;
  } else {
    rep.kind = "translation[" + std::to_string(axis) + "](closed)";
    double grad2_nu = H.GG_nu / kappa;
    double mixed = H.MIX_uw / kappa;
    double sphereV = 0.5 * (Vp * up_r * up_r - Vm * um_r * um_r);
    double sphereNL =
        (positive_pow(up_r, pm + 1.0) - positive_pow(um_r, pm + 1.0)) / (pm + 1.0);
    rep.terms["L:vol_dmV_u2(x1/2)"] = 0.5 * dmV_u2;
    rep.terms["R:hemi_grad2_num(x1/2)"] = 0.5 * grad2_nu;
    rep.terms["R:hemi_mixed"] = -mixed;
    rep.terms["R:sphere_V_u2(x1/2)"] = sphereV;
    rep.terms["R:sphere_nonlinear_flux"] = -sphereNL;
  }
  rep.finalize();
  return rep;
}

}  // namespace

IdentityReport translation_identity_closed(const ScalarFn& u, const Point& center, double rho,
                                           int axis, const IdentityContext& ctx, double quad_tol) {
  return closed_identity(u, center, rho, axis, ctx, quad_tol, false);
}

IdentityReport dilation_identity_closed(const ScalarFn& u, const Point& center, double rho,
                                        const IdentityContext& ctx, double quad_tol) {
  return closed_identity(u, center, rho, 0, ctx, quad_tol, true);
}

double hemisphere_gradient_energy(const Point& center, double rho, const Field& u, const Field& w,
                                  const IdentityContext& ctx) {
  const bool self = (u.values == w.values);
  SpectralExtension1D eu(u, ctx.s);
  SpectralExtension1D ew_store = self ? eu : SpectralExtension1D(w, ctx.s);
  const SpectralExtension1D& ew = self ? eu : ew_store;
  HemiTerms H = hemisphere_terms(center, rho, wrap_spectral(eu), wrap_spectral(ew), ctx.s,
                                 ctx.hemisphere_order);
  return H.EN / kappa_s(ctx.s);
}

double pick_rho(const Point& center, double delta, const Field& u, const Field& w,
                const IdentityContext& ctx) {
  if (!u.grid.contains_ball(center, 5.0 * delta))
    fail(ErrorCode::BallOutsideGrid, "pick_rho: 5 delta ball sticks out of the grid");
  const bool self = (u.values == w.values);
  SpectralExtension1D eu(u, ctx.s);
  SpectralExtension1D ew_store = self ? eu : SpectralExtension1D(w, ctx.s);
  const SpectralExtension1D& ew = self ? eu : ew_store;

  double best_rho = 0.0, best_energy = 0.0;
  for (int i = 0; i < 16; ++i) {
    double rho = 2.0 * delta + 3.0 * delta * (i + 0.5) / 16.0;
    HemiTerms H = hemisphere_terms(center, rho, wrap_spectral(eu), wrap_spectral(ew), ctx.s,
                                   std::max(24, ctx.hemisphere_order / 2));
    if (i == 0 || H.EN < best_energy) {
      best_energy = H.EN;
      best_rho = rho;
    }
  }
  return best_rho;
}

}  // namespace peakforge
