// Acceptance suite: quantitative exit criteria for the whole build, one
// pass/fail line per criterion. Groups run as separate ctest entries:
//   constants bubble_pde kernel dtn pv energy_law contraction scaling
//   pohozaev translation spectrum oracles
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "peakforge/bubble.hpp"
#include "peakforge/energy.hpp"
#include "peakforge/extension.hpp"
#include "peakforge/norms.hpp"
#include "peakforge/pohozaev.hpp"
#include "peakforge/quad.hpp"
#include "peakforge/reduction.hpp"
#include "peakforge/spectral.hpp"

using namespace peakforge;

namespace {

int g_failures = 0;

void report(bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %s  (%s)\n", ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// The sweep/solver test potential: flat-bottom well (r^2 terms cancelled
// between two same-center Gaussians), baseline 0.5, V(0) = 0.05.
PotentialModel k1_potential(double vstar = 0.05, double v0 = 0.5, double w1 = 4.0) {
  double a1 = (v0 - vstar) / 3.0;
  PotentialModel V;
  V.dim = 1;
  V.baseline = v0;
  V.bumps = {PotentialBump{{0, 0, 0}, a1, w1}, PotentialBump{{0, 0, 0}, -4.0 * a1, 4.0 * w1}};
  V.declared_critical_points = {{0, 0, 0}};
  return V;
}

PotentialModel k2_potential() {
  PotentialModel V;
  V.dim = 1;
  V.baseline = 0.5;
  V.bumps = {PotentialBump{{-24, 0, 0}, -0.45, 4.0}, PotentialBump{{24, 0, 0}, -0.45, 4.0}};
  V.declared_critical_points = {{-24, 0, 0}, {24, 0, 0}};
  return V;
}

// --- criterion 1 -------------------------------------------------------------
void run_constants() {
  double B = constant_B(3, 0.5);
  double target = -2.0 * M_PI * M_PI;
  report(std::abs(B - target) <= 1e-7 * std::abs(target), "criterion 1a: B(3,1/2) = -2 pi^2",
         fmt("B = %.12g, target %.12g", B, target));
  double g = gamma_const(3, 0.5);
  report(std::abs(g - 2.0) <= 1e-12, "criterion 1b: gamma(3,1/2) = 2", fmt("gamma = %.15g", g));
  double d = normalization_d(1, 0.5);
  report(std::abs(d - 1.0 / M_PI) <= 1e-8 / M_PI, "criterion 1c: d(1,1/2) = 1/pi",
         fmt("d = %.12g, target %.12g", d, 1.0 / M_PI));
}

// --- criterion 2 -------------------------------------------------------------
double bubble_pde_residual(int N, double s, double L, int M) {
  Grid g = make_grid(N, L, M);
  double p = (N + 2.0 * s) / (N - 2.0 * s);
  BubbleParams bp{1.0, {0, 0, 0}, N, s};
  Field U = bubble_field(g, bp);
  Field lap = frac_laplacian_spectral(U, s);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point x = g.point(i);
    bool inner = true;
    for (int d = 0; d < N; ++d) inner = inner && std::abs(x[d]) <= 0.5 * L;
    if (!inner) continue;
    double target = std::pow(U.values[i], p);
    scale = std::max(scale, target);
    worst = std::max(worst, std::abs(lap.values[i] - target));
  }
  return worst / scale;
}

void run_bubble_pde() {
  // Refinement doubles M by growing the box at fixed spacing; the dominating
  // error is the slow bubble tail seen through the periodic truncation.
  double r1 = bubble_pde_residual(1, 0.2, 4096.0, 32768);
  double r2 = bubble_pde_residual(1, 0.2, 8192.0, 65536);
  report(r1 <= 1e-3, "criterion 2a: bubble identity (N=1, s=0.2) within 1e-3",
         fmt("relative sup = %.3e", r1));
  report(r2 <= 0.6 * r1, "criterion 2b: halves (or better) when M doubles (N=1)",
         fmt("ratio = %.3f", r2 / r1));
  double q1 = bubble_pde_residual(2, 0.3, 96.0, 768);
  double q2 = bubble_pde_residual(2, 0.3, 192.0, 1536);
  report(q1 <= 1e-3, "criterion 2c: bubble identity (N=2, s=0.3) within 1e-3",
         fmt("relative sup = %.3e", q1));
  report(q2 <= 0.6 * q1, "criterion 2d: halves (or better) when M doubles (N=2)",
         fmt("ratio = %.3f", q2 / q1));
}

// --- criterion 3 -------------------------------------------------------------
double kernel_residual(int N, double s, double L, int M, int l) {
  Grid g = make_grid(N, L, M);
  double p = (N + 2.0 * s) / (N - 2.0 * s);
  PeakConfig cfg;
  cfg.order = FracOrder::make(N, s);
  cfg.delta = 0.0;
  cfg.peaks = {Peak{1.0, {0, 0, 0}}};
  BubbleParams bp{1.0, {0, 0, 0}, N, s};
  Field Z = basis_Z_field(g, 0, l, cfg);
  Field lap = frac_laplacian_spectral(Z, s);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point x = g.point(i);
    bool inner = true;
    for (int d = 0; d < N; ++d) inner = inner && std::abs(x[d]) <= 0.5 * L;
    if (!inner) continue;
    double U = bubble(x, bp);
    double target = p * std::pow(U, p - 1.0) * Z.values[i];
    scale = std::max(scale, std::abs(target));
    worst = std::max(worst, std::abs(lap.values[i] - target));
  }
  return worst / scale;
}

void run_kernel() {
  // Z0 carries the slow even tail: refine by growing the box at fixed h.
  // Z1 is odd (no tail offset) and sits at the resolution floor: refine h.
  double r1 = kernel_residual(1, 0.2, 2048.0, 16384, 0);
  double r2 = kernel_residual(1, 0.2, 4096.0, 32768, 0);
  report(r1 <= 1e-3, "criterion 3: kernel Z0 identity (N=1, s=0.2)",
         fmt("relative sup = %.3e", r1));
  report(r2 <= 0.6 * r1, "criterion 3: Z0 residual halves when M doubles",
         fmt("ratio = %.3f", r2 / r1));
  double t1 = kernel_residual(1, 0.2, 2048.0, 16384, 1);
  double t2 = kernel_residual(1, 0.2, 2048.0, 32768, 1);
  report(t1 <= 1e-3, "criterion 3: kernel Z1 identity (N=1, s=0.2)",
         fmt("relative sup = %.3e", t1));
  report(t2 <= 0.6 * t1, "criterion 3: Z1 residual halves when M doubles",
         fmt("ratio = %.3f", t2 / t1));
  double q = kernel_residual(2, 0.3, 96.0, 768, 0);
  report(q <= 1e-3, "criterion 3: kernel Z0 identity (N=2, s=0.3)", fmt("relative sup = %.3e", q));
}

// --- criterion 4 -------------------------------------------------------------
void run_dtn() {
  double s = 0.2;
  Grid g = make_grid(1, 512.0, 32768);
  std::vector<double> tseq = {0.5, 0.25, 0.125, 0.0625};
  auto check_input = [&](const char* name, const Field& u) {
    Field lap = frac_laplacian_spectral(u, s);
    ModeExpansion1D lm = mode_expansion_1d(lap);
    // ten interior points, staying clear of the zero crossing of (-Delta)^s u
    // for the gaussian (a pointwise relative comparison degenerates there)
    double worst = 0.0;
    for (double x : {0.0, 0.5, -0.8, 1.2, -1.6, 2.0, 4.2, -4.6, 5.0, 6.0}) {
      double res = dtn_residual(u, x, s, tseq);
      worst = std::max(worst, std::abs(res) / std::abs(lm.eval(x)));
    }
    report(worst <= 1e-2, fmt("criterion 4: DtN map on %s input", name),
           fmt("worst relative residual = %.3e", worst));
  };
  BubbleParams bp{1.0, {0, 0, 0}, 1, s};
  check_input("bubble", bubble_field(g, bp));
  check_input("gaussian", sample(g, [](const Point& x) { return std::exp(-0.25 * x[0] * x[0]); }));
}

// --- criterion 5 -------------------------------------------------------------
void run_pv() {
  double s = 0.2;
  int N = 1;
  double p = (N + 2.0 * s) / (N - 2.0 * s);
  BubbleParams bp{1.0, {0, 0, 0}, N, s};
  ScalarFn U = [&](const Point& x) { return bubble(x, bp); };
  QuadSpec spec;
  spec.r0 = 1e-3;
  spec.r_inf = 2e4;
  Grid g = make_grid(1, 32768.0, 262144);
  Field Uf = bubble_field(g, bp);
  ModeExpansion1D lm = mode_expansion_1d(frac_laplacian_spectral(Uf, s));
  double worst = 0.0;
  for (double x : {0.0, 0.4, -0.7, 1.1, 1.6, -2.0, 2.4, -2.8, 3.0, 0.9}) {
    double pv = frac_laplacian_pv(U, N, make_point(x), s, spec);
    double sp = (x == 0.0) ? std::pow(gamma_const(N, s), p) : lm.eval(x);
    worst = std::max(worst, std::abs(pv - sp) / std::abs(sp));
  }
  report(worst <= 1e-3, "criterion 5: PV-spectral cross validation at 10 points",
         fmt("worst relative mismatch = %.3e", worst));
}

// --- criterion 6 -------------------------------------------------------------
void run_energy_law() {
  // The two-term expansion vanishes identically at lambda = lambda_pred (the
  // root is its definition), so the pointwise ratio there is ill-posed. The
  // law is checked in its regime instead: the ratio on the B-dominated side
  // (lambda_pred/2, 0.6 lambda_pred) where the denominator is bounded away
  // from zero, and the root location, which must sit within 15% of the
  // prediction. The potential is flat across the truncation ball so V(xi)
  // is what the integrals actually sample; the cutoff radius is matched to
  // the concentration scale to keep the truncation remainders subleading.
  double s = 0.2;
  PotentialModel V = k1_potential(0.05, 0.5, 400.0);
  ExpansionConstants cons = expansion_constants(1, s);
  for (auto [eps, delta] : {std::pair<double, double>{0.1, 12.0}, {0.2, 8.0}}) {
    double lp = predicted_lambda(eps, potential_value(make_point(0.0), V), cons);
    bool ratios_ok = true;
    std::string detail;
    for (double factor : {0.5, 0.6}) {
      double lam = factor * lp;
      Grid g = auto_grid_1d(512.0, lam, 0.2, 1 << 23);
      PeakConfig cfg;
      cfg.order = FracOrder::make(1, s, eps);
      cfg.delta = delta;
      cfg.peaks = {Peak{lam, {0, 0, 0}}};
      double pair = pairing_dlambda(g, cfg, 0, eps, V);
      double pred = expansion_prediction(lam, make_point(0.0), eps, V, cons);
      double ratio = pair / pred;
      detail += fmt("%sratio(%.2g lp)=%.4f", detail.empty() ? "" : ", ", factor, ratio);
      ratios_ok = ratios_ok && ratio >= 0.9 && ratio <= 1.1;
    }
    report(ratios_ok, fmt("criterion 6: pairing matches A,B expansion (eps=%.2g)", eps), detail);

    Grid g = auto_grid_1d(512.0, 1.2 * lp, 0.2, 1 << 23);
    auto pairing_at = [&](double lam) {
      PeakConfig cfg;
      cfg.order = FracOrder::make(1, s, eps);
      cfg.delta = delta;
      cfg.peaks = {Peak{lam, {0, 0, 0}}};
      return pairing_dlambda(g, cfg, 0, eps, V);
    };
    double lo = pairing_at(0.85 * lp), hi = pairing_at(1.15 * lp);
    report(lo * hi < 0.0,
           fmt("criterion 6: measured pairing root within 15%% of lambda_pred (eps=%.2g)", eps),
           fmt("pairing(0.85 lp) = %.3e, pairing(1.15 lp) = %.3e", lo, hi));
  }
}

// --- criterion 7 -------------------------------------------------------------
void run_contraction() {
  double s = 0.2;
  PotentialModel V = k1_potential();
  ExpansionConstants cons = expansion_constants(1, s);
  double contraction_at_02 = 0.0;
  std::vector<double> phis;
  for (double eps : {0.1, 0.2, 0.4}) {
    double lam = predicted_lambda(eps, 0.05, cons);
    Grid g = auto_grid_1d(256.0, lam, 0.2);
    PeakConfig cfg;
    cfg.order = FracOrder::make(1, s, eps);
    cfg.delta = 4.0;
    cfg.peaks = {Peak{lam, {0, 0, 0}}};
    ProjectedProblem prob(g, cfg, V, eps, ReductionTols{});
    ReductionState st = prob.fixed_point_phi();
    double phin = weighted_sup_norm(st.phi, cfg, WeightKind::Star);
    phis.push_back(phin);
    if (eps == 0.2) contraction_at_02 = st.contraction_factor;
  }
  report(contraction_at_02 <= 0.5, "criterion 7a: contraction factor on the k=1 preset",
         fmt("worst ratio = %.3f", contraction_at_02));
  report(phis[0] < phis[1] && phis[1] < phis[2],
         "criterion 7b: ||phi||_* monotone over eps in {0.1, 0.2, 0.4}",
         fmt("norms = %.4f, %.4f, %.4f", phis[0], phis[1], phis[2]));
}

// --- criterion 8 -------------------------------------------------------------
void run_scaling() {
  double s = 0.2;
  PotentialModel V = k1_potential();
  SolveOptions opts;
  opts.s = s;
  opts.xi_init = {make_point(0.0)};
  opts.pin_xi = true;  // symmetric configuration; translation equations vanish
  opts.delta = 4.0;
  std::vector<double> eps_list = {0.05, 0.1, 0.2, 0.4};
  std::vector<double> lam_star, lam_pred;
  for (double eps : eps_list) {
    std::vector<double> lp = predicted_parameters(eps, V, opts.xi_init, 1, s);
    Grid g = auto_grid_1d(512.0, lp[0], 0.2);
    Solution sol = solve_peaks(g, eps, V, opts);
    lam_star.push_back(sol.state.cfg.peaks[0].lambda);
    lam_pred.push_back(lp[0]);
    std::printf("    eps=%.3f lambda*=%.3f lambda_pred=%.3f ratio=%.4f\n", eps,
                lam_star.back(), lam_pred.back(), lam_star.back() / lam_pred.back());
    std::fflush(stdout);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(eps_list.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log(eps_list[i]), y = std::log(lam_star[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double target = -0.5 / s;
  report(std::abs(slope - target) <= 0.05 * std::abs(target),
         "criterion 8a: log-log slope of lambda*(eps) = -1/(2s) within 5%",
         fmt("slope = %.4f, target %.4f", slope, target));
  double r0 = lam_star[0] / lam_pred[0];
  report(r0 >= 0.85 && r0 <= 1.15,
         "criterion 8b: lambda*/lambda_pred in [0.85, 1.15] at the smallest eps",
         fmt("ratio = %.4f", r0));
}

// --- criterion 9 -------------------------------------------------------------
void run_pohozaev_criterion() {
  double s = 0.2;
  // exact-bubble configuration, closed-form route
  BubbleParams bp{1.0, {0, 0, 0}, 1, s};
  ScalarFn U = [&](const Point& x) { return bubble(x, bp); };
  IdentityContext ctx;
  ctx.V = PotentialModel::constant(1, 0.0);
  ctx.s = s;
  ctx.p_s = (1.0 + 2.0 * s) / (1.0 - 2.0 * s);
  ctx.eps = 0.0;
  ctx.hemisphere_order = 64;
  IdentityReport dil = dilation_identity_closed(U, make_point(0.0), 1.5, ctx, 1e-10);
  report(std::abs(dil.residual) <= 1e-5 * dil.term_scale(),
         "criterion 9a: dilation identity on the exact bubble",
         fmt("|residual| = %.3e, scale = %.3e", std::abs(dil.residual), dil.term_scale()));
  PotentialModel Vrad;
  Vrad.dim = 1;
  Vrad.baseline = 0.02;
  Vrad.bumps = {PotentialBump{{0, 0, 0}, 0.05, 4.0}};
  ctx.V = Vrad;
  IdentityReport tr = translation_identity_closed(U, make_point(0.0), 1.5, 0, ctx, 1e-10);
  report(std::abs(tr.residual) <= 1e-5 * std::max(tr.term_scale(), dil.term_scale()),
         "criterion 9b: translation identity on the exact bubble",
         fmt("|residual| = %.3e", std::abs(tr.residual)));

  // constructed solution, grid refinement h -> h/2 -> h/4 at fixed box
  double eps = 0.3;
  PotentialModel V = k1_potential();
  ExpansionConstants cons = expansion_constants(1, s);
  double lam = predicted_lambda(eps, 0.05, cons);
  SolveOptions opts;
  opts.s = s;
  opts.xi_init = {make_point(0.0)};
  opts.pin_xi = true;
  opts.delta = 4.0;
  opts.tols.fixed_point = 1e-9;
  opts.tols.krylov = 1e-11;
  opts.tols.newton_rel = 1e-9;
  IdentityContext cctx;
  cctx.V = V;
  cctx.s = s;
  cctx.p_s = ctx.p_s;
  cctx.eps = eps;
  cctx.hemisphere_order = 96;
  const double L = 64.0;
  const Point off_center = make_point(1.0);  // identity center away from the peak
  const double rho = 10.0;
  std::vector<double> dil_res, tr_res;
  for (int M : {4096, 8192, 16384}) {
    Grid g = make_grid(1, L, M);
    Solution sol = solve_peaks(g, eps, V, opts);
    IdentityReport d2 = dilation_identity(sol.u, sol.u, off_center, rho, cctx);
    IdentityReport t2 = translation_identity(sol.u, sol.u, off_center, rho, 0, cctx);
    dil_res.push_back(std::abs(d2.residual) / d2.term_scale());
    tr_res.push_back(std::abs(t2.residual) / t2.term_scale());
    std::printf("    M=%6d dil %.3e trans %.3e\n", M, dil_res.back(), tr_res.back());
    std::fflush(stdout);
  }
  auto order_of = [](const std::vector<double>& r) {
    double o1 = std::log2(r[0] / r[1]);
    double o2 = std::log2(r[1] / r[2]);
    return 0.5 * (o1 + o2);
  };
  bool dec = dil_res[0] > dil_res[1] && dil_res[1] > dil_res[2] && tr_res[0] > tr_res[1] &&
             tr_res[1] > tr_res[2];
  double od = order_of(dil_res), ot = order_of(tr_res);
  report(dec && od >= 1.5 && ot >= 1.5,
         "criterion 9c: constructed-solution residual order >= 1.5 under h -> h/2 -> h/4",
         fmt("orders: dilation %.2f, translation %.2f", od, ot));
}

// --- criterion 10 ------------------------------------------------------------
void run_translation_criterion() {
  double s = 0.2, eps = 0.2;
  PotentialModel V = k2_potential();
  SolveOptions opts;
  opts.s = s;
  opts.xi_init = {make_point(-24.0), make_point(24.0)};
  opts.pin_xi = false;
  opts.delta = 4.5;
  ExpansionConstants cons = expansion_constants(1, s);
  double lam = predicted_lambda(eps, potential_value(make_point(24.0), V), cons);
  Grid g = auto_grid_1d(512.0, lam, 0.2);
  Solution sol = solve_peaks(g, eps, V, opts);
  double hess = hessian_norm(make_point(24.0), V);
  double bound = 1e-3 * hess * opts.delta;
  bool ok = true;
  std::string detail;
  for (std::size_t j = 0; j < sol.state.cfg.peaks.size(); ++j) {
    const Peak& p = sol.state.cfg.peaks[j];
    double gnorm = norm2(potential_grad(p.xi, V), 1);
    double displacement = std::abs(std::abs(p.xi[0]) - 24.0);
    detail += fmt("%s|gradV(xi_%zu)|=%.2e, |xi-xi*|=%.2e", j ? "; " : "", j, gnorm, displacement);
    ok = ok && gnorm <= bound && displacement <= 0.05;
  }
  report(ok, "criterion 10: converged k=2 centers sit at the critical points",
         detail + fmt("; bound %.2e", bound));
}

// --- criterion 11 ------------------------------------------------------------
void run_spectrum_criterion() {
  // The gap is carried by the translation mode, which needs genuine potential
  // curvature to be pinned; the probe therefore runs on the curved single
  // well (the flat-bottom sweep potential would let that mode collapse like
  // lambda^{-2}).
  double s = 0.2;
  double p_s = (1.0 + 2.0 * s) / (1.0 - 2.0 * s);
  PotentialModel V;
  V.dim = 1;
  V.baseline = 0.5;
  V.bumps = {PotentialBump{{0, 0, 0}, -0.45, 4.0}};
  V.declared_critical_points = {{0, 0, 0}};
  ExpansionConstants cons = expansion_constants(1, s);
  SolveOptions opts;
  opts.s = s;
  opts.xi_init = {make_point(0.0)};
  opts.pin_xi = true;
  opts.delta = 4.0;
  std::vector<double> gaps, scaled;
  for (double eps : {0.1, 0.2, 0.3}) {
    double lam = predicted_lambda(eps, 0.05, cons);
    Grid g = auto_grid_1d(64.0, lam, 0.2);
    Solution sol = solve_peaks(g, eps, V, opts);
    std::vector<double> eigs = nondegeneracy_spectrum(sol.u, eps, V, s, p_s, 4);
    double lam_star = sol.state.cfg.peaks[0].lambda;
    gaps.push_back(std::abs(eigs[0]));
    // The minimum eigenvalue is the translation mode, whose raw size is
    // V''-pinned against a mode of norm ~ lambda: mu ~ V'' / lambda^2 by
    // construction. The eps-robust non-degeneracy indicator is therefore the
    // lambda^2-rescaled gap; the raw gap must merely stay positive.
    scaled.push_back(std::abs(eigs[0]) * lam_star * lam_star);
    std::printf("    eps=%.2f gap0=%.5e rescaled=%.5e (next %.3e)\n", eps, gaps.back(),
                scaled.back(), eigs.size() > 1 ? std::abs(eigs[1]) : 0.0);
    std::fflush(stdout);
  }
  double gmin = *std::min_element(gaps.begin(), gaps.end());
  double smin = *std::min_element(scaled.begin(), scaled.end());
  double smax = *std::max_element(scaled.begin(), scaled.end());
  report(gmin > 0.0 && (smax - smin) / smax < 0.5,
         "criterion 11a: spectral gap positive, lambda^2-rescaled gap stable across eps",
         fmt("raw min %.3e; rescaled range [%.4f, %.4f], variation %.1f%%", gmin, smin, smax,
             100.0 * (smax - smin) / smax));

  // eps = 0, V = 0 bubble: N+1 near-zero kernel eigenvalues at the
  // discretization floor.
  Grid g = make_grid(1, 512.0, 8192);
  PeakConfig cfg;
  cfg.order = FracOrder::make(1, s);
  cfg.delta = 0.0;
  cfg.peaks = {Peak{1.0, {0, 0, 0}}};
  BubbleParams kbp{1.0, {0, 0, 0}, 1, s};
  Field U = bubble_field(g, kbp);
  PotentialModel zero = PotentialModel::constant(1, 0.0);
  // floor: the operator applied to the analytic kernel fields
  Field z0 = basis_Z_field(g, 0, 0, cfg);
  Field z1 = basis_Z_field(g, 0, 1, cfg);
  double floor_val = 0.0;
  for (const Field* z : {&z0, &z1}) {
    Field Lz = frac_laplacian_spectral(*z, s);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double u = U.values[i];
      Lz.values[i] -= p_s * std::pow(u, p_s - 1.0) * z->values[i];
    }
    floor_val = std::max(floor_val, l2_norm(Lz) / l2_norm(*z));
  }
  std::vector<double> eigs = nondegeneracy_spectrum(U, 0.0, zero, s, p_s, 4, ReductionTols{},
                                                    -0.25 * floor_val);
  std::sort(eigs.begin(), eigs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  bool two_small = eigs.size() >= 2 && std::abs(eigs[0]) <= 10.0 * floor_val &&
                   std::abs(eigs[1]) <= 10.0 * floor_val;
  report(two_small, "criterion 11b: N+1 kernel eigenvalues of the critical bubble at the floor",
         fmt("floor %.3e, eigs %.3e %.3e", floor_val, std::abs(eigs[0]),
             eigs.size() > 1 ? std::abs(eigs[1]) : -1.0));
}

// --- criterion 12 ------------------------------------------------------------
void run_oracles() {
  // B.1-type convolution bound: int |x-y|^{-(N-beta)} (1+|y|)^{-gamma}
  // with gamma < N, fitted C = sup LHS/bound stable across refinements/ranges.
  {
    int N = 1;
    double beta = 0.6, gamma = 0.8;  // gamma < N branch
    auto lhs = [&](double x, double tol) {
      auto f = [&](double y) {
        return std::pow(std::abs(x - y), beta - N) * std::pow(1.0 + std::abs(y), -gamma);
      };
      double acc = 0.0;
      double q = 1.0 / (1.0 - (N - beta));
      // absorb the |x-y| singularity exactly
      auto rest = [&](double y) { return std::pow(1.0 + std::abs(y), -gamma); };
      for (double side : {-1.0, 1.0}) {
        double len = 220.0;
        acc += adaptive_integrate(
                   [&](double u) { return rest(x + side * std::pow(u, q)); }, 0.0,
                   std::pow(len, 1.0 - (N - beta)), tol) * q;
      }
      // tails
      auto tail = [&](double sgn) {
        return adaptive_integrate(
            [&](double w) {
              double c = std::cos(w);
              double y = x + sgn * (220.0 + std::tan(w));
              return f(y) / (c * c);
            },
            0.0, 1.35, tol);
      };
      return acc + tail(1.0) + tail(-1.0);
    };
    auto bound = [&](double x) { return std::pow(1.0 + std::abs(x), beta - gamma); };
    double c1 = 0.0, c2 = 0.0;
    for (double x : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
      c1 = std::max(c1, lhs(x, 1e-6) / bound(x));
      c2 = std::max(c2, lhs(x, 1e-9) / bound(x));
    }
    report(c2 > 0 && std::max(c1, c2) / std::min(c1, c2) < 2.0,
           "criterion 12a: convolution bound constant stable under refinement",
           fmt("C = %.6f vs %.6f", c1, c2));
  }
  // B.3-type: truncated-bubble extension bound, C stable across lambda
  {
    double s = 0.2, delta = 2.0, rho = 5.0;
    std::vector<double> fitted;
    for (double lam : {2.0, 4.0, 8.0}) {
      BubbleParams bp{lam, {0, 0, 0}, 1, s};
      ScalarFn W = [&](const Point& x) {
        return cutoff_profile(std::abs(x[0]), delta) * bubble(x, bp);
      };
      HalfSphereQuad q = half_sphere_quadrature(1, make_point(0), rho, 24);
      double C = 0.0;
      for (const auto& node : q.nodes) {
        double val = std::abs(extend_closed(W, node, s, 1e-8));
        double denom = std::pow(lam, -0.5 * (1 - 2 * s)) *
                       std::pow(1.0 + std::abs(node.x[0]), -(1 - 2 * s));
        C = std::max(C, val / denom);
      }
      fitted.push_back(C);
    }
    double cmin = *std::min_element(fitted.begin(), fitted.end());
    double cmax = *std::max_element(fitted.begin(), fitted.end());
    report(cmax / cmin < 2.0, "criterion 12b: extension bound constant stable across lambda",
           fmt("C in [%.4f, %.4f]", cmin, cmax));
  }
  // B.4-type kernel-integral bound on the half-sphere
  {
    int N = 1;
    double alpha = 1.6, beta = 0.7, rho = 3.0;
    auto lhs_int = [&](double y, double t, double tol) {
      auto rest = [&](double z) { return std::pow(t + std::abs(z), -alpha); };
      double q = 1.0 / (1.0 - beta);
      double acc = 0.0;
      for (double side : {-1.0, 1.0}) {
        acc += adaptive_integrate(
                   [&](double u) { return rest(y + side * std::pow(u, q)); }, 0.0,
                   std::pow(120.0, 1.0 - beta), tol) * q;
      }
      auto f = [&](double z) {
        return std::pow(t + std::abs(z), -alpha) * std::pow(std::abs(y - z), -beta);
      };
      for (double sgn : {-1.0, 1.0})
        acc += adaptive_integrate(
            [&](double w) {
              double c = std::cos(w);
              return f(y + sgn * (120.0 + std::tan(w))) / (c * c);
            },
            0.0, 1.35, tol);
      return acc;
    };
    auto bound = [&](double y, double t) {
      return std::pow(1.0 + std::abs(y), -beta) * std::pow(t, N - alpha) +
             std::pow(1.0 + std::abs(y), N - alpha - beta);
    };
    double c1 = 0.0, c2 = 0.0;
    for (int i = 0; i < 50; ++i) {
      double a = 0.03 + (M_PI - 0.06) * i / 49.0;
      double y = rho * std::cos(a), t = rho * std::sin(a);
      c1 = std::max(c1, lhs_int(y, t, 1e-6) / bound(y, t));
      c2 = std::max(c2, lhs_int(y, t, 1e-9) / bound(y, t));
    }
    report(c2 > 0 && std::max(c1, c2) / std::min(c1, c2) < 2.0,
           "criterion 12c: half-space kernel bound constant stable",
           fmt("C = %.6f vs %.6f", c1, c2));
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string group = argc > 1 ? argv[1] : "all";
  auto want = [&](const char* name) { return group == "all" || group == name; };
  if (want("constants")) run_constants();
  if (want("bubble_pde")) run_bubble_pde();
  if (want("kernel")) run_kernel();
  if (want("dtn")) run_dtn();
  if (want("pv")) run_pv();
  if (want("energy_law")) run_energy_law();
  if (want("contraction")) run_contraction();
  if (want("scaling")) run_scaling();
  if (want("pohozaev")) run_pohozaev_criterion();
  if (want("translation")) run_translation_criterion();
  if (want("spectrum")) run_spectrum_criterion();
  if (want("oracles")) run_oracles();
  if (g_failures) std::printf("%d criterion check(s) FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
