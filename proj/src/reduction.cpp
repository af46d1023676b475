#include "peakforge/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "peakforge/bubble.hpp"
#include "peakforge/krylov.hpp"
#include "peakforge/norms.hpp"
#include "peakforge/spectral.hpp"

namespace peakforge {

ProjectedProblem::ProjectedProblem(const Grid& g, const PeakConfig& cfg, const PotentialModel& V,
                                   double eps, ReductionTols tols)
    : grid_(g), cfg_(cfg), V_(V), eps_(eps), tols_(tols) {
  cfg_.validate(g);
  cfg_.order.eps = eps;
  const double s = cfg_.order.s;
  const double p = cfg_.order.p_s;
  const int k = cfg_.count();
  const int nb = g.dim + 1;

  W_ = multibump_field(g, cfg_);
  Vfield_ = potential_field(g, V_);
  Wp1_ = Field(g);
  for (std::size_t i = 0; i < W_.size(); ++i)
    Wp1_.values[i] = W_.values[i] > 0.0 ? p * std::pow(W_.values[i], p - 1.0) : 0.0;

  // Constraint basis q_{i,l} = (eta_i U_i)^{p-1} Z_{i,l} and its Gram matrix.
  for (int i = 0; i < k; ++i) {
    PeakConfig single = cfg_;
    single.peaks = {cfg_.peaks[i]};
    Field Wi = multibump_field(g, single);
    for (int l = 0; l < nb; ++l) {
      Field z = basis_Z_field(g, i, l, cfg_);
      Field q(g);
      for (std::size_t j = 0; j < q.size(); ++j)
        q.values[j] = Wi.values[j] > 0.0 ? std::pow(Wi.values[j], p - 1.0) * z.values[j] : 0.0;
      q_.push_back(std::move(q));
    }
  }
  const int nq = static_cast<int>(q_.size());
  gram_.assign(nq * nq, 0.0);
  for (int a = 0; a < nq; ++a)
    for (int b = a; b < nq; ++b)
      gram_[a * nq + b] = gram_[b * nq + a] = inner_product_l2(q_[a], q_[b]);

  // Residual pieces that do not involve phi:
  //   R1 = W^{p-eps} - sum_i eta_i U_i^{p};  R2 = -sum_i J_i;  R3 = -V W.
  Field R1(g), R3(g);
  Field etaUp_sum(g, 0.0);
  for (int i = 0; i < k; ++i) {
    PeakConfig single = cfg_;
    single.peaks = {cfg_.peaks[i]};
    Field Wi = multibump_field(g, single);
    BubbleParams bp{cfg_.peaks[i].lambda, cfg_.peaks[i].xi, g.dim, s};
    Field etaUp(g);
    for (std::size_t j = 0; j < etaUp.size(); ++j) {
      double u = bubble(g.point(j), bp);
      double eta = u > 0.0 && Wi.values[j] > 0.0 ? Wi.values[j] / u : 0.0;
      etaUp.values[j] = eta * std::pow(u, p);
    }
    etaU_pow_.push_back(etaUp);
    axpy(1.0, etaUp, etaUp_sum);
    Field lapWi = frac_laplacian_spectral(Wi, s);
    Field Ji(g);
    for (std::size_t j = 0; j < Ji.size(); ++j) Ji.values[j] = lapWi.values[j] - etaUp.values[j];
    J_.push_back(std::move(Ji));
  }
  for (std::size_t j = 0; j < R1.size(); ++j) {
    double w = W_.values[j];
    R1.values[j] = (w > 0.0 ? std::pow(w, p - eps_) : 0.0) - etaUp_sum.values[j];
    R3.values[j] = -Vfield_.values[j] * w;
  }
  R_total_ = R1;
  for (const Field& Ji : J_) axpy(-1.0, Ji, R_total_);
  axpy(1.0, R3, R_total_);

  double vmean = 0.0;
  for (double v : Vfield_.values) vmean += v;
  vmean /= Vfield_.size();
  mean_shift_ = std::max(vmean, 1e-8);

  rho_cache_.assign(k, 0.0);
}

Field ProjectedProblem::apply_operator(const Field& v) const {
  Field out = frac_laplacian_spectral(v, cfg_.order.s);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] += (Vfield_.values[i] - Wp1_.values[i]) * v.values[i];
  return out;
}

Field ProjectedProblem::project(const Field& v) const {
  const int nq = static_cast<int>(q_.size());
  std::vector<double> rhs(nq);
  for (int a = 0; a < nq; ++a) rhs[a] = inner_product_l2(q_[a], v);
  if (!dense_solve(gram_, nq, rhs))
    fail(ErrorCode::BadArgument, "projected solve: degenerate constraint Gram matrix");
  Field out = v;
  for (int a = 0; a < nq; ++a) axpy(-rhs[a], q_[a], out);
  return out;
}

double ProjectedProblem::orthogonality_defect(const Field& phi) const {
  double worst = 0.0;
  double np = l2_norm(phi);
  if (np == 0.0) return 0.0;
  for (const Field& q : q_) {
    double d = std::abs(inner_product_l2(q, phi)) / (np * l2_norm(q));
    worst = std::max(worst, d);
  }
  return worst;
}

Field ProjectedProblem::projected_linear_solve(const Field& h,
                                               std::vector<double>* multipliers) const {
  check_finite(h, "projected_linear_solve");
  const double s = cfg_.order.s;
  const double shift = mean_shift_;
  LinearOp op = [this](const Field& v) { return project(apply_operator(project(v))); };
  LinearOp pre = [this, s, shift](const Field& v) {
    Field y = apply_multiplier(v, [s, shift](double k2) {
      return 1.0 / (std::pow(k2, s) + shift);
    });
    return project(y);
  };
  Field rhs = project(h);
  MinresResult res = minres(op, pre, rhs, tols_.krylov, tols_.krylov_max_iter);
  if (!res.converged)
    fail(ErrorCode::KrylovStagnation,
         "projected_linear_solve: MINRES stalled at rel residual " +
             std::to_string(res.rel_residual));
  Field phi = project(res.x);

  if (multipliers) {
    const int nq = static_cast<int>(q_.size());
    Field defect = apply_operator(phi);
    axpy(-1.0, h, defect);
    std::vector<double> rhsm(nq);
    for (int a = 0; a < nq; ++a) rhsm[a] = inner_product_l2(q_[a], defect);
    if (!dense_solve(gram_, nq, rhsm))
      fail(ErrorCode::BadArgument, "projected solve: degenerate Gram matrix");
    *multipliers = rhsm;
  }
  return phi;
}

RhsTerms ProjectedProblem::nonlinear_rhs(const Field& phi) const {
  check_same_grid(phi, W_);
  const double p = cfg_.order.p_s;
  RhsTerms T{Field(grid_), Field(grid_), Field(grid_), Field(grid_), Field(grid_), Field(grid_)};
  Field etaUp_sum(grid_, 0.0);
  for (const Field& e : etaU_pow_) axpy(1.0, e, etaUp_sum);
  for (std::size_t i = 0; i < W_.size(); ++i) {
    double w = W_.values[i], f = phi.values[i];
    double wp_eps = w > 0.0 ? std::pow(w, p - eps_) : 0.0;
    double wp1_eps = w > 0.0 ? std::pow(w, p - 1.0 - eps_) : 0.0;
    double upl = w + f > 0.0 ? std::pow(w + f, p - eps_) : 0.0;
    T.N1.values[i] = upl - wp_eps - (p - eps_) * wp1_eps * f;
    T.N2.values[i] = (p - eps_) * wp1_eps * f - Wp1_.values[i] * f;
    T.R1.values[i] = wp_eps - etaUp_sum.values[i];
    T.R3.values[i] = -Vfield_.values[i] * w;
  }
  for (const Field& Ji : J_) axpy(-1.0, Ji, T.R2);
  T.total = T.N1;
  axpy(1.0, T.N2, T.total);
  axpy(1.0, T.R1, T.total);
  axpy(1.0, T.R2, T.total);
  axpy(1.0, T.R3, T.total);
  return T;
}

ReductionState ProjectedProblem::fixed_point_phi(const std::optional<Field>& phi0) const {
  ReductionState st;
  st.cfg = cfg_;
  Field phi = phi0 ? project(*phi0) : Field(grid_, 0.0);
  double prev_delta = -1.0;
  int bad_ratio_streak = 0;
  double worst_ratio = 0.0;
  std::vector<double> mult;

  const double wscale = weighted_sup_norm(W_, cfg_, WeightKind::Star);
  for (int it = 0; it < tols_.fixed_point_max_iter; ++it) {
    RhsTerms rhs = nonlinear_rhs(phi);
    Field next = projected_linear_solve(rhs.total, &mult);
    Field diff = next;
    axpy(-1.0, phi, diff);
    double delta = weighted_sup_norm(diff, cfg_, WeightKind::Star);
    double nphi = weighted_sup_norm(next, cfg_, WeightKind::Star);
    st.iterations = it + 1;
    if (prev_delta > 0.0 && prev_delta > 1e-14) {
      double ratio = delta / prev_delta;
      worst_ratio = std::max(worst_ratio, ratio);
      bad_ratio_streak = (ratio > 0.9) ? bad_ratio_streak + 1 : 0;
      if (bad_ratio_streak >= 3 && delta > tols_.fixed_point)
        fail(ErrorCode::NotContracting, "fixed_point_phi: contraction ratio above 0.9");
    }
    if (nphi > 10.0 * (1.0 + wscale))
      fail(ErrorCode::NotContracting, "fixed_point_phi: iterates blew up");
    phi = next;
    prev_delta = delta;
    if (delta < tols_.fixed_point) {
      st.phi = phi;
      st.multipliers = mult;
      st.contraction_factor = worst_ratio;
      RhsTerms fin = nonlinear_rhs(phi);
      st.residual_star_star = weighted_sup_norm(fin.total, cfg_, WeightKind::StarStar);
      st.max_orthogonality_defect = orthogonality_defect(phi);
      return st;
    }
  }
  fail(ErrorCode::NotContracting, "fixed_point_phi: no convergence within max iterations");
}

Field ProjectedProblem::assemble_u(const ReductionState& state) const {
  Field u = W_;
  axpy(1.0, state.phi, u);
  return u;
}

Field ProjectedProblem::pde_residual_field(const Field& u) const {
  const double p = cfg_.order.p_s;
  Field res = frac_laplacian_spectral(u, cfg_.order.s);
  for (std::size_t i = 0; i < res.size(); ++i) {
    double ui = u.values[i];
    res.values[i] += Vfield_.values[i] * ui - (ui > 0.0 ? std::pow(ui, p - eps_) : 0.0);
  }
  return res;
}

std::vector<double> ProjectedProblem::reduced_residuals(const ReductionState& state) const {
  const int k = cfg_.count();
  const int nb = grid_.dim + 1;
  Field u = assemble_u(state);
  Field res = pde_residual_field(u);

  IdentityContext ctx;
  ctx.V = V_;
  ctx.s = cfg_.order.s;
  ctx.p_s = cfg_.order.p_s;
  ctx.eps = eps_;
  ctx.hemisphere_order = 48;

  std::vector<double> out(k * nb, 0.0);
  for (int j = 0; j < k; ++j) {
    Field z0 = basis_Z_field(grid_, j, 0, cfg_);
    out[j * nb + 0] = inner_product_l2(res, z0);
    if (grid_.dim == 1 && cfg_.truncated()) {
      if (rho_cache_[j] == 0.0)
        rho_cache_[j] = pick_rho(cfg_.peaks[j].xi, cfg_.delta, u, u, ctx);
      for (int m = 1; m < nb; ++m) {
        IdentityReport rep =
            translation_identity(u, u, cfg_.peaks[j].xi, rho_cache_[j], m - 1, ctx);
        out[j * nb + m] = rep.residual;
      }
    } else {
      // Pohozaev route is wired for 1-D grids; project on the translation
      // basis directions instead.
      for (int m = 1; m < nb; ++m) {
        Field zm = basis_Z_field(grid_, j, m, cfg_);
        out[j * nb + m] = inner_product_l2(res, zm);
      }
    }
  }
  return out;
}

std::vector<double> predicted_parameters(double eps, const PotentialModel& V,
                                         const std::vector<Point>& xi_star, int N, double s) {
  ExpansionConstants c = expansion_constants(N, s);
  std::vector<double> out;
  for (const Point& xi : xi_star) out.push_back(predicted_lambda(eps, potential_value(xi, V), c));
  return out;
}

Grid auto_grid_1d(double half_length, double lambda_max, double target, int max_points) {
  int M = 64;
  while (lambda_max * (2.0 * half_length / M) > target && M < max_points) M *= 2;
  if (lambda_max * (2.0 * half_length / M) > 0.25)
    fail(ErrorCode::ResolutionTooCoarse, "auto_grid_1d: cannot resolve lambda within max_points");
  return make_grid(1, half_length, M);
}

namespace {

struct NewtonWork {
  std::vector<double> z;       // (lambda_1..k, xi components)
  std::vector<double> F;
  std::vector<double> scale;
};

std::vector<double> pack(const PeakConfig& cfg, int dim) {
  std::vector<double> z;
  for (const Peak& p : cfg.peaks) z.push_back(p.lambda);
  for (const Peak& p : cfg.peaks)
    for (int d = 0; d < dim; ++d) z.push_back(p.xi[d]);
  return z;
}

void unpack(const std::vector<double>& z, PeakConfig& cfg, int dim) {
  const int k = cfg.count();
  for (int i = 0; i < k; ++i) cfg.peaks[i].lambda = z[i];
  for (int i = 0; i < k; ++i)
    for (int d = 0; d < dim; ++d) cfg.peaks[i].xi[d] = z[k + i * dim + d];
}

}  // namespace

Solution solve_peaks(const Grid& g, double eps, const PotentialModel& V, const SolveOptions& opts) {
  const int N = g.dim;
  if (opts.xi_init.empty()) fail(ErrorCode::BadArgument, "solve_peaks: no initial peak locations");
  const int k = static_cast<int>(opts.xi_init.size());
  const int nb = N + 1;

  PeakConfig cfg;
  cfg.order = FracOrder::make(N, opts.s, eps);
  for (int i = 0; i < k; ++i) cfg.peaks.push_back(Peak{1.0, opts.xi_init[i]});
  if (opts.delta > 0.0) {
    cfg.delta = opts.delta;
  } else if (k >= 2) {
    double d = 1e300;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) d = std::min(d, norm2(sub(cfg.peaks[i].xi, cfg.peaks[j].xi), N));
    cfg.delta = d / 10.0;
  } else {
    cfg.delta = 4.0;
  }

  std::vector<double> lam = opts.lambda_init;
  if (lam.empty()) lam = predicted_parameters(eps, V, opts.xi_init, N, opts.s);
  for (int i = 0; i < k; ++i) cfg.peaks[i].lambda = lam[i];
  if (cfg.peaks[0].lambda < 1.0)
    fail(ErrorCode::NotContracting,
         "solve_peaks: predicted concentration scale below 1; eps outside the contracting range");

  // Active Newton variables: all (lambda, xi) or, with pin_xi, lambdas only
  // (residuals then restricted to the dilation components).
  const int nz = opts.pin_xi ? k : k * nb;
  std::vector<double> z_full = pack(cfg, N);
  std::vector<double> z(z_full.begin(), z_full.begin() + (opts.pin_xi ? k : k * nb));
  std::optional<Field> warm;

  std::vector<double> rho_cache;
  auto expand_params = [&](const std::vector<double>& zz) {
    std::vector<double> full = z_full;
    for (int i = 0; i < nz; ++i) full[i] = zz[i];
    return full;
  };
  auto eval_F = [&](const std::vector<double>& zz,
                    std::optional<Field>& warm_io) -> std::vector<double> {
    PeakConfig c2 = cfg;
    unpack(expand_params(zz), c2, N);
    ProjectedProblem prob(g, c2, V, eps, opts.tols);
    if (!rho_cache.empty()) prob.set_rho_cache(rho_cache);
    std::optional<Field> start;
    if (warm_io && warm_io->grid.same_as(g)) start = warm_io;
    ReductionState st = prob.fixed_point_phi(start);
    warm_io = st.phi;
    std::vector<double> all = prob.reduced_residuals(st);
    rho_cache = prob.rho_cache();
    if (!opts.pin_xi) return all;
    std::vector<double> dil(k);
    for (int j = 0; j < k; ++j) dil[j] = all[j * nb];
    return dil;
  };

  std::vector<double> F = eval_F(z, warm);
  // Row scaling from the natural magnitudes of the reduced equations
  // (residual layout: per peak [dilation, translations...], or dilations only).
  ExpansionConstants cons = expansion_constants(N, opts.s);
  std::vector<double> scale(nz, 1.0);
  for (int j = 0; j < k; ++j) {
    double lamj = z[j];
    double dil_scale = std::max(std::abs(cons.A) * eps / lamj, 1e-14);
    if (opts.pin_xi) {
      scale[j] = dil_scale;
    } else {
      scale[j * nb] = dil_scale;
      double hv = std::max(hessian_norm(cfg.peaks[j].xi, V), 1e-10);
      double g2 = gamma_const(N, opts.s);
      for (int m = 1; m < nb; ++m)
        scale[j * nb + m] =
            std::max(g2 * g2 * std::pow(lamj, -2.0 * opts.s) * hv * cfg.delta, 1e-16);
    }
  }

  auto scaled_norm = [&](const std::vector<double>& f) {
    double w = 0.0;
    for (int i = 0; i < nz; ++i) w = std::max(w, std::abs(f[i]) / scale[i]);
    return w;
  };

  std::vector<double> Jac(nz * nz, 0.0);
  bool have_jac = false;
  int grow_streak = 0;
  double last_norm = scaled_norm(F);
  Solution sol;

  for (int it = 0; it < opts.tols.newton_max_iter; ++it) {
    sol.newton_iterations = it;
    if (scaled_norm(F) < opts.tols.newton_rel) break;

    if (!have_jac || (it % 6 == 5)) {
      // Finite-difference Jacobian, steps (1e-3 lambda_j, 1e-3).
      for (int c = 0; c < nz; ++c) {
        double step = (c < k) ? 1e-3 * z[c] : 1e-3;  // lambdas first in both layouts
        std::vector<double> zp = z;
        zp[c] += step;
        std::optional<Field> w2 = warm;
        std::vector<double> Fp = eval_F(zp, w2);
        for (int r = 0; r < nz; ++r) {
          // residual layout: peak-major [dil, trans...]; parameter layout: all
          // lambdas then all xis. Map column c to the packed parameter.
          Jac[r * nz + c] = (Fp[r] - F[r]) / step;
        }
      }
      have_jac = true;
    }

    std::vector<double> step = F;
    for (double& v : step) v = -v;
    std::vector<double> Jcopy = Jac;
    if (!dense_solve(Jcopy, nz, step))
      fail(ErrorCode::OuterNewtonDiverged, "solve_peaks: singular reduced Jacobian");

    // Damping: clamp lambda steps to 25% and xi steps to delta/4.
    for (int c = 0; c < nz; ++c) {
      if (c < k) {
        double cap = 0.25 * z[c];
        if (std::abs(step[c]) > cap) step[c] *= cap / std::abs(step[c]);
      } else {
        double cap = 0.25 * cfg.delta;
        if (std::abs(step[c]) > cap) step[c] *= cap / std::abs(step[c]);
      }
    }
    std::vector<double> z_new = z;
    for (int c = 0; c < nz; ++c) z_new[c] += step[c];
    for (int i = 0; i < k; ++i)
      if (z_new[i] <= 0.0) fail(ErrorCode::OuterNewtonDiverged, "solve_peaks: lambda left (0,inf)");

    std::vector<double> F_new = eval_F(z_new, warm);
    double n_new = scaled_norm(F_new);
    if (n_new > last_norm * 1.2) {
      if (++grow_streak >= 3)
        fail(ErrorCode::OuterNewtonDiverged, "solve_peaks: reduced residuals keep growing");
      // half step retry
      for (int c = 0; c < nz; ++c) z_new[c] = z[c] + 0.5 * step[c];
      F_new = eval_F(z_new, warm);
      n_new = scaled_norm(F_new);
    } else {
      grow_streak = 0;
    }
    // Broyden update J += (dF - J dz) dz^T / (dz . dz)
    std::vector<double> dz(nz), dF(nz);
    for (int c = 0; c < nz; ++c) {
      dz[c] = z_new[c] - z[c];
      dF[c] = F_new[c] - F[c];
    }
    double dzz = 0.0;
    for (int c = 0; c < nz; ++c) dzz += dz[c] * dz[c];
    if (dzz > 0) {
      for (int r = 0; r < nz; ++r) {
        double jdz = 0.0;
        for (int c = 0; c < nz; ++c) jdz += Jac[r * nz + c] * dz[c];
        double coef = (dF[r] - jdz) / dzz;
        for (int c = 0; c < nz; ++c) Jac[r * nz + c] += coef * dz[c];
      }
    }
    z = z_new;
    F = F_new;
    last_norm = n_new;
  }

  if (scaled_norm(F) >= 1.0)
    fail(ErrorCode::OuterNewtonDiverged, "solve_peaks: reduced system did not converge");

  unpack(expand_params(z), cfg, N);
  ProjectedProblem prob(g, cfg, V, eps, opts.tols);
  ReductionState st = prob.fixed_point_phi(warm);
  sol.state = st;
  sol.u = prob.assemble_u(st);
  Field res = prob.pde_residual_field(sol.u);
  sol.pde_residual = weighted_sup_norm(res, cfg, WeightKind::StarStar);
  sol.reduced_residuals = F;
  std::vector<Point> xis;
  for (const Peak& p : cfg.peaks) xis.push_back(p.xi);
  sol.predicted_lambda = predicted_parameters(eps, V, xis, N, opts.s);
  for (int i = 0; i < k; ++i)
    sol.parameter_law_error.push_back(std::abs(cfg.peaks[i].lambda / sol.predicted_lambda[i] - 1.0));
  return sol;
}

std::vector<double> nondegeneracy_spectrum(const Field& u, double eps, const PotentialModel& V,
                                           double s, double p_s, int count, ReductionTols tols,
                                           double shift) {
  const Grid& g = u.grid;
  Field Vf = potential_field(g, V);
  Field pot(g);
  for (std::size_t i = 0; i < pot.size(); ++i) {
    double ui = u.values[i];
    pot.values[i] = Vf.values[i] -
                    (ui > 0.0 ? (p_s - eps) * std::pow(ui, p_s - 1.0 - eps) : 0.0);
  }
  LinearOp L = [&](const Field& v) {
    Field out = frac_laplacian_spectral(v, s);
    for (std::size_t i = 0; i < out.size(); ++i)
      out.values[i] += (pot.values[i] - shift) * v.values[i];
    return out;
  };
  double vmean = 0.0;
  for (double v : Vf.values) vmean += v;
  vmean = std::max(vmean / Vf.size(), 1e-8);
  LinearOp pre = [&, vmean](const Field& v) {
    return apply_multiplier(v, [=](double k2) { return 1.0 / (std::pow(k2, s) + vmean); });
  };
  LinearOp inv = [&](const Field& v) {
    MinresResult r = minres(L, pre, v, 1e-8, tols.krylov_max_iter * 4);
    if (!r.converged)
      fail(ErrorCode::EigNotConverged, "nondegeneracy_spectrum: inner solve stalled");
    return r.x;
  };
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field start(g);
  for (double& v : start.values) v = dist(rng);
  LanczosResult lz = lanczos_extreme(inv, start, count, 120, 1e-9);
  if (!lz.converged || lz.eigenvalues.empty())
    fail(ErrorCode::EigNotConverged, "nondegeneracy_spectrum: Lanczos failed");
  std::vector<double> out;
  for (double mu : lz.eigenvalues)
    if (mu != 0.0) out.push_back(1.0 / mu + shift);
  std::sort(out.begin(), out.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (static_cast<int>(out.size()) > count) out.resize(count);
  return out;
}

}  // namespace peakforge
