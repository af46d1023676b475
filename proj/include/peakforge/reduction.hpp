#pragma once

#include <optional>
#include <vector>

#include "peakforge/energy.hpp"
#include "peakforge/grid.hpp"
#include "peakforge/pohozaev.hpp"
#include "peakforge/potential.hpp"

namespace peakforge {

struct ReductionTols {
  double krylov = 1e-8;
  int krylov_max_iter = 1200;
  double fixed_point = 1e-6;  // in ||.||_*
  int fixed_point_max_iter = 40;
  double newton_rel = 1e-7;   // on scaled reduced residuals
  int newton_max_iter = 40;
};

// State of the projected problem at fixed (lambda, xi): the correction phi,
// the multipliers c_i^l (layout i*(N+1) + l), and iteration diagnostics.
struct ReductionState {
  PeakConfig cfg;
  Field phi;
  std::vector<double> multipliers;
  double residual_star_star = 0.0;
  int iterations = 0;
  double contraction_factor = 0.0;
  double max_orthogonality_defect = 0.0;
};

struct Solution {
  ReductionState state;
  Field u;
  double pde_residual = 0.0;
  std::vector<double> predicted_lambda;
  std::vector<double> parameter_law_error;
  std::vector<double> reduced_residuals;
  int newton_iterations = 0;
};

// Pieces of the projected nonlinear right-hand side, each retrievable.
struct RhsTerms {
  Field N1, N2, R1, R2, R3;
  Field total;
};

class ProjectedProblem {
 public:
  ProjectedProblem(const Grid& g, const PeakConfig& cfg, const PotentialModel& V, double eps,
                   ReductionTols tols = {});

  // Saddle solve: ((-Delta)^s + V - p_s W^{p-1}) phi = h + sum c q, <q, phi> = 0.
  // Returns phi and fills multipliers.
  Field projected_linear_solve(const Field& h, std::vector<double>* multipliers) const;

  RhsTerms nonlinear_rhs(const Field& phi) const;

  // Contraction iteration phi -> L(N(phi) + R) from phi0 (default 0).
  ReductionState fixed_point_phi(const std::optional<Field>& phi0 = std::nullopt) const;

  // k(N+1) reduced equations at the converged state: per peak one dilation
  // pairing and N translation Pohozaev residuals at rho = pick_rho.
  std::vector<double> reduced_residuals(const ReductionState& state) const;

  const Field& multibump() const { return W_; }
  const Field& residual_R() const { return R_total_; }
  const std::vector<Field>& basis() const { return q_; }
  const PeakConfig& config() const { return cfg_; }
  const Grid& grid() const { return grid_; }
  Field assemble_u(const ReductionState& state) const;
  Field pde_residual_field(const Field& u) const;
  double orthogonality_defect(const Field& phi) const;
  // Reuse a previously selected Pohozaev radius set across Newton iterations.
  void set_rho_cache(const std::vector<double>& rho) const { rho_cache_ = rho; }
  const std::vector<double>& rho_cache() const { return rho_cache_; }

 private:
  Field apply_operator(const Field& v) const;
  Field project(const Field& v) const;

  Grid grid_;
  PeakConfig cfg_;
  PotentialModel V_;
  double eps_;
  ReductionTols tols_;
  Field W_;                 // truncated multibump
  Field Wp1_;               // p_s W^{p_s - 1}
  Field Vfield_;
  std::vector<Field> q_;    // constraint basis (eta_i U_i)^{p_s-1} Z_{i,l}
  std::vector<double> gram_;  // q Gram matrix
  std::vector<Field> etaU_pow_;  // per-peak eta_i U_i^{p_s}
  Field R_total_;
  std::vector<Field> J_;    // spectral J_i per peak
  double mean_shift_ = 0.0;  // preconditioner shift
  mutable std::vector<double> rho_cache_;
};

struct SolveOptions {
  double s = 0.2;
  std::vector<Point> xi_init;
  std::vector<double> lambda_init;  // empty = use predicted law
  double delta = 0.0;               // 0 = auto (d/10 for k >= 2, else 4)
  ReductionTols tols;
  // Hold the centers fixed and solve the dilation equations only. For
  // configurations symmetric about the initial centers the translation
  // equations vanish identically and their Jacobian block is degenerate.
  bool pin_xi = false;
  bool verbose = false;
};

// Outer Newton on the reduced system over (lambda_j, xi_j), inner fixed point
// per evaluation.
Solution solve_peaks(const Grid& g, double eps, const PotentialModel& V, const SolveOptions& opts);

// lambda_j = (-A/(B V(xi_j)) eps)^{-1/(2s)} per peak.
std::vector<double> predicted_parameters(double eps, const PotentialModel& V,
                                         const std::vector<Point>& xi_star, int N, double s);

// `count` eigenvalues of (-Delta)^s + V - (p_s - eps) u_+^{p_s-1-eps} nearest
// `shift`, by shift-invert Lanczos with green_apply-type preconditioning.
// A small off-zero shift regularizes configurations with an exact kernel.
std::vector<double> nondegeneracy_spectrum(const Field& u, double eps, const PotentialModel& V,
                                           double s, double p_s, int count,
                                           ReductionTols tols = {}, double shift = 0.0);

// Pick an FFT-friendly grid resolving lambda_max (lambda h <= target).
Grid auto_grid_1d(double half_length, double lambda_max, double target = 0.2,
                  int max_points = (1 << 22));

}  // namespace peakforge
