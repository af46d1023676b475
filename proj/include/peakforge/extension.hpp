#pragma once

#include <memory>
#include <vector>

#include "peakforge/grid.hpp"
#include "peakforge/pv.hpp"
#include "peakforge/spectral.hpp"

namespace peakforge {

// DtN constant of the mass-one Poisson kernel: kappa_s = 2^{1-2s} Gamma(1-s)/Gamma(s).
// The s-harmonic extension of u satisfies -lim_{t->0} t^{1-2s} dt u~ = kappa_s (-Delta)^s u.
// All "kappa_s = 1 convention" comparisons divide the extension side by this factor.
double kappa_s(double s);

// Kernel normalization d_{N,s} with int_{R^N} P_s(x,1) dx = 1, by radial quadrature.
double normalization_d(int N, double s);

// P_s(x,t) = d_{N,s} t^{2s} / (|x|^2 + t^2)^{(N+2s)/2}
double poisson_kernel(int dim, const Point& x, double t, double s);

struct HalfSpacePoint {
  Point x = {0, 0, 0};
  double t = 0.0;
};

// --- Extension profile theta ------------------------------------------------
// Mode-wise extension factor: the extension of e^{ikx} is e^{ikx} theta_s(|k| t),
// theta_s(r) = 2^{1-s}/Gamma(s) r^s K_s(r). psi_s(r) := -r^{1-2s} theta_s'(r) is
// the regularized derivative with psi_s(0) = kappa_s.
class ThetaProfile {
 public:
  explicit ThetaProfile(double s);
  double theta(double rho) const;
  double psi(double rho) const;
  double s() const { return s_; }

 private:
  double series_theta(double rho) const;
  double series_psi(double rho) const;
  double s_;
  std::vector<double> a_;      // analytic branch coefficients
  std::vector<double> c_;      // rho^{2s} branch coefficients
  std::vector<double> tab_th_; // cubic table on [2, 50]
  std::vector<double> tab_ps_;
  double tab_lo_ = 2.0, tab_hi_ = 50.0, tab_dx_ = 0.0;
};

const ThetaProfile& theta_profile(double s);

// --- Spectral extension of 1-D grid fields ----------------------------------
// Exact s-harmonic extension of the periodic trigonometric interpolant.
// Satisfies div(t^{1-2s} grad u~) = 0 pointwise and
// -t^{1-2s} dt u~ -> kappa_s (-Delta)^s u as t -> 0, mode by mode.
class SpectralExtension1D {
 public:
  SpectralExtension1D(const Field& u, double s);

  double value(double x, double t) const;
  // (d/dx, d/dt); dt is evaluated as t^{2s-1} * [regular part], so t must be > 0.
  void grad(double x, double t, double* dx, double* dt) const;
  // t^{1-2s} dt u~ (x, t); smooth down to t = 0.
  double weighted_dt(double x, double t) const;
  // Everything in one mode sweep: value, dx, and weighted dt.
  void eval_all(double x, double t, double* val, double* dx, double* wdt) const;

  double trace(double x) const { return modes_.eval(x); }

 private:
  ModeExpansion1D modes_;
  std::vector<double> k2s_;  // k_m^{2s}
  double s_;
  const ThetaProfile* prof_;
};

// --- Physical-space extension of grid fields (periodized kernel) ------------
// Convolution quadrature h * sum_j K_per(x - z_j, t) u_j with the periodized
// Poisson kernel. Requires t >= 2h (KernelUnderresolved otherwise).
double extend_grid(const Field& u, const HalfSpacePoint& X, double s);
// (N+1)-gradient via analytically differentiated kernel, same quadrature.
std::vector<double> extension_gradient_grid(const Field& u, const HalfSpacePoint& X, double s);

// --- Closed-form extension (adaptive quadrature, 1-D) -----------------------
double extend_closed(const ScalarFn& fn, const HalfSpacePoint& X, double s, double rel_tol = 1e-9);
std::vector<double> extension_gradient_closed(const ScalarFn& fn, const HalfSpacePoint& X, double s,
                                              double rel_tol = 1e-9);

// --- Dirichlet-to-Neumann check ----------------------------------------------
// Extrapolates -t^{1-2s} dt u~(x,t) / kappa_s to t -> 0+ along t_seq (decreasing,
// min >= 2h) and subtracts the spectral fractional Laplacian at x.
// Correction exponents {2-2s, 2, 2+2s} are eliminated by generalized Richardson.
double dtn_residual(const Field& u, double x, double s, const std::vector<double>& t_seq);

// --- Half-sphere quadrature ---------------------------------------------------
// Nodes on {|X - (xi,0)| = rho, t > 0} with plain surface-measure weights
// (any t^{1-2s} factor belongs to the integrand). Node count grows with
// `refinement`; a graded polar map keeps fractional-power integrands accurate.
struct HalfSphereQuad {
  int dim = 1;  // N (sphere lives in R^{N+1})
  Point center = {0, 0, 0};
  double rho = 1.0;
  std::vector<HalfSpacePoint> nodes;
  std::vector<double> weights;

  // Outward unit normal at node i.
  HalfSpacePoint normal(std::size_t i) const {
    HalfSpacePoint n;
    for (int d = 0; d < dim; ++d) n.x[d] = (nodes[i].x[d] - center[d]) / rho;
    n.t = nodes[i].t / rho;
    return n;
  }
};

HalfSphereQuad half_sphere_quadrature(int dim, const Point& xi, double rho, int refinement = 48);

}  // namespace peakforge
