#pragma once

#include "peakforge/grid.hpp"

namespace peakforge {

// gamma_{N,s} = 2^{(N-2s)/2} Gamma((N+2s)/2) / Gamma((N-2s)/2),
// the amplitude making U_{lambda,xi} solve (-Delta)^s U = U^{p_s}.
double gamma_const(int N, double s);

struct BubbleParams {
  double lambda = 1.0;
  Point xi = {0, 0, 0};
  int dim = 1;
  double s = 0.5;
};

// U_{lambda,xi}(x) = gamma ( lambda / (1 + lambda^2 |x-xi|^2) )^{(N-2s)/2}
double bubble(const Point& x, const BubbleParams& p);
double dbubble_dlambda(const Point& x, const BubbleParams& p);
double dbubble_dxi(const Point& x, const BubbleParams& p, int axis);

struct CutoffSpec {
  double delta = 1.0;
  Point center = {0, 0, 0};
  int dim = 1;
};

// Smooth cutoff: 1 on |x-c| <= delta, 0 on |x-c| >= 2 delta, C^infty between
// (exponential partition of unity, symmetric about r = 1.5 delta).
double cutoff(const Point& x, const CutoffSpec& spec);
// d eta / d x, analytic.
Point cutoff_grad(const Point& x, const CutoffSpec& spec);
// Radial profile and its derivative; eta(x) = cutoff_profile(|x-c|).
double cutoff_profile(double r, double delta);
double cutoff_profile_deriv(double r, double delta);

// Truncated multi-bump sum_i eta_i(x) U_{lambda_i, xi_i}(x).
// cfg.delta == 0 disables the cutoffs.
double multibump(const Point& x, const PeakConfig& cfg, int dim);

// Z_{i,0} = eta_i dU/dlambda; Z_{i,l} = eta_i dU/dxi^l + U d(eta_i)/dxi^l.
double basis_Z(int i, int l, const Point& x, const PeakConfig& cfg, int dim);

// Grid samplers.
Field multibump_field(const Grid& g, const PeakConfig& cfg);
Field basis_Z_field(const Grid& g, int i, int l, const PeakConfig& cfg);
Field bubble_field(const Grid& g, const BubbleParams& p);

}  // namespace peakforge
