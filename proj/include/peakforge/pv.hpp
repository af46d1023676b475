#pragma once

#include <functional>

#include "peakforge/common.hpp"
#include "peakforge/grid.hpp"

namespace peakforge {

using ScalarFn = std::function<double(const Point&)>;

struct QuadSpec {
  double r0 = 0.05;       // inner symmetrized-ball radius
  double r_inf = 1e4;     // outer quadrature radius; analytic tail beyond
  int radial_order = 32;  // Gauss-Legendre points per radial panel
  int angular_order = 32; // trapezoid points per angle

  static QuadSpec for_grid(const Grid& g) {
    QuadSpec q;
    q.r0 = 2.0 * g.spacing;
    q.r_inf = g.half_length;
    return q;
  }
};

// Normalization making the PV integral agree with the |k|^{2s} multiplier:
// c(N,s) = 4^s Gamma(N/2 + s) / (pi^{N/2} |Gamma(-s)|).
double pv_constant(int N, double s);

// Principal-value fractional Laplacian of a closed-form function at a point.
// Inner ball: symmetrized second differences; annulus to r_inf: panel
// quadrature; beyond r_inf: analytic tail assuming |fn| <= C |z|^{-(N-2s)}.
// Throws TailDominates when the estimated tail error exceeds 10% of the value.
double frac_laplacian_pv(const ScalarFn& fn, int dim, const Point& x, double s,
                         const QuadSpec& quad);

}  // namespace peakforge
