#pragma once

#include <functional>
#include <vector>

namespace peakforge {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

// Gauss-Legendre rule of order n (Newton on P_n).
const GaussRule& gauss_legendre(int n);

// Integrate f over [a,b] with an n-point Gauss-Legendre rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b, int n = 32);

// Adaptive panel integration over [a,b]; error estimate from GL(n) vs two half panels.
// Throws QuadratureNonConvergent if the requested tolerance cannot be met.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 0.0, int max_depth = 48);

// Radial integral over R^N: int_0^inf g(r) r^{N-1} dr, tail removed by r = tan(theta).
// err_estimate (optional out) is the panel-difference estimate relative to the result.
double radial_integrate(const std::function<double(double)>& g, int N, int panels = 200,
                        double* err_estimate = nullptr);

// Map [0,1] -> [0,1] with vanishing derivative at both ends (cubic grading).
// Used to tame algebraic endpoint behavior in angular quadratures.
inline double graded_map(double v) { return v * v * (3.0 - 2.0 * v); }
inline double graded_map_deriv(double v) { return 6.0 * v * (1.0 - v); }

}  // namespace peakforge
