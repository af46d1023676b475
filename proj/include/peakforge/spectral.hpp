#pragma once

#include <functional>
#include <vector>

#include "peakforge/grid.hpp"

namespace peakforge {

// Apply a radial Fourier multiplier m(|k|^2) on the periodic grid.
// The k = 0 mode is multiplied by m(0) (callers pass m(0) = 0 for the
// fractional Laplacian and its inverse).
Field apply_multiplier(const Field& f, const std::function<double(double)>& symbol);

// (-Delta)^s via the |k|^{2s} multiplier; zero mode maps to 0.
Field frac_laplacian_spectral(const Field& f, double s);

// Discrete (-Delta)^{-s}: divide by |k|^{2s}, zero mode gauged to 0.
Field green_apply(const Field& h, double s);

// 1-D real trigonometric expansion u(x) = sum_m A_m cos(k_m x) + B_m sin(k_m x),
// k_m = pi m / L, m = 0..M/2. Exact representation of the grid samples.
struct ModeExpansion1D {
  double half_length = 0.0;
  std::vector<double> k;  // k_m
  std::vector<double> A;
  std::vector<double> B;

  double eval(double x) const;
  double eval_deriv(double x) const;
};

ModeExpansion1D mode_expansion_1d(const Field& f);

}  // namespace peakforge
