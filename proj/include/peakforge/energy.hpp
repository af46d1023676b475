#pragma once

#include "peakforge/grid.hpp"
#include "peakforge/potential.hpp"

namespace peakforge {

struct ExpansionConstants {
  double A = 0.0;  // > 0
  double B = 0.0;  // < 0
  int N = 0;
  double s = 0.0;
  double quadrature_error_estimate = 0.0;
};

// A = -((N-2s)/2)^2 gamma^{p_s+1} int (1-|x|^2)/(1+|x|^2)^{N+1} log(1+|x|^2) dx
double constant_A(int N, double s);
// B = (N-2s)/2 gamma^2 int (1-|x|^2)/(1+|x|^2)^{N-2s+1} dx
double constant_B(int N, double s);
ExpansionConstants expansion_constants(int N, double s);

// I(u) = 1/2 <(-Delta)^s u, u> + 1/2 <V u, u> - 1/(p_s+1-eps) int (u)_+^{p_s+1-eps}
double energy(const Field& u, double eps, const PotentialModel& V, double s, double p_s);

// <I'(u), v>
double energy_gradient_pairing(const Field& u, const Field& v, double eps, const PotentialModel& V,
                               double s, double p_s);

// <I'(W_i), d W_i / d lambda_i> for the single peak i of cfg, on the grid.
double pairing_dlambda(const Grid& g, const PeakConfig& cfg, int i, double eps,
                       const PotentialModel& V);

// A eps / lambda + B V(xi) lambda^{-2s-1}
double expansion_prediction(double lambda, const Point& xi, double eps, const PotentialModel& V,
                            const ExpansionConstants& c);

// Root of the two-term expansion: lambda = (-A/(B V(xi)) eps)^{-1/(2s)}
double predicted_lambda(double eps, double V_at_xi, const ExpansionConstants& c);

}  // namespace peakforge
