#include "peakforge/energy.hpp"

#include <cmath>

#include "peakforge/bubble.hpp"
#include "peakforge/norms.hpp"
#include "peakforge/quad.hpp"
#include "peakforge/spectral.hpp"

namespace peakforge {

namespace {

double radial_constant(int N, double s, bool with_log, double* err) {
  double e = 0.0;
  const double expo = with_log ? (N + 1.0) : (N - 2.0 * s + 1.0);
  double v = radial_integrate(
      [&](double r) {
        // (1-r^2)(1+r^2)^{-expo} [log(1+r^2)], arranged to survive huge r
        double lr = (r > 1.0) ? 2.0 * std::log(r) + std::log1p(1.0 / (r * r))
                              : std::log1p(r * r);
        double first = 2.0 / (1.0 + r * r) - 1.0;  // (1-r^2)/(1+r^2)
        double f = first * std::exp((1.0 - expo) * lr);
        if (with_log) f *= lr;
        return f;
      },
      N, 240, &e);
  if (err) *err = e;
  if (e > 1e-8)
    fail(ErrorCode::QuadratureNonConvergent, "expansion constant quadrature did not converge");
  return v * unit_sphere_area(N);
}

}  // namespace

double constant_A(int N, double s) {
  if (!(N > 4.0 * s)) fail(ErrorCode::BadArgument, "constant_A: requires N > 4s");
  double g = gamma_const(N, s);
  double p1 = (N + 2.0 * s) / (N - 2.0 * s) + 1.0;
  double I = radial_constant(N, s, true, nullptr);
  double half = 0.5 * (N - 2.0 * s);
  return -half * half * std::pow(g, p1) * I;
}

double constant_B(int N, double s) {
  if (!(N > 4.0 * s)) fail(ErrorCode::BadArgument, "constant_B: requires N > 4s");
  double g = gamma_const(N, s);
  double I = radial_constant(N, s, false, nullptr);
  return 0.5 * (N - 2.0 * s) * g * g * I;
}

ExpansionConstants expansion_constants(int N, double s) {
  ExpansionConstants c;
  c.N = N;
  c.s = s;
  double eA = 0.0, eB = 0.0;
  double IA = radial_constant(N, s, true, &eA);
  double IB = radial_constant(N, s, false, &eB);
  double g = gamma_const(N, s);
  double p1 = (N + 2.0 * s) / (N - 2.0 * s) + 1.0;
  double half = 0.5 * (N - 2.0 * s);
  c.A = -half * half * std::pow(g, p1) * IA;
  c.B = half * g * g * IB;
  c.quadrature_error_estimate = std::max(eA, eB);
  return c;
}

double energy(const Field& u, double eps, const PotentialModel& V, double s, double p_s) {
  check_finite(u, "energy");
  Field lap = frac_laplacian_spectral(u, s);
  const double hN = std::pow(u.grid.spacing, u.grid.dim);
  double quad = 0.0, pot = 0.0, nl = 0.0;
  const double q = p_s + 1.0 - eps;
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    double ui = u.values[i];
    quad += lap.values[i] * ui;
    pot += potential_value(u.grid.point(i), V) * ui * ui;
    if (ui > 0.0) nl += std::pow(ui, q);
  }
  return 0.5 * hN * (quad + pot) - hN * nl / q;
}

double energy_gradient_pairing(const Field& u, const Field& v, double eps, const PotentialModel& V,
                               double s, double p_s) {
  check_same_grid(u, v);
  Field lap = frac_laplacian_spectral(u, s);
  const double hN = std::pow(u.grid.spacing, u.grid.dim);
  double acc = 0.0;
  const double q = p_s - eps;
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    double ui = u.values[i];
    double f = lap.values[i] + potential_value(u.grid.point(i), V) * ui;
    if (ui > 0.0) f -= std::pow(ui, q);
    acc += f * v.values[i];
  }
  return acc * hN;
}

double pairing_dlambda(const Grid& g, const PeakConfig& cfg, int i, double eps,
                       const PotentialModel& V) {
  if (i < 0 || i >= cfg.count()) fail(ErrorCode::BadArgument, "pairing_dlambda: peak index");
  if (cfg.peaks[i].lambda * g.spacing > 0.25)
    fail(ErrorCode::ResolutionTooCoarse, "pairing_dlambda: lambda h exceeds 0.25");
  PeakConfig single = cfg;
  single.peaks = {cfg.peaks[i]};
  Field W = multibump_field(g, single);
  Field Z0 = basis_Z_field(g, 0, 0, single);
  return energy_gradient_pairing(W, Z0, eps, V, cfg.order.s, cfg.order.p_s);
}

double expansion_prediction(double lambda, const Point& xi, double eps, const PotentialModel& V,
                            const ExpansionConstants& c) {
  double v = potential_value(xi, V);
  return c.A * eps / lambda + c.B * v * std::pow(lambda, -2.0 * c.s - 1.0);
}

double predicted_lambda(double eps, double V_at_xi, const ExpansionConstants& c) {
  if (!(V_at_xi > 0.0)) fail(ErrorCode::BadArgument, "predicted_lambda: requires V(xi) > 0");
  return std::pow(-c.A / (c.B * V_at_xi) * eps, -0.5 / c.s);
}

}  // namespace peakforge
