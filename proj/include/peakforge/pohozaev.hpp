#pragma once

#include <map>
#include <string>

#include "peakforge/extension.hpp"
#include "peakforge/grid.hpp"
#include "peakforge/potential.hpp"
#include "peakforge/pv.hpp"

namespace peakforge {

struct IdentityContext {
  PotentialModel V;
  double s = 0.5;
  double p_s = 0.0;
  double eps = 0.0;
  int hemisphere_order = 64;  // Gauss order per angular rule
};

// Paired volume/boundary evaluation of a local Pohozaev identity.
// kind: "translation[m]" or "dilation"; residual = lhs - rhs.
// Hemisphere integrals are divided by kappa_s so both sides match the
// kappa_s = 1 normalization used throughout.
// Term names carry a side prefix ("L:", "R:", or "X:" for informational
// extras); lhs and rhs are the in-order sums of their prefixed terms.
struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  std::map<std::string, double> terms;
  double rho = 0.0;
  Point center = {0, 0, 0};
  std::string kind;
  bool two_field = false;
  // Largest |term| on either side; the natural scale for residual comparisons.
  double term_scale() const;
  void finalize();  // fills lhs/rhs/residual from the prefixed terms
};

// Translation identity on the grid (1-D). With w == u (same samples) this is
// the single-solution identity; otherwise the bilinear (solution, linearized
// direction) version. axis is the translation direction (0-based).
IdentityReport translation_identity(const Field& u, const Field& w, const Point& center,
                                    double rho, int axis, const IdentityContext& ctx);

// Dilation identity on the grid (1-D). Two-field version implements the
// divergence-theorem coefficient (N-2s)/2 on the eps-term and additionally
// reports the (N-2)/2 variant under "lhs_printed_variant".
IdentityReport dilation_identity(const Field& u, const Field& w, const Point& center, double rho,
                                 const IdentityContext& ctx);

// Closed-form (non-grid) one-field versions, extensions by adaptive kernel
// quadrature over R^N. Used for exact-solution configurations.
IdentityReport translation_identity_closed(const ScalarFn& u, const Point& center, double rho,
                                           int axis, const IdentityContext& ctx,
                                           double quad_tol = 1e-9);
IdentityReport dilation_identity_closed(const ScalarFn& u, const Point& center, double rho,
                                        const IdentityContext& ctx, double quad_tol = 1e-9);

// Hemisphere gradient energy (1/kappa) oint t^{1-2s} (|grad u~|^2 + |grad w~|^2).
double hemisphere_gradient_energy(const Point& center, double rho, const Field& u, const Field& w,
                                  const IdentityContext& ctx);

// Radius selection: scans 16 candidates in (2 delta, 5 delta) and returns the
// one minimizing the hemisphere gradient energy of (u, w).
double pick_rho(const Point& center, double delta, const Field& u, const Field& w,
                const IdentityContext& ctx);

}  // namespace peakforge
