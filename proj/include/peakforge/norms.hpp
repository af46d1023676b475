#pragma once

#include "peakforge/grid.hpp"

namespace peakforge {

enum class WeightKind { Star, StarStar };

// Peak-adapted weight sum_j lambda_j^e / (1 + lambda_j |x - xi_j|)^{e + sigma},
// e = (N - 2s)/2 for Star and (N + 2s)/2 for StarStar.
double weight_sum(const Point& x, const PeakConfig& cfg, int dim, WeightKind kind);

// Weighted sup norm sup_x |f(x)| / weight(x). The sup runs over the inner
// half-box [-L/2, L/2]^N unless full_box is set; the outer band is where the
// periodic truncation is least faithful and is excluded from accuracy claims.
double weighted_sup_norm(const Field& f, const PeakConfig& cfg, WeightKind kind,
                         bool full_box = false);

// h^N sum f g (rectangle rule; trapezoid and rectangle coincide on the torus).
double inner_product_l2(const Field& f, const Field& g);

double l2_norm(const Field& f);
double sup_norm(const Field& f);

// In-place helpers.
void axpy(double a, const Field& x, Field& y);  // y += a x
void scale(Field& x, double a);

}  // namespace peakforge
