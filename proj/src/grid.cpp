#include "peakforge/grid.hpp"

#include <cmath>
#include <string>

namespace peakforge {

Grid make_grid(int dim, double half_length, int points_per_dim) {
  if (dim < 1 || dim > 3) fail(ErrorCode::BadArgument, "grid dim must be 1, 2 or 3");
  if (half_length <= 0.0) fail(ErrorCode::BadArgument, "grid half_length must be positive");
  if (points_per_dim < 16) fail(ErrorCode::BadArgument, "grid needs at least 16 points per axis");
  if (points_per_dim % 2 != 0)
    fail(ErrorCode::OddPointCount, "points_per_dim must be even, got " + std::to_string(points_per_dim));
  Grid g;
  g.dim = dim;
  g.half_length = half_length;
  g.points_per_dim = points_per_dim;
  g.spacing = 2.0 * half_length / points_per_dim;
  return g;
}

void check_same_grid(const Field& a, const Field& b) {
  if (!a.grid.same_as(b.grid)) fail(ErrorCode::GridMismatch, "fields live on different grids");
}

void check_finite(const Field& f, const char* who) {
  for (double v : f.values)
    if (!std::isfinite(v)) fail(ErrorCode::BadArgument, std::string(who) + ": field has non-finite entries");
}

double FracOrder::default_sigma(int N, double s) {
  if (N > 4.0 * s) {
    // paper interval (0, min{s/2, (N-4s)/2}); take the midpoint-ish safe value
    return 0.5 * std::min(0.5 * s, 0.5 * (N - 4.0 * s));
  }
  return std::min(0.5 * s, 0.05);
}

FracOrder FracOrder::make(int N, double s, double eps) {
  if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::BadArgument, "need 0 < s < 1");
  if (N <= 2.0 * s) fail(ErrorCode::BadArgument, "need N > 2s");
  FracOrder o;
  o.s = s;
  o.p_s = (N + 2.0 * s) / (N - 2.0 * s);
  o.eps = eps;
  o.sigma = default_sigma(N, s);
  if (eps < 0.0) fail(ErrorCode::BadArgument, "eps must be >= 0");
  if (o.p_s - eps <= 1.0) fail(ErrorCode::BadArgument, "need p_s - eps > 1");
  return o;
}

void PeakConfig::validate(const Grid& g) const {
  if (peaks.empty()) fail(ErrorCode::BadArgument, "PeakConfig needs at least one peak");
  for (const Peak& p : peaks)
    if (!(p.lambda > 0.0)) fail(ErrorCode::BadArgument, "peak lambda must be positive");
  if (truncated()) {
    if (count() >= 2) {
      double d = 1e300;
      for (int i = 0; i < count(); ++i)
        for (int j = i + 1; j < count(); ++j)
          d = std::min(d, norm2(sub(peaks[i].xi, peaks[j].xi), g.dim));
      if (delta > d / 10.0 + 1e-12)
        fail(ErrorCode::BadArgument, "cutoff delta exceeds d/10 for the peak separation d");
    }
    for (const Peak& p : peaks)
      if (!g.contains_ball(p.xi, 2.0 * delta))
        fail(ErrorCode::BadArgument, "ball B_{2delta}(xi) sticks out of the grid box");
  }
  double lmin = 1e300, lmax = 0.0;
  for (const Peak& p : peaks) {
    lmin = std::min(lmin, p.lambda);
    lmax = std::max(lmax, p.lambda);
  }
  if (lmax / lmin > 1e3)
    fail(ErrorCode::BadArgument, "peak dilations are not comparable (lambda_i/lambda_j unbounded)");
}

}  // namespace peakforge
