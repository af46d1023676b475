#include "peakforge/bubble.hpp"

#include <cmath>

namespace peakforge {

double gamma_const(int N, double s) {
  if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::BadArgument, "gamma_const: need 0 < s < 1");
  if (!(N > 2.0 * s)) fail(ErrorCode::BadArgument, "gamma_const: need N > 2s");
  // Unique amplitude making (-Delta)^s U = U^{p_s}: from
  // (-Delta)^s (1+|x|^2)^{-(N-2s)/2} = 2^{2s} G((N+2s)/2)/G((N-2s)/2) (1+|x|^2)^{-(N+2s)/2}
  // the amplitude solves gamma^{p_s - 1} = 2^{2s} G((N+2s)/2)/G((N-2s)/2).
  double c = std::pow(4.0, s) * gamma_ratio(0.5 * (N + 2.0 * s), 0.5 * (N - 2.0 * s));
  return std::pow(c, 0.25 * (N - 2.0 * s) / s);
}

double bubble(const Point& x, const BubbleParams& p) {
  double r2 = 0.0;
  for (int d = 0; d < p.dim; ++d) {
    double t = x[d] - p.xi[d];
    r2 += t * t;
  }
  double g = gamma_const(p.dim, p.s);
  double base = p.lambda / (1.0 + p.lambda * p.lambda * r2);
  return g * std::pow(base, 0.5 * (p.dim - 2.0 * p.s));
}

double dbubble_dlambda(const Point& x, const BubbleParams& p) {
  double r2 = 0.0;
  for (int d = 0; d < p.dim; ++d) {
    double t = x[d] - p.xi[d];
    r2 += t * t;
  }
  double q = p.lambda * p.lambda * r2;
  double u = bubble(x, p);
  return 0.5 * (p.dim - 2.0 * p.s) / p.lambda * u * (1.0 - q) / (1.0 + q);
}

double dbubble_dxi(const Point& x, const BubbleParams& p, int axis) {
  double r2 = 0.0;
  for (int d = 0; d < p.dim; ++d) {
    double t = x[d] - p.xi[d];
    r2 += t * t;
  }
  double q = p.lambda * p.lambda * r2;
  double u = bubble(x, p);
  return (p.dim - 2.0 * p.s) * p.lambda * p.lambda * (x[axis] - p.xi[axis]) * u / (1.0 + q);
}

// Exponential bump piece f(t) = exp(-1/t) for t > 0.
static double part_f(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
static double part_fp(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

double cutoff_profile(double r, double delta) {
  if (r <= delta) return 1.0;
  if (r >= 2.0 * delta) return 0.0;
  double a = (2.0 * delta - r) / delta;
  double b = (r - delta) / delta;
  double fa = part_f(a), fb = part_f(b);
  return fa / (fa + fb);
}

double cutoff_profile_deriv(double r, double delta) {
  if (r <= delta || r >= 2.0 * delta) return 0.0;
  double a = (2.0 * delta - r) / delta;
  double b = (r - delta) / delta;
  double fa = part_f(a), fb = part_f(b);
  double fpa = part_fp(a), fpb = part_fp(b);
  double denom = (fa + fb) * (fa + fb);
  // d/dr [fa/(fa+fb)], da/dr = -1/delta, db/dr = 1/delta
  return (-fpa * fb - fa * fpb) / (delta * denom);
}

double cutoff(const Point& x, const CutoffSpec& spec) {
  return cutoff_profile(norm2(sub(x, spec.center), spec.dim), spec.delta);
}

Point cutoff_grad(const Point& x, const CutoffSpec& spec) {
  Point g = {0, 0, 0};
  double r = norm2(sub(x, spec.center), spec.dim);
  if (r <= 0.0) return g;
  double dp = cutoff_profile_deriv(r, spec.delta);
  if (dp == 0.0) return g;
  for (int d = 0; d < spec.dim; ++d) g[d] = dp * (x[d] - spec.center[d]) / r;
  return g;
}

double multibump(const Point& x, const PeakConfig& cfg, int dim) {
  double v = 0.0;
  for (const Peak& pk : cfg.peaks) {
    BubbleParams bp{pk.lambda, pk.xi, dim, cfg.order.s};
    double eta = 1.0;
    if (cfg.truncated()) eta = cutoff_profile(norm2(sub(x, pk.xi), dim), cfg.delta);
    if (eta > 0.0) v += eta * bubble(x, bp);
  }
  return v;
}

double basis_Z(int i, int l, const Point& x, const PeakConfig& cfg, int dim) {
  if (i < 0 || i >= cfg.count()) fail(ErrorCode::BadArgument, "basis_Z: peak index out of range");
  if (l < 0 || l > dim) fail(ErrorCode::BadArgument, "basis_Z: component out of range");
  const Peak& pk = cfg.peaks[i];
  BubbleParams bp{pk.lambda, pk.xi, dim, cfg.order.s};
  double r = norm2(sub(x, pk.xi), dim);
  double eta = cfg.truncated() ? cutoff_profile(r, cfg.delta) : 1.0;
  if (l == 0) {
    if (eta == 0.0) return 0.0;
    return eta * dbubble_dlambda(x, bp);
  }
  double v = eta > 0.0 ? eta * dbubble_dxi(x, bp, l - 1) : 0.0;
  if (cfg.truncated() && r > 0.0) {
    double dp = cutoff_profile_deriv(r, cfg.delta);
    if (dp != 0.0) {
      // d eta_i / d xi^l = -eta'(r) (x - xi)_l / r
      v += bubble(x, bp) * (-dp * (x[l - 1] - pk.xi[l - 1]) / r);
    }
  }
  return v;
}

Field multibump_field(const Grid& g, const PeakConfig& cfg) {
  return sample(g, [&](const Point& x) { return multibump(x, cfg, g.dim); });
}

Field basis_Z_field(const Grid& g, int i, int l, const PeakConfig& cfg) {
  return sample(g, [&](const Point& x) { return basis_Z(i, l, x, cfg, g.dim); });
}

Field bubble_field(const Grid& g, const BubbleParams& p) {
  return sample(g, [&](const Point& x) { return bubble(x, p); });
}

}  // namespace peakforge
