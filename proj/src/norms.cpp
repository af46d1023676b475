#include "peakforge/norms.hpp"

#include <cmath>

namespace peakforge {

double weight_sum(const Point& x, const PeakConfig& cfg, int dim, WeightKind kind) {
  const double s = cfg.order.s;
  double w = 0.0;
  for (const Peak& p : cfg.peaks) {
    double e = (kind == WeightKind::Star) ? 0.5 * (dim - 2.0 * s) : 0.5 * (dim + 2.0 * s);
    double r = norm2(sub(x, p.xi), dim);
    w += std::pow(p.lambda, e) / std::pow(1.0 + p.lambda * r, e + cfg.order.sigma);
  }
  return w;
}

double weighted_sup_norm(const Field& f, const PeakConfig& cfg, WeightKind kind, bool full_box) {
  const Grid& g = f.grid;
  const double inner = 0.5 * g.half_length;
  double best = 0.0;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point x = g.point(i);
    if (!full_box) {
      bool ok = true;
      for (int d = 0; d < g.dim; ++d)
        if (std::abs(x[d]) > inner) ok = false;
      if (!ok) continue;
    }
    double v = std::abs(f.values[i]);
    if (v == 0.0) continue;
    double r = v / weight_sum(x, cfg, g.dim, kind);
    if (r > best) best = r;
  }
  return best;
}

double inner_product_l2(const Field& f, const Field& g) {
  check_same_grid(f, g);
  double s = 0.0;
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) s += f.values[i] * g.values[i];
  return s * std::pow(f.grid.spacing, f.grid.dim);
}

double l2_norm(const Field& f) { return std::sqrt(inner_product_l2(f, f)); }

double sup_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double a, const Field& x, Field& y) {
  check_same_grid(x, y);
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y.values[i] += a * x.values[i];
}

void scale(Field& x, double a) {
  for (double& v : x.values) v *= a;
}

}  // namespace peakforge
