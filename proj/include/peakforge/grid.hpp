#pragma once

#include <cstddef>
#include <vector>

#include "peakforge/common.hpp"

namespace peakforge {

// Periodic box [-L, L)^N sampled with M points per axis.
// The box stands in for R^N; quantitative claims about fields on it are made
// on the inner half-box [-L/2, L/2]^N where wrap-around effects are smallest.
struct Grid {
  int dim = 1;
  double half_length = 0.0;  // L
  int points_per_dim = 0;    // M, even
  double spacing = 0.0;      // h = 2L/M

  std::size_t size() const {
    std::size_t n = 1;
    for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(points_per_dim);
    return n;
  }

  // Coordinate of grid index along one axis: x_i = -L + i h.
  double coord(int i) const { return -half_length + spacing * i; }

  // Row-major (axis 0 slowest) multi-index of a flat index.
  void unflatten(std::size_t idx, int* b) const {
    for (int d = dim - 1; d >= 0; --d) {
      b[d] = static_cast<int>(idx % points_per_dim);
      idx /= points_per_dim;
    }
  }

  Point point(std::size_t idx) const {
    int b[3] = {0, 0, 0};
    unflatten(idx, b);
    Point p = {0, 0, 0};
    for (int d = 0; d < dim; ++d) p[d] = coord(b[d]);
    return p;
  }

  // FFT frequency (angular wavenumber) of mode index m along one axis:
  // 2*pi*m' / (2L) with m' in standard FFT ordering.
  double wavenumber(int m) const {
    int mm = (m <= points_per_dim / 2) ? m : m - points_per_dim;
    return M_PI * mm / half_length;
  }

  bool same_as(const Grid& o) const {
    return dim == o.dim && half_length == o.half_length && points_per_dim == o.points_per_dim;
  }

  bool contains_ball(const Point& center, double radius) const {
    for (int d = 0; d < dim; ++d)
      if (center[d] - radius < -half_length || center[d] + radius > half_length - spacing)
        return false;
    return true;
  }
};

Grid make_grid(int dim, double half_length, int points_per_dim);

struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

// Sample a scalar function on the grid.
template <typename F>
Field sample(const Grid& g, F&& f) {
  Field out(g);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = f(g.point(i));
  return out;
}

void check_same_grid(const Field& a, const Field& b);
void check_finite(const Field& f, const char* who);

// Fractional exponent bookkeeping: s, the critical power p_s = (N+2s)/(N-2s),
// the subcritical perturbation eps, and the weighted-norm exponent sigma.
struct FracOrder {
  double s = 0.5;
  double p_s = 0.0;
  double eps = 0.0;
  double sigma = 0.0;

  static FracOrder make(int N, double s, double eps = 0.0);
  static double default_sigma(int N, double s);
};

struct Peak {
  double lambda = 1.0;
  Point xi = {0, 0, 0};
};

// Reduction state geometry: peak list, cutoff radius delta, exponents.
// delta == 0 means "no cutoff" (eta == 1), used for untruncated-bubble checks.
struct PeakConfig {
  std::vector<Peak> peaks;
  double delta = 0.0;
  FracOrder order;

  int count() const { return static_cast<int>(peaks.size()); }
  void validate(const Grid& g) const;
  bool truncated() const { return delta > 0.0; }
};

}  // namespace peakforge
