#pragma once

#include <array>
#include <vector>

#include "peakforge/common.hpp"
#include "peakforge/grid.hpp"

namespace peakforge {

// Bounded nonnegative C^infty potential: V(x) = v0 + sum_j a_j exp(-|x-c_j|^2 / w_j),
// with closed-form gradient and Hessian.
struct PotentialBump {
  Point center = {0, 0, 0};
  double amplitude = 0.0;
  double width = 1.0;  // w in exp(-r^2/w)
};

struct PotentialModel {
  int dim = 1;
  double baseline = 0.0;
  std::vector<PotentialBump> bumps;
  std::vector<Point> declared_critical_points;

  static PotentialModel constant(int dim, double v0);
};

double potential_value(const Point& x, const PotentialModel& m);
Point potential_grad(const Point& x, const PotentialModel& m);
// Row-major dim x dim Hessian.
std::array<double, 9> potential_hessian(const Point& x, const PotentialModel& m);

Field potential_field(const Grid& g, const PotentialModel& m);

struct CriticalPointReport {
  bool ok = false;
  double grad_norm = 0.0;
  std::array<double, 3> hessian_eigenvalues = {0, 0, 0};
};

// ok iff |grad V(xi)| <= tol and min |eig Hess V(xi)| >= tol.
CriticalPointReport verify_critical_point(const Point& xi, const PotentialModel& m, double tol);

// Hessian spectral norm at a point (max |eigenvalue|).
double hessian_norm(const Point& x, const PotentialModel& m);

}  // namespace peakforge
