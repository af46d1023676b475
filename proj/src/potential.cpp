#include "peakforge/potential.hpp"

#include <cmath>

namespace peakforge {

PotentialModel PotentialModel::constant(int dim, double v0) {
  PotentialModel m;
  m.dim = dim;
  m.baseline = v0;
  return m;
}

double potential_value(const Point& x, const PotentialModel& m) {
  double v = m.baseline;
  for (const PotentialBump& b : m.bumps) {
    double r2 = 0.0;
    for (int d = 0; d < m.dim; ++d) {
      double t = x[d] - b.center[d];
      r2 += t * t;
    }
    v += b.amplitude * std::exp(-r2 / b.width);
  }
  return v;
}

Point potential_grad(const Point& x, const PotentialModel& m) {
  Point g = {0, 0, 0};
  for (const PotentialBump& b : m.bumps) {
    double r2 = 0.0;
    for (int d = 0; d < m.dim; ++d) {
      double t = x[d] - b.center[d];
      r2 += t * t;
    }
    double e = b.amplitude * std::exp(-r2 / b.width);
    for (int d = 0; d < m.dim; ++d) g[d] += -2.0 * (x[d] - b.center[d]) / b.width * e;
  }
  return g;
}

std::array<double, 9> potential_hessian(const Point& x, const PotentialModel& m) {
  std::array<double, 9> H = {0, 0, 0, 0, 0, 0, 0, 0, 0};
  for (const PotentialBump& b : m.bumps) {
    double r2 = 0.0;
    Point d = {0, 0, 0};
    for (int k = 0; k < m.dim; ++k) {
      d[k] = x[k] - b.center[k];
      r2 += d[k] * d[k];
    }
    double e = b.amplitude * std::exp(-r2 / b.width);
    for (int i = 0; i < m.dim; ++i)
      for (int j = 0; j < m.dim; ++j) {
        double hij = 4.0 * d[i] * d[j] / (b.width * b.width) * e;
        if (i == j) hij -= 2.0 / b.width * e;
        H[3 * i + j] += hij;
      }
  }
  return H;
}

Field potential_field(const Grid& g, const PotentialModel& m) {
  return sample(g, [&](const Point& x) { return potential_value(x, m); });
}

// Eigenvalues of a symmetric dim x dim block via Jacobi rotations.
static std::array<double, 3> sym_eigenvalues(std::array<double, 9> H, int dim) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) off += std::abs(H[3 * i + j]);
    if (off < 1e-15) break;
    for (int p = 0; p < dim; ++p)
      for (int q = p + 1; q < dim; ++q) {
        double apq = H[3 * p + q];
        if (std::abs(apq) < 1e-300) continue;
        double theta = 0.5 * (H[3 * q + q] - H[3 * p + p]) / apq;
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < dim; ++k) {
          double akp = H[3 * k + p], akq = H[3 * k + q];
          H[3 * k + p] = c * akp - s * akq;
          H[3 * k + q] = s * akp + c * akq;
        }
        for (int k = 0; k < dim; ++k) {
          double apk = H[3 * p + k], aqk = H[3 * q + k];
          H[3 * p + k] = c * apk - s * aqk;
          H[3 * q + k] = s * apk + c * aqk;
        }
      }
  }
  return {H[0], dim > 1 ? H[4] : 0.0, dim > 2 ? H[8] : 0.0};
}

CriticalPointReport verify_critical_point(const Point& xi, const PotentialModel& m, double tol) {
  CriticalPointReport rep;
  rep.grad_norm = norm2(potential_grad(xi, m), m.dim);
  rep.hessian_eigenvalues = sym_eigenvalues(potential_hessian(xi, m), m.dim);
  double min_abs = 1e300;
  for (int d = 0; d < m.dim; ++d) min_abs = std::min(min_abs, std::abs(rep.hessian_eigenvalues[d]));
  rep.ok = rep.grad_norm <= tol && min_abs >= tol;
  return rep;
}

double hessian_norm(const Point& x, const PotentialModel& m) {
  auto eig = sym_eigenvalues(potential_hessian(x, m), m.dim);
  double mx = 0.0;
  for (int d = 0; d < m.dim; ++d) mx = std::max(mx, std::abs(eig[d]));
  return mx;
}

}  // namespace peakforge
