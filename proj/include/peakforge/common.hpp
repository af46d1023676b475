#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace peakforge {

inline constexpr const char* kVersion = "peakforge 0.1.0";

// Points in R^N, N <= 3. Unused trailing components stay zero.
using Point = std::array<double, 3>;

inline Point make_point(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Point sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

enum class ErrorCode {
  OddPointCount,
  BadArgument,
  GridMismatch,
  TailDominates,
  KernelUnderresolved,
  ExtrapolationUnstable,
  QuadratureNonConvergent,
  BallOutsideGrid,
  KrylovStagnation,
  NotContracting,
  OuterNewtonDiverged,
  ResolutionTooCoarse,
  EigNotConverged,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

// FNV-1a, used to stamp outputs with a reproducible config fingerprint.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Gamma-function ratios evaluated through lgamma to dodge overflow.
inline double gamma_ratio(double num, double den) {
  return std::exp(std::lgamma(num) - std::lgamma(den));
}

// Surface measure of the unit sphere S^{N-1}.
inline double unit_sphere_area(int N) {
  return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

}  // namespace peakforge
