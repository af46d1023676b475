#include "peakforge/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>

namespace peakforge {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  double* rbuf = nullptr;
  fftw_complex* cbuf = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, PlanPair> g_plans;

// Plans are created once per (dim, M) on canonical fftw-aligned buffers and
// reused through the new-array execute interface.
const PlanPair& plans_for(const Grid& g) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(g.dim, g.points_per_dim);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;

  PlanPair p;
  int n[3] = {g.points_per_dim, g.points_per_dim, g.points_per_dim};
  std::size_t rsize = g.size();
  std::size_t csize = rsize / g.points_per_dim * (g.points_per_dim / 2 + 1);
  p.rbuf = fftw_alloc_real(rsize);
  p.cbuf = fftw_alloc_complex(csize);
  p.fwd = fftw_plan_dft_r2c(g.dim, n, p.rbuf, p.cbuf, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_c2r(g.dim, n, p.cbuf, p.rbuf, FFTW_ESTIMATE);
  return g_plans.emplace(key, p).first->second;
}

struct FftwBuffer {
  double* r = nullptr;
  fftw_complex* c = nullptr;
  FftwBuffer(std::size_t rn, std::size_t cn) {
    r = fftw_alloc_real(rn);
    c = fftw_alloc_complex(cn);
  }
  ~FftwBuffer() {
    fftw_free(r);
    fftw_free(c);
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

Field apply_multiplier(const Field& f, const std::function<double(double)>& symbol) {
  const Grid& g = f.grid;
  const int M = g.points_per_dim;
  const int Mc = M / 2 + 1;
  const std::size_t rsize = g.size();
  const std::size_t csize = rsize / M * Mc;
  const PlanPair& plans = plans_for(g);

  FftwBuffer buf(rsize, csize);
  for (std::size_t i = 0; i < rsize; ++i) buf.r[i] = f.values[i];
  fftw_execute_dft_r2c(plans.fwd, buf.r, buf.c);

  // Complex layout: row-major over the first dim-1 axes, last axis truncated to Mc.
  std::vector<double> k2_axis(M);
  for (int m = 0; m < M; ++m) {
    double k = g.wavenumber(m);
    k2_axis[m] = k * k;
  }
  const double scale = 1.0 / static_cast<double>(rsize);
  std::size_t idx = 0;
  int b[3] = {0, 0, 0};
  std::size_t outer = csize / Mc;
  for (std::size_t o = 0; o < outer; ++o) {
    std::size_t rem = o;
    for (int d = g.dim - 2; d >= 0; --d) {
      b[d] = static_cast<int>(rem % M);
      rem /= M;
    }
    double k2_base = 0.0;
    for (int d = 0; d < g.dim - 1; ++d) k2_base += k2_axis[b[d]];
    for (int m = 0; m < Mc; ++m, ++idx) {
      double mult = symbol(k2_base + k2_axis[m]) * scale;
      buf.c[idx][0] *= mult;
      buf.c[idx][1] *= mult;
    }
  }

  fftw_execute_dft_c2r(plans.bwd, buf.c, buf.r);
  Field out(g);
  for (std::size_t i = 0; i < rsize; ++i) out.values[i] = buf.r[i];
  return out;
}

Field frac_laplacian_spectral(const Field& f, double s) {
  if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::BadArgument, "frac_laplacian_spectral: need 0 < s < 1");
  check_finite(f, "frac_laplacian_spectral");
  return apply_multiplier(f, [s](double k2) { return k2 > 0.0 ? std::pow(k2, s) : 0.0; });
}

Field green_apply(const Field& h, double s) {
  if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::BadArgument, "green_apply: need 0 < s < 1");
  return apply_multiplier(h, [s](double k2) { return k2 > 0.0 ? std::pow(k2, -s) : 0.0; });
}

ModeExpansion1D mode_expansion_1d(const Field& f) {
  if (f.grid.dim != 1) fail(ErrorCode::BadArgument, "mode_expansion_1d: 1-D fields only");
  const Grid& g = f.grid;
  const int M = g.points_per_dim;
  const int Mc = M / 2 + 1;
  const PlanPair& plans = plans_for(g);
  FftwBuffer buf(g.size(), Mc);
  for (int i = 0; i < M; ++i) buf.r[i] = f.values[i];
  fftw_execute_dft_r2c(plans.fwd, buf.r, buf.c);

  ModeExpansion1D ex;
  ex.half_length = g.half_length;
  ex.k.resize(Mc);
  ex.A.resize(Mc);
  ex.B.resize(Mc);
  // Samples are taken at x_j = -L + j h; the DFT phases refer to index j.
  // Fold the -L offset into the coefficients so eval() works in x directly.
  for (int m = 0; m < Mc; ++m) {
    double re = buf.c[m][0] / M;
    double im = buf.c[m][1] / M;
    double factor = (m == 0 || (M % 2 == 0 && m == M / 2)) ? 1.0 : 2.0;
    double km = M_PI * m / g.half_length;
    // u(x_j) = sum_m (re + i im) e^{i 2pi m j / M}, and 2pi m j / M = km (x_j + L).
    double c = std::cos(km * g.half_length), sn = std::sin(km * g.half_length);
    double reL = re * c + im * sn;   // coefficient of cos(km x)
    double imL = im * c - re * sn;   // -coefficient of sin(km x)
    ex.k[m] = km;
    ex.A[m] = factor * reL;
    ex.B[m] = -factor * imL;
  }
  return ex;
}

double ModeExpansion1D::eval(double x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < k.size(); ++m)
    s += A[m] * std::cos(k[m] * x) + B[m] * std::sin(k[m] * x);
  return s;
}

double ModeExpansion1D::eval_deriv(double x) const {
  double s = 0.0;
  for (std::size_t m = 1; m < k.size(); ++m)
    s += k[m] * (-A[m] * std::sin(k[m] * x) + B[m] * std::cos(k[m] * x));
  return s;
}

}  // namespace peakforge
