#include "peakforge/krylov.hpp"

#include <algorithm>
#include <cmath>

#include "peakforge/norms.hpp"

namespace peakforge {

// Preconditioned MINRES, Paige-Saunders recurrences.
MinresResult minres(const LinearOp& apply, const LinearOp& precond, const Field& rhs,
                    double rel_tol, int max_iter) {
  MinresResult out;
  out.x = Field(rhs.grid, 0.0);

  Field r1 = rhs;
  Field y = precond(r1);
  double bb = inner_product_l2(r1, y);
  if (bb < 0.0) fail(ErrorCode::KrylovStagnation, "minres: preconditioner not positive definite");
  double beta1 = std::sqrt(bb);
  if (beta1 == 0.0) {
    out.converged = true;
    return out;
  }
  double oldb = 0.0, beta = beta1;
  double dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Field r2 = r1;
  Field w1(rhs.grid, 0.0), w2(rhs.grid, 0.0);

  for (int it = 1; it <= max_iter; ++it) {
    Field v = y;
    scale(v, 1.0 / beta);
    y = apply(v);
    if (it >= 2) axpy(-beta / oldb, r1, y);
    double alfa = inner_product_l2(v, y);
    axpy(-alfa / beta, r2, y);
    r1 = r2;
    r2 = y;
    y = precond(r2);
    oldb = beta;
    double b2 = inner_product_l2(r2, y);
    if (b2 < 0.0) fail(ErrorCode::KrylovStagnation, "minres: preconditioner not positive definite");
    beta = std::sqrt(b2);

    double oldeps = epsln;
    double delta = cs * dbar + sn * alfa;
    double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::max(std::sqrt(gbar * gbar + beta * beta), 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    double phi = cs * phibar;
    phibar = sn * phibar;

    // w = (v - oldeps*w1 - delta*w2) / gamma
    Field w_new(rhs.grid, 0.0);
    for (std::size_t i = 0; i < w_new.size(); ++i)
      w_new.values[i] = (v.values[i] - oldeps * w1.values[i] - delta * w2.values[i]) / gamma;
    axpy(phi, w_new, out.x);
    w1 = w2;
    w2 = w_new;

    out.iterations = it;
    out.rel_residual = phibar / beta1;
    if (out.rel_residual <= rel_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

LanczosResult lanczos_extreme(const LinearOp& apply, const Field& start, int count, int max_iter,
                              double tol) {
  LanczosResult out;
  std::vector<Field> basis;
  std::vector<double> alphas, betas;

  Field v = start;
  double nv = l2_norm(v);
  if (nv == 0.0) fail(ErrorCode::BadArgument, "lanczos: zero start vector");
  scale(v, 1.0 / nv);
  basis.push_back(v);

  double prev_checked = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Field w = apply(basis.back());
    double alpha = inner_product_l2(w, basis.back());
    alphas.push_back(alpha);
    // Full reorthogonalization (subspaces stay small).
    for (int pass = 0; pass < 2; ++pass)
      for (const Field& b : basis) axpy(-inner_product_l2(w, b), b, w);
    double beta = l2_norm(w);
    if (beta < 1e-13 * std::abs(alpha)) {
      betas.push_back(0.0);
      break;
    }
    betas.push_back(beta);
    scale(w, 1.0 / beta);
    basis.push_back(w);

    int m = static_cast<int>(alphas.size());
    if (m >= count + 2 && (it % 4 == 0 || it == max_iter - 1)) {
      std::vector<double> T(m * m, 0.0), ev, evec;
      for (int i = 0; i < m; ++i) {
        T[i * m + i] = alphas[i];
        if (i + 1 < m) {
          T[i * m + i + 1] = betas[i];
          T[(i + 1) * m + i] = betas[i];
        }
      }
      dense_sym_eig(T, m, ev, evec);
      // largest by |.|
      std::vector<int> order(m);
      for (int i = 0; i < m; ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });
      double sum = 0.0;
      for (int i = 0; i < count && i < m; ++i) sum += ev[order[i]];
      if (std::abs(sum - prev_checked) <= tol * (std::abs(sum) + 1e-300) && m > count + 4) {
        out.converged = true;
        out.eigenvalues.resize(std::min(count, m));
        out.eigenvectors.clear();
        for (int i = 0; i < std::min(count, m); ++i) {
          out.eigenvalues[i] = ev[order[i]];
          Field vec(start.grid, 0.0);
          for (int j = 0; j < m; ++j) axpy(evec[j * m + order[i]], basis[j], vec);
          double nn = l2_norm(vec);
          if (nn > 0) scale(vec, 1.0 / nn);
          out.eigenvectors.push_back(vec);
        }
        return out;
      }
      prev_checked = sum;
    }
  }

  int m = static_cast<int>(alphas.size());
  if (m == 0) fail(ErrorCode::EigNotConverged, "lanczos: no iterations performed");
  std::vector<double> T(m * m, 0.0), ev, evec;
  for (int i = 0; i < m; ++i) {
    T[i * m + i] = alphas[i];
    if (i + 1 < m && betas[i] > 0.0) {
      T[i * m + i + 1] = betas[i];
      T[(i + 1) * m + i] = betas[i];
    }
  }
  dense_sym_eig(T, m, ev, evec);
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });
  out.eigenvalues.resize(std::min(count, m));
  for (int i = 0; i < std::min(count, m); ++i) {
    out.eigenvalues[i] = ev[order[i]];
    Field vec(start.grid, 0.0);
    for (int j = 0; j < m; ++j) axpy(evec[j * m + order[i]], basis[j], vec);
    double nn = l2_norm(vec);
    if (nn > 0) scale(vec, 1.0 / nn);
    out.eigenvectors.push_back(vec);
  }
  out.converged = true;  // best effort at max subspace
  return out;
}

void dense_sym_eig(std::vector<double>& a, int n, std::vector<double>& eigvals,
                   std::vector<double>& eigvecs) {
  eigvecs.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) eigvecs[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[p * n + q]) < 1e-300) continue;
        double theta = 0.5 * (a[q * n + q] - a[p * n + p]) / a[p * n + q];
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = eigvecs[k * n + p], vkq = eigvecs[k * n + q];
          eigvecs[k * n + p] = c * vkp - s * vkq;
          eigvecs[k * n + q] = s * vkp + c * vkq;
        }
      }
  }
  eigvals.resize(n);
  for (int i = 0; i < n; ++i) eigvals[i] = a[i * n + i];
}

bool dense_solve(std::vector<double> a, int n, std::vector<double>& rhs) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-300) return false;
    for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
    std::swap(rhs[c], rhs[piv]);
    double d = a[c * n + c];
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r * n + c] / d;
      for (int k = 0; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (int i = 0; i < n; ++i) rhs[i] /= a[i * n + i];
  return true;
}

}  // namespace peakforge
