#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "peakforge/bubble.hpp"
#include "peakforge/extension.hpp"
#include "peakforge/norms.hpp"
#include "peakforge/quad.hpp"

using namespace peakforge;

TEST_CASE("poisson kernel normalization and homogeneity") {
  SUBCASE("mass one in several dimensions") {
    for (auto [N, s] : {std::pair<int, double>{1, 0.2}, {1, 0.5}, {2, 0.3}, {3, 0.7}}) {
      double d = normalization_d(N, s);
      double mass = radial_integrate(
                        [&](double r) { return std::pow(1.0 + r * r, -0.5 * (N + 2 * s)); }, N) *
                    unit_sphere_area(N) * d;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  SUBCASE("closed-form Cauchy kernel value") {
    CHECK(normalization_d(1, 0.5) == doctest::Approx(1.0 / M_PI).epsilon(1e-8));
  }
  SUBCASE("scaling identity P(x,t) = t^{-N} P(x/t, 1)") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> dist(0.1, 3.0);
    for (int i = 0; i < 10; ++i) {
      double x = dist(rng), t = dist(rng), s = 0.35;
      double lhs = poisson_kernel(1, make_point(x), t, s);
      double rhs = poisson_kernel(1, make_point(x / t), 1.0, s) / t;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
  }
}

TEST_CASE("theta profile: series/Bessel consistency and DtN constant") {
  for (double s : {0.2, 0.35, 0.5, 0.8}) {
    const ThetaProfile& prof = theta_profile(s);
    CHECK(prof.theta(0.0) == 1.0);
    CHECK(prof.psi(0.0) == doctest::Approx(kappa_s(s)).epsilon(1e-13));
    double cs = std::pow(2.0, 1.0 - s) / std::tgamma(s);
    for (double rho : {0.5, 1.0, 1.9, 2.1, 3.0, 10.0}) {
      double exact = cs * std::pow(rho, s) * std::cyl_bessel_k(s, rho);
      CHECK(prof.theta(rho) == doctest::Approx(exact).epsilon(1e-9));
    }
    CHECK(prof.theta(0.5) < 1.0);
    CHECK(prof.theta(2.0) < prof.theta(0.5));
  }
  SUBCASE("s = 1/2 profile is exp(-rho)") {
    const ThetaProfile& prof = theta_profile(0.5);
    for (double rho : {0.3, 1.0, 2.5, 7.0})
      CHECK(prof.theta(rho) == doctest::Approx(std::exp(-rho)).epsilon(1e-9));
  }
}

TEST_CASE("grid extension: constants, plane waves, maximum principle") {
  Grid g = make_grid(1, 20.0, 512);
  double s = 0.2;
  SUBCASE("constant extends to itself") {
    Field c(g, 2.5);
    double v = extend_grid(c, HalfSpacePoint{make_point(1.3), 0.7}, s);
    CHECK(v == doctest::Approx(2.5).epsilon(1e-7));
  }
  SUBCASE("plane wave extends with the theta multiplier") {
    double k0 = g.wavenumber(5);
    Field u = sample(g, [&](const Point& x) { return std::cos(k0 * x[0]); });
    const ThetaProfile& prof = theta_profile(s);
    for (double t : {0.5, 1.0, 2.0}) {
      double v = extend_grid(u, HalfSpacePoint{make_point(0.8), t}, s);
      double expect = std::cos(k0 * 0.8) * prof.theta(k0 * t);
      CHECK(v == doctest::Approx(expect).epsilon(5e-5));
    }
  }
  SUBCASE("kernel underresolved guard") {
    Field c(g, 1.0);
    CHECK_THROWS_AS(extend_grid(c, HalfSpacePoint{make_point(0.0), 0.01}, s), Error);
  }
  SUBCASE("maximum principle") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u(g);
    for (double& v : u.values) v = dist(rng);
    double lo = -sup_norm(u), hi = sup_norm(u);
    for (double t : {0.2, 1.0, 4.0}) {
      double v = extend_grid(u, HalfSpacePoint{make_point(-2.0), t}, s);
      CHECK(v >= lo - 1e-9);
      CHECK(v <= hi + 1e-9);
    }
  }
}

TEST_CASE("spectral extension matches the physical kernel route") {
  Grid g = make_grid(1, 40.0, 1024);
  double s = 0.3;
  PeakConfig cfg;
  cfg.order = FracOrder::make(1, s);
  cfg.delta = 2.0;
  cfg.peaks = {Peak{3.0, {0, 0, 0}}};
  Field W = multibump_field(g, cfg);
  SpectralExtension1D ext(W, s);
  for (double t : {0.5, 0.9, 3.0}) {
    HalfSpacePoint X{make_point(1.1), t};
    CHECK(ext.value(1.1, t) == doctest::Approx(extend_grid(W, X, s)).epsilon(1e-7));
    auto grad = extension_gradient_grid(W, X, s);
    double dx, dt;
    ext.grad(1.1, t, &dx, &dt);
    CHECK(dx == doctest::Approx(grad[0]).epsilon(1e-6));
    CHECK(dt == doctest::Approx(grad[1]).epsilon(1e-6));
  }
}

TEST_CASE("extension gradient matches finite differences") {
  Grid g = make_grid(1, 30.0, 512);
  double s = 0.25;
  Field u = sample(g, [&](const Point& x) { return std::exp(-0.3 * x[0] * x[0]); });
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> xd(-3.0, 3.0), td(0.5, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    HalfSpacePoint X{make_point(xd(rng)), td(rng)};
    auto grad = extension_gradient_grid(u, X, s);
    double h = 1e-5;
    double vxp = extend_grid(u, HalfSpacePoint{make_point(X.x[0] + h), X.t}, s);
    double vxm = extend_grid(u, HalfSpacePoint{make_point(X.x[0] - h), X.t}, s);
    double vtp = extend_grid(u, HalfSpacePoint{make_point(X.x[0]), X.t + h}, s);
    double vtm = extend_grid(u, HalfSpacePoint{make_point(X.x[0]), X.t - h}, s);
    CHECK(grad[0] == doctest::Approx((vxp - vxm) / (2 * h)).epsilon(1e-5));
    CHECK(grad[1] == doctest::Approx((vtp - vtm) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("degenerate harmonicity of the extension (FD check)") {
  // div(t^{1-2s} grad u~) = 0, i.e. u~_tt + (1-2s)/t u~_t + u~_xx = 0.
  Grid g = make_grid(1, 30.0, 1024);
  double s = 0.3;
  Field u = sample(g, [&](const Point& x) { return 1.0 / (1.0 + 0.5 * x[0] * x[0]); });
  for (auto [x0, t0] : {std::pair<double, double>{0.5, 1.0}, {-1.2, 2.0}, {2.0, 0.8}}) {
    double h = 0.02 * t0;
    auto val = [&](double x, double t) {
      return extend_grid(u, HalfSpacePoint{make_point(x), t}, s);
    };
    double uxx = (val(x0 + h, t0) - 2 * val(x0, t0) + val(x0 - h, t0)) / (h * h);
    double utt = (val(x0, t0 + h) - 2 * val(x0, t0) + val(x0, t0 - h)) / (h * h);
    double ut = (val(x0, t0 + h) - val(x0, t0 - h)) / (2 * h);
    double resid = utt + (1 - 2 * s) / t0 * ut + uxx;
    double scale = std::abs(uxx) + std::abs(utt) + std::abs(ut / t0) + 1e-12;
    CHECK(std::abs(resid) < 1e-3 * scale);
  }
}

TEST_CASE("DtN residual: bubble, constant, plane wave") {
  double s = 0.2;
  SUBCASE("bubble input (kappa_s-normalized comparison)") {
    Grid g = make_grid(1, 512.0, 16384);  // h = 1/16
    BubbleParams bp{1.0, {0, 0, 0}, 1, s};
    Field U = bubble_field(g, bp);
    std::vector<double> tseq = {1.0, 0.5, 0.25, 0.125};
    double res = dtn_residual(U, 0.0, s, tseq);
    double scale = std::pow(gamma_const(1, s), (1 + 2 * s) / (1 - 2 * s));
    CHECK(std::abs(res) <= 1e-2 * scale);
  }
  SUBCASE("constant maps to zero") {
    Grid g = make_grid(1, 20.0, 512);
    Field c(g, 1.7);
    std::vector<double> tseq = {2.0, 1.0, 0.5, 0.25};
    CHECK(std::abs(dtn_residual(c, 0.3, s, tseq)) < 1e-6);
  }
  SUBCASE("plane wave") {
    Grid g = make_grid(1, 20.0, 1024);
    double k0 = g.wavenumber(3);
    Field u = sample(g, [&](const Point& x) { return std::cos(k0 * x[0]); });
    std::vector<double> tseq = {1.0, 0.5, 0.25, 0.125};
    double res = dtn_residual(u, 0.4, s, tseq);
    CHECK(std::abs(res) <= 1e-3 * std::pow(k0 * k0, s));
  }
}

TEST_CASE("half-sphere quadrature") {
  SUBCASE("arc length in N = 1") {
    HalfSphereQuad q = half_sphere_quadrature(1, make_point(0.3), 2.0, 48);
    double total = 0.0;
    for (double w : q.weights) total += w;
    CHECK(total == doctest::Approx(M_PI * 2.0).epsilon(1e-12));
    for (const auto& n : q.nodes) CHECK(n.t > 0.0);
  }
  SUBCASE("t^{1-2s} integral, s=1/2: weight is 1") {
    HalfSphereQuad q = half_sphere_quadrature(1, make_point(0), 1.5, 48);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      acc += q.weights[i] * std::pow(q.nodes[i].t, 1.0 - 2.0 * 0.5);
    CHECK(acc == doctest::Approx(M_PI * 1.5).epsilon(1e-12));
  }
  SUBCASE("t^{1-2s} integral, s=1/4: Beta-integral oracle") {
    double rho = 1.3, s = 0.25;
    HalfSphereQuad q = half_sphere_quadrature(1, make_point(0), rho, 64);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      acc += q.weights[i] * std::pow(q.nodes[i].t, 1.0 - 2.0 * s);
    // rho^{3/2} int_0^pi sin^{1/2} = rho^{3/2} B(3/4, 1/2)
    double oracle = std::pow(rho, 1.5) * std::tgamma(0.75) * std::tgamma(0.5) / std::tgamma(1.25);
    CHECK(acc == doctest::Approx(oracle).epsilon(1e-6));
  }
  SUBCASE("hemisphere area in N = 2") {
    HalfSphereQuad q = half_sphere_quadrature(2, make_point(0.1, -0.4), 2.0, 32);
    double total = 0.0;
    for (double w : q.weights) total += w;
    CHECK(total == doctest::Approx(2.0 * M_PI * 4.0).epsilon(1e-9));
  }
}

TEST_CASE("kernel-integral bound oracle (half-space estimate)") {
  // int 1/(t+|z|)^alpha 1/|y-z|^beta dz bounded by
  // C [ (1+|y|)^{-beta} t^{N-alpha} + (1+|y|)^{N-alpha-beta} ] on a
  // half-sphere; the fitted C must be stable under quadrature refinement.
  int N = 1;
  double alpha = 1.6, beta = 0.7, rho = 3.0;
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> ang(0.05, M_PI - 0.05);
  auto lhs_integral = [&](double y, double t, double tol) {
    auto rest = [&](double z) { return std::pow(t + std::abs(z), -alpha); };
    double a = std::min(0.0, y) - 60.0, b = std::max(0.0, y) + 60.0;
    // |y-z|^{-beta} absorbed exactly by u = |y-z|^{1-beta} around z = y.
    double q = 1.0 / (1.0 - beta);
    auto left_of_y = [&](double lo) {
      return adaptive_integrate(
                 [&](double u) { return rest(y - std::pow(u, q)); }, 0.0,
                 std::pow(y - lo, 1.0 - beta), tol) * q;
    };
    auto right_of_y = [&](double hi) {
      return adaptive_integrate(
                 [&](double u) { return rest(y + std::pow(u, q)); }, 0.0,
                 std::pow(hi - y, 1.0 - beta), tol) * q;
    };
    double acc = left_of_y(a) + right_of_y(b);
    // algebraic far tails via tan maps
    auto f = [&](double z) {
      return std::pow(t + std::abs(z), -alpha) * std::pow(std::abs(y - z), -beta);
    };
    acc += adaptive_integrate(
               [&](double w) {
                 double c = std::cos(w);
                 return f(a - std::tan(w)) / (c * c);
               },
               0.0, 1.45, tol) +
           adaptive_integrate(
               [&](double w) {
                 double c = std::cos(w);
                 return f(b + std::tan(w)) / (c * c);
               },
               0.0, 1.45, tol);
    return acc;
  };
  auto bound = [&](double y, double t) {
    return std::pow(1.0 + std::abs(y), -beta) * std::pow(t, N - alpha) +
           std::pow(1.0 + std::abs(y), N - alpha - beta);
  };
  double c_coarse = 0.0, c_fine = 0.0;
  for (int i = 0; i < 50; ++i) {
    double a = ang(rng);
    double y = rho * std::cos(a), t = rho * std::sin(a);
    c_coarse = std::max(c_coarse, lhs_integral(y, t, 1e-6) / bound(y, t));
    c_fine = std::max(c_fine, lhs_integral(y, t, 1e-9) / bound(y, t));
  }
  CHECK(c_fine > 0.0);
  CHECK(c_coarse / c_fine < 1.01);
  CHECK(c_fine / c_coarse < 1.01);
}

TEST_CASE("truncated-bubble extension bound oracle") {
  // |W~_{lambda,xi}| <= C lambda^{-(N-2s)/2} (1+|x-xi|)^{-(N-2s)} on the
  // half-sphere; fitted C stable across lambda in {2,4,8}.
  double s = 0.2, delta = 2.0, rho = 5.0;
  std::vector<double> fitted;
  for (double lam : {2.0, 4.0, 8.0}) {
    BubbleParams bp{lam, {0, 0, 0}, 1, s};
    ScalarFn W = [&](const Point& x) {
      return cutoff_profile(std::abs(x[0]), delta) * bubble(x, bp);
    };
    HalfSphereQuad q = half_sphere_quadrature(1, make_point(0), rho, 24);
    double C = 0.0;
    for (const auto& node : q.nodes) {
      double val = std::abs(extend_closed(W, node, s, 1e-8));
      double denom =
          std::pow(lam, -0.5 * (1 - 2 * s)) * std::pow(1.0 + std::abs(node.x[0]), -(1 - 2 * s));
      C = std::max(C, val / denom);
    }
    fitted.push_back(C);
  }
  double cmin = *std::min_element(fitted.begin(), fitted.end());
  double cmax = *std::max_element(fitted.begin(), fitted.end());
  CHECK(cmax / cmin < 2.0);
}
