#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "besovlab/spectral.hpp"

using namespace besovlab;
using Catch::Approx;

TEST_CASE("fourier round trip on random data") {
  Rng rng(3);
  std::vector<cplx> v(1024);
  double scale = 0.0;
  for (auto& x : v) {
    x = cplx(rng.normal(), rng.normal());
    scale = std::max(scale, std::abs(x));
  }
  auto f = BoundaryFunction::from_samples(v);
  auto back = to_samples(f.modes);
  for (std::size_t k = 0; k < v.size(); ++k) REQUIRE(std::abs(back[k] - v[k]) < 1e-12 * scale);
}

TEST_CASE("hs seminorm on pure modes") {
  const std::size_t n = 256;
  for (double s : {0.0, 0.25, 0.5, 1.0}) {
    REQUIRE(hs_seminorm(BoundaryFunction::mode(n, 1), s) == Approx(1.0).margin(1e-13));
  }
  REQUIRE(hs_seminorm(BoundaryFunction::constant(n, cplx(2.5, -1.0)), 0.7) == Approx(0.0).margin(1e-14));
  REQUIRE(hs_seminorm(BoundaryFunction::mode(n, 3), 0.5) == Approx(std::sqrt(3.0)).margin(1e-12));
  REQUIRE(hs_seminorm(BoundaryFunction::mode(n, -5), 0.5) == Approx(std::sqrt(5.0)).margin(1e-12));
}

TEST_CASE("parseval at s = 0") {
  const std::size_t n = 512;
  Rng rng(9);
  auto f = BoundaryFunction::random_trig(n, 20, rng);
  cplx mean(0, 0);
  for (const auto& v : f.samples) mean += v;
  mean /= static_cast<double>(n);
  double l2 = 0.0;
  for (const auto& v : f.samples) l2 += std::norm(v - mean);
  l2 = std::sqrt(l2 / static_cast<double>(n));
  REQUIRE(hs_seminorm(f, 0.0) == Approx(l2).margin(1e-10));
}

TEST_CASE("poisson field of single modes") {
  const std::size_t n = 256;
  auto grid = PolarGrid::make(n, 12, 4);

  auto f1 = BoundaryFunction::mode(n, 1);  // u = z
  auto field1 = poisson_field(f1, grid);
  for (std::size_t i = 0; i < field1.nr(); i += 7) {
    for (std::size_t k = 0; k < n; k += 31) {
      const cplx z = std::polar(grid.r[i], kTwoPi * k / n);
      REQUIRE(std::abs(field1.u[i * n + k] - z) < 1e-12);
      REQUIRE(std::sqrt(field1.grad_abs2(i, k)) == Approx(std::sqrt(2.0)).margin(1e-12));
    }
  }

  // f = cos(theta): u = Re z, |grad u| = 1
  std::vector<cplx> m(n, cplx(0, 0));
  m[1] = 0.5;
  m[n - 1] = 0.5;
  auto field2 = poisson_field(BoundaryFunction::from_modes(m), grid);
  for (std::size_t i = 0; i < field2.nr(); i += 11) {
    REQUIRE(std::sqrt(field2.grad_abs2(i, 3)) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("poisson gradient matches finite differences") {
  const std::size_t n = 256;
  auto grid = PolarGrid::make(n, 10, 4);
  auto f = BoundaryFunction::mode(n, -2);  // u = conj(z)^2
  auto field = poisson_field(f, grid);
  const double h = 1e-6;
  for (std::size_t i = 2; i < field.nr(); i += 9) {
    for (std::size_t k = 0; k < n; k += 37) {
      const cplx z = std::polar(grid.r[i], kTwoPi * k / n);
      const cplx fd_x = (poisson_value(f, z + h) - poisson_value(f, z - h)) / (2 * h);
      const cplx fd_y = (poisson_value(f, z + cplx(0, h)) - poisson_value(f, z - cplx(0, h))) / (2 * h);
      REQUIRE(std::abs(field.gx[i * n + k] - fd_x) < 1e-6);
      REQUIRE(std::abs(field.gy[i * n + k] - fd_y) < 1e-6);
    }
  }
}

TEST_CASE("discrete mean value property") {
  const std::size_t n = 256;
  Rng rng(17);
  auto f = BoundaryFunction::random_trig(n, 10, rng);
  for (const cplx z0 : {cplx(0.2, 0.1), cplx(-0.4, 0.3), cplx(0.0, -0.55)}) {
    const double rho = 0.1;
    cplx avg(0, 0);
    const int q = 64;
    for (int j = 0; j < q; ++j) avg += poisson_value(f, z0 + std::polar(rho, kTwoPi * j / q));
    avg /= static_cast<double>(q);
    REQUIRE(std::abs(avg - poisson_value(f, z0)) < 1e-6 * std::abs(poisson_value(f, z0)) + 1e-9);
  }
}

TEST_CASE("hilbert transform multiplier basics") {
  const std::size_t n = 256;
  std::vector<cplx> m(n, cplx(0, 0));
  m[1] = 0.5;
  m[n - 1] = 0.5;  // cos theta
  auto h = hilbert_transform(BoundaryFunction::from_modes(m));
  for (std::size_t k = 0; k < n; k += 13) {
    const double th = kTwoPi * k / n;
    REQUIRE(std::abs(h.samples[k] - std::sin(th)) < 1e-13);
  }
  auto hc = hilbert_transform(BoundaryFunction::constant(n, cplx(3, 4)));
  for (const auto& v : hc.samples) REQUIRE(std::abs(v) < 1e-13);
}

TEST_CASE("hilbert transform equals desingularized cotangent quadrature") {
  const std::size_t n = 1024;
  const int degree = 16;
  Rng rng(23);
  // build with known coefficients so the oracle has its own derivative
  std::vector<cplx> coef(2 * degree + 1);
  for (auto& c : coef) c = cplx(rng.normal(), rng.normal());
  std::vector<cplx> samples(n), deriv(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    cplx v(0, 0), d(0, 0);
    for (int nn = -degree; nn <= degree; ++nn) {
      const cplx e = std::polar(1.0, nn * th);
      v += coef[nn + degree] * e;
      d += coef[nn + degree] * cplx(0, nn) * e;
    }
    samples[k] = v;
    deriv[k] = d;
  }
  auto f = BoundaryFunction::from_samples(samples);
  auto hf = hilbert_transform(f);
  const double dth = kTwoPi / n;
  for (std::size_t j = 0; j < n; j += 64) {
    cplx acc = -2.0 * deriv[j];  // diagonal limit of cot((t_j-t)/2)(f(t)-f(t_j))
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const double x = (kTwoPi * j / n - kTwoPi * k / n) / 2.0;
      acc += (samples[k] - samples[j]) / std::tan(x);
    }
    const cplx oracle = acc * dth / kTwoPi;
    REQUIRE(std::abs(hf.samples[j] - oracle) < 1e-8);
  }
}

TEST_CASE("H squared is minus identity modulo means") {
  const std::size_t n = 512;
  Rng rng(31);
  auto f = BoundaryFunction::random_trig(n, 30, rng);
  auto hh = hilbert_transform(hilbert_transform(f));
  cplx mean(0, 0);
  for (const auto& v : f.samples) mean += v;
  mean /= static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(hh.samples[k] + (f.samples[k] - mean)) < 1e-10);
}

TEST_CASE("conjugate on curve with identity correspondence is the Hilbert transform") {
  const std::size_t n = 512;
  Rng rng(41);
  auto f = BoundaryFunction::random_trig(n, 12, rng);
  auto viaH = hilbert_transform(f);
  auto viaC = conjugate_on_curve(f, CircleHomeo::identity(n));
  for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(viaC.samples[k] - viaH.samples[k]) < 1e-6);
  auto c = conjugate_on_curve(BoundaryFunction::constant(n, cplx(1, 2)), CircleHomeo::identity(n));
  for (const auto& v : c.samples) REQUIRE(std::abs(v) < 1e-8);
}

TEST_CASE("conjugate transported by a nontrivial correspondence") {
  const std::size_t n = 1024;
  std::vector<double> sig(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    sig[k] = th + 0.3 * std::sin(th);
  }
  CircleHomeo sigma(sig);
  std::vector<cplx> fs(n);
  for (std::size_t k = 0; k < n; ++k) fs[k] = std::cos(kTwoPi * k / n);
  auto f = BoundaryFunction::from_samples(fs);
  auto tilde = conjugate_on_curve(f, sigma);

  // oracle: cot-kernel quadrature of H on the composed function, evaluated at
  // sigma^{-1}(theta) found by plain bisection
  const std::size_t m = 8192;
  std::vector<cplx> comp(m), dcomp(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double th = kTwoPi * k / m;
    const double s = th + 0.3 * std::sin(th);
    comp[k] = std::cos(s);
    dcomp[k] = -std::sin(s) * (1.0 + 0.3 * std::cos(th));
  }
  auto Hcomp = [&](double theta) {
    cplx acc(0, 0);
    const cplx f_here = std::cos(theta + 0.3 * std::sin(theta));
    for (std::size_t k = 0; k < m; ++k) {
      const double x = (theta - kTwoPi * k / m) / 2.0;
      if (std::abs(std::sin(x)) < 1e-12) {
        acc += -2.0 * dcomp[k];
        continue;
      }
      acc += (comp[k] - f_here) / std::tan(x);
    }
    return acc / static_cast<double>(m);
  };
  for (std::size_t k = 0; k < n; k += 128) {
    const double th = kTwoPi * k / n;
    double lo = th - 0.5, hi = th + 0.5;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid + 0.3 * std::sin(mid) < th)
        lo = mid;
      else
        hi = mid;
    }
    const cplx oracle = Hcomp(0.5 * (lo + hi));
    REQUIRE(std::abs(tilde.samples[k] - oracle) < 1e-4);
  }
}

TEST_CASE("sigma validation") {
  const std::size_t n = 256;
  std::vector<double> bad(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    bad[k] = th + 1.2 * std::sin(th);  // derivative dips below zero
  }
  REQUIRE_THROWS_AS(CircleHomeo(bad), std::invalid_argument);
}

TEST_CASE("littlewood-paley grid sum is proportional to the hs seminorm") {
  const std::size_t n = 512;
  auto grid = PolarGrid::make(n, 18, 8);
  for (double s : {0.3, 0.5, 0.7}) {
    std::vector<double> ratios;
    for (int mode = 10; mode <= 19; ++mode) {
      auto f = BoundaryFunction::mode(n, mode);
      auto field = poisson_field(f, grid);
      double lp2 = 0.0;
      for (std::size_t i = 0; i < field.nr(); ++i) {
        const double w = grid.weight(i) * std::pow(1.0 - grid.r[i], 1.0 - 2.0 * s);
        for (std::size_t k = 0; k < n; ++k) lp2 += field.grad_abs2(i, k) * w;
      }
      ratios.push_back(lp2 / sqr(hs_seminorm(f, s)));
    }
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    REQUIRE(*mx / *mn < 1.02);
    if (s == 0.5) {
      for (double r : ratios) REQUIRE(r == Approx(kTwoPi).epsilon(0.02));
    }
  }
}
