#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "besovlab/geom_diag.hpp"

using namespace besovlab;
using Catch::Approx;

namespace {
std::vector<double> geometric_radii(double from, double to, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = from * std::pow(to / from, static_cast<double>(i) / static_cast<double>(count - 1));
  return t;
}
}  // namespace

TEST_CASE("circle sausage area is 4 pi t") {
  auto curve = build_curve(CurveSpec::circle(1.0), 1024);
  auto res = minkowski_profile(curve, {0.2, 0.1, 0.05}, 2048, 6);
  for (std::size_t i = 0; i < res.profile.t.size(); ++i) {
    const double t = res.profile.t[i];
    REQUIRE(res.profile.area[i] == Approx(4.0 * kPi * t).epsilon(0.03));
  }
}

TEST_CASE("circle dyadic layers match annulus areas") {
  auto curve = build_curve(CurveSpec::circle(1.0), 1024);
  auto res = minkowski_profile(curve, {0.1, 0.02, 0.004}, 4096, 7, 0.3);
  for (int n = 0; n <= 6; ++n) {
    const double lo = 1.0 - std::ldexp(1.0, -n);
    const double hi = 1.0 - std::ldexp(1.0, -n - 1);
    const double exact = kPi * (hi * hi - lo * lo);
    REQUIRE(res.layer_areas[static_cast<std::size_t>(n)] == Approx(exact).epsilon(0.03));
  }
}

TEST_CASE("layer decay bound holds with one fitted constant") {
  auto curve = build_curve(CurveSpec::circle(1.0), 1024);
  auto res = minkowski_profile(curve, geometric_radii(0.45, 0.0044, 8), 4096, 7, 0.3);
  const double hhat = estimate_h(res.profile);
  // |E_n| 2^{n(2-h)} must stay within one bounded band for n <= 6
  double lo = 1e300, hi = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const double norm = res.layer_areas[static_cast<std::size_t>(n)] * std::pow(2.0, n * (2.0 - hhat));
    lo = std::min(lo, norm);
    hi = std::max(hi, norm);
  }
  REQUIRE(hi / lo < 4.0);
}

TEST_CASE("estimate_h on smooth curves is 1") {
  {
    auto curve = build_curve(CurveSpec::circle(1.0), 1024);
    auto res = minkowski_profile(curve, geometric_radii(0.5, 0.0045, 9), 4096, 6);
    REQUIRE(estimate_h(res.profile) == Approx(1.0).margin(0.03));
  }
  {
    auto curve = build_curve(CurveSpec::radial_cos(0.3, 2), 1024);
    auto res = minkowski_profile(curve, geometric_radii(0.5, 0.0045, 9), 4096, 6);
    REQUIRE(estimate_h(res.profile) == Approx(1.0).margin(0.03));
  }
}

TEST_CASE("snowflake log-log slope approaches 2 - log4/log3") {
  auto curve = build_curve(CurveSpec::snowflake(5), 1024);
  auto res = minkowski_profile(curve, geometric_radii(0.26, 0.0026, 9), 4096, 6, 0.3);
  const double h = estimate_h(res.profile);
  REQUIRE(h == Approx(std::log(4.0) / std::log(3.0)).margin(0.05));
}

TEST_CASE("sausage scaling function stays within a factor 4 at the fitted exponent") {
  auto curve = build_curve(CurveSpec::snowflake(4), 1024);
  auto res = minkowski_profile(curve, geometric_radii(0.26, 0.0026, 8), 4096, 6, 0.3);
  const double h = estimate_h(res.profile);
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < res.profile.t.size(); ++i) {
    const double m = res.profile.area[i] / std::pow(res.profile.t[i], 2.0 - h);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  REQUIRE(hi / lo < 4.0);
}

TEST_CASE("profile validation") {
  auto curve = build_curve(CurveSpec::circle(1.0), 256);
  REQUIRE_THROWS_AS(minkowski_profile(curve, {0.1, 0.2}, 512, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(minkowski_profile(curve, {0.001}, 128, 4), std::invalid_argument);
  SausageProfile bad;
  bad.t = {0.5, 0.4, 0.3, 0.2};
  bad.area = {1.0, 1.2, 0.9, 0.8};  // non-monotone
  bad.cell = 1e-4;
  REQUIRE_THROWS_AS(estimate_h(bad), std::invalid_argument);
}

TEST_CASE("constant weight has unit A_p constant") {
  auto curve = build_curve(CurveSpec::circle(1.0), 512);
  auto disks = default_disk_family(curve);
  for (double p : {1.5, 2.0, 3.0}) {
    auto est = ap_constant(curve, 0.0, p, disks);
    REQUIRE(est.constant == Approx(1.0).margin(1e-6));
    REQUIRE_FALSE(est.diverged);
  }
}

TEST_CASE("ap constant is at least one") {
  auto curve = build_curve(CurveSpec::circle(1.0), 512);
  auto disks = default_disk_family(curve);
  for (double alpha : {-0.8, -0.5, 0.4}) {
    auto est = ap_constant(curve, alpha, 2.0, disks);
    REQUIRE(est.constant >= 1.0 - 1e-9);
  }
}

TEST_CASE("integrable circle weight: stable trace, oracle agreement on one disk") {
  auto curve = build_curve(CurveSpec::circle(1.0), 1024);
  std::vector<Disk> one = {{cplx(1.0, 0.0), 0.25, "on-curve"}};
  auto est = ap_constant(curve, -0.5, 2.0, one, 3);
  REQUIRE_FALSE(est.diverged);
  for (std::size_t i = 1; i < est.trace.size(); ++i)
    REQUIRE(est.trace[i] < 1.5 * est.trace[i - 1]);

  // oracle: 1-D reduction of both disk integrals; the cross-section of the
  // disk at radius rho has exact angular width from the law of cosines
  auto disk_avg = [](double alpha) {
    const double R = 0.25;
    const long m = 200000;
    double acc = 0.0, area = 0.0;
    for (long i = 0; i < m; ++i) {
      const double rho = 1.0 - R + (2.0 * R) * (i + 0.5) / m;
      const double c = (rho * rho + 1.0 - R * R) / (2.0 * rho);
      if (c > 1.0) continue;
      const double halfang = std::acos(std::clamp(c, -1.0, 1.0));
      const double len = 2.0 * halfang * rho;
      acc += std::pow(std::abs(1.0 - rho), alpha) * len * (2.0 * R / m);
      area += len * (2.0 * R / m);
    }
    return acc / area;
  };
  const double oracle = disk_avg(-0.5) * std::pow(disk_avg(0.5), 1.0);
  REQUIRE(est.constant == Approx(oracle).epsilon(0.05));
}

TEST_CASE("non-integrable circle weight diverges across levels") {
  auto curve = build_curve(CurveSpec::circle(1.0), 1024);
  std::vector<Disk> one = {{cplx(1.0, 0.0), 0.25, "on-curve"}};
  auto est = ap_constant(curve, -1.2, 2.0, one, 3);
  REQUIRE(est.diverged);
  for (std::size_t i = 1; i < est.trace.size(); ++i) REQUIRE(est.trace[i] > 10.0 * est.trace[i - 1]);
  REQUIRE(est.note.find("not A_p") != std::string::npos);
}

TEST_CASE("astala dichotomy on a five-point alpha sweep") {
  auto curve = build_curve(CurveSpec::circle(1.0), 1024);
  auto disks = default_disk_family(curve);
  for (double alpha_paper : {-0.5, -0.2, 0.2, 0.5, 0.8}) {
    auto est = ap_constant(curve, alpha_paper - 1.0, 2.0, disks, 3);
    const bool predicted_ap = alpha_paper > 0.0;  // h(circle) - 1 = 0
    REQUIRE(est.diverged == !predicted_ap);
  }
}

TEST_CASE("ap validation") {
  auto curve = build_curve(CurveSpec::circle(1.0), 256);
  auto disks = default_disk_family(curve);
  REQUIRE_THROWS_AS(ap_constant(curve, -0.5, 1.0, disks), std::invalid_argument);
  REQUIRE_THROWS_AS(ap_constant(curve, -2.5, 2.0, disks), std::invalid_argument);
  REQUIRE_THROWS_AS(ap_constant(curve, 1.5, 1.5, disks), std::invalid_argument);  // dual <= -2
}

TEST_CASE("admissible region") {
  // h = 1: everything with 0 < s < 1
  for (double p : {1.5, 2.0, 5.0})
    for (double s : {0.01, 0.5, 0.99}) REQUIRE(admissible(1.0, p, s));
  // h = 1.5, p = 2: 0.25 < s < 0.75
  REQUIRE_FALSE(admissible(1.5, 2.0, 0.24));
  REQUIRE(admissible(1.5, 2.0, 0.26));
  REQUIRE(admissible(1.5, 2.0, 0.74));
  REQUIRE_FALSE(admissible(1.5, 2.0, 0.76));
  // h = 1.5, large p: lower boundary tends to 1/2
  REQUIRE_FALSE(admissible(1.5, 1e6, 0.499));
  REQUIRE(admissible(1.5, 1e6, 0.5005));
  auto region = admissible_region(1.5, {2.0, 3.0}, {0.1, 0.5, 0.9});
  REQUIRE(region.size() == 6);
  REQUIRE_THROWS_AS(admissible_region(2.5, {2.0}, {0.5}), std::invalid_argument);
}
