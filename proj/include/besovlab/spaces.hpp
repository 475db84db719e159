#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovlab/conformal.hpp"
#include "besovlab/curves.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

struct WeightExponent {
  double value = 0.0;  // (1-s)p - 1
  static WeightExponent of(double p, double s) { return {(1.0 - s) * p - 1.0}; }
  // Remark-E012 regime where even u(z) = z escapes the space
  static bool divergence_warning(double p, double s, double h) { return s >= (p + 1.0 - h) / p; }
};

// Boundary data lives on Gamma through the arc-length parametrization: sample k
// of f sits at the point with arc length L k / N.
struct ArclengthFrame {
  std::vector<cplx> z;
  double delta = 0.0;  // uniform arc-length spacing

  static ArclengthFrame make(const SampledCurve& curve, std::size_t n) {
    ArclengthFrame fr;
    fr.delta = curve.length / static_cast<double>(n);
    fr.z.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      fr.z[k] = curve.point_at_arclength(curve.length * static_cast<double>(k) / static_cast<double>(n));
    return fr;
  }
};

// Double arc-length sum of |f(z)-f(zeta)|^p / |z-zeta|^{1+ps}. The diagonal
// band |j-k| <= 1 uses the local linear model in closed form; its contribution
// vanishes like Delta^{(1-s)p+1}.
inline double douglas_norm(const SampledCurve& curve, const BoundaryFunction& f, double p, double s) {
  if (p <= 1.0) throw std::invalid_argument("douglas_norm needs p > 1");
  if (s <= 0.0 || s >= 1.0) throw std::invalid_argument("douglas_norm needs 0 < s < 1");
  const std::size_t n = f.size();
  const auto frame = ArclengthFrame::make(curve, n);
  const double delta = frame.delta;
  const double beta = p - 1.0 - p * s;  // exponent of the linear local model
  const double expo = 1.0 + p * s;

  std::vector<double> row_sums(n, 0.0);
  parallel_for(n, [&](std::size_t j) {
    double acc = 0.0;
    for (std::size_t k = j + 2; k < n; ++k) {
      if (j == 0 && k == n - 1) continue;  // circularly adjacent
      const double num = std::pow(std::abs(f.samples[j] - f.samples[k]), p);
      acc += num / std::pow(std::abs(frame.z[j] - frame.z[k]), expo);
    }
    row_sums[j] = acc * delta * delta;
  });
  double off = 0.0;
  for (double v : row_sums) off += v;
  off *= 2.0;  // ordered pairs

  const double denom = (beta + 1.0) * (beta + 2.0);
  const double j_adj = (std::pow(2.0 * delta, beta + 2.0) - 2.0 * std::pow(delta, beta + 2.0)) / denom;
  const double j_self = 2.0 * std::pow(delta, beta + 2.0) / denom;
  double diag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jn = (j + 1) % n;
    const std::size_t jp = (j + n - 1) % n;
    const double lam_adj = std::abs(f.samples[jn] - f.samples[j]) / delta;
    const double lam_self = std::abs(f.samples[jn] - f.samples[jp]) / (2.0 * delta);
    diag += 2.0 * std::pow(lam_adj, p) * j_adj + std::pow(lam_self, p) * j_self;
  }
  return std::pow(off + diag, 1.0 / p);
}

// Pushforward of the graded disk grid through a starlike map, with the exact
// distance to the physical curve at every node. Exterior maps carry the
// inversion factors |phi~|^{2p-4} coming from w = 1/z.
struct TransportGrid {
  PolarGrid grid;
  bool exterior = false;
  std::vector<cplx> image;        // physical points (after inversion when exterior)
  std::vector<double> abs_dphi;   // |phi'| of the model map
  std::vector<double> abs_phi;    // |phi| of the model map
  std::vector<double> dist;       // d(image, Gamma)
  std::vector<double> one_minus_r;

  static TransportGrid make(const SampledCurve& curve, const StarlikeMap& map, const PolarGrid& grid) {
    if (!map.converged) throw std::runtime_error("transport grid requires a converged map");
    TransportGrid tg;
    tg.grid = grid;
    tg.exterior = map.orientation == StarlikeMap::Orientation::ExteriorViaInversion;
    const std::size_t nth = grid.ntheta;
    const std::size_t total = grid.nr() * nth;
    tg.image.resize(total);
    tg.abs_dphi.resize(total);
    tg.abs_phi.resize(total);
    tg.dist.resize(total);
    tg.one_minus_r.resize(total);
    parallel_for(grid.nr(), [&](std::size_t i) {
      for (std::size_t k = 0; k < nth; ++k) {
        const cplx z = std::polar(grid.r[i], kTwoPi * k / static_cast<double>(nth));
        const auto [phi, dphi] = map.eval(z);
        const std::size_t idx = i * nth + k;
        tg.abs_dphi[idx] = std::abs(dphi);
        tg.abs_phi[idx] = std::abs(phi);
        tg.image[idx] = tg.exterior ? 1.0 / phi : phi;
        tg.dist[idx] = signed_distance(curve, tg.image[idx]).d;
        tg.one_minus_r[idx] = 1.0 - grid.r[i];
      }
    });
    return tg;
  }
};

// Boundary data for the disk problem: g(theta) = f at the curve parameter hit
// by the map's boundary correspondence, with f read through arc length.
inline BoundaryFunction transported_boundary(const SampledCurve& curve, const StarlikeMap& map,
                                             const BoundaryFunction& f) {
  const std::size_t n = map.grid_size();
  const DenseEval fe = f.dense();
  const CircleHomeo h = map.correspondence();
  const bool ext = map.orientation == StarlikeMap::Orientation::ExteriorViaInversion;
  std::vector<cplx> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = kTwoPi * k / static_cast<double>(n);
    double t = h.eval(theta);
    if (ext) t = -t;
    const double arc = curve.arclength_at_param(t);
    g[k] = fe(kTwoPi * arc / curve.length);
  }
  return BoundaryFunction::from_samples(std::move(g));
}

struct LpDiagnostics {
  double tail_fraction = 0.0;  // contribution of the deepest dyadic level
  bool divergent_tail = false;
  bool e012_warning = false;
};

enum class DomainSide { Interior, Exterior };

// Integral of |grad u|^p d(z,Gamma)^{(1-s)p-1} over one complementary domain,
// computed on the disk through the map. The distance weight is the exact
// signed distance, never the Koebe surrogate (1-|z|)|phi'|.
inline double littlewood_paley_norm(const SampledCurve& curve, const StarlikeMap& map,
                                    const BoundaryFunction& f, double p, double s, DomainSide side,
                                    const PolarGrid& grid, LpDiagnostics* diag = nullptr,
                                    double h_estimate = 1.0) {
  if (p <= 1.0 || s <= 0.0 || s >= 1.0) throw std::invalid_argument("littlewood_paley_norm needs p > 1, 0 < s < 1");
  const bool want_exterior = side == DomainSide::Exterior;
  const bool map_exterior = map.orientation == StarlikeMap::Orientation::ExteriorViaInversion;
  if (want_exterior != map_exterior)
    throw std::invalid_argument("map orientation does not match the requested side");

  const BoundaryFunction g = transported_boundary(curve, map, f);
  const HarmonicField v = poisson_field(g, grid);
  const TransportGrid tg = TransportGrid::make(curve, map, grid);

  const double wexp = (1.0 - s) * p - 1.0;
  const std::size_t nth = grid.ntheta;
  std::vector<double> row_sums(grid.nr(), 0.0);
  parallel_for(grid.nr(), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < nth; ++k) {
      const std::size_t idx = i * nth + k;
      const double gradmag = std::sqrt(v.grad_abs2(i, k)) / tg.abs_dphi[idx];  // |grad u| at the image
      double integrand = std::pow(gradmag, p) * std::pow(tg.dist[idx], wexp);
      // area transport: |phi'|^2, and the w = 1/z Jacobian factors outside
      integrand *= sqr(tg.abs_dphi[idx]);
      if (tg.exterior) integrand *= std::pow(tg.abs_phi[idx], 2.0 * p - 4.0);
      acc += integrand * grid.weight(i);
    }
    row_sums[i] = acc;
  });
  std::vector<double> level_sums(grid.levels, 0.0);
  for (std::size_t i = 0; i < grid.nr(); ++i) level_sums[i / grid.fill] += row_sums[i];
  double total = 0.0;
  for (double v2 : level_sums) total += v2;
  if (diag) {
    diag->tail_fraction = total > 0.0 ? level_sums[grid.levels - 1] / total : 0.0;
    diag->divergent_tail = diag->tail_fraction > 0.10;
    diag->e012_warning = WeightExponent::divergence_warning(p, s, h_estimate);
  }
  return std::pow(total, 1.0 / p);
}

namespace detail {
// |grad u(w)| = |grad (u o phi)(z)| / |phi'(z)| needs care at the exterior
// chart: there u o Phi_e with Phi_e = 1/phi~, handled by the same model-map
// division because |d(1/phi~)/dz| = |phi~'| / |phi~|^2.
inline double physical_grad(const TransportGrid& tg, const HarmonicField& v, std::size_t i, std::size_t k) {
  const std::size_t idx = i * tg.grid.ntheta + k;
  double g = std::sqrt(v.grad_abs2(i, k)) / tg.abs_dphi[idx];
  if (tg.exterior) g *= sqr(tg.abs_phi[idx]);
  return g;
}
}  // namespace detail

struct GradientBoundReport {
  double c_emp = 0.0;  // sup |grad u(w)| d(w,Gamma)^{(1+(1-s)p)/p}
  double lp_norm = 0.0;
};

// Empirical constant of the interior gradient bound (s > 1/p regime).
inline GradientBoundReport gradient_bound_check(const SampledCurve& curve, const StarlikeMap& map,
                                                const BoundaryFunction& f, double p, double s,
                                                const PolarGrid& grid) {
  if (s <= 1.0 / p) throw std::invalid_argument("gradient bound check applies for s > 1/p");
  GradientBoundReport rep;
  rep.lp_norm = littlewood_paley_norm(curve, map, f, p, s,
                                      map.orientation == StarlikeMap::Orientation::Interior
                                          ? DomainSide::Interior
                                          : DomainSide::Exterior,
                                      grid);
  const BoundaryFunction g = transported_boundary(curve, map, f);
  const HarmonicField v = poisson_field(g, grid);
  const TransportGrid tg = TransportGrid::make(curve, map, grid);
  const double expo = (1.0 + (1.0 - s) * p) / p;
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.nr(); ++i) {
    for (std::size_t k = 0; k < grid.ntheta; ++k) {
      const std::size_t idx = i * grid.ntheta + k;
      sup = std::max(sup, detail::physical_grad(tg, v, i, k) * std::pow(tg.dist[idx], expo));
    }
  }
  rep.c_emp = sup;
  return rep;
}

// max over sampled pairs of |f(z)-f(zeta)| / |z-zeta|^alpha
inline double holder_seminorm(const SampledCurve& curve, const BoundaryFunction& f, double alpha) {
  if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("holder_seminorm needs 0 < alpha <= 1");
  const std::size_t n = std::min<std::size_t>(f.size(), 512);
  const std::size_t stride = f.size() / n;
  const auto frame = ArclengthFrame::make(curve, f.size());
  double sup = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double dz = std::abs(frame.z[j * stride] - frame.z[k * stride]);
      if (dz == 0.0) continue;
      sup = std::max(sup, std::abs(f.samples[j * stride] - f.samples[k * stride]) / std::pow(dz, alpha));
    }
  }
  return sup;
}

// ratio of the V_{s,p} image energy on the disk to the holomorphic energy on
// the domain; f is an analytic polynomial given by coefficients.
inline double vsp_isometry_check(const SampledCurve& curve, const StarlikeMap& map,
                                 const std::vector<cplx>& poly, double p, double s, const PolarGrid& grid) {
  if (map.orientation != StarlikeMap::Orientation::Interior)
    throw std::invalid_argument("vsp check uses the interior map");
  const TransportGrid tg = TransportGrid::make(curve, map, grid);
  auto fprime = [&poly](cplx zeta) {
    cplx acc(0, 0);
    for (std::size_t k = poly.size(); k-- > 1;) acc = acc * zeta + static_cast<double>(k) * poly[k];
    return acc;
  };
  const double wexp = (1.0 - s) * p - 1.0;
  const double power = 1.0 + 1.0 / p - s;  // V'(z) = f'(phi) phi'^{1+1/p-s}
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.nr(); ++i) {
    for (std::size_t k = 0; k < grid.ntheta; ++k) {
      const std::size_t idx = i * grid.ntheta + k;
      const cplx z = std::polar(grid.r[i], kTwoPi * k / static_cast<double>(grid.ntheta));
      const double fp = std::abs(fprime(tg.image[idx]));
      const double w = grid.weight(i);
      const double abs_vp = fp * std::exp(power * map.log_phi_prime(z).real());
      num += std::pow(abs_vp, p) * std::pow(tg.one_minus_r[idx], wexp) * w;
      den += std::pow(fp, p) * sqr(tg.abs_dphi[idx]) * std::pow(tg.dist[idx], wexp) * w;
    }
  }
  if (den == 0.0) throw std::runtime_error("degenerate polynomial energy");
  return num / den;
}

struct NormReport {
  double p = 2.0, s = 0.5;
  double douglas = 0.0;
  std::optional<double> lp_interior, lp_exterior;
  std::optional<double> hs_fourier;  // circle-only spectral route
  std::optional<double> holder;      // order s - 1/p when s > 1/p
  std::size_t n = 0;
  std::size_t grid_levels = 0;
  std::vector<std::string> flags;
};

struct NormReportOptions {
  std::size_t levels = 16;
  std::size_t fill = 8;
  double h_estimate = 1.0;
};

inline NormReport make_norm_report(const SampledCurve& curve, const BoundaryFunction& f, double p,
                                   double s, const NormReportOptions& opt = {}) {
  NormReport rep;
  rep.p = p;
  rep.s = s;
  rep.n = f.size();
  rep.grid_levels = opt.levels;
  if (curve.spec.kind == CurveSpec::Kind::Snowflake)
    rep.flags.push_back("non-rectifiable family: douglas computed against the prefractal level");
  if (WeightExponent::divergence_warning(p, s, opt.h_estimate))
    rep.flags.push_back("weight outside the convergence region: s >= (p+1-h)/p");
  rep.douglas = douglas_norm(curve, f, p, s);
  if (curve.spec.smooth()) {
    const auto grid = PolarGrid::make(f.size(), opt.levels, opt.fill);
    LpDiagnostics di, de;
    const auto mi = theodorsen_map(curve.spec, StarlikeMap::Orientation::Interior, f.size());
    const auto me = theodorsen_map(curve.spec, StarlikeMap::Orientation::ExteriorViaInversion, f.size());
    rep.lp_interior = littlewood_paley_norm(curve, mi, f, p, s, DomainSide::Interior, grid, &di, opt.h_estimate);
    rep.lp_exterior = littlewood_paley_norm(curve, me, f, p, s, DomainSide::Exterior, grid, &de, opt.h_estimate);
    if (di.divergent_tail) rep.flags.push_back("interior graded tail above 10%");
    if (de.divergent_tail) rep.flags.push_back("exterior graded tail above 10%");
  }
  if (curve.spec.kind == CurveSpec::Kind::Circle) rep.hs_fourier = hs_seminorm(f, s);
  if (s > 1.0 / p) rep.holder = holder_seminorm(curve, f, s - 1.0 / p);
  return rep;
}

}  // namespace besovlab
