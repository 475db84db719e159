#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besovlab/conformal.hpp"
#include "besovlab/curves.hpp"
#include "besovlab/spaces.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

// fixed quintic cutoff: 0 on [0,1/4], 1 on [1/2,1]
inline double cutoff_eta(double x) {
  if (x <= 0.25) return 0.0;
  if (x >= 0.5) return 1.0;
  const double t = (x - 0.25) / 0.25;
  return ((6.0 * t - 15.0) * t + 10.0) * t * t * t;
}

inline double cutoff_eta_prime(double x) {
  if (x <= 0.25 || x >= 0.5) return 0.0;
  const double t = (x - 0.25) / 0.25;
  return ((30.0 * t - 60.0) * t + 30.0) * t * t / 0.25;
}

// Explicit C^1 extension of boundary data f (given against the polar angle) to
// the interior of a starlike curve, or its reflection-transported exterior
// counterpart R(rho e^{i theta}) = (r(theta)^2 / rho) e^{i theta}.
class ExtensionField {
 public:
  enum class Kind { RadialCutoff, Reflection };

  Kind kind() const { return kind_; }

  cplx value(cplx z) const {
    const double rho = std::abs(z);
    const double th = std::arg(z);
    if (kind_ == Kind::RadialCutoff) {
      const double r = spec_.r_of(th);
      return f_(th) * cutoff_eta(rho / r);
    }
    return interior_value(reflect(z));
  }

  // cartesian (d/dx, d/dy), complex components
  std::pair<cplx, cplx> gradient(cplx z) const {
    const double rho = std::abs(z);
    const double th = std::arg(z);
    if (kind_ == Kind::RadialCutoff) {
      const double r = spec_.r_of(th);
      const double rp = spec_.rprime_of(th);
      const double x = rho / r;
      const cplx drho = f_(th) * cutoff_eta_prime(x) / r;
      const cplx dth = ftheta_(th) * cutoff_eta(x) - f_(th) * cutoff_eta_prime(x) * rho * rp / (r * r);
      return polar_to_cartesian(drho, dth, rho, th);
    }
    // U(rho, theta) = u(r^2/rho, theta): chain rule through the reflection
    const double r = spec_.r_of(th);
    const double rp = spec_.rprime_of(th);
    const cplx w = reflect(z);
    const auto [ux, uy] = interior_gradient(w);
    const double rho_p = std::abs(w);
    // polar derivatives of u at the image point
    const cplx u_drho = std::cos(th) * ux + std::sin(th) * uy;
    const cplx u_dth = rho_p * (-std::sin(th) * ux + std::cos(th) * uy);
    const cplx U_drho = u_drho * (-r * r / (rho * rho));
    const cplx U_dth = u_drho * (2.0 * r * rp / rho) + u_dth;
    return polar_to_cartesian(U_drho, U_dth, rho, th);
  }

  cplx dbar(cplx z) const {
    const auto [gx, gy] = gradient(z);
    return 0.5 * (gx + cplx(0, 1) * gy);
  }

 private:
  friend ExtensionField competitor_extension(const SampledCurve&, const BoundaryFunction&, Kind);

  static std::pair<cplx, cplx> polar_to_cartesian(cplx drho, cplx dth, double rho, double th) {
    const double c = std::cos(th), s = std::sin(th);
    const cplx over_rho = rho > 1e-300 ? dth / rho : cplx(0, 0);
    return {c * drho - s * over_rho, s * drho + c * over_rho};
  }

  cplx reflect(cplx z) const {
    const double rho = std::abs(z);
    const double th = std::arg(z);
    const double r = spec_.r_of(th);
    return std::polar(r * r / rho, th);
  }

  // interior harmonic extension u evaluated through the map
  cplx map_invert(cplx w) const {
    cplx y = w / std::exp(map_.log_coeffs[0]);
    if (std::abs(y) > 0.9) y *= 0.9 / std::abs(y);
    for (int it = 0; it < 60; ++it) {
      const auto [phi, dphi] = map_.eval(y);
      const cplx step = (phi - w) / dphi;
      cplx next = y - step;
      if (std::abs(next) >= 1.0) next = next / std::abs(next) * (1.0 - 1e-12);
      y = next;
      if (std::abs(step) < 1e-14) break;
    }
    return y;
  }

  cplx interior_value(cplx w) const { return poisson_value(g_, map_invert(w)); }

  std::pair<cplx, cplx> interior_gradient(cplx w) const {
    const cplx y = map_invert(w);
    const std::size_t n = g_.size();
    cplx pprime(0, 0), qprime(0, 0);
    const double rr = std::abs(y);
    const double thy = std::arg(y);
    for (std::size_t k = 0; k < n; ++k) {
      const int freq = mode_index(k, n);
      if (freq >= 1) {
        const double a = freq;
        pprime += g_.modes[k] * a * std::pow(rr, a - 1.0) * std::polar(1.0, (a - 1.0) * thy);
      } else if (freq <= -1) {
        const double a = -freq;
        qprime += g_.modes[k] * a * std::pow(rr, a - 1.0) * std::polar(1.0, -(a - 1.0) * thy);
      }
    }
    const cplx dphi = map_.eval(y).second;
    const cplx dw_u = pprime / dphi;                 // d/dw
    const cplx dwbar_u = qprime / std::conj(dphi);   // d/dwbar
    return {dw_u + dwbar_u, cplx(0, 1) * (dw_u - dwbar_u)};
  }

  Kind kind_ = Kind::RadialCutoff;
  CurveSpec spec_;
  DenseEval f_, ftheta_;
  StarlikeMap map_;        // reflection only
  BoundaryFunction g_;     // boundary data composed with the correspondence
};

inline ExtensionField competitor_extension(const SampledCurve& curve, const BoundaryFunction& f,
                                           ExtensionField::Kind kind) {
  if (!curve.spec.smooth()) throw std::invalid_argument("competitor extensions need a starlike curve");
  if (f.size() != curve.n) throw std::invalid_argument("f must be sampled against the polar angle grid");
  ExtensionField ext;
  ext.kind_ = kind;
  ext.spec_ = curve.spec;
  ext.f_ = f.dense();
  ext.ftheta_ = DenseEval(spectral_derivative(f.samples));
  if (kind == ExtensionField::Kind::Reflection) {
    ext.map_ = theodorsen_map(curve.spec, StarlikeMap::Orientation::Interior, f.size());
    const CircleHomeo h = ext.map_.correspondence();
    const DenseEval fe = f.dense();
    std::vector<cplx> g(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) g[k] = fe(h.eval(kTwoPi * k / static_cast<double>(f.size())));
    ext.g_ = BoundaryFunction::from_samples(std::move(g));
  }
  return ext;
}

struct DirichletRatio {
  double ratio = 1.0;
  double harmonic_energy = 0.0;    // LP integrand to the p-th power
  double competitor_energy = 0.0;
  bool degenerate = false;         // competitor energy below 1e-14 with nonconstant data
};

// Weighted p-energy of the harmonic extension against an explicit competitor,
// both integrated over the same pushforward grid. Boundary data is a function
// of the polar angle, matching the competitor construction.
inline DirichletRatio almost_dirichlet_ratio(const SampledCurve& curve, const StarlikeMap& map,
                                             const BoundaryFunction& f, double p, double s,
                                             ExtensionField::Kind kind, const PolarGrid& grid) {
  if (map.orientation != StarlikeMap::Orientation::Interior)
    throw std::invalid_argument("dirichlet experiments run on the interior side");
  if (kind != ExtensionField::Kind::RadialCutoff)
    throw std::invalid_argument("only the radial-cutoff competitor bounds the interior energy");
  DirichletRatio out;

  // harmonic side: compose with the boundary correspondence directly
  const DenseEval fe = f.dense();
  const CircleHomeo h = map.correspondence();
  const std::size_t n = map.grid_size();
  std::vector<cplx> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = fe(h.eval(kTwoPi * k / static_cast<double>(n)));
  const auto gb = BoundaryFunction::from_samples(std::move(g));
  const HarmonicField v = poisson_field(gb, grid);
  const TransportGrid tg = TransportGrid::make(curve, map, grid);

  const ExtensionField ext = competitor_extension(curve, f, kind);
  const double wexp = (1.0 - s) * p - 1.0;
  const std::size_t nth = grid.ntheta;
  std::vector<double> num_rows(grid.nr(), 0.0), den_rows(grid.nr(), 0.0);
  parallel_for(grid.nr(), [&](std::size_t i) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < nth; ++k) {
      const std::size_t idx = i * nth + k;
      const double w = grid.weight(i) * sqr(tg.abs_dphi[idx]) * std::pow(tg.dist[idx], wexp);
      const double gu = std::sqrt(v.grad_abs2(i, k)) / tg.abs_dphi[idx];
      num += std::pow(gu, p) * w;
      const auto [fx, fy] = ext.gradient(tg.image[idx]);
      const double gF = std::sqrt(std::norm(fx) + std::norm(fy));
      den += std::pow(gF, p) * w;
    }
    num_rows[i] = num;
    den_rows[i] = den;
  });
  for (std::size_t i = 0; i < grid.nr(); ++i) {
    out.harmonic_energy += num_rows[i];
    out.competitor_energy += den_rows[i];
  }

  double spread = 0.0;
  cplx first = f.samples[0];
  for (const auto& vv : f.samples) spread = std::max(spread, std::abs(vv - first));
  if (out.competitor_energy < 1e-14) {
    if (spread < 1e-14) {
      out.ratio = 1.0;  // 0/0 for constants reported as 1
    } else {
      out.ratio = std::numeric_limits<double>::infinity();
      out.degenerate = true;
    }
    return out;
  }
  out.ratio = out.harmonic_energy / out.competitor_energy;
  return out;
}

}  // namespace besovlab
