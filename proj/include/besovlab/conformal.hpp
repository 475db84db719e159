#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besovlab/curves.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

struct LipschitzData {
  double M = 0.0;            // tan of the boundary sup of |Arg(z phi'/phi)|
  double sup_arg_phi = 0.0;  // sup |Arg phi'|
  double p_lo = 1.0;
  double p_hi = std::numeric_limits<double>::infinity();
};

inline std::pair<double, double> p_interval_from_M(double M) {
  if (M <= 0.0) return {1.0, std::numeric_limits<double>::infinity()};
  const double a = std::atan(M);
  return {1.0 + 2.0 * a / kPi, 1.0 + kPi / (2.0 * a)};
}

// Riemann map of a starlike domain, stored through the Fourier coefficients of
// log(phi(z)/z). Exterior maps solve the interior problem for the inverted
// curve r~(t) = 1/r(-t) and compose with w = 1/z.
class StarlikeMap {
 public:
  enum class Orientation { Interior, ExteriorViaInversion };

  Orientation orientation = Orientation::Interior;
  CurveSpec model_spec;           // radial spec the interior iteration solved
  std::vector<cplx> log_coeffs;   // c_n, n >= 0; c_0 real (phi'(0) = e^{c_0} > 0)
  std::vector<double> sigma;      // boundary correspondence on the uniform grid
  double residual = 0.0;          // max(iteration residual, boundary consistency)
  int iterations = 0;
  bool converged = false;

  std::size_t grid_size() const { return sigma.size(); }

  cplx log_phi_over_z(cplx z) const {
    cplx acc(0, 0);
    for (std::size_t k = log_coeffs.size(); k-- > 0;) acc = acc * z + log_coeffs[k];
    return acc;
  }

  cplx log_phi_deriv(cplx z) const {  // d/dz of log(phi(z)/z)
    cplx acc(0, 0);
    for (std::size_t k = log_coeffs.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * log_coeffs[k];
    return acc;
  }

  // principal branch is safe: Re(z phi'/phi) > 0 on starlike domains
  cplx log_phi_prime(cplx z) const {
    return log_phi_over_z(z) + std::log(1.0 + z * log_phi_deriv(z));
  }

  // (phi(z), phi'(z)) of the model (interior) map; requires |z| < 1.
  std::pair<cplx, cplx> eval(cplx z) const {
    if (std::abs(z) >= 1.0) throw std::domain_error("map evaluation requires |z| < 1");
    const cplx g = log_phi_over_z(z);
    const cplx eg = std::exp(g);
    return {z * eg, eg * (1.0 + z * log_phi_deriv(z))};
  }

  // physical image point: interior orientation phi(z), exterior 1/phi~(z)
  cplx map_point(cplx z) const {
    const cplx w = eval(z).first;
    return orientation == Orientation::Interior ? w : 1.0 / w;
  }

  // curve parameter hit by the boundary point at angle theta
  double boundary_param(double theta) const {
    const CircleHomeo h = correspondence();
    const double s = h.eval(theta);
    return orientation == Orientation::Interior ? s : -s;
  }

  CircleHomeo correspondence() const { return CircleHomeo(sigma); }
};

namespace detail {

inline double radial_contraction_bound(const CurveSpec& spec) {
  double eps = 0.0;
  for (int k = 0; k < 8192; ++k) {
    const double th = kTwoPi * k / 8192.0;
    eps = std::max(eps, std::abs(spec.rprime_of(th) / spec.r_of(th)));
  }
  return eps;
}

inline CurveSpec inverted_radial_spec(const CurveSpec& spec, std::size_t n) {
  std::vector<cplx> samples(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double th = kTwoPi * k / static_cast<double>(n);
    samples[k] = 1.0 / spec.r_of(-th);
  }
  auto modes = to_modes(samples);
  double amp = 0.0;
  for (const auto& m : modes) amp = std::max(amp, std::abs(m));
  std::size_t top = 0;
  for (std::size_t j = 1; j < n / 2; ++j) {
    if (std::abs(modes[j]) > 1e-15 * amp || std::abs(modes[n - j]) > 1e-15 * amp) top = j;
  }
  std::vector<std::array<double, 2>> coeffs(top + 1, {0.0, 0.0});
  coeffs[0][0] = modes[0].real();
  for (std::size_t j = 1; j <= top; ++j) {
    coeffs[j][0] = 2.0 * modes[j].real();
    coeffs[j][1] = -2.0 * modes[j].imag();
  }
  return CurveSpec::radial_curve(std::move(coeffs));
}

}  // namespace detail

// Fixed point sigma(theta) = theta + H[log r o sigma](theta); under-relaxation 0.5
// once sup|r'/r| >= 1, where plain iteration is no longer a guaranteed contraction.
inline StarlikeMap theodorsen_map(const CurveSpec& spec,
                                  StarlikeMap::Orientation orientation = StarlikeMap::Orientation::Interior,
                                  std::size_t n = 1024, double tol = 1e-12, int max_iter = 500) {
  if (!spec.smooth()) throw std::invalid_argument("theodorsen_map needs a circle or radial-Lipschitz spec");
  if (!is_pow2(n)) throw std::invalid_argument("grid size must be a power of two");

  StarlikeMap map;
  map.orientation = orientation;
  map.model_spec = orientation == StarlikeMap::Orientation::Interior
                       ? spec
                       : detail::inverted_radial_spec(spec, n);
  const CurveSpec& model = map.model_spec;

  const double eps = detail::radial_contraction_bound(model);
  const double relax = eps < 1.0 ? 1.0 : 0.5;

  std::vector<double> theta(n), sig(n);
  for (std::size_t k = 0; k < n; ++k) theta[k] = sig[k] = kTwoPi * k / static_cast<double>(n);

  double step = std::numeric_limits<double>::max();
  int it = 0;
  std::vector<cplx> logr(n);
  for (; it < max_iter && step > tol; ++it) {
    for (std::size_t k = 0; k < n; ++k) logr[k] = std::log(model.r_of(sig[k]));
    auto conj = hilbert_transform(BoundaryFunction::from_samples(logr));
    step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double next = theta[k] + conj.samples[k].real();
      const double delta = next - sig[k];
      step = std::max(step, std::abs(delta));
      sig[k] += relax * delta;
    }
    if (!std::isfinite(step)) break;
  }
  map.iterations = it;
  map.sigma = sig;
  map.converged = std::isfinite(step) && step <= tol;

  // analytic completion of log r o sigma gives log(phi(z)/z)
  for (std::size_t k = 0; k < n; ++k) logr[k] = std::log(model.r_of(sig[k]));
  auto amodes = to_modes(logr);
  map.log_coeffs.assign(n / 2, cplx(0, 0));
  map.log_coeffs[0] = amodes[0].real();
  for (std::size_t j = 1; j < n / 2; ++j) map.log_coeffs[j] = 2.0 * amodes[j];

  // boundary-consistency residual: Re log(phi/z) on the grid vs log r o sigma
  std::vector<cplx> series(n, cplx(0, 0));
  for (std::size_t j = 0; j < n / 2; ++j) series[j] = map.log_coeffs[j];
  auto bvals = to_samples(series);
  double bc = 0.0;
  for (std::size_t k = 0; k < n; ++k) bc = std::max(bc, std::abs(bvals[k].real() - logr[k].real()));
  map.residual = std::max(step, bc);
  return map;
}

inline StarlikeMap identity_map(std::size_t n = 1024) {
  return theodorsen_map(CurveSpec::circle(1.0), StarlikeMap::Orientation::Interior, n);
}

inline SampledCurve build_model_curve(const StarlikeMap& map, std::size_t n) {
  return build_curve(map.model_spec, n);
}

struct KoebeReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t samples = 0;
};

// ratio(z) = d(phi(z), Gamma) / ((1-|z|) |phi'(z)|) over the graded polar grid;
// `curve` must sample the map's model spec.
inline KoebeReport koebe_check(const StarlikeMap& map, const SampledCurve& curve, const PolarGrid& grid) {
  if (!map.converged) throw std::runtime_error("koebe_check requires a converged map");
  KoebeReport rep;
  rep.min_ratio = std::numeric_limits<double>::max();
  rep.max_ratio = 0.0;
  const std::size_t nth = grid.ntheta;
  std::vector<double> mins(grid.nr()), maxs(grid.nr());
  parallel_for(grid.nr(), [&](std::size_t i) {
    double lo = std::numeric_limits<double>::max(), hi = 0.0;
    for (std::size_t k = 0; k < nth; ++k) {
      const cplx z = std::polar(grid.r[i], kTwoPi * k / static_cast<double>(nth));
      const auto [phi, dphi] = map.eval(z);
      const double ratio = signed_distance(curve, phi).d / ((1.0 - std::abs(z)) * std::abs(dphi));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    mins[i] = lo;
    maxs[i] = hi;
  });
  for (std::size_t i = 0; i < grid.nr(); ++i) {
    rep.min_ratio = std::min(rep.min_ratio, mins[i]);
    rep.max_ratio = std::max(rep.max_ratio, maxs[i]);
  }
  rep.samples = grid.nr() * nth;
  return rep;
}

// Radial-Lipschitz norm from the boundary values of Arg(z phi'/phi); the
// argument is harmonic in the disk, so the boundary sup dominates the interior.
inline LipschitzData lipschitz_data(const StarlikeMap& map) {
  if (!map.converged) throw std::runtime_error("lipschitz_data requires a converged map");
  const std::size_t n = map.grid_size();
  std::vector<cplx> g(n, cplx(0, 0)), gp(n, cplx(0, 0));
  for (std::size_t j = 0; j < map.log_coeffs.size(); ++j) {
    g[j] = map.log_coeffs[j];
    if (j >= 1) gp[j - 1] = static_cast<double>(j) * map.log_coeffs[j];
  }
  const auto gb = to_samples(g);
  const auto gpb = to_samples(gp);
  LipschitzData out;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z = std::polar(1.0, kTwoPi * k / static_cast<double>(n));
    const cplx w = 1.0 + z * gpb[k];  // z phi'/phi on the boundary
    out.M = std::max(out.M, std::abs(std::arg(w)));
    out.sup_arg_phi = std::max(out.sup_arg_phi, std::abs(gb[k].imag() + std::arg(w)));
  }
  out.M = std::tan(out.M);
  const auto [plo, phi_] = p_interval_from_M(out.M);
  out.p_lo = plo;
  out.p_hi = phi_;
  return out;
}

// geometric radial-Lipschitz bound sup |r'/r| (diagnostic companion to M)
inline double radial_lipschitz_sup(const CurveSpec& spec) {
  return detail::radial_contraction_bound(spec);
}

}  // namespace besovlab
