#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovlab/curves.hpp"
#include "besovlab/fft.hpp"
#include "besovlab/spaces.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

// Trapezoid Cauchy quadrature with dyadic spectral upsampling; level m holds
// N 2^m nodes and is chosen so the node spacing stays under d(z,Gamma)/3.
class CauchyEvaluator {
 public:
  CauchyEvaluator(const SampledCurve& curve, const BoundaryFunction& f, int max_levels = 4)
      : base_spacing_(curve.length / static_cast<double>(curve.n)) {
    if (f.size() != curve.n) throw std::invalid_argument("f must be sampled on the curve nodes");
    const bool smooth = curve.spec.smooth();
    for (int m = 0; m < max_levels; ++m) {
      Level lvl;
      const std::size_t nn = curve.n << m;
      if (m == 0) {
        lvl.z = curve.z;
        lvl.zprime = curve.zprime;
        lvl.f = f.samples;
      } else if (smooth) {
        const SampledCurve fine = build_curve(curve.spec, nn);
        lvl.z = fine.z;
        lvl.zprime = fine.zprime;
        lvl.f = upsample(f.samples, 1u << m);
      } else {
        const SampledCurve fine = build_curve(curve.spec, nn);
        lvl.z = fine.z;
        lvl.zprime = fine.zprime;
        const DenseEval fe(f.samples);
        lvl.f.resize(nn);
        for (std::size_t k = 0; k < nn; ++k) lvl.f[k] = fe(kTwoPi * k / static_cast<double>(nn));
      }
      levels_.push_back(std::move(lvl));
    }
  }

  // holomorphic off-curve value (F_i inside, F_e outside)
  cplx evaluate(cplx z, double dist_hint = -1.0) const {
    const double d = dist_hint;
    std::size_t level = levels_.size() - 1;
    if (d > 0.0) {
      for (std::size_t m = 0; m < levels_.size(); ++m) {
        if (base_spacing_ / static_cast<double>(1u << m) < d / 3.0) {
          level = m;
          break;
        }
      }
    }
    return evaluate_level(z, level);
  }

  cplx evaluate_level(cplx z, std::size_t m) const {
    const Level& lvl = levels_[m];
    const std::size_t nn = lvl.z.size();
    cplx acc(0, 0);
    for (std::size_t k = 0; k < nn; ++k) acc += lvl.f[k] * lvl.zprime[k] / (lvl.z[k] - z);
    return acc * (kTwoPi / static_cast<double>(nn)) / cplx(0.0, kTwoPi);
  }

  std::size_t levels() const { return levels_.size(); }
  double base_spacing() const { return base_spacing_; }

 private:
  struct Level {
    std::vector<cplx> z, zprime, f;
  };
  std::vector<Level> levels_;
  double base_spacing_;
};

// Principal value T f at node j via singularity subtraction; the bare-kernel
// quadrature carries the diagonal regular value z''/(2z') so both pieces are
// plain trapezoid sums of smooth periodic integrands.
inline std::vector<cplx> cauchy_pv_all(const SampledCurve& curve, const BoundaryFunction& f) {
  const std::size_t n = curve.n;
  if (f.size() != n) throw std::invalid_argument("f must be sampled on the curve nodes");
  const auto ft = spectral_derivative(f.samples);
  const double dt = kTwoPi / static_cast<double>(n);
  const cplx norm = dt / cplx(0.0, kTwoPi);
  std::vector<cplx> out(n);
  parallel_for(n, [&](std::size_t j) {
    cplx smooth = ft[j];
    cplx bare = curve.zsecond[j] / (2.0 * curve.zprime[j]);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const cplx kernel = curve.zprime[k] / (curve.z[k] - curve.z[j]);
      smooth += (f.samples[k] - f.samples[j]) * kernel;
      bare += kernel;
    }
    out[j] = norm * smooth + f.samples[j] * (norm * bare);
  });
  return out;
}

enum class CauchyMode { OffCurve, PrincipalValue };

inline cplx cauchy_transform(const SampledCurve& curve, const BoundaryFunction& f, cplx z,
                             CauchyMode mode) {
  if (mode == CauchyMode::PrincipalValue) {
    // z must be a node
    for (std::size_t j = 0; j < curve.n; ++j) {
      if (std::abs(curve.z[j] - z) < 1e-12 * curve.length) {
        auto all = cauchy_pv_all(curve, f);
        return all[j];
      }
    }
    throw std::invalid_argument("principal value requested at a point that is not a curve node");
  }
  const auto dr = signed_distance(curve, z);
  if (dr.side == Side::OnCurve) throw std::invalid_argument("off-curve evaluation inside the on-curve band");
  CauchyEvaluator ev(curve, f);
  return ev.evaluate(z, dr.d);
}

struct Decomposition {
  BoundaryFunction interior_trace;  // F_i on Gamma = Tf + f/2
  BoundaryFunction exterior_trace;  // F_e on Gamma = Tf - f/2
  double residual = 0.0;            // sup |f - (F_i - F_e)| from extrapolated limits
  double trace_mismatch = 0.0;      // sup |extrapolated limit - trace|
  double fe_far_value = 0.0;        // |F_e| at distance 10 diam
  double fe_far_bound = 0.0;        // 2 ||f||_inf diam / 10
  bool decay_ok = false;
  CauchyEvaluator evaluator;
};

struct DecomposeOptions {
  std::size_t extrap_points = 10;
  std::size_t residual_stride = 1;
  int upsample_levels = 4;
};

namespace detail {

inline cplx neville_to_zero(const std::vector<double>& xs, std::vector<cplx> ys) {
  const std::size_t n = xs.size();
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i + k < n; ++i) {
      ys[i] = ((0.0 - xs[i + k]) * ys[i] - (0.0 - xs[i]) * ys[i + 1]) / (xs[i] - xs[i + k]);
    }
  }
  return ys[0];
}

}  // namespace detail

inline Decomposition plemelj_decompose(const SampledCurve& curve, const BoundaryFunction& f,
                                       const DecomposeOptions& opt = {}) {
  const std::size_t n = curve.n;
  const auto tf = cauchy_pv_all(curve, f);
  std::vector<cplx> fi(n), fe(n);
  for (std::size_t j = 0; j < n; ++j) {
    fi[j] = tf[j] + 0.5 * f.samples[j];
    fe[j] = tf[j] - 0.5 * f.samples[j];
  }

  Decomposition dec{BoundaryFunction::from_samples(std::move(fi)),
                    BoundaryFunction::from_samples(std::move(fe)),
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    false,
                    CauchyEvaluator(curve, f, 4)};

  // extrapolated interior/exterior limits along the normal at a stride of nodes
  const std::size_t top = dec.evaluator.levels() - 1;
  const double h_fine = dec.evaluator.base_spacing() / static_cast<double>(1u << top);
  const std::size_t m = opt.extrap_points;
  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < n; j += opt.residual_stride) nodes.push_back(j);
  std::vector<double> res(nodes.size()), mism(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t qi) {
    const std::size_t j = nodes[qi];
    const cplx nu = cplx(0, 1) * curve.tangent[j];  // interior normal (ccw curve)
    std::vector<double> ds(m);
    std::vector<cplx> vi(m), ve(m);
    for (std::size_t q = 0; q < m; ++q) {
      ds[q] = 5.0 * h_fine * static_cast<double>(q + 1);
      vi[q] = dec.evaluator.evaluate_level(curve.z[j] + ds[q] * nu, top);
      ve[q] = dec.evaluator.evaluate_level(curve.z[j] - ds[q] * nu, top);
    }
    const cplx fi_lim = detail::neville_to_zero(ds, vi);
    const cplx fe_lim = detail::neville_to_zero(ds, ve);
    res[qi] = std::abs(f.samples[j] - (fi_lim - fe_lim));
    mism[qi] = std::max(std::abs(fi_lim - dec.interior_trace.samples[j]),
                        std::abs(fe_lim - dec.exterior_trace.samples[j]));
  });
  for (std::size_t qi = 0; qi < nodes.size(); ++qi) {
    dec.residual = std::max(dec.residual, res[qi]);
    dec.trace_mismatch = std::max(dec.trace_mismatch, mism[qi]);
  }

  const double diam = std::hypot(curve.xmax - curve.xmin, curve.ymax - curve.ymin);
  cplx centroid(0, 0);
  for (const auto& p : curve.z) centroid += p;
  centroid /= static_cast<double>(n);
  double sup_f = 0.0;
  for (const auto& v : f.samples) sup_f = std::max(sup_f, std::abs(v));
  dec.fe_far_value = std::abs(dec.evaluator.evaluate(centroid + cplx(10.0 * diam, 0.0), 9.0 * diam));
  dec.fe_far_bound = 2.0 * sup_f * diam / 10.0;
  dec.decay_ok = dec.fe_far_value <= dec.fe_far_bound;
  return dec;
}

// dbar data of one side on a square-cell grid
struct DbarGrid {
  double x0 = 0, y0 = 0, h = 1;
  std::size_t nx = 0, ny = 0;
  std::vector<cplx> values;  // zero off the carrier side
  std::string note;

  cplx center(std::size_t i, std::size_t j) const {
    return cplx(x0 + (static_cast<double>(i) + 0.5) * h, y0 + (static_cast<double>(j) + 0.5) * h);
  }
  double abs_sum() const {
    double a = 0.0;
    for (const auto& v : values) a += std::abs(v);
    return a * h * h;
  }
};

inline DbarGrid make_dbar_grid(const SampledCurve& curve, Side side,
                               const std::function<cplx(cplx)>& dbar, double x0, double y0,
                               double box, std::size_t n) {
  DbarGrid g;
  g.x0 = x0;
  g.y0 = y0;
  g.h = box / static_cast<double>(n);
  g.nx = g.ny = n;
  g.values.assign(n * n, cplx(0, 0));
  parallel_for(n, [&](std::size_t j) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx zc = g.center(i, j);
      const auto dr = signed_distance(curve, zc);
      if (dr.side != side) continue;
      g.values[j * n + i] = dbar(zc);
    }
  });
  if (side == Side::Exterior) g.note = "exterior dbar data truncated to the computational box";
  return g;
}

namespace detail {

// integral of 1/(zeta - z) over an axis-aligned rectangle, by Green's formula:
// (1/2i) contour integral of conj(zeta)/(zeta - z); per-edge closed forms.
inline cplx rect_cauchy_integral(double ax, double bx, double ay, double by, cplx z) {
  auto horizontal = [&](double x0, double x1, double y) {
    const cplx a(x0, y), b(x1, y);
    return (b - a) + (z - cplx(0, 2.0 * y)) * std::log((b - z) / (a - z));
  };
  auto vertical = [&](double y0, double y1, double x) {
    const cplx a(x, y0), b(x, y1);
    return -(b - a) + (cplx(2.0 * x, 0) - z) * std::log((b - z) / (a - z));
  };
  const cplx contour = horizontal(ax, bx, ay) + vertical(ay, by, bx) + horizontal(bx, ax, by) +
                       vertical(by, ay, ax);
  return contour / cplx(0.0, 2.0);
}

// integral of 1/(zeta - z)^2 over a rectangle, same construction
inline cplx rect_cauchy2_integral(double ax, double bx, double ay, double by, cplx z) {
  auto horizontal = [&](double x0, double x1, double y) {
    const cplx a(x0, y), b(x1, y);
    return std::log((b - z) / (a - z)) +
           (z - cplx(0, 2.0 * y)) * (1.0 / (a - z) - 1.0 / (b - z));
  };
  auto vertical = [&](double y0, double y1, double x) {
    const cplx a(x, y0), b(x, y1);
    return -std::log((b - z) / (a - z)) +
           (cplx(2.0 * x, 0) - z) * (1.0 / (a - z) - 1.0 / (b - z));
  };
  const cplx contour = horizontal(ax, bx, ay) + vertical(ay, by, bx) + horizontal(bx, ax, by) +
                       vertical(by, ay, ax);
  return contour / cplx(0.0, 2.0);
}

}  // namespace detail

enum class AreaTarget { InteriorFromExteriorData, ExteriorFromInteriorData };

// F_i(z) = -(1/pi) integral over Omega_e of dbar/(zeta-z);
// F_e(z) = +(1/pi) integral over Omega_i. Cells near z use the exact rectangle
// integral of the kernel.
inline cplx area_cauchy(const DbarGrid& g, cplx z, AreaTarget target) {
  if (!std::isfinite(g.abs_sum())) throw std::runtime_error("divergent grid sum in area transform");
  const double sign = target == AreaTarget::InteriorFromExteriorData ? -1.0 : 1.0;
  cplx acc(0, 0);
  const double near = 3.0 * g.h;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const cplx v = g.values[j * g.nx + i];
      if (v == cplx(0, 0)) continue;
      const cplx c = g.center(i, j);
      if (std::abs(c - z) > near) {
        acc += v * g.h * g.h / (c - z);
      } else {
        cplx zz = z;
        // nudge off edges so the per-edge logs stay single-valued
        const double fx = std::abs(std::remainder(zz.real() - g.x0, g.h));
        const double fy = std::abs(std::remainder(zz.imag() - g.y0, g.h));
        if (fx < 1e-12 || fy < 1e-12) zz += cplx(1e-9 * g.h, 1e-9 * g.h);
        acc += v * detail::rect_cauchy_integral(c.real() - 0.5 * g.h, c.real() + 0.5 * g.h,
                                                c.imag() - 0.5 * g.h, c.imag() + 0.5 * g.h, zz);
      }
    }
  }
  return sign / kPi * acc;
}

// square grid carrying a compactly supported function
struct BoxGrid {
  double x0 = 0, y0 = 0, h = 1;
  std::size_t n = 0;
  std::vector<cplx> v;

  cplx center(std::size_t i, std::size_t j) const {
    return cplx(x0 + (static_cast<double>(i) + 0.5) * h, y0 + (static_cast<double>(j) + 0.5) * h);
  }
};

namespace detail {

inline void fft2_inplace(std::vector<cplx>& a, std::size_t n, bool inverse) {
  std::vector<cplx> buf(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = a[j * n + i];
    auto out = inverse ? ifft(buf) : fft(buf);
    for (std::size_t i = 0; i < n; ++i) a[j * n + i] = out[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) buf[j] = a[j * n + i];
    auto out = inverse ? ifft(buf) : fft(buf);
    for (std::size_t j = 0; j < n; ++j) a[j * n + i] = out[j];
  }
}

}  // namespace detail

// Beurling transform: linear convolution with the exact cell integrals of
// -(1/pi) p.v. 1/z^2 (zero over the symmetric singular cell), computed on a
// zero-padded double-size FFT grid so there is no periodic wrap.
inline BoxGrid beurling_apply(const BoxGrid& g) {
  const std::size_t n = g.n;
  if (!is_pow2(n)) throw std::invalid_argument("box grid must be a power of two");
  // support must stay well inside the box
  double sx0 = 1e300, sx1 = -1e300, sy0 = 1e300, sy1 = -1e300;
  bool any = false;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (g.v[j * n + i] == cplx(0, 0)) continue;
      any = true;
      sx0 = std::min(sx0, g.center(i, j).real());
      sx1 = std::max(sx1, g.center(i, j).real());
      sy0 = std::min(sy0, g.center(i, j).imag());
      sy1 = std::max(sy1, g.center(i, j).imag());
    }
  }
  BoxGrid out = g;
  if (!any) {
    std::fill(out.v.begin(), out.v.end(), cplx(0, 0));
    return out;
  }
  const double support = std::max(sx1 - sx0, sy1 - sy0);
  const double box = g.h * static_cast<double>(n);
  if (support >= box / 4.0)
    throw std::invalid_argument("support too large for the box (needs diameter < box/4)");

  const std::size_t m = 2 * n;
  std::vector<cplx> fg(m * m, cplx(0, 0)), fk(m * m, cplx(0, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) fg[j * m + i] = g.v[j * n + i];
  // kernel at offsets (di, dj) in (-n, n), wrapped into the m-grid
  for (long dj = -static_cast<long>(n) + 1; dj < static_cast<long>(n); ++dj) {
    for (long di = -static_cast<long>(n) + 1; di < static_cast<long>(n); ++di) {
      cplx kv(0, 0);
      if (di != 0 || dj != 0) {
        const cplx z = -cplx(di * g.h, dj * g.h);  // evaluation point relative to the cell
        kv = -1.0 / kPi *
             detail::rect_cauchy2_integral(-0.5 * g.h, 0.5 * g.h, -0.5 * g.h, 0.5 * g.h, z);
      }
      const std::size_t ii = static_cast<std::size_t>((di + static_cast<long>(m)) % static_cast<long>(m));
      const std::size_t jj = static_cast<std::size_t>((dj + static_cast<long>(m)) % static_cast<long>(m));
      fk[jj * m + ii] = kv;
    }
  }
  detail::fft2_inplace(fg, m, false);
  detail::fft2_inplace(fk, m, false);
  for (std::size_t q = 0; q < m * m; ++q) fg[q] *= fk[q];
  detail::fft2_inplace(fg, m, true);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out.v[j * n + i] = fg[j * m + i];
  return out;
}

struct OperatorNormEstimate {
  double estimate = 0.0;
  std::vector<double> ratios;
};

namespace detail {

inline BoundaryFunction to_arclength_frame(const SampledCurve& curve, const BoundaryFunction& f_param) {
  const std::size_t n = f_param.size();
  const DenseEval fe = f_param.dense();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double arc = curve.length * static_cast<double>(k) / static_cast<double>(n);
    out[k] = fe(curve.param_of_arclength(arc));
  }
  return BoundaryFunction::from_samples(std::move(out));
}

// B^s_{p,p}(Gamma) norm in the arc-length frame: L^p at s=0, ||f'||_{L^p} at
// s=1, Douglas in between.
inline double besov_norm_arclength(const SampledCurve& curve, const BoundaryFunction& f_arc, double p,
                                   double s) {
  const std::size_t n = f_arc.size();
  const double ds = curve.length / static_cast<double>(n);
  if (s <= 0.0) {
    double acc = 0.0;
    for (const auto& v : f_arc.samples) acc += std::pow(std::abs(v), p) * ds;
    return std::pow(acc, 1.0 / p);
  }
  if (s >= 1.0) {
    const auto dtheta = spectral_derivative(f_arc.samples);
    double acc = 0.0;
    const double scale = kTwoPi / curve.length;  // d/ds = (2 pi / L) d/dtheta
    for (const auto& v : dtheta) acc += std::pow(std::abs(v) * scale, p) * ds;
    return std::pow(acc, 1.0 / p);
  }
  return douglas_norm(curve, f_arc, p, s);
}

}  // namespace detail

// Randomized lower-bound estimate of ||T|| on B^s_{p,p}(Gamma) from random
// trigonometric pullbacks; per-trial streams derive from (seed, trial).
inline OperatorNormEstimate operator_norm_estimate(const SampledCurve& curve, double p, double s,
                                                   int trials, std::uint64_t seed, int degree = 12) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("s must lie in [0,1]");
  OperatorNormEstimate est;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed, static_cast<std::uint64_t>(trial));
    auto f = BoundaryFunction::random_trig(curve.n, degree, rng);
    auto tf = BoundaryFunction::from_samples(cauchy_pv_all(curve, f));
    const auto fa = detail::to_arclength_frame(curve, f);
    const auto ta = detail::to_arclength_frame(curve, tf);
    const double nf = detail::besov_norm_arclength(curve, fa, p, s);
    const double nt = detail::besov_norm_arclength(curve, ta, p, s);
    if (nf < 1e-12) throw std::runtime_error("degenerate trial: vanishing input norm");
    est.ratios.push_back(nt / nf);
    est.estimate = std::max(est.estimate, est.ratios.back());
  }
  return est;
}

}  // namespace besovlab
