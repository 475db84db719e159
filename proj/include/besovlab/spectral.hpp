#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "besovlab/fft.hpp"
#include "besovlab/util.hpp"

namespace besovlab {

// Periodic cubic (Catmull-Rom) interpolation on a spectrally upsampled grid.
class DenseEval {
 public:
  DenseEval() = default;
  explicit DenseEval(const std::vector<cplx>& samples, std::size_t factor = 8)
      : vals_(upsample(samples, factor)) {}

  cplx operator()(double theta) const {
    const std::size_t m = vals_.size();
    double x = std::fmod(theta, kTwoPi) / kTwoPi * static_cast<double>(m);
    if (x < 0) x += static_cast<double>(m);
    const std::size_t i1 = static_cast<std::size_t>(x) % m;
    const double u = x - std::floor(x);
    const std::size_t i0 = (i1 + m - 1) % m, i2 = (i1 + 1) % m, i3 = (i1 + 2) % m;
    const cplx p0 = vals_[i0], p1 = vals_[i1], p2 = vals_[i2], p3 = vals_[i3];
    return p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + u * (3.0 * (p1 - p2) + p3 - p0)));
  }

 private:
  std::vector<cplx> vals_;
};

struct BoundaryFunction {
  std::vector<cplx> samples;  // values at theta_k = 2 pi k / N
  std::vector<cplx> modes;    // f_hat(n), FFT bin order

  static BoundaryFunction from_samples(std::vector<cplx> v) {
    if (!is_pow2(v.size())) throw std::invalid_argument("boundary function size must be a power of two");
    BoundaryFunction f;
    f.modes = to_modes(v);
    f.samples = std::move(v);
    return f;
  }
  static BoundaryFunction from_modes(std::vector<cplx> m) {
    if (!is_pow2(m.size())) throw std::invalid_argument("boundary function size must be a power of two");
    BoundaryFunction f;
    f.samples = to_samples(m);
    f.modes = std::move(m);
    return f;
  }
  static BoundaryFunction mode(std::size_t n_samples, int n) {
    std::vector<cplx> m(n_samples, cplx(0.0, 0.0));
    const std::size_t bin =
        n >= 0 ? static_cast<std::size_t>(n) % n_samples : n_samples - static_cast<std::size_t>(-n) % n_samples;
    m[bin % n_samples] = 1.0;
    return from_modes(std::move(m));
  }
  static BoundaryFunction constant(std::size_t n_samples, cplx v) {
    return from_samples(std::vector<cplx>(n_samples, v));
  }
  static BoundaryFunction random_trig(std::size_t n_samples, int degree, Rng& rng) {
    std::vector<cplx> m(n_samples, cplx(0.0, 0.0));
    for (int n = -degree; n <= degree; ++n) {
      const cplx c(rng.normal(), rng.normal());
      m[(n >= 0 ? static_cast<std::size_t>(n) : n_samples - static_cast<std::size_t>(-n)) % n_samples] += c;
    }
    return from_modes(std::move(m));
  }

  std::size_t size() const { return samples.size(); }

  cplx eval(double theta) const { return trig_eval(modes, theta); }

  DenseEval dense(std::size_t factor = 8) const { return DenseEval(samples, factor); }
};

// (sum |n|^{2s} |f_hat(n)|^2)^{1/2}
inline double hs_seminorm(const BoundaryFunction& f, double s) {
  const std::size_t n = f.size();
  double acc = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double freq = std::abs(mode_index(k, n));
    acc += std::pow(freq, 2.0 * s) * std::norm(f.modes[k]);
  }
  return std::sqrt(acc);
}

// Disk grid with radii graded toward the boundary: level j covers
// 1-r in [2^{-(j+1)}, 2^{-j}] (level 0 extends to the center), `fill`
// midpoint radii per level.
struct PolarGrid {
  std::size_t levels = 16;
  std::size_t fill = 8;
  std::size_t ntheta = 0;
  std::vector<double> r;   // ascending
  std::vector<double> dr;  // radial widths

  static PolarGrid make(std::size_t ntheta, std::size_t levels = 16, std::size_t fill = 8) {
    if (!is_pow2(ntheta)) throw std::invalid_argument("ntheta must be a power of two");
    PolarGrid g;
    g.levels = levels;
    g.fill = fill;
    g.ntheta = ntheta;
    // radii ascend: level j occupies rows [j*fill, (j+1)*fill)
    for (std::size_t j = 0; j < levels; ++j) {
      const double hi = (j == 0) ? 1.0 : std::ldexp(1.0, -static_cast<int>(j));       // larger 1-r
      const double lo = std::ldexp(1.0, -static_cast<int>(j) - 1);                    // smaller 1-r
      const double w = (hi - lo) / static_cast<double>(fill);
      for (std::size_t q = 0; q < fill; ++q) {
        const double one_minus_r = hi - w * (static_cast<double>(q) + 0.5);
        g.r.push_back(1.0 - one_minus_r);
        g.dr.push_back(w);
      }
    }
    return g;
  }

  std::size_t nr() const { return r.size(); }
  double dtheta() const { return kTwoPi / static_cast<double>(ntheta); }
  // area weight of cell (i,k)
  double weight(std::size_t i) const { return r[i] * dr[i] * dtheta(); }
};

// Values and Wirtinger-split gradient of the Poisson extension on a polar grid.
struct HarmonicField {
  PolarGrid grid;
  std::vector<cplx> u, gx, gy;  // row-major [radius][theta]

  std::size_t nr() const { return grid.nr(); }
  std::size_t ntheta() const { return grid.ntheta; }
  const cplx& at(const std::vector<cplx>& a, std::size_t i, std::size_t k) const {
    return a[i * ntheta() + k];
  }
  double grad_abs2(std::size_t i, std::size_t k) const {
    return std::norm(gx[i * ntheta() + k]) + std::norm(gy[i * ntheta() + k]);
  }
};

// u(r e^{i theta}) = sum f_hat(n) r^{|n|} e^{i n theta}; gradient by term-wise
// differentiation of the analytic and anti-analytic halves.
inline HarmonicField poisson_field(const BoundaryFunction& f, const PolarGrid& grid) {
  const std::size_t n = f.size();
  if (grid.ntheta != n) throw std::invalid_argument("grid ntheta must match boundary sample count");
  HarmonicField field;
  field.grid = grid;
  const std::size_t nr = grid.nr();
  field.u.assign(nr * n, cplx(0, 0));
  field.gx.assign(nr * n, cplx(0, 0));
  field.gy.assign(nr * n, cplx(0, 0));

  double amp = 0.0;
  for (const auto& c : f.modes) amp = std::max(amp, std::abs(c));
  const double floor_amp = 1e-16 * amp;

  parallel_for(nr, [&](std::size_t i) {
    const double r = grid.r[i];
    std::vector<cplx> mu(n, cplx(0, 0)), mp(n, cplx(0, 0)), mq(n, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) {
      const int freq = mode_index(k, n);
      const double a = std::abs(freq);
      const double scale = std::pow(r, a);
      if (std::abs(f.modes[k]) * scale < floor_amp && freq != 0) continue;
      mu[k] = f.modes[k] * scale;
      if (freq >= 1) {
        const double dscale = a * std::pow(r, a - 1.0);
        mp[static_cast<std::size_t>(freq - 1)] += f.modes[k] * dscale;
      } else if (freq <= -1) {
        const double dscale = a * std::pow(r, a - 1.0);
        const std::size_t bin = (n - (static_cast<std::size_t>(a) - 1)) % n;
        mq[bin] += f.modes[k] * dscale;
      }
    }
    const auto urow = to_samples(mu);
    const auto prow = to_samples(mp);  // P'(z) on the ring
    const auto qrow = to_samples(mq);  // Q'(zbar) on the ring
    for (std::size_t k = 0; k < n; ++k) {
      field.u[i * n + k] = urow[k];
      field.gx[i * n + k] = prow[k] + qrow[k];
      field.gy[i * n + k] = cplx(0, 1) * (prow[k] - qrow[k]);
    }
  });
  return field;
}

// Direct Poisson evaluation at one point (test/diagnostic path).
inline cplx poisson_value(const BoundaryFunction& f, cplx z) {
  const std::size_t n = f.size();
  const double r = std::abs(z);
  const double th = std::arg(z);
  cplx acc(0, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const int freq = mode_index(k, n);
    const double a = std::abs(freq);
    const double scale = std::pow(r, a);
    if (scale < 1e-18 && freq != 0) continue;
    acc += f.modes[k] * scale * std::polar(1.0, freq * th);
  }
  return acc;
}

// Fourier multiplier -i sgn(n), zero mean.
inline BoundaryFunction hilbert_transform(const BoundaryFunction& f) {
  std::vector<cplx> m = f.modes;
  const std::size_t n = m.size();
  m[0] = cplx(0, 0);
  for (std::size_t k = 1; k < n; ++k) {
    const int freq = mode_index(k, n);
    m[k] *= cplx(0.0, freq > 0 ? -1.0 : 1.0);
  }
  return BoundaryFunction::from_modes(std::move(m));
}

// Strictly increasing circle homeomorphism sigma with sigma(t+2pi) = sigma(t)+2pi,
// held as samples on the uniform grid; composition uses the dense cubic table and
// the inverse is a monotone bisection plus local polish.
class CircleHomeo {
 public:
  explicit CircleHomeo(std::vector<double> sigma_samples) : sigma_(std::move(sigma_samples)) {
    const std::size_t n = sigma_.size();
    if (!is_pow2(n)) throw std::invalid_argument("sigma sample count must be a power of two");
    std::vector<cplx> psi(n);
    for (std::size_t k = 0; k < n; ++k) psi[k] = sigma_[k] - kTwoPi * k / static_cast<double>(n);
    dense_factor_ = 8;
    psi_dense_ = upsample(psi, dense_factor_);
    const std::size_t m = psi_dense_.size();
    sigma_dense_.resize(m + 1);
    for (std::size_t k = 0; k < m; ++k)
      sigma_dense_[k] = kTwoPi * k / static_cast<double>(m) + psi_dense_[k].real();
    sigma_dense_[m] = sigma_dense_[0] + kTwoPi;
    for (std::size_t k = 0; k < m; ++k) {
      if (sigma_dense_[k + 1] <= sigma_dense_[k])
        throw std::invalid_argument("sigma is not strictly increasing");
    }
  }

  static CircleHomeo identity(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = kTwoPi * k / static_cast<double>(n);
    return CircleHomeo(std::move(s));
  }

  std::size_t size() const { return sigma_.size(); }
  const std::vector<double>& samples() const { return sigma_; }

  double eval(double theta) const {
    const std::size_t m = psi_dense_.size();
    double x = std::fmod(theta, kTwoPi);
    double wraps = theta - x;
    if (x < 0) {
      x += kTwoPi;
      wraps -= kTwoPi;
    }
    const double pos = x / kTwoPi * static_cast<double>(m);
    const std::size_t i1 = static_cast<std::size_t>(pos) % m;
    const double u = pos - std::floor(pos);
    const std::size_t i0 = (i1 + m - 1) % m, i2 = (i1 + 1) % m, i3 = (i1 + 2) % m;
    const double p0 = psi_dense_[i0].real(), p1 = psi_dense_[i1].real(), p2 = psi_dense_[i2].real(),
                 p3 = psi_dense_[i3].real();
    const double psi =
        p1 + 0.5 * u * (p2 - p0 + u * (2 * p0 - 5 * p1 + 4 * p2 - p3 + u * (3 * (p1 - p2) + p3 - p0)));
    return x + psi + wraps;
  }

  double inverse(double y) const {
    const std::size_t m = psi_dense_.size();
    double yy = y;
    double wraps = 0.0;
    while (yy < sigma_dense_[0]) {
      yy += kTwoPi;
      wraps -= kTwoPi;
    }
    while (yy >= sigma_dense_[m]) {
      yy -= kTwoPi;
      wraps += kTwoPi;
    }
    std::size_t lo = std::upper_bound(sigma_dense_.begin(), sigma_dense_.end(), yy) - sigma_dense_.begin();
    lo = lo == 0 ? 0 : lo - 1;
    const double t0 = kTwoPi * lo / static_cast<double>(m);
    const double t1 = kTwoPi * (lo + 1) / static_cast<double>(m);
    double t = t0 + (t1 - t0) * (yy - sigma_dense_[lo]) / (sigma_dense_[lo + 1] - sigma_dense_[lo]);
    for (int it = 0; it < 3; ++it) {
      const double h = 1e-7;
      const double ft = eval(t) - yy;
      const double dft = (eval(t + h) - eval(t - h)) / (2 * h);
      t -= ft / dft;
    }
    return t + wraps;
  }

 private:
  std::vector<double> sigma_;
  std::vector<cplx> psi_dense_;
  std::vector<double> sigma_dense_;
  std::size_t dense_factor_ = 8;
};

// g~ = V_sigma^{-1} H V_sigma (g), the conjugation transported by a boundary
// correspondence.
inline BoundaryFunction conjugate_on_curve(const BoundaryFunction& f, const CircleHomeo& sigma) {
  const std::size_t n = f.size();
  if (sigma.size() != n) throw std::invalid_argument("sigma and f sample counts differ");
  const DenseEval fe = f.dense();
  std::vector<cplx> composed(n);
  for (std::size_t k = 0; k < n; ++k) composed[k] = fe(sigma.eval(kTwoPi * k / static_cast<double>(n)));
  const BoundaryFunction h = hilbert_transform(BoundaryFunction::from_samples(std::move(composed)));
  const DenseEval he = h.dense();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = he(sigma.inverse(kTwoPi * k / static_cast<double>(n)));
  return BoundaryFunction::from_samples(std::move(out));
}

}  // namespace besovlab
