#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace besovlab {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}
}  // namespace detail

// Unnormalized DFT: out[n] = sum_k in[k] exp(-2*pi*i*k*n/N).
inline std::vector<cplx> fft(const std::vector<cplx>& in) {
  std::vector<cplx> out;
  detail::fft_engine().fwd(out, in);
  return out;
}

// Inverse with 1/N, so ifft(fft(x)) == x.
inline std::vector<cplx> ifft(const std::vector<cplx>& in) {
  std::vector<cplx> out;
  detail::fft_engine().inv(out, in);
  return out;
}

// Signed frequency for FFT bin k of an N-point transform; Nyquist maps to -N/2.
inline int mode_index(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<int>(k) : static_cast<int>(k) - static_cast<int>(n);
}

// Coefficients f_hat(n) with f(theta) = sum f_hat(n) e^{i n theta}, FFT bin order.
inline std::vector<cplx> to_modes(const std::vector<cplx>& samples) {
  auto m = fft(samples);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (auto& c : m) c *= inv_n;
  return m;
}

inline std::vector<cplx> to_samples(const std::vector<cplx>& modes) {
  std::vector<cplx> scaled = modes;
  const double n = static_cast<double>(modes.size());
  for (auto& c : scaled) c *= n;
  return ifft(scaled);
}

// d/dtheta via the multiplier i*n.
inline std::vector<cplx> spectral_derivative(const std::vector<cplx>& samples) {
  auto m = to_modes(samples);
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k) m[k] *= cplx(0.0, mode_index(k, n));
  return to_samples(m);
}

// Zero-pad modes to factor*N samples (trigonometric interpolation on a denser grid).
inline std::vector<cplx> upsample(const std::vector<cplx>& samples, std::size_t factor) {
  if (factor <= 1) return samples;
  const std::size_t n = samples.size();
  const std::size_t m = n * factor;
  auto modes = to_modes(samples);
  std::vector<cplx> big(m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const int freq = mode_index(k, n);
    const std::size_t kk = freq >= 0 ? static_cast<std::size_t>(freq) : m + static_cast<std::size_t>(freq);
    big[kk] = modes[k];
  }
  return to_samples(big);
}

// Direct evaluation of sum modes[k] e^{i n_k theta}; O(N) per point.
inline cplx trig_eval(const std::vector<cplx>& modes, double theta) {
  const std::size_t n = modes.size();
  cplx acc(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = mode_index(k, n) * theta;
    acc += modes[k] * cplx(std::cos(w), std::sin(w));
  }
  return acc;
}

}  // namespace besovlab
