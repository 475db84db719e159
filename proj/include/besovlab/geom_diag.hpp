#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovlab/curves.hpp"
#include "besovlab/util.hpp"

namespace besovlab {

namespace detail {

inline constexpr double kEdtEmpty = 1e12;  // dominates any squared grid distance

// Felzenszwalb-Huttenlocher 1-D squared distance transform (finite sentinel).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                   std::vector<double>& zbuf) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  zbuf[0] = -std::numeric_limits<double>::infinity();
  zbuf[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= zbuf[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    zbuf[k] = s;
    zbuf[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (zbuf[k + 1] < q) ++k;
    const double dx = q - v[k];
    d[q] = dx * dx + f[v[k]];
  }
}

}  // namespace detail

// Distance-to-curve and inside masks on a square-cell grid (cell centers).
struct DistanceGrid {
  double x0 = 0, y0 = 0, h = 1;
  std::size_t nx = 0, ny = 0;
  std::vector<float> dist;           // distance from cell center to the curve
  std::vector<std::uint8_t> inside;  // winding parity at cell center

  double cx(std::size_t i) const { return x0 + (static_cast<double>(i) + 0.5) * h; }
  double cy(std::size_t j) const { return y0 + (static_cast<double>(j) + 0.5) * h; }
  float d(std::size_t i, std::size_t j) const { return dist[j * nx + i]; }
  bool in(std::size_t i, std::size_t j) const { return inside[j * nx + i] != 0; }
};

// Rasterized curve sites + exact Euclidean distance transform; the curve is
// walked at quarter-cell spacing so the site set tracks it to sub-cell error.
inline DistanceGrid make_distance_grid(const SampledCurve& curve, double margin, std::size_t nx) {
  DistanceGrid g;
  const double w = std::max(curve.xmax - curve.xmin, curve.ymax - curve.ymin) + 2.0 * margin;
  g.h = w / static_cast<double>(nx);
  g.x0 = 0.5 * (curve.xmin + curve.xmax) - 0.5 * w;
  g.y0 = 0.5 * (curve.ymin + curve.ymax) - 0.5 * w;
  g.nx = g.ny = nx;

  std::vector<double> f(nx * nx, detail::kEdtEmpty);
  const double step = g.h / 4.0;
  const std::size_t nsteps = static_cast<std::size_t>(std::ceil(curve.length / step));
  for (std::size_t m = 0; m < nsteps; ++m) {
    const cplx p = curve.point_at_arclength(curve.length * static_cast<double>(m) / static_cast<double>(nsteps));
    const long i = std::lround(std::floor((p.real() - g.x0) / g.h));
    const long j = std::lround(std::floor((p.imag() - g.y0) / g.h));
    if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(nx)) continue;
    f[static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i)] = 0.0;
  }

  // two-pass exact EDT on squared cell distances
  std::vector<double> tmp(nx * nx);
  parallel_for(nx, [&](std::size_t i) {
    std::vector<double> col(nx), dcol(nx), zbuf(nx + 1);
    std::vector<int> v(nx);
    for (std::size_t j = 0; j < nx; ++j) col[j] = f[j * nx + i];
    detail::edt_1d(col, dcol, v, zbuf);
    for (std::size_t j = 0; j < nx; ++j) tmp[j * nx + i] = dcol[j];
  });
  g.dist.resize(nx * nx);
  parallel_for(nx, [&](std::size_t j) {
    std::vector<double> row(nx), drow(nx), zbuf(nx + 1);
    std::vector<int> v(nx);
    for (std::size_t i = 0; i < nx; ++i) row[i] = tmp[j * nx + i];
    detail::edt_1d(row, drow, v, zbuf);
    for (std::size_t i = 0; i < nx; ++i) g.dist[j * nx + i] = static_cast<float>(std::sqrt(drow[i]) * g.h);
  });

  // winding parity by scanline crossing counts against the exact edge chain
  const std::vector<cplx>& poly = curve.spec.smooth() ? curve.z : curve.chain;
  const std::size_t ne = poly.size();
  g.inside.assign(nx * nx, 0);
  parallel_for(nx, [&](std::size_t j) {
    const double y = g.cy(j);
    std::vector<double> xs;
    for (std::size_t e = 0; e < ne; ++e) {
      const cplx a = poly[e], b = poly[(e + 1) % ne];
      if ((a.imag() > y) != (b.imag() > y))
        xs.push_back(a.real() + (y - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag()));
    }
    std::sort(xs.begin(), xs.end());
    std::size_t idx = 0;
    bool in = false;
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = g.cx(i);
      while (idx < xs.size() && xs[idx] < x) {
        in = !in;
        ++idx;
      }
      g.inside[j * nx + i] = in ? 1 : 0;
    }
  });
  return g;
}

struct SausageProfile {
  std::vector<double> t;
  std::vector<double> area;
  std::size_t grid = 0;
  double cell = 0.0;
};

struct MinkowskiResult {
  SausageProfile profile;
  std::vector<double> layer_areas;  // |E_n|; E_0 = {interior, d >= 1/2}
};

// Sausage areas |Gamma + D(0,t)| by counting cells with d < t, and the dyadic
// interior layers of Remark-style decompositions.
inline MinkowskiResult minkowski_profile(const SampledCurve& curve, std::vector<double> t_list,
                                         std::size_t grid, int n_max = 8, double margin = -1.0) {
  if (t_list.empty()) throw std::invalid_argument("empty t list");
  for (std::size_t i = 1; i < t_list.size(); ++i)
    if (t_list[i] >= t_list[i - 1]) throw std::invalid_argument("t list must be decreasing");
  const double diam = std::hypot(curve.xmax - curve.xmin, curve.ymax - curve.ymin);
  if (t_list.front() > diam || t_list.back() <= 0.0)
    throw std::invalid_argument("radii must lie in (0, diam]");
  if (margin < 0.0) margin = t_list.front() * 1.2;
  auto g = make_distance_grid(curve, margin, grid);
  if (g.h >= t_list.back() / 4.0) throw std::invalid_argument("grid too coarse for the smallest radius");

  MinkowskiResult out;
  out.profile.grid = grid;
  out.profile.cell = g.h;
  const double cell_area = g.h * g.h;
  std::vector<std::size_t> counts(t_list.size(), 0);
  std::vector<std::size_t> layers(static_cast<std::size_t>(n_max) + 1, 0);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double d = g.d(i, j);
      for (std::size_t q = 0; q < t_list.size(); ++q) {
        if (d < t_list[q])
          ++counts[q];
        else
          break;
      }
      if (g.in(i, j)) {
        if (d >= 0.5) {
          ++layers[0];
        } else {
          const int nlayer = static_cast<int>(std::floor(-std::log2(d))) ;
          if (nlayer >= 1 && nlayer <= n_max) ++layers[static_cast<std::size_t>(nlayer)];
        }
      }
    }
  }
  for (std::size_t q = 0; q < t_list.size(); ++q) {
    out.profile.t.push_back(t_list[q]);
    out.profile.area.push_back(static_cast<double>(counts[q]) * cell_area);
  }
  for (auto c : layers) out.layer_areas.push_back(static_cast<double>(c) * cell_area);
  return out;
}

// h = 2 - slope of log(area) vs log(t), restricted to radii resolved by at
// least 100 cells; clamped into [1,2).
inline double estimate_h(const SausageProfile& profile) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < profile.t.size(); ++i) {
    if (profile.area[i] < 100.0 * profile.cell * profile.cell) continue;
    lx.push_back(std::log(profile.t[i]));
    ly.push_back(std::log(profile.area[i]));
  }
  for (std::size_t i = 1; i < profile.t.size(); ++i) {
    if (profile.area[i] > profile.area[i - 1])
      throw std::invalid_argument("sausage profile is not monotone");
  }
  if (lx.size() < 4) throw std::invalid_argument("need at least 4 usable profile points");
  const double span = *std::max_element(lx.begin(), lx.end()) - *std::min_element(lx.begin(), lx.end());
  if (span < 2.0 * std::log(10.0) - 1e-9) throw std::invalid_argument("profile must span two decades");
  const double m = lsq_slope(lx, ly);
  return std::clamp(2.0 - m, 1.0, 2.0 - 1e-9);
}

struct Disk {
  cplx center;
  double radius;
  std::string tag;
};

// Three scales; centers on the curve, just inside it, and at the centroid.
inline std::vector<Disk> default_disk_family(const SampledCurve& curve) {
  std::vector<Disk> disks;
  const double diam = std::hypot(curve.xmax - curve.xmin, curve.ymax - curve.ymin);
  cplx centroid(0, 0);
  for (const auto& p : curve.z) centroid += p;
  centroid /= static_cast<double>(curve.n);
  for (double scale : {0.5, 0.125, 0.03125}) {
    const double r = scale * diam;
    for (int q = 0; q < 4; ++q) {
      const double arc = curve.length * q / 4.0;
      const double tt = curve.param_of_arclength(arc);
      const cplx zc = curve.point_at(tt);
      disks.push_back({zc, r, "on-curve"});
      const cplx v = curve.velocity_at(tt);
      const cplx nu = cplx(0, 1) * v / std::abs(v);
      disks.push_back({zc + 0.3 * r * nu, r, "near-curve"});
    }
    disks.push_back({centroid, r, "far"});
  }
  return disks;
}

struct ApEstimate {
  double p = 2.0;
  double alpha = 0.0;        // weight exponent: omega = d^alpha
  double constant = 1.0;     // sup of the A_p product at the finest level
  std::vector<double> trace; // sup per refinement level
  bool diverged = false;     // growth > 10x between consecutive levels
  std::size_t disks = 0;
  std::string note;
};

namespace detail {

// Cell average of d^alpha with a transverse-exact model below grid scale.
// Cells away from the curve use the center value; cells touching it integrate
// the 1-D profile t^alpha over [floor, d_c + h/2]. The floor deepens by six
// decades per refinement level, so non-integrable exponents (alpha <= -1)
// blow up geometrically across levels while integrable ones settle.
inline double cell_average_pow(double dc, double h, double alpha, double tfloor) {
  const double hi = dc + 0.5 * h;
  double lo = dc - 0.5 * h;
  if (lo > 0.0) {
    if (alpha == 0.0) return 1.0;
    // exact 1-D average over [lo, hi]
    if (alpha == -1.0) return std::log(hi / lo) / h;
    return (std::pow(hi, alpha + 1.0) - std::pow(lo, alpha + 1.0)) / ((alpha + 1.0) * h);
  }
  lo = tfloor;
  if (lo >= hi) lo = hi * 0.5;
  if (alpha == 0.0) return 1.0;
  if (alpha == -1.0) return std::log(hi / lo) / h;
  return (std::pow(hi, alpha + 1.0) - std::pow(lo, alpha + 1.0)) / ((alpha + 1.0) * h);
}

}  // namespace detail

// Muckenhoupt product sup over a disk family for omega = d(z,Gamma)^alpha,
// with a refinement trace used as the divergence verdict.
inline ApEstimate ap_constant(const SampledCurve& curve, double alpha, double p,
                              const std::vector<Disk>& disks, int levels = 3) {
  if (p <= 1.0) throw std::invalid_argument("A_p needs p > 1");
  const double dual = -alpha / (p - 1.0);
  if (alpha <= -2.0 || dual <= -2.0)
    throw std::invalid_argument("both exponents must exceed -2 for grid sums to converge");
  ApEstimate est;
  est.p = p;
  est.alpha = alpha;
  est.disks = disks.size();

  for (int level = 0; level < levels; ++level) {
    const std::size_t m = 24u << level;
    double sup = 0.0;
    std::vector<double> per_disk(disks.size(), 0.0);
    parallel_for(disks.size(), [&](std::size_t di) {
      const Disk& disk = disks[di];
      const double h = 2.0 * disk.radius / static_cast<double>(m);
      const double tfloor = 0.25 * h * std::pow(10.0, -6.0 * level);
      double sum_w = 0.0, sum_dual = 0.0;
      std::size_t cells = 0;
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
          const cplx zc = disk.center + cplx((i + 0.5) * h - disk.radius, (j + 0.5) * h - disk.radius);
          if (std::abs(zc - disk.center) > disk.radius) continue;
          const double dc = signed_distance(curve, zc).d;
          sum_w += detail::cell_average_pow(dc, h, alpha, tfloor);
          sum_dual += detail::cell_average_pow(dc, h, dual, tfloor);
          ++cells;
        }
      }
      if (cells == 0) return;
      const double avg_w = sum_w / static_cast<double>(cells);
      const double avg_dual = sum_dual / static_cast<double>(cells);
      per_disk[di] = avg_w * std::pow(avg_dual, p - 1.0);
    });
    for (double v : per_disk) sup = std::max(sup, v);
    est.trace.push_back(sup);
  }
  est.constant = est.trace.back();
  for (std::size_t i = 1; i < est.trace.size(); ++i) {
    if (est.trace[i] > 10.0 * est.trace[i - 1]) est.diverged = true;
  }
  if (est.diverged) est.note = "not A_p at desk scale (trace grew >10x per level)";
  return est;
}

struct RegionPoint {
  double p, s;
  bool admissible;
};

// (h-1)(p-1) < sp < p+1-h
inline bool admissible(double h, double p, double s) {
  return (h - 1.0) * (p - 1.0) < s * p && s * p < p + 1.0 - h;
}

inline std::vector<RegionPoint> admissible_region(double h, const std::vector<double>& p_grid,
                                                  const std::vector<double>& s_grid) {
  if (h < 1.0 || h >= 2.0) throw std::invalid_argument("h must lie in [1,2)");
  std::vector<RegionPoint> out;
  out.reserve(p_grid.size() * s_grid.size());
  for (double p : p_grid)
    for (double s : s_grid) out.push_back({p, s, admissible(h, p, s)});
  return out;
}

}  // namespace besovlab
