#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovlab/fft.hpp"
#include "besovlab/util.hpp"

namespace besovlab {

// r(theta) = c0 + sum_n (a_n cos(n theta) + b_n sin(n theta))
struct RadialFourier {
  std::vector<std::array<double, 2>> coeffs;  // coeffs[n] = {a_n, b_n}; b_0 ignored

  double eval(double theta) const {
    double r = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n)
      r += coeffs[n][0] * std::cos(n * theta) + coeffs[n][1] * std::sin(n * theta);
    return r;
  }
  double deriv(double theta) const {
    double d = 0.0;
    for (std::size_t n = 1; n < coeffs.size(); ++n)
      d += n * (-coeffs[n][0] * std::sin(n * theta) + coeffs[n][1] * std::cos(n * theta));
    return d;
  }
  double deriv2(double theta) const {
    double d = 0.0;
    for (std::size_t n = 1; n < coeffs.size(); ++n)
      d -= double(n) * n * (coeffs[n][0] * std::cos(n * theta) + coeffs[n][1] * std::sin(n * theta));
    return d;
  }
};

struct CurveSpec {
  enum class Kind { Circle, Radial, Polygon, Snowflake };
  Kind kind = Kind::Circle;
  double radius = 1.0;                // Circle
  RadialFourier radial;               // Radial
  std::vector<cplx> vertices;         // Polygon, counterclockwise
  int level = 0;                      // Snowflake
  double side = 1.0;                  // Snowflake side length

  static CurveSpec circle(double r = 1.0) {
    if (r <= 0.0) throw std::invalid_argument("circle radius must be positive");
    CurveSpec s;
    s.kind = Kind::Circle;
    s.radius = r;
    return s;
  }
  static CurveSpec radial_curve(std::vector<std::array<double, 2>> coeffs) {
    CurveSpec s;
    s.kind = Kind::Radial;
    s.radial.coeffs = std::move(coeffs);
    for (int k = 0; k < 4096; ++k) {
      if (s.radial.eval(kTwoPi * k / 4096.0) <= 0.0)
        throw std::invalid_argument("radial curve: r(theta) must be positive");
    }
    return s;
  }
  // r(theta) = 1 + amp cos(k theta)
  static CurveSpec radial_cos(double amp, int k) {
    std::vector<std::array<double, 2>> c(static_cast<std::size_t>(k) + 1, {0.0, 0.0});
    c[0][0] = 1.0;
    c[static_cast<std::size_t>(k)][0] = amp;
    return radial_curve(std::move(c));
  }
  static CurveSpec polygon(std::vector<cplx> verts);
  static CurveSpec snowflake(int level, double side = 1.0) {
    if (level < 0 || level > 7) throw std::invalid_argument("snowflake level must be in [0,7]");
    CurveSpec s;
    s.kind = Kind::Snowflake;
    s.level = level;
    s.side = side;
    return s;
  }

  bool smooth() const { return kind == Kind::Circle || kind == Kind::Radial; }

  double r_of(double theta) const { return kind == Kind::Circle ? radius : radial.eval(theta); }
  double rprime_of(double theta) const { return kind == Kind::Circle ? 0.0 : radial.deriv(theta); }
};

namespace detail {

inline bool segments_properly_intersect(cplx a, cplx b, cplx c, cplx d) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

inline std::vector<cplx> koch_chain(int level, double side) {
  std::vector<cplx> pts = {cplx(0.0, 0.0), cplx(side, 0.0), cplx(side / 2.0, side * std::sqrt(3.0) / 2.0)};
  const cplx rot = std::polar(1.0, -kPi / 3.0);  // outward bump for ccw orientation
  for (int l = 0; l < level; ++l) {
    std::vector<cplx> next;
    next.reserve(pts.size() * 4);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const cplx a = pts[i];
      const cplx b = pts[(i + 1) % pts.size()];
      const cplx d = (b - a) / 3.0;
      next.push_back(a);
      next.push_back(a + d);
      next.push_back(a + d + rot * d);
      next.push_back(a + 2.0 * d);
    }
    pts = std::move(next);
  }
  return pts;
}

inline double point_segment_distance(cplx q, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(q - a);
  double u = ((q - a).real() * ab.real() + (q - a).imag() * ab.imag()) / len2;
  u = std::clamp(u, 0.0, 1.0);
  return std::abs(q - (a + u * ab));
}

}  // namespace detail

inline CurveSpec CurveSpec::polygon(std::vector<cplx> verts) {
  if (verts.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const std::size_t m = verts.size();
  double area2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const cplx a = verts[i], b = verts[(i + 1) % m];
    area2 += a.real() * b.imag() - b.real() * a.imag();
  }
  if (area2 <= 0.0) throw std::invalid_argument("polygon vertices must be counterclockwise");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i || (j + 1) % m == i || (i + 1) % m == j) continue;
      if (detail::segments_properly_intersect(verts[i], verts[(i + 1) % m], verts[j], verts[(j + 1) % m]))
        throw std::invalid_argument("polygon is self-intersecting");
    }
  }
  CurveSpec s;
  s.kind = Kind::Polygon;
  s.vertices = std::move(verts);
  return s;
}

enum class Side { Interior, Exterior, OnCurve };

struct DistanceResult {
  double d = 0.0;
  Side side = Side::Exterior;
};

class SampledCurve {
 public:
  CurveSpec spec;
  std::size_t n = 0;
  std::vector<double> t;        // uniform parameters 2 pi k / n
  std::vector<cplx> z;          // sample points
  std::vector<double> s;        // cumulative arc length, size n+1, s[n] = length
  std::vector<cplx> tangent;    // unit tangents
  std::vector<cplx> zprime;     // dz/dt at nodes
  std::vector<cplx> zsecond;    // d^2z/dt^2 at nodes (zero for segment chains)
  double length = 0.0;

  // exact geometry for Polygon/Snowflake
  std::vector<cplx> chain;      // closed vertex list
  std::vector<double> chain_s;  // cumulative arc length at chain vertices, size m+1

  cplx point_at(double tt) const {
    if (spec.smooth()) {
      const double r = spec.r_of(tt);
      return std::polar(r, tt);
    }
    return chain_point(chain_arc_of_param(tt));
  }

  cplx velocity_at(double tt) const {
    if (spec.smooth()) {
      const double r = spec.r_of(tt);
      const double rp = spec.rprime_of(tt);
      return cplx(rp, r) * std::polar(1.0, tt);
    }
    const double arc = chain_arc_of_param(tt);
    const std::size_t e = chain_edge_of_arc(arc);
    const cplx d = chain[(e + 1) % chain.size()] - chain[e];
    return (d / std::abs(d)) * (length / kTwoPi);
  }

  double param_of_arclength(double arc) const {
    arc = std::fmod(arc, length);
    if (arc < 0) arc += length;
    if (!spec.smooth()) return kTwoPi * arc / length;
    // monotone inverse of s(t) by bisection on the node table plus Newton polish
    std::size_t lo = std::upper_bound(s.begin(), s.end(), arc) - s.begin();
    lo = (lo == 0) ? 0 : lo - 1;
    const double t0 = kTwoPi * lo / n;
    double tt = t0 + (arc - s[lo]) / std::abs(velocity_at(t0));
    for (int it = 0; it < 3; ++it) {
      const double mid = 0.5 * (t0 + tt);
      const double seg = (tt - t0) / 6.0 *
                         (std::abs(velocity_at(t0)) + 4.0 * std::abs(velocity_at(mid)) + std::abs(velocity_at(tt)));
      tt -= (s[lo] + seg - arc) / std::abs(velocity_at(tt));
    }
    return tt;
  }

  cplx point_at_arclength(double arc) const { return point_at(param_of_arclength(arc)); }

  double arclength_at_param(double tt) const {
    tt = std::fmod(tt, kTwoPi);
    if (tt < 0) tt += kTwoPi;
    if (!spec.smooth()) return length * tt / kTwoPi;
    const double h = kTwoPi / static_cast<double>(n);
    const std::size_t k = std::min(static_cast<std::size_t>(tt / h), n - 1);
    const double t0 = kTwoPi * k / static_cast<double>(n);
    const double mid = 0.5 * (t0 + tt);
    return s[k] + (tt - t0) / 6.0 *
                      (std::abs(velocity_at(t0)) + 4.0 * std::abs(velocity_at(mid)) + std::abs(velocity_at(tt)));
  }

  DistanceResult signed_distance(cplx q) const {
    double d;
    if (spec.smooth()) {
      const std::size_t k = nearest_sample(q);
      d = refine_smooth(q, k);
    } else {
      d = nearest_chain_distance(q);
    }
    if (d < length / (10.0 * static_cast<double>(n))) return {d, Side::OnCurve};
    return {d, winding_contains(q) ? Side::Interior : Side::Exterior};
  }

  bool winding_contains(cplx q) const {
    const std::vector<cplx>& poly = spec.smooth() ? z : chain;
    bool inside = false;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const cplx a = poly[i], b = poly[(i + 1) % m];
      if ((a.imag() > q.imag()) != (b.imag() > q.imag())) {
        const double xint = a.real() + (q.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
        if (q.real() < xint) inside = !inside;
      }
    }
    return inside;
  }

  double brute_force_distance(cplx q) const {
    if (!spec.smooth()) return nearest_chain_distance(q);
    double best = std::numeric_limits<double>::max();
    for (std::size_t k = 0; k < n; ++k) best = std::min(best, std::abs(q - z[k]));
    return best;
  }

  // bounding box
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;

 private:
  friend SampledCurve build_curve(const CurveSpec&, std::size_t);

  // uniform-grid bucket index over sample points
  int gx_ = 0, gy_ = 0;
  double cell_ = 1.0;
  std::vector<std::vector<int>> buckets_;

  void build_index() {
    xmin = ymin = std::numeric_limits<double>::max();
    xmax = ymax = std::numeric_limits<double>::lowest();
    for (const cplx& p : z) {
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag());
      ymax = std::max(ymax, p.imag());
    }
    const double w = std::max(xmax - xmin, ymax - ymin);
    const int g = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
    gx_ = gy_ = g;
    cell_ = w / g + 1e-300;
    buckets_.assign(static_cast<std::size_t>(g) * g, {});
    for (std::size_t k = 0; k < n; ++k) {
      buckets_[bucket_of(z[k])].push_back(static_cast<int>(k));
    }
  }

  std::size_t bucket_of(cplx p) const {
    int ix = std::clamp(static_cast<int>((p.real() - xmin) / cell_), 0, gx_ - 1);
    int iy = std::clamp(static_cast<int>((p.imag() - ymin) / cell_), 0, gy_ - 1);
    return static_cast<std::size_t>(iy) * gx_ + ix;
  }

  std::size_t nearest_sample(cplx q) const {
    const int cx = std::clamp(static_cast<int>((q.real() - xmin) / cell_), 0, gx_ - 1);
    const int cy = std::clamp(static_cast<int>((q.imag() - ymin) / cell_), 0, gy_ - 1);
    double best = std::numeric_limits<double>::max();
    int best_k = 0;
    for (int ring = 0; ring < std::max(gx_, gy_) + 1; ++ring) {
      // once a candidate exists, stop when the next ring cannot improve it
      if (best < std::numeric_limits<double>::max()) {
        const double ring_min = (ring - 1) * cell_ - distance_to_cell(q, cx, cy);
        if (ring_min > best) break;
      }
      bool any_cell = false;
      for (int iy = cy - ring; iy <= cy + ring; ++iy) {
        for (int ix = cx - ring; ix <= cx + ring; ++ix) {
          if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
          if (ix < 0 || iy < 0 || ix >= gx_ || iy >= gy_) continue;
          any_cell = true;
          for (int k : buckets_[static_cast<std::size_t>(iy) * gx_ + ix]) {
            const double d = std::abs(q - z[static_cast<std::size_t>(k)]);
            if (d < best) {
              best = d;
              best_k = k;
            }
          }
        }
      }
      if (!any_cell && ring > std::max(gx_, gy_)) break;
    }
    return static_cast<std::size_t>(best_k);
  }

  static double distance_to_cell(cplx, int, int) { return 0.0; }

  // golden-section refinement of |z(t)-q| around the nearest sample
  double refine_smooth(cplx q, std::size_t k) const {
    const double h = kTwoPi / static_cast<double>(n);
    double a = t[k] - h, b = t[k] + h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = std::abs(point_at(c) - q), fd = std::abs(point_at(d) - q);
    for (int it = 0; it < 48; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = std::abs(point_at(c) - q);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = std::abs(point_at(d) - q);
      }
    }
    return std::min(fc, fd);
  }

  double nearest_chain_distance(cplx q) const {
    // vertex scan to bound the answer, then exact distance over candidate edges
    double best_v = std::numeric_limits<double>::max();
    const std::size_t m = chain.size();
    double max_edge = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      best_v = std::min(best_v, std::abs(q - chain[i]));
      max_edge = std::max(max_edge, chain_s[i + 1] - chain_s[i]);
    }
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(q - chain[i]) > best_v + max_edge) continue;
      best = std::min(best, detail::point_segment_distance(q, chain[i], chain[(i + 1) % m]));
    }
    return best;
  }

  double chain_arc_of_param(double tt) const {
    double frac = std::fmod(tt, kTwoPi) / kTwoPi;
    if (frac < 0) frac += 1.0;
    return frac * length;
  }

  std::size_t chain_edge_of_arc(double arc) const {
    std::size_t e = std::upper_bound(chain_s.begin(), chain_s.end(), arc) - chain_s.begin();
    e = (e == 0) ? 0 : e - 1;
    return std::min(e, chain.size() - 1);
  }

  cplx chain_point(double arc) const {
    const std::size_t e = chain_edge_of_arc(arc);
    const cplx a = chain[e], b = chain[(e + 1) % chain.size()];
    const double seg = chain_s[e + 1] - chain_s[e];
    return a + (arc - chain_s[e]) / seg * (b - a);
  }
};

inline SampledCurve build_curve(const CurveSpec& spec, std::size_t n) {
  if (!is_pow2(n) || n < 64) throw std::invalid_argument("sample count must be a power of two, at least 64");
  SampledCurve c;
  c.spec = spec;
  c.n = n;
  c.t.resize(n);
  c.z.resize(n);
  c.s.assign(n + 1, 0.0);
  c.tangent.resize(n);
  c.zprime.resize(n);
  c.zsecond.resize(n);
  for (std::size_t k = 0; k < n; ++k) c.t[k] = kTwoPi * k / static_cast<double>(n);

  if (spec.kind == CurveSpec::Kind::Polygon || spec.kind == CurveSpec::Kind::Snowflake) {
    c.chain = (spec.kind == CurveSpec::Kind::Snowflake) ? detail::koch_chain(spec.level, spec.side)
                                                        : spec.vertices;
    const std::size_t m = c.chain.size();
    c.chain_s.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      c.chain_s[i + 1] = c.chain_s[i] + std::abs(c.chain[(i + 1) % m] - c.chain[i]);
    c.length = c.chain_s[m];
    for (std::size_t k = 0; k < n; ++k) {
      c.s[k] = c.length * static_cast<double>(k) / static_cast<double>(n);
      c.z[k] = c.chain_point(c.s[k]);
      c.zprime[k] = c.velocity_at(c.t[k]);
      c.tangent[k] = c.zprime[k] / std::abs(c.zprime[k]);
      c.zsecond[k] = cplx(0.0, 0.0);
    }
    c.s[n] = c.length;
  } else {
    // arc length by composite Simpson on the exact speed, 8 panels per node interval
    const double h = kTwoPi / static_cast<double>(n);
    auto speed = [&spec](double tt) {
      const double r = spec.r_of(tt);
      const double rp = spec.rprime_of(tt);
      return std::sqrt(r * r + rp * rp);
    };
    for (std::size_t k = 0; k < n; ++k) {
      c.z[k] = c.point_at(c.t[k]);
      const double r = spec.r_of(c.t[k]);
      const double rp = spec.rprime_of(c.t[k]);
      const double rpp = spec.kind == CurveSpec::Kind::Circle ? 0.0 : spec.radial.deriv2(c.t[k]);
      const cplx ph = std::polar(1.0, c.t[k]);
      c.zprime[k] = cplx(rp, r) * ph;
      c.zsecond[k] = cplx(rpp - r, 2.0 * rp) * ph;
      c.tangent[k] = c.zprime[k] / std::abs(c.zprime[k]);
      double seg = 0.0;
      const int panels = 8;
      const double hh = h / panels;
      for (int p = 0; p < panels; ++p) {
        const double a = c.t[k] + p * hh;
        seg += hh / 6.0 * (speed(a) + 4.0 * speed(a + 0.5 * hh) + speed(a + hh));
      }
      c.s[k + 1] = c.s[k] + seg;
    }
    c.length = c.s[n];
  }

  // simple-at-sample-scale sanity on a decimated pair set
  const std::size_t m = std::min<std::size_t>(n, 256);
  const std::size_t stride = n / m;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (std::abs(c.z[i * stride] - c.z[j * stride]) <= 0.0)
        throw std::invalid_argument("curve is not simple at sample scale");
    }
  }

  c.build_index();
  return c;
}

inline DistanceResult signed_distance(const SampledCurve& curve, cplx q) { return curve.signed_distance(q); }

struct GeometryConstants {
  double chord_arc = 0.0;    // K
  double quasicircle = 0.0;  // C (sampled lower bound)
};

// K over up-to-1024 anchors, C over up-to-256 anchors (subarc diameters are
// computed over samples only, so C is a lower bound for the true constant).
inline GeometryConstants geometry_constants(const SampledCurve& curve) {
  GeometryConstants out;
  const std::size_t n = curve.n;
  {
    const std::size_t m = std::min<std::size_t>(n, 1024);
    const std::size_t stride = n / m;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 2; j < m; ++j) {
        if (i == 0 && j == m - 1) continue;
        const double chord = std::abs(curve.z[i * stride] - curve.z[j * stride]);
        if (chord <= 0.0) throw std::runtime_error("degenerate chord between distinct samples");
        const double arc = curve.s[j * stride] - curve.s[i * stride];
        const double sub = std::min(arc, curve.length - arc);
        out.chord_arc = std::max(out.chord_arc, sub / chord);
      }
    }
  }
  {
    const std::size_t m = std::min<std::size_t>(n, 256);
    const std::size_t stride = n / m;
    std::vector<cplx> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = curve.z[i * stride];
    // diam[i*m + step]: diameter of the anchor subarc from i forward `step` anchors
    std::vector<double> diam(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double running = 0.0;
      for (std::size_t step = 1; step < m; ++step) {
        const cplx pj = pts[(i + step) % m];
        for (std::size_t q = 0; q < step; ++q)
          running = std::max(running, std::abs(pts[(i + q) % m] - pj));
        diam[i * m + step] = running;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t step = 2; step + 2 <= m; ++step) {
        const std::size_t j = (i + step) % m;
        const double chord = std::abs(pts[i] - pts[j]);
        if (chord <= 0.0) throw std::runtime_error("degenerate chord between distinct samples");
        const double fwd = diam[i * m + step];
        const double bwd = diam[j * m + (m - step)];
        out.quasicircle = std::max(out.quasicircle, std::min(fwd, bwd) / chord);
      }
    }
  }
  return out;
}

}  // namespace besovlab
