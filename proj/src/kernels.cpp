#include "kernels.hpp"

#include <algorithm>
#include <vector>

#include "busemann/evaluators.hpp"
#include "quadrature.hpp"

namespace busemann::detail {

double abs_cos_integral(double a, double b, double g) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  double lo = a;
  double z = g + 0.5 * kPi + std::ceil((a - g - 0.5 * kPi) / kPi) * kPi;
  while (z < b) {
    if (z > lo) total += std::abs(int_cos(lo, z, g));
    lo = std::max(lo, z);
    z += kPi;
  }
  total += std::abs(int_cos(lo, b, g));
  return total;
}

double radial_tail_integral(std::size_t n, double s, double a, double b) {
  if (!(b > a)) return 0.0;
  if (n == 2 || s == 0.0) return b - a;
  const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
  if (c == 0.0) return 0.0;
  if (n == 3) {
    auto F = [&](double phi) {
      const double sp = std::sin(phi);
      const double cp = std::cos(phi);
      const double root = std::sqrt(std::max(0.0, cp * cp - s * s));
      return std::asin(std::clamp(sp / c, -1.0, 1.0)) - s * std::atan2(s * sp, root);
    };
    return F(b) - F(a);
  }
  // sin(phi) = c sin(theta) maps the window onto [-pi/2, pi/2] and removes the
  // square-root endpoint behaviour; the integrand becomes (c cos th / cos phi)^(n-1).
  const double ta = std::asin(std::clamp(std::sin(a) / c, -1.0, 1.0));
  const double tb = std::asin(std::clamp(std::sin(b) / c, -1.0, 1.0));
  const double e = static_cast<double>(n) - 1.0;
  return integrate(
      [&](double th) {
        const double st = c * std::sin(th);
        const double cphi = std::sqrt(std::max(1e-300, 1.0 - st * st));
        return std::pow(std::max(0.0, c * std::cos(th) / cphi), e);
      },
      ta, tb, 4, 24);
}

namespace {

/// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0, carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

/// 1/|p - a| - 1/|q - a|, free of cancellation when a is far from p and q.
double inverse_length_gap(const double* a, std::span<const double> p, std::span<const double> q, std::size_t n,
                          double lp2, double lq2) {
  double g = 0.0;
  for (std::size_t k = 0; k < n; ++k) g += (q[k] - p[k]) * ((q[k] - a[k]) + (p[k] - a[k]));
  const double lp = std::sqrt(lp2), lq = std::sqrt(lq2);
  return g / ((lp + lq) * lp * lq);
}

/// Planar separation data of an atom a against the pair (p, q).
struct AtomFrame {
  double theta = 0.0;  // angle at a subtended by [p, q]
  double psi_w = 0.0;  // angle of p - q in the frame e1 = (p - a)/|p - a|
};

/// Throws when the atom lies on the closed segment.
AtomFrame atom_frame(const double* a, std::span<const double> p, std::span<const double> q, std::size_t n,
                     bool need_psi) {
  double lp2 = 0.0, lq2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    lp2 += (p[k] - a[k]) * (p[k] - a[k]);
    lq2 += (q[k] - a[k]) * (q[k] - a[k]);
  }
  if (lp2 == 0.0 || lq2 == 0.0) throw DegenerateConfiguration("an atom of the base measure lies on the segment");
  const double ip = 1.0 / std::sqrt(lp2), iq = 1.0 / std::sqrt(lq2);
  const double gap = inverse_length_gap(a, p, q, n, lp2, lq2);
  double dm = 0.0, dp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double diff = (p[k] - q[k]) * ip + (q[k] - a[k]) * gap;
    const double sum = (p[k] - a[k]) * ip + (q[k] - a[k]) * iq;
    dm += diff * diff;
    dp += sum * sum;
  }
  if (dp <= 1e-28) throw DegenerateConfiguration("an atom of the base measure lies on the segment");
  AtomFrame f;
  f.theta = 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
  if (need_psi) {
    double w1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) w1 += (p[k] - q[k]) * (p[k] - a[k]) * ip;
    double r2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = (p[k] - q[k]) - w1 * (p[k] - a[k]) * ip;
      r2 += r * r;
    }
    f.psi_w = std::atan2(-std::sqrt(r2), w1);
  }
  return f;
}

/// Calls f(a, b, c) for each piece [a, b] of [lo, hi] inside a window
/// |phi - c| <= hw, c = center + k pi.
template <class F>
void for_each_window(double lo, double hi, double center, double hw, F&& f) {
  if (!(hi > lo) || !(hw > 0.0)) return;
  const long k0 = static_cast<long>(std::floor((lo - center - hw) / kPi));
  const long k1 = static_cast<long>(std::ceil((hi - center + hw) / kPi));
  for (long k = k0; k <= k1; ++k) {
    const double c = center + static_cast<double>(k) * kPi;
    const double a = std::max(lo, c - hw), b = std::min(hi, c + hw);
    if (b > a) f(a, b, c);
  }
}

/// Sum of g(a - c, b - c) over the window pieces, in window-local coordinates.
template <class G>
double over_windows(double lo, double hi, double center, double hw, G&& g) {
  double total = 0.0;
  for_each_window(lo, hi, center, hw, [&](double a, double b, double c) { total += g(a - c, b - c); });
  return total;
}

}  // namespace

double pd_closed_segment(const ResolvedAtoms& atoms, std::span<const double> p, std::span<const double> q,
                         const SegQuery& sq) {
  const std::size_t n = atoms.dim;
  const double er = mean_planar_radius(n);
  const double s = std::sin(sq.tau);
  const double hw = 0.5 * kPi - sq.tau;
  CompensatedSum total;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const AtomFrame f = atom_frame(atoms.at(i), p, q, n, sq.kind != SegKind::Mass);
    const double w = atoms.weights[i];
    switch (sq.kind) {
      case SegKind::Mass:
        total.add(w * f.theta);
        break;
      case SegKind::Transversal:
        total.add(w * er * abs_cos_integral(0.5 * kPi, 0.5 * kPi + f.theta, f.psi_w));
        break;
      case SegKind::Restricted:
        total.add(w * over_windows(0.5 * kPi, 0.5 * kPi + f.theta, f.psi_w, hw,
                                   [&](double a, double b) { return radial_tail_integral(n, s, a, b); }));
        break;
    }
  }
  return total.value() / kPi;
}

std::vector<double> pd_closed_embed(const ResolvedAtoms& atoms, std::span<const double> o, std::span<const double> x,
                                    double constant) {
  const std::size_t n = atoms.dim;
  std::vector<CompensatedSum> acc(n);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double* a = atoms.at(i);
    double lx2 = 0.0, lo2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      lx2 += (x[k] - a[k]) * (x[k] - a[k]);
      lo2 += (o[k] - a[k]) * (o[k] - a[k]);
    }
    if (lx2 == 0.0 || lo2 == 0.0) throw DegenerateConfiguration("an atom of the base measure lies on the segment");
    const double ix = 1.0 / std::sqrt(lx2);
    const double gap = inverse_length_gap(a, x, o, n, lx2, lo2);
    const double w = atoms.weights[i] * constant;
    for (std::size_t k = 0; k < n; ++k) acc[k].add(w * ((x[k] - o[k]) * ix + (o[k] - a[k]) * gap));
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = acc[k].value();
  return out;
}

namespace {

/// Angular range [lo, hi] (normal angles) of lines through `a` meeting the box;
/// returns false when `a` is inside the closed box.
bool box_normal_range(const double* a, const Box& box, double& lo, double& hi) {
  const double x0 = box.lo[0], y0 = box.lo[1], x1 = box.hi[0], y1 = box.hi[1];
  if (a[0] >= x0 && a[0] <= x1 && a[1] >= y0 && a[1] <= y1) return false;
  const double cx = 0.5 * (x0 + x1) - a[0], cy = 0.5 * (y0 + y1) - a[1];
  const double gc = std::atan2(cy, cx);
  double dmin = 0.0, dmax = 0.0;
  const double vx[4] = {x0, x1, x1, x0}, vy[4] = {y0, y0, y1, y1};
  for (int k = 0; k < 4; ++k) {
    const double ux = vx[k] - a[0], uy = vy[k] - a[1];
    const double d = std::atan2(cx * uy - cy * ux, cx * ux + cy * uy);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  lo = gc + dmin + 0.5 * kPi;
  hi = gc + dmax + 0.5 * kPi;
  return true;
}

}  // namespace

double pd_closed_box2d(const ResolvedAtoms& atoms, const Box& box) {
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double lo, hi;
    total += box_normal_range(atoms.at(i), box, lo, hi) ? atoms.weights[i] * (hi - lo) / kPi : atoms.weights[i];
  }
  return total;
}

namespace {

/// Separation arc [lo, hi] of normal angles for an atom against (p, q), n = 2.
/// Returns 0 when the arc is empty, otherwise the sign s such that s * v is the
/// normal pointing away from p. Throws when the atom lies on the closed segment.
int separation_arc(const double* a, std::span<const double> p, std::span<const double> q, double& lo, double& hi) {
  const double px = p[0] - a[0], py = p[1] - a[1], qx = q[0] - a[0], qy = q[1] - a[1];
  if ((px == 0.0 && py == 0.0) || (qx == 0.0 && qy == 0.0)) {
    throw DegenerateConfiguration("an atom of the base measure lies on the segment");
  }
  const double cr = px * qy - py * qx;
  const double dt = px * qx + py * qy;
  if (cr == 0.0) {
    if (dt < 0.0) throw DegenerateConfiguration("an atom of the base measure lies on the segment");
    return 0;
  }
  const double theta = std::atan2(std::abs(cr), dt);
  const double start = std::atan2(py, px) + 0.5 * kPi;
  if (cr > 0.0) {
    lo = start;
    hi = start + theta;
    return 1;
  }
  lo = start - theta;
  hi = start;
  return -1;
}

double arc_weighted(const ArcSet& arcs, double lo, double hi, std::size_t n, double psi_w, const SegQuery& sq) {
  double acc = 0.0;
  switch (sq.kind) {
    case SegKind::Mass:
      arcs.for_each_piece(lo, hi, [&](double a, double b, double d) { acc += d * (b - a); });
      break;
    case SegKind::Transversal:
      arcs.for_each_piece(lo, hi, [&](double a, double b, double d) { acc += d * abs_cos_integral(a, b, psi_w); });
      break;
    case SegKind::Restricted: {
      const double hw = 0.5 * kPi - sq.tau;
      const double s = std::sin(sq.tau);
      arcs.for_each_piece(lo, hi, [&](double a, double b, double d) {
        acc += d * over_windows(a, b, psi_w, hw, [&](double u, double v) { return radial_tail_integral(n, s, u, v); });
      });
      break;
    }
  }
  return acc;
}

}  // namespace

double pd_arc_segment(const ResolvedAtoms& atoms, const ArcSet& arcs, std::span<const double> p,
                      std::span<const double> q, const SegQuery& sq) {
  const double psi_w = std::atan2(p[1] - q[1], p[0] - q[0]);
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double lo, hi;
    if (!separation_arc(atoms.at(i), p, q, lo, hi)) continue;
    total += atoms.weights[i] * arc_weighted(arcs, lo, hi, 2, psi_w, sq);
  }
  return total;
}

std::array<double, 2> pd_arc_embed(const ResolvedAtoms& atoms, const ArcSet& arcs, std::span<const double> o,
                                   std::span<const double> x) {
  std::array<double, 2> out{0.0, 0.0};
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double lo, hi;
    const int sign = separation_arc(atoms.at(i), o, x, lo, hi);
    if (sign == 0) continue;
    const double w = sign * atoms.weights[i];
    arcs.for_each_piece(lo, hi, [&](double a, double b, double d) {
      out[0] += w * d * int_cos(a, b, 0.0);
      out[1] += w * d * int_sin(a, b, 0.0);
    });
  }
  return out;
}

double pd_arc_box(const ResolvedAtoms& atoms, const ArcSet& arcs, const Box& box) {
  const double full = arcs.mass();
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double lo, hi;
    if (!box_normal_range(atoms.at(i), box, lo, hi)) {
      total += atoms.weights[i] * full;
      continue;
    }
    double acc = 0.0;
    arcs.for_each_piece(lo, hi, [&](double a, double b, double d) { acc += d * (b - a); });
    total += atoms.weights[i] * acc;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Measures carried by a line {c + t d}. For a normal at angle phi = delta + psi,
// psi in (-pi/2, pi/2), the line through c + t d separates z from the rest of the
// plane exactly at t = t_z(psi) = z1 + z2 tan(psi), with (z1, z2) the coordinates
// of z - c in the frame (d, d_perp). Between breakpoints the cumulative mass is
// affine in t, so every integrand reduces to K0 + K1 tan(psi) times a
// trigonometric weight.

namespace {

struct LinePoint {
  double z1, z2;
};

struct LineCtx {
  const LineMeasure& line;
  double cx, cy, dx, dy, delta;

  explicit LineCtx(const LineMeasure& l)
      : line(l), cx(l.anchor[0]), cy(l.anchor[1]), dx(l.direction[0]), dy(l.direction[1]),
        delta(std::atan2(l.direction[1], l.direction[0])) {}

  LinePoint local(double x, double y) const {
    const double ux = x - cx, uy = y - cy;
    return {ux * dx + uy * dy, -ux * dy + uy * dx};
  }
};

struct Basis {
  double one, tan, cos, sin, sin_tan;  // cos_tan == sin
};

Basis basis(double s0, double s1, bool need_tan) {
  Basis b{};
  b.one = s1 - s0;
  b.cos = std::sin(s1) - std::sin(s0);
  b.sin = std::cos(s0) - std::cos(s1);
  if (need_tan) {
    const double c0 = std::cos(s0), c1 = std::cos(s1);
    if (c0 < 1e-13 || c1 < 1e-13) throw DegenerateConfiguration("hyperplane mass diverges near the carrier line");
    b.tan = std::log(c0 / c1);
    b.sin_tan = std::atanh(std::sin(s1)) - std::atanh(std::sin(s0)) - b.cos;
  }
  return b;
}

/// Affine representation A + rho t of the cumulative mass near t.
void affine_at(const BaseMeasure1D& m, double t, double& A, double& rho) {
  rho = m.slope(t);
  A = m.cumulative(t) - rho * t;
}

void check_vertex(const BaseMeasure1D& m, const LinePoint& z) {
  if (z.z2 != 0.0) return;
  for (const auto& at : m.atoms()) {
    if (at.position == z.z1) throw DegenerateConfiguration("an atom of the base measure lies on the segment");
  }
}

/// Sorted breakpoints in [s0, s1] for the given local vertices.
std::vector<double> breakpoints(const BaseMeasure1D& m, std::span<const LinePoint> pts, double s0, double s1,
                                std::span<const double> extra_zero_phases) {
  std::vector<double> bp{s0, s1};
  const auto& knots = m.knots();
  const double ta0 = std::tan(s0), ta1 = std::tan(s1);
  for (const auto& z : pts) {
    if (z.z2 == 0.0) continue;
    const double u = z.z1 + z.z2 * ta0, v = z.z1 + z.z2 * ta1;
    const double lo = std::min(u, v), hi = std::max(u, v);
    auto it = std::upper_bound(knots.begin(), knots.end(), lo);
    for (; it != knots.end() && *it < hi; ++it) {
      const double psi = std::atan((*it - z.z1) / z.z2);
      if (psi > s0 && psi < s1) bp.push_back(psi);
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double den = pts[j].z2 - pts[i].z2;
      if (den == 0.0) continue;
      const double psi = std::atan((pts[i].z1 - pts[j].z1) / den);
      if (psi > s0 && psi < s1) bp.push_back(psi);
    }
  }
  for (double g : extra_zero_phases) {
    double z = g + 0.5 * kPi + std::ceil((s0 - g - 0.5 * kPi) / kPi) * kPi;
    for (; z < s1; z += kPi) {
      if (z > s0) bp.push_back(z);
    }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

/// For each sub-interval of [s0, s1], computes (K0, K1) of the hull mass
/// M(max t_k) - M(min t_k) and passes them to `sink(a, b, K0, K1)`.
template <class Sink>
void hull_pieces(const LineCtx& ctx, std::span<const LinePoint> pts, double s0, double s1,
                 std::span<const double> zero_phases, Sink&& sink) {
  const auto bp = breakpoints(ctx.line.measure, pts, s0, s1, zero_phases);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i], b = bp[i + 1];
    if (!(b > a)) continue;
    const double tm = std::tan(0.5 * (a + b));
    std::size_t kmin = 0, kmax = 0;
    double tmin = kInf, tmax = -kInf;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double t = pts[k].z1 + pts[k].z2 * tm;
      if (t < tmin) tmin = t, kmin = k;
      if (t > tmax) tmax = t, kmax = k;
    }
    double Ah, rh, Al, rl;
    affine_at(ctx.line.measure, tmax, Ah, rh);
    affine_at(ctx.line.measure, tmin, Al, rl);
    const double K0 = (Ah + rh * pts[kmax].z1) - (Al + rl * pts[kmin].z1);
    const double K1 = rh * pts[kmax].z2 - rl * pts[kmin].z2;
    sink(a, b, K0, K1);
  }
}

/// Integral over psi in [s0, s1] of (K0 + K1 tan psi) |cos(psi - g)| or 1.
double weighted_piece(double a, double b, double K0, double K1, bool transversal, double g) {
  const bool need_tan = K1 != 0.0;
  const Basis B = basis(a, b, need_tan);
  if (!transversal) return K0 * B.one + (need_tan ? K1 * B.tan : 0.0);
  // cos(psi - g) = cos g cos psi + sin g sin psi, single sign on [a, b]
  const double cg = std::cos(g), sg = std::sin(g);
  double v = K0 * (cg * B.cos + sg * B.sin);
  if (need_tan) v += K1 * (cg * B.sin + sg * B.sin_tan);
  return std::cos(0.5 * (a + b) - g) >= 0.0 ? v : -v;
}

std::vector<LinePoint> locals(const LineCtx& ctx, std::span<const std::array<double, 2>> v) {
  std::vector<LinePoint> out;
  out.reserve(v.size());
  for (const auto& p : v) {
    out.push_back(ctx.local(p[0], p[1]));
    check_vertex(ctx.line.measure, out.back());
  }
  return out;
}

void check_segment_crossing(const LineCtx& ctx, const LinePoint& p, const LinePoint& q) {
  if ((p.z2 > 0.0 && q.z2 > 0.0) || (p.z2 < 0.0 && q.z2 < 0.0) || p.z2 == q.z2) return;
  const double lam = p.z2 / (p.z2 - q.z2);
  const double t = p.z1 + lam * (q.z1 - p.z1);
  for (const auto& at : ctx.line.measure.atoms()) {
    if (std::abs(at.position - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
      throw DegenerateConfiguration("an atom of the base measure lies on the segment");
    }
  }
}

double line_hull(const LineMeasure& line, const ArcSet& arcs, std::span<const std::array<double, 2>> verts,
                 const SegQuery& sq, double psi_w_global) {
  const LineCtx ctx(line);
  const auto pts = locals(ctx, verts);
  const bool transversal = sq.kind == SegKind::Transversal;
  const double g = psi_w_global - ctx.delta;
  const double zero_phase[1] = {g};
  std::span<const double> zeros = transversal ? std::span<const double>(zero_phase, 1) : std::span<const double>();
  double total = 0.0;
  auto integrate_piece = [&](double s0, double s1, double dens) {
    hull_pieces(ctx, pts, s0, s1, zeros, [&](double a, double b, double K0, double K1) {
      total += dens * weighted_piece(a, b, K0, K1, transversal, g);
    });
  };
  const double lo = ctx.delta - 0.5 * kPi, hi = ctx.delta + 0.5 * kPi;
  if (sq.kind == SegKind::Restricted) {
    const double hw = 0.5 * kPi - sq.tau;
    arcs.for_each_piece(lo, hi, [&](double a, double b, double d) {
      for_each_window(a, b, psi_w_global, hw,
                      [&](double u, double v, double) { integrate_piece(u - ctx.delta, v - ctx.delta, d); });
    });
  } else {
    arcs.for_each_piece(lo, hi, [&](double a, double b, double d) { integrate_piece(a - ctx.delta, b - ctx.delta, d); });
  }
  return total;
}

}  // namespace

double line_segment(const LineMeasure& line, const ArcSet& arcs, std::span<const double> p, std::span<const double> q,
                    const SegQuery& sq) {
  const LineCtx ctx(line);
  check_segment_crossing(ctx, ctx.local(p[0], p[1]), ctx.local(q[0], q[1]));
  const std::array<double, 2> v[2] = {{p[0], p[1]}, {q[0], q[1]}};
  return line_hull(line, arcs, v, sq, std::atan2(p[1] - q[1], p[0] - q[0]));
}

double line_box(const LineMeasure& line, const ArcSet& arcs, const Box& box) {
  const std::array<double, 2> v[4] = {
      {box.lo[0], box.lo[1]}, {box.hi[0], box.lo[1]}, {box.hi[0], box.hi[1]}, {box.lo[0], box.hi[1]}};
  return line_hull(line, arcs, v, SegQuery{}, 0.0);
}

std::array<double, 2> line_embed(const LineMeasure& line, const ArcSet& arcs, std::span<const double> o,
                                 std::span<const double> x) {
  const LineCtx ctx(line);
  const LinePoint po = ctx.local(o[0], o[1]), px = ctx.local(x[0], x[1]);
  check_vertex(line.measure, po);
  check_vertex(line.measure, px);
  check_segment_crossing(ctx, po, px);
  const LinePoint pts[2] = {po, px};
  const double cd = std::cos(ctx.delta), sd = std::sin(ctx.delta);
  std::array<double, 2> out{0.0, 0.0};
  auto piece = [&](double s0, double s1, double dens) {
    const auto bp = breakpoints(line.measure, pts, s0, s1, {});
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const double a = bp[i], b = bp[i + 1];
      if (!(b > a)) continue;
      const double tm = std::tan(0.5 * (a + b));
      double Ax, rx, Ao, ro;
      affine_at(line.measure, px.z1 + px.z2 * tm, Ax, rx);
      affine_at(line.measure, po.z1 + po.z2 * tm, Ao, ro);
      const double K0 = (Ax + rx * px.z1) - (Ao + ro * po.z1);
      const double K1 = rx * px.z2 - ro * po.z2;
      const bool need_tan = K1 != 0.0;
      const Basis B = basis(a, b, need_tan);
      // v = R_delta (cos psi, sin psi)
      const double ic = K0 * B.cos + (need_tan ? K1 * B.sin : 0.0);
      const double is = K0 * B.sin + (need_tan ? K1 * B.sin_tan : 0.0);
      out[0] += dens * (cd * ic - sd * is);
      out[1] += dens * (sd * ic + cd * is);
    }
  };
  arcs.for_each_piece(ctx.delta - 0.5 * kPi, ctx.delta + 0.5 * kPi,
                      [&](double a, double b, double d) { piece(a - ctx.delta, b - ctx.delta, d); });
  return out;
}

}  // namespace busemann::detail
