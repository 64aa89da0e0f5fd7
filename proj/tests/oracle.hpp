// Independent reference computations for the tests. Nothing here calls the
// library's evaluators; hyperplanes are enumerated or sampled directly.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

using V = std::vector<double>;

struct Atom {
  V at;
  double w;
};

inline double dot(const V& a, const V& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline V sub(const V& a, const V& b) {
  V r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline double norm(const V& a) { return std::sqrt(dot(a, a)); }

inline double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

/// Per-hyperplane integrands for H = {z : <z - a, v> = 0}.
struct Integrands {
  double seg = 0.0;         // [H separates x, y]
  double trans = 0.0;       // [H separates x, y] |<u, v>|
  double restricted = 0.0;  // [H separates x, y] [alpha >= tau]
  V f;                      // [H separates o, x] * normal pointing away from o
};

inline void accumulate(Integrands& acc, const V& a, const V& v, double weight, const V& x, const V& y, const V& o,
                       double tau = 0.0) {
  const double sx = dot(sub(x, a), v), sy = dot(sub(y, a), v), so = dot(sub(o, a), v);
  if (sx * sy < 0) {
    acc.seg += weight;
    const V d = sub(y, x);
    const double sin_alpha = std::abs(dot(d, v)) / norm(d);
    acc.trans += weight * sin_alpha;
    if (std::asin(std::min(1.0, sin_alpha)) >= tau) acc.restricted += weight;
  }
  if (so * sx < 0) {
    for (std::size_t i = 0; i < v.size(); ++i) acc.f[i] += weight * (-sgn(so)) * v[i];
  }
}

/// Planar midpoint rule over normal angles phi in [0, pi) with direction
/// density `dens(phi)` (mass per radian), summed over the atoms.
inline Integrands planar(const std::vector<Atom>& atoms, const std::function<double(double)>& dens, const V& x,
                         const V& y, const V& o, double tau = 0.0, int steps = 200000) {
  Integrands acc;
  acc.f.assign(2, 0.0);
  const double h = kPi / steps;
  for (int k = 0; k < steps; ++k) {
    const double phi = (k + 0.5) * h;
    const double w = dens(phi) * h;
    if (w == 0.0) continue;
    const V v{std::cos(phi), std::sin(phi)};
    for (const auto& a : atoms) accumulate(acc, a.at, v, w * a.w, x, y, o, tau);
  }
  return acc;
}

/// Planar mass of the hyperplanes meeting the box [lo, hi].
inline double planar_box(const std::vector<Atom>& atoms, const std::function<double(double)>& dens, const V& lo,
                         const V& hi, int steps = 200000) {
  const V corners[4] = {{lo[0], lo[1]}, {hi[0], lo[1]}, {lo[0], hi[1]}, {hi[0], hi[1]}};
  double m = 0.0;
  const double h = kPi / steps;
  for (int k = 0; k < steps; ++k) {
    const double phi = (k + 0.5) * h;
    const double w = dens(phi) * h;
    if (w == 0.0) continue;
    const V v{std::cos(phi), std::sin(phi)};
    for (const auto& a : atoms) {
      double mn = 1e300, mx = -1e300;
      for (const auto& c : corners) {
        const double g = dot(sub(c, a.at), v);
        mn = std::min(mn, g), mx = std::max(mx, g);
      }
      if (mn < 0 && mx > 0) m += w * a.w;
    }
  }
  return m;
}

/// Monte Carlo over uniform unit normals (probability measure) for atoms in R^n.
struct McOut {
  double seg, seg_se, trans, trans_se;
  V f, f_se;
};

inline McOut uniform_mc(const std::vector<Atom>& atoms, const V& x, const V& y, const V& o, std::size_t samples,
                        std::uint64_t seed) {
  const std::size_t n = x.size();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  double total = 0.0;
  std::vector<double> weights;
  for (const auto& a : atoms) total += a.w, weights.push_back(a.w);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  double s1 = 0, s2 = 0, t1 = 0, t2 = 0;
  V f1(n, 0.0), f2(n, 0.0);
  for (std::size_t k = 0; k < samples; ++k) {
    V v(n);
    for (auto& c : v) c = g(gen);
    const double r = norm(v);
    for (auto& c : v) c /= r;
    Integrands acc;
    acc.f.assign(n, 0.0);
    accumulate(acc, atoms[pick(gen)].at, v, total, x, y, o);
    s1 += acc.seg, s2 += acc.seg * acc.seg;
    t1 += acc.trans, t2 += acc.trans * acc.trans;
    for (std::size_t i = 0; i < n; ++i) f1[i] += acc.f[i], f2[i] += acc.f[i] * acc.f[i];
  }
  const double m = static_cast<double>(samples);
  auto se = [&](double a, double b) { return std::sqrt(std::max(0.0, b / m - (a / m) * (a / m)) / m); };
  McOut out{s1 / m, se(s1, s2), t1 / m, se(t1, t2), V(n), V(n)};
  for (std::size_t i = 0; i < n; ++i) out.f[i] = f1[i] / m, out.f_se[i] = se(f1[i], f2[i]);
  return out;
}

/// E|v_1| for v uniform on S^{n-1}, by direct sampling.
inline double mean_abs_coordinate_mc(std::size_t n, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  double s = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    V v(n);
    for (auto& c : v) c = g(gen);
    s += std::abs(v[0]) / norm(v);
  }
  return s / static_cast<double>(samples);
}

}  // namespace oracle
