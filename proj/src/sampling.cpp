#include "sampling.hpp"

#include <algorithm>
#include <cmath>

namespace busemann::detail {

Point uniform_in_box(Rng& rng, const Box& box) {
  std::vector<double> c(box.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = rng.uniform(box.lo[i], box.hi[i]);
  return Point(std::move(c));
}

Vec uniform_direction(Rng& rng, std::size_t n) {
  for (;;) {
    std::vector<double> g(n);
    double s = 0.0;
    for (auto& x : g) {
      x = rng.normal();
      s += x * x;
    }
    if (s > 1e-300) {
      const double inv = 1.0 / std::sqrt(s);
      for (auto& x : g) x *= inv;
      return Vec(std::move(g));
    }
  }
}

Point sample_position(const BaseMeasureND& mu, Rng& rng) {
  const auto& atoms = mu.resolved();
  double total = atoms.total;
  for (const auto& l : mu.lines()) total += l.measure.total_mass();
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw InvalidArgument("base measure must have finite positive mass to be sampled");
  }
  double u = rng.uniform() * total;
  if (u < atoms.total && atoms.size() > 0) {
    const auto it = std::upper_bound(atoms.cumulative.begin(), atoms.cumulative.end(), u);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - atoms.cumulative.begin()), atoms.size() - 1);
    return Point(std::vector<double>(atoms.at(i), atoms.at(i) + atoms.dim));
  }
  u -= atoms.total;
  for (const auto& l : mu.lines()) {
    const double m = l.measure.total_mass();
    if (u < m || &l == &mu.lines().back()) return l.anchor + l.direction * l.measure.sample(rng);
    u -= m;
  }
  return Point(std::vector<double>(atoms.at(atoms.size() - 1), atoms.at(atoms.size() - 1) + atoms.dim));
}

Segment sample_segment(Rng& rng, const Box& region, double min_len, double max_len, double scale_u) {
  const double len = std::exp(std::log(min_len) + scale_u * (std::log(max_len) - std::log(min_len)));
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Point mid = uniform_in_box(rng, region);
    const Vec dir = uniform_direction(rng, region.dim());
    const Point a = mid - dir * (0.5 * len);
    const Point b = mid + dir * (0.5 * len);
    if (region.contains(a) && region.contains(b)) return {a, b};
  }
  throw InvalidArgument("segment length does not fit inside the sampling region");
}

}  // namespace busemann::detail
