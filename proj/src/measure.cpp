#include "busemann/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadrature.hpp"
#include "sampling.hpp"

namespace busemann {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

// ---------------------------------------------------------------------------
// BaseMeasure1D

BaseMeasure1D::BaseMeasure1D(std::vector<Atom1D> atoms, std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.position) || !(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw InvalidArgument("1-D atom needs a finite position and a positive finite weight");
    }
  }
  for (const auto& p : pieces_) {
    if (!(p.lo < p.hi) || std::isnan(p.lo) || std::isnan(p.hi)) throw InvalidArgument("density piece needs lo < hi");
    if (!(p.density >= 0.0) || !std::isfinite(p.density)) throw InvalidArgument("density must be finite and >= 0");
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom1D& a, const Atom1D& b) { return a.position < b.position; });
  std::sort(pieces_.begin(), pieces_.end(), [](const DensityPiece& a, const DensityPiece& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    if (pieces_[i].lo < pieces_[i - 1].hi) throw InvalidArgument("density pieces overlap");
  }
  build_index();
}

BaseMeasure1D BaseMeasure1D::lebesgue(double density, double lo, double hi) {
  return BaseMeasure1D({}, {{lo, hi, density}});
}

std::optional<double> BaseMeasure1D::constant_density() const {
  if (atoms_.empty() && pieces_.size() == 1 && pieces_[0].lo == -kInf && pieces_[0].hi == kInf) {
    return pieces_[0].density;
  }
  return std::nullopt;
}

void BaseMeasure1D::build_index() {
  knots_.clear();
  for (const auto& p : pieces_) {
    if (std::isfinite(p.lo)) knots_.push_back(p.lo);
    if (std::isfinite(p.hi)) knots_.push_back(p.hi);
  }
  for (const auto& a : atoms_) knots_.push_back(a.position);
  std::sort(knots_.begin(), knots_.end());
  knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());

  density_below_ = (!pieces_.empty() && pieces_.front().lo == -kInf) ? pieces_.front().density : 0.0;
  density_above_ = (!pieces_.empty() && pieces_.back().hi == kInf) ? pieces_.back().density : 0.0;
  if (knots_.empty()) {
    // Only possible for a single full-line piece or the zero measure.
    density_below_ = density_above_ = pieces_.empty() ? 0.0 : pieces_.front().density;
    return;
  }

  const std::size_t k = knots_.size();
  gap_density_.assign(k > 0 ? k - 1 : 0, 0.0);
  std::size_t pi = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double mid = 0.5 * (knots_[i] + knots_[i + 1]);
    while (pi < pieces_.size() && pieces_[pi].hi <= mid) ++pi;
    if (pi < pieces_.size() && pieces_[pi].lo <= mid) gap_density_[i] = pieces_[pi].density;
  }

  // Sweep relative to the first knot, then shift so that cumulative(0) == 0.
  knot_cum_.assign(k, 0.0);
  std::size_t ai = 0;
  double first_atoms = 0.0;
  while (ai < atoms_.size() && atoms_[ai].position == knots_[0]) first_atoms += atoms_[ai++].weight;
  knot_cum_[0] = first_atoms;
  for (std::size_t i = 1; i < k; ++i) {
    double c = knot_cum_[i - 1] + gap_density_[i - 1] * (knots_[i] - knots_[i - 1]);
    while (ai < atoms_.size() && atoms_[ai].position == knots_[i]) c += atoms_[ai++].weight;
    knot_cum_[i] = c;
  }
  const double zero = cumulative(0.0);
  for (double& c : knot_cum_) c -= zero;
}

double BaseMeasure1D::cumulative(double t) const {
  if (knots_.empty()) return density_below_ * t;
  if (t < knots_.front()) {
    // Right-continuous: value just below the first knot excludes its atoms.
    const double at_first_left = knot_cum_.front() - [&] {
      double w = 0.0;
      for (const auto& a : atoms_) {
        if (a.position == knots_.front()) w += a.weight;
      }
      return w;
    }();
    return at_first_left - density_below_ * (knots_.front() - t);
  }
  if (t >= knots_.back()) return knot_cum_.back() + density_above_ * (t - knots_.back());
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return knot_cum_[i] + gap_density_[i] * (t - knots_[i]);
}

double BaseMeasure1D::density_at(double t) const {
  for (const auto& p : pieces_) {
    if (p.lo <= t && t < p.hi) return p.density;
  }
  return 0.0;
}

double BaseMeasure1D::slope(double t) const {
  if (knots_.empty()) return density_below_;
  if (t < knots_.front()) return density_below_;
  if (t >= knots_.back()) return density_above_;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  return gap_density_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double BaseMeasure1D::mass(double s, double t) const {
  if (!(s <= t)) throw InvalidArgument("interval mass requires s <= t");
  if (s == t) return 0.0;
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (a.position > s && a.position <= t) m += a.weight;
  }
  for (const auto& p : pieces_) {
    const double lo = std::max(p.lo, s);
    const double hi = std::min(p.hi, t);
    if (hi > lo && p.density > 0.0) m += p.density * (hi - lo);
  }
  return m;
}

double cdf(const BaseMeasure1D& m, double s, double t) { return m.mass(s, t); }

double BaseMeasure1D::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight;
  for (const auto& p : pieces_) {
    if (p.density > 0.0) m += p.density * (p.hi - p.lo);
  }
  return m;
}

bool BaseMeasure1D::is_full_line_constant() const {
  return atoms_.empty() && pieces_.size() == 1 && pieces_[0].lo == -kInf && pieces_[0].hi == kInf;
}

double BaseMeasure1D::sample(Rng& rng) const {
  const double total = total_mass();
  if (!std::isfinite(total) || !(total > 0.0)) throw InvalidArgument("cannot sample a measure with infinite or zero mass");
  double u = rng.uniform() * total;
  for (const auto& a : atoms_) {
    if (u < a.weight) return a.position;
    u -= a.weight;
  }
  for (const auto& p : pieces_) {
    const double m = p.density * (p.hi - p.lo);
    if (u < m) return p.lo + u / p.density;
    u -= m;
  }
  // Rounding fallthrough: the last positive component.
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    if (it->density > 0.0) return it->hi;
  }
  return atoms_.back().position;
}

BaseMeasure1D BaseMeasure1D::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  auto atoms = atoms_;
  auto pieces = pieces_;
  for (auto& a : atoms) a.weight *= factor;
  for (auto& p : pieces) p.density *= factor;
  return BaseMeasure1D(std::move(atoms), std::move(pieces));
}

// ---------------------------------------------------------------------------
// BaseMeasureND

namespace {

std::shared_ptr<const ResolvedAtoms> resolve(std::size_t n, const std::vector<AtomND>& atoms,
                                             const std::vector<DensityCell>& cells, int order) {
  auto r = std::make_shared<ResolvedAtoms>();
  r->dim = n;
  auto push = [&](std::span<const double> x, double w) {
    if (!(w > 0.0)) return;
    r->coords.insert(r->coords.end(), x.begin(), x.end());
    r->weights.push_back(w);
  };
  for (const auto& a : atoms) push(a.position.coords(), a.weight);
  if (!cells.empty()) {
    const auto rule = detail::gauss_legendre(order);
    std::size_t nodes = 1;
    for (std::size_t i = 0; i < n; ++i) nodes *= static_cast<std::size_t>(order);
    std::vector<double> x(n);
    for (const auto& c : cells) {
      double vol = 1.0;
      for (std::size_t i = 0; i < n; ++i) vol *= c.box.hi[i] - c.box.lo[i];
      for (std::size_t idx = 0; idx < nodes; ++idx) {
        std::size_t rem = idx;
        double w = c.density * vol;
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t k = rem % order;
          rem /= order;
          const double lo = c.box.lo[i], hi = c.box.hi[i];
          x[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[k];
          w *= 0.5 * rule.weights[k];
        }
        push(x, w);
      }
    }
  }
  r->cumulative.resize(r->weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < r->weights.size(); ++i) {
    acc += r->weights[i];
    r->cumulative[i] = acc;
  }
  r->total = acc;
  return r;
}

/// Area of the disc B(c, r) intersected with the rectangle.
double disc_rect_area(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
  const double a = std::max(x0, cx - r);
  const double b = std::min(x1, cx + r);
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a, b};
  for (double yb : {y0, y1}) {
    const double d = std::abs(yb - cy);
    if (d < r) {
      const double w = std::sqrt(r * r - d * d);
      for (double xc : {cx - w, cx + w}) {
        if (xc > a && xc < b) cuts.push_back(xc);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto half = [&](double x) { return std::sqrt(std::max(0.0, r * r - (x - cx) * (x - cx))); };
  // Antiderivative of half(x).
  auto H = [&](double x) {
    const double u = std::clamp((x - cx) / r, -1.0, 1.0);
    return 0.5 * r * r * (u * std::sqrt(std::max(0.0, 1.0 - u * u)) + std::asin(u));
  };
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double m = 0.5 * (lo + hi);
    const double hm = half(m);
    const bool top_is_box = y1 <= cy + hm;
    const bool bottom_is_box = y0 >= cy - hm;
    const double top = top_is_box ? y1 : cy + hm;
    const double bottom = bottom_is_box ? y0 : cy - hm;
    if (!(top > bottom)) continue;
    double constant = (top_is_box ? y1 : cy) - (bottom_is_box ? y0 : cy);
    double h_coef = (top_is_box ? 0.0 : 1.0) + (bottom_is_box ? 0.0 : 1.0);
    area += constant * (hi - lo) + h_coef * (H(hi) - H(lo));
  }
  return area;
}

double ball_box_volume(std::span<const double> c, double r, std::span<const double> lo, std::span<const double> hi) {
  const std::size_t n = c.size();
  if (n == 1) return std::max(0.0, std::min(hi[0], c[0] + r) - std::max(lo[0], c[0] - r));
  if (n == 2) return disc_rect_area(c[0], c[1], r, lo[0], hi[0], lo[1], hi[1]);
  const double a = std::max(lo[n - 1], c[n - 1] - r);
  const double b = std::min(hi[n - 1], c[n - 1] + r);
  if (!(b > a)) return 0.0;
  return detail::integrate(
      [&](double z) {
        const double rr = std::sqrt(std::max(0.0, r * r - (z - c[n - 1]) * (z - c[n - 1])));
        return ball_box_volume(c.first(n - 1), rr, lo.first(n - 1), hi.first(n - 1));
      },
      a, b, 8, 16);
}

}  // namespace

BaseMeasureND::BaseMeasureND(std::size_t dim, std::vector<AtomND> atoms, std::vector<DensityCell> cells,
                             std::vector<LineMeasure> lines, int quadrature_order)
    : dim_(dim),
      atoms_(std::move(atoms)),
      cells_(std::move(cells)),
      lines_(std::move(lines)),
      quadrature_order_(quadrature_order) {
  if (dim_ < 2) throw InvalidArgument("dimension must be at least 2");
  if (quadrature_order_ < 1 || quadrature_order_ > 32) throw InvalidArgument("quadrature order must be in [1, 32]");
  for (const auto& a : atoms_) {
    if (a.position.dim() != dim_) throw InvalidArgument("atom dimension mismatch");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw InvalidArgument("atom weight must be positive and finite");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& c = cells_[i];
    if (c.box.dim() != dim_) throw InvalidArgument("cell dimension mismatch");
    if (!(c.density >= 0.0) || !std::isfinite(c.density)) throw InvalidArgument("cell density must be finite and >= 0");
    for (std::size_t j = 0; j < i; ++j) {
      bool overlap = true;
      for (std::size_t k = 0; k < dim_; ++k) {
        if (cells_[j].box.hi[k] <= c.box.lo[k] || c.box.hi[k] <= cells_[j].box.lo[k]) {
          overlap = false;
          break;
        }
      }
      if (overlap && cells_.size() < 4096) throw InvalidArgument("density cells overlap");
      if (cells_.size() >= 4096) break;  // large generated grids are disjoint by construction
    }
  }
  if (!lines_.empty() && dim_ != 2) throw InvalidArgument("line-supported measures are available for n = 2 only");
  for (auto& l : lines_) {
    if (l.anchor.dim() != 2 || l.direction.dim() != 2) throw InvalidArgument("line measure must live in the plane");
    l.direction = normalized(l.direction);
  }
  resolved_ = resolve(dim_, atoms_, cells_, quadrature_order_);
}

BaseMeasureND lebesgue_box(const Box& box, int cells_per_axis, double density, int quadrature_order) {
  if (cells_per_axis < 1) throw InvalidArgument("cells_per_axis must be positive");
  const std::size_t n = box.dim();
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= static_cast<std::size_t>(cells_per_axis);
  std::vector<DensityCell> cells;
  cells.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::vector<double> lo(n), hi(n);
    std::size_t rem = idx;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rem % cells_per_axis;
      rem /= cells_per_axis;
      const double h = (box.hi[i] - box.lo[i]) / cells_per_axis;
      lo[i] = box.lo[i] + h * static_cast<double>(k);
      hi[i] = k + 1 == static_cast<std::size_t>(cells_per_axis) ? box.hi[i] : lo[i] + h;
    }
    cells.push_back({Box(Point(lo), Point(hi)), density});
  }
  return BaseMeasureND(n, {}, std::move(cells), {}, quadrature_order);
}

double BaseMeasureND::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight;
  for (const auto& c : cells_) {
    double vol = 1.0;
    for (std::size_t i = 0; i < dim_; ++i) vol *= c.box.hi[i] - c.box.lo[i];
    m += c.density * vol;
  }
  for (const auto& l : lines_) m += l.measure.total_mass();
  return m;
}

double BaseMeasureND::ball_mass(const Point& x, double r) const {
  if (x.dim() != dim_) throw InvalidArgument("ball center dimension mismatch");
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (distance(a.position, x) < r) m += a.weight;
  }
  for (const auto& c : cells_) {
    if (c.density > 0.0) m += c.density * ball_box_volume(x.coords(), r, c.box.lo.coords(), c.box.hi.coords());
  }
  for (const auto& l : lines_) {
    const Vec rel = x - l.anchor;
    const double t0 = dot(rel, l.direction);
    const double d2 = dot(rel, rel) - t0 * t0;
    const double h2 = r * r - d2;
    if (h2 > 0.0) {
      const double h = std::sqrt(h2);
      m += l.measure.mass(t0 - h, t0 + h);
    }
  }
  return m;
}

int BaseMeasureND::affine_rank() const {
  std::vector<Vec> pts;
  for (const auto& a : atoms_) pts.push_back(a.position);
  for (const auto& c : cells_) {
    if (c.density > 0.0) {
      for (auto& v : c.box.vertices()) pts.push_back(std::move(v));
    }
  }
  for (const auto& l : lines_) {
    if (l.measure.total_mass() > 0.0) {
      pts.push_back(l.anchor);
      pts.push_back(l.anchor + l.direction);
    }
  }
  if (pts.empty()) return -1;
  std::vector<Vec> basis;
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, norm(p - pts[0]));
  const double tol = 1e-9 * std::max(scale, 1.0);
  for (std::size_t i = 1; i < pts.size() && basis.size() < dim_; ++i) {
    Vec v = pts[i] - pts[0];
    for (const auto& b : basis) v -= b * dot(v, b);
    const double l = norm(v);
    if (l > tol) basis.push_back(v * (1.0 / l));
  }
  return static_cast<int>(basis.size());
}

BaseMeasureND BaseMeasureND::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  auto atoms = atoms_;
  auto cells = cells_;
  auto lines = lines_;
  for (auto& a : atoms) a.weight *= factor;
  for (auto& c : cells) c.density *= factor;
  for (auto& l : lines) l.measure = l.measure.scaled(factor);
  return BaseMeasureND(dim_, std::move(atoms), std::move(cells), std::move(lines), quadrature_order_);
}

BaseMeasureND BaseMeasureND::translated(const Vec& shift) const {
  if (shift.dim() != dim_) throw InvalidArgument("shift dimension mismatch");
  auto atoms = atoms_;
  auto cells = cells_;
  auto lines = lines_;
  for (auto& a : atoms) a.position += shift;
  for (auto& c : cells) c.box = Box(c.box.lo + shift, c.box.hi + shift);
  for (auto& l : lines) l.anchor += shift;
  return BaseMeasureND(dim_, std::move(atoms), std::move(cells), std::move(lines), quadrature_order_);
}

DoublingResult doubling_ratio(const BaseMeasureND& m, const Box& window, std::size_t samples, double r_min,
                              double r_max, std::uint64_t seed) {
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw InvalidArgument("doubling radii must satisfy 0 < r_min <= r_max");
  Rng rng(seed);
  DoublingResult out;
  out.ratio = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point x = detail::uniform_in_box(rng, window);
    const double r = std::exp(rng.uniform(std::log(r_min), std::log(r_max)));
    const double inner = m.ball_mass(x, r);
    const double outer = m.ball_mass(x, 2 * r);
    if (inner == 0.0 && outer == 0.0) {
      ++out.skipped;
      continue;
    }
    ++out.used;
    const double ratio = inner == 0.0 ? kInf : outer / inner;
    if (ratio > out.ratio) {
      out.ratio = ratio;
      out.witness_center = x;
      out.witness_radius = r;
    }
  }
  if (out.used == 0) throw InvalidArgument("every doubling sample was degenerate (zero mass)");
  return out;
}

namespace {

double cell_inverse_norm(std::span<const double> lo, std::span<const double> hi, int depth) {
  const std::size_t n = lo.size();
  static const auto rule = detail::gauss_legendre(6);
  auto gl = [&](std::span<const double> l, std::span<const double> h) {
    std::size_t nodes = 1;
    for (std::size_t i = 0; i < n; ++i) nodes *= 6;
    double vol = 1.0;
    for (std::size_t i = 0; i < n; ++i) vol *= h[i] - l[i];
    double s = 0.0;
    for (std::size_t idx = 0; idx < nodes; ++idx) {
      std::size_t rem = idx;
      double w = 1.0, r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = rem % 6;
        rem /= 6;
        const double x = 0.5 * (l[i] + h[i]) + 0.5 * (h[i] - l[i]) * rule.nodes[k];
        r2 += x * x;
        w *= 0.5 * rule.weights[k];
      }
      s += w / std::sqrt(r2);
    }
    return s * vol;
  };
  const double whole = gl(lo, hi);
  std::vector<double> mid(n);
  for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
  double split = 0.0;
  std::vector<double> cl(n), ch(n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool up = (mask >> i) & 1U;
      cl[i] = up ? mid[i] : lo[i];
      ch[i] = up ? hi[i] : mid[i];
    }
    split += gl(cl, ch);
  }
  if (depth >= 14 || std::abs(split - whole) <= 1e-12 * std::abs(split)) return split;
  double refined = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool up = (mask >> i) & 1U;
      cl[i] = up ? mid[i] : lo[i];
      ch[i] = up ? hi[i] : mid[i];
    }
    refined += cell_inverse_norm(std::vector<double>(cl), std::vector<double>(ch), depth + 1);
  }
  return refined;
}

}  // namespace

double tail1_check(const BaseMeasureND& m) {
  double total = 0.0;
  for (const auto& a : m.atoms()) {
    const double r = norm(a.position);
    if (r == 0.0) throw DegenerateConfiguration("atom at the origin: |x|^-1 is undefined there");
    total += a.weight / r;
  }
  for (const auto& c : m.cells()) {
    if (c.density > 0.0) total += c.density * cell_inverse_norm(c.box.lo.coords(), c.box.hi.coords(), 0);
  }
  for (const auto& l : m.lines()) {
    // |anchor + t d|^2 = (t - t0)^2 + h^2
    const double t0 = -dot(l.anchor, l.direction);
    const double h = std::sqrt(std::max(0.0, dot(l.anchor, l.anchor) - t0 * t0));
    for (const auto& a : l.measure.atoms()) {
      const double r = std::hypot(a.position - t0, h);
      if (r == 0.0) throw DegenerateConfiguration("line atom at the origin");
      total += a.weight / r;
    }
    for (const auto& p : l.measure.pieces()) {
      if (p.density == 0.0) continue;
      if (!std::isfinite(p.lo) || !std::isfinite(p.hi)) return kInf;
      if (h == 0.0) {
        if (p.lo <= t0 && t0 <= p.hi) return kInf;
        total += p.density * std::abs(std::log(std::abs(p.hi - t0)) - std::log(std::abs(p.lo - t0)));
      } else {
        total += p.density * (std::asinh((p.hi - t0) / h) - std::asinh((p.lo - t0) / h));
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// ArcSet

ArcSet::ArcSet(const std::vector<Arc>& intervals) {
  struct Raw {
    double lo, hi, d;
  };
  std::vector<Raw> raw;
  for (const auto& iv : intervals) {
    if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) throw InvalidArgument("arc needs lo < hi");
    if (!(iv.density >= 0.0) || !std::isfinite(iv.density)) throw InvalidArgument("arc density must be finite and >= 0");
    if (iv.density == 0.0) continue;
    if (iv.hi - iv.lo >= kPi * (1 - 1e-15)) {
      if (iv.hi - iv.lo > kPi * (1 + 1e-12)) throw InvalidArgument("arc longer than pi");
      raw.push_back({0.0, kPi, iv.density});
      continue;
    }
    const double k = std::floor(iv.lo / kPi);
    const double lo = iv.lo - k * kPi;
    const double hi = iv.hi - k * kPi;
    if (hi <= kPi) {
      raw.push_back({lo, hi, iv.density});
    } else {
      raw.push_back({lo, kPi, iv.density});
      raw.push_back({0.0, hi - kPi, iv.density});
    }
  }
  std::vector<double> cuts{0.0, kPi};
  for (const auto& r : raw) {
    cuts.push_back(r.lo);
    cuts.push_back(r.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double m = 0.5 * (a + b);
    double d = 0.0;
    for (const auto& r : raw) {
      if (r.lo <= m && m < r.hi) d += r.d;
    }
    if (d == 0.0) continue;
    if (!arcs_.empty() && arcs_.back().hi == a && arcs_.back().density == d) {
      arcs_.back().hi = b;
    } else {
      arcs_.push_back({a, b, d});
    }
  }
}

double ArcSet::mass() const {
  double m = 0.0;
  for (const auto& a : arcs_) m += a.density * (a.hi - a.lo);
  return m;
}

double ArcSet::density_at(double phi) const {
  const double w = wrap_pi(phi);
  for (const auto& a : arcs_) {
    if (a.lo <= w && w < a.hi) return a.density;
  }
  return 0.0;
}

std::vector<ArcSet::Piece> ArcSet::pieces_in(double a, double b) const {
  std::vector<Piece> out;
  if (!(b > a)) return out;
  const long k0 = static_cast<long>(std::floor(a / kPi)) - 1;
  const long k1 = static_cast<long>(std::floor(b / kPi)) + 1;
  for (long k = k0; k <= k1; ++k) {
    const double shift = static_cast<double>(k) * kPi;
    for (const auto& arc : arcs_) {
      const double lo = std::max(a, arc.lo + shift);
      const double hi = std::min(b, arc.hi + shift);
      if (hi > lo) out.push_back({lo, hi, arc.density});
    }
  }
  std::sort(out.begin(), out.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  return out;
}

ArcSet ArcSet::restricted(double center, double half_width) const {
  if (half_width >= kPi / 2) return *this;
  if (!(half_width > 0.0)) return ArcSet();
  std::vector<Arc> out;
  for (const auto& p : pieces_in(center - half_width, center + half_width)) out.push_back({p.a, p.b, p.density});
  return ArcSet(out);
}

ArcSet ArcSet::scaled(double factor) const {
  ArcSet s = *this;
  for (auto& a : s.arcs_) a.density *= factor;
  return s;
}

double ArcSet::sample(Rng& rng) const {
  const double total = mass();
  if (!(total > 0.0)) throw InvalidArgument("cannot sample an empty arc set");
  double u = rng.uniform() * total;
  for (const auto& a : arcs_) {
    const double m = a.density * (a.hi - a.lo);
    if (u < m) return a.lo + u / a.density;
    u -= m;
  }
  return arcs_.back().hi;
}

// ---------------------------------------------------------------------------
// DirectionMeasure

DirectionMeasure::DirectionMeasure(Variant v) : v_(std::move(v)) {
  if (auto* cap = std::get_if<SymmetricCap>(&v_)) {
    cap->axis = normalized(cap->axis);
    if (!(cap->half_angle > 0.0) || cap->half_angle > kPi / 2 + 1e-15) {
      throw InvalidArgument("cap half-angle must lie in (0, pi/2]");
    }
    if (!(cap->mass > 0.0)) throw InvalidArgument("cap mass must be positive");
  }
  if (auto* arcs = std::get_if<ArcDensity2D>(&v_)) {
    if (!(arcs->arcs.mass() > 0.0)) throw InvalidArgument("arc density has zero mass");
  }
}

DirectionMeasure DirectionMeasure::cap(Vec axis, double half_angle, double mass) {
  return DirectionMeasure(SymmetricCap{std::move(axis), half_angle, mass});
}

void DirectionMeasure::check_dim(std::size_t n) const {
  if (std::holds_alternative<ArcDensity2D>(v_) && n != 2) throw InvalidArgument("arc densities require n = 2");
  if (const auto* cap = std::get_if<SymmetricCap>(&v_); cap && cap->axis.dim() != n) {
    throw InvalidArgument("cap axis dimension mismatch");
  }
}

double DirectionMeasure::total_mass(std::size_t n) const {
  check_dim(n);
  if (is_uniform()) return 1.0;
  if (const auto* cap = std::get_if<SymmetricCap>(&v_)) return cap->mass;
  return std::get<ArcDensity2D>(v_).arcs.mass();
}

ArcSet DirectionMeasure::to_arcs() const {
  check_dim(2);
  if (is_uniform()) return ArcSet({{0.0, kPi, 1.0 / kPi}});
  if (const auto* cap = std::get_if<SymmetricCap>(&v_)) {
    const double beta = std::atan2(cap->axis[1], cap->axis[0]);
    if (cap->half_angle >= kPi / 2) return ArcSet({{0.0, kPi, cap->mass / kPi}});
    return ArcSet({{beta - cap->half_angle, beta + cap->half_angle, cap->mass / (2 * cap->half_angle)}});
  }
  return std::get<ArcDensity2D>(v_).arcs;
}

namespace {

Vec uniform_sphere(Rng& rng, std::size_t n) {
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

}  // namespace

Vec DirectionMeasure::sample(Rng& rng, std::size_t n) const {
  check_dim(n);
  if (n == 2) {
    const double phi = to_arcs().sample(rng);
    return Vec{std::cos(phi), std::sin(phi)};
  }
  if (is_uniform()) return uniform_sphere(rng, n);
  const auto& cap = std::get<SymmetricCap>(v_);
  const double cmin = std::cos(cap.half_angle);
  if (n == 3) {
    // Area measure on a 2-sphere cap: the axial coordinate is uniform.
    const double z = rng.uniform(cmin, 1.0);
    const double az = rng.uniform(0.0, 2 * kPi);
    const double rho = std::sqrt(std::max(0.0, 1 - z * z));
    const Vec& w = cap.axis;
    const Vec helper = std::abs(w[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
    const Vec e1 = normalized(helper - w * dot(helper, w));
    const Vec e2{w[1] * e1[2] - w[2] * e1[1], w[2] * e1[0] - w[0] * e1[2], w[0] * e1[1] - w[1] * e1[0]};
    Vec v = w * z + e1 * (rho * std::cos(az)) + e2 * (rho * std::sin(az));
    return rng.uniform() < 0.5 ? v : -v;
  }
  for (;;) {
    Vec v = uniform_sphere(rng, n);
    if (std::abs(dot(v, cap.axis)) >= cmin) return v;
  }
}

// ---------------------------------------------------------------------------
// HyperplaneMeasure

HyperplaneMeasure::HyperplaneMeasure(Variant v) : v_(std::move(v)) {
  if (const auto* pd = position_direction()) pd->omega.check_dim(pd->mu.dim());
  if (const auto* od = offset_direction()) {
    if (od->dim < 2) throw InvalidArgument("dimension must be at least 2");
    od->omega.check_dim(od->dim);
  }
  if (const auto* s = sampled()) {
    if (!s->draw) throw InvalidArgument("sampled measure needs a generator");
    if (s->bounds.dim() != s->dim) throw InvalidArgument("sampled measure needs a declared bounding region");
  }
}

std::size_t HyperplaneMeasure::dim() const {
  if (const auto* pd = position_direction()) return pd->mu.dim();
  if (const auto* od = offset_direction()) return od->dim;
  return sampled()->dim;
}

HyperplaneMeasure HyperplaneMeasure::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  if (const auto* pd = position_direction()) {
    PositionDirection out = *pd;
    out.mu = pd->mu.scaled(factor);
    return HyperplaneMeasure(std::move(out));
  }
  if (const auto* od = offset_direction()) {
    OffsetDirection out = *od;
    out.offsets = od->offsets.scaled(factor);
    return HyperplaneMeasure(std::move(out));
  }
  SampledMeasure out = *sampled();
  auto draw = out.draw;
  out.draw = [draw, factor](Rng& rng) {
    auto h = draw(rng);
    h.weight *= factor;
    return h;
  };
  return HyperplaneMeasure(std::move(out));
}

HyperplaneMeasure HyperplaneMeasure::translated(const Vec& shift) const {
  if (shift.dim() != dim()) throw InvalidArgument("shift dimension mismatch");
  if (const auto* pd = position_direction()) {
    PositionDirection out = *pd;
    out.mu = pd->mu.translated(shift);
    return HyperplaneMeasure(std::move(out));
  }
  if (const auto* od = offset_direction()) {
    if (!od->offsets.is_full_line_constant()) {
      throw InvalidArgument("only translation-invariant offset measures can be translated");
    }
    return *this;
  }
  SampledMeasure out = *sampled();
  auto draw = out.draw;
  out.draw = [draw, shift](Rng& rng) {
    auto h = draw(rng);
    return WeightedHyperplane{Hyperplane(h.plane.normal(), h.plane.offset() + dot(shift, h.plane.normal())), h.weight};
  };
  out.bounds = Box(out.bounds.lo + shift, out.bounds.hi + shift);
  return HyperplaneMeasure(std::move(out));
}

std::vector<WeightedHyperplane> sample_hyperplanes(const HyperplaneMeasure& nu, std::size_t count,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WeightedHyperplane> out;
  out.reserve(count);
  if (const auto* pd = nu.position_direction()) {
    const double total = pd->mu.total_mass() * pd->omega.total_mass(pd->mu.dim());
    if (!std::isfinite(total)) throw InvalidArgument("cannot sample a measure of infinite mass");
    for (std::size_t i = 0; i < count; ++i) {
      const Point a = detail::sample_position(pd->mu, rng);
      const Vec v = pd->omega.sample(rng, pd->mu.dim());
      out.push_back({Hyperplane::through(a, v), total});
    }
  } else if (const auto* od = nu.offset_direction()) {
    const double total = od->offsets.total_mass() * od->omega.total_mass(od->dim);
    if (!std::isfinite(total)) throw InvalidArgument("cannot sample a measure of infinite mass");
    for (std::size_t i = 0; i < count; ++i) {
      const Vec v = od->omega.sample(rng, od->dim);
      const double p = od->offsets.sample(rng);
      out.push_back({Hyperplane(v, p), total});
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out.push_back(nu.sampled()->draw(rng));
  }
  return out;
}

}  // namespace busemann
