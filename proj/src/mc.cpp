#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "busemann/evaluators.hpp"
#include "sampling.hpp"

namespace busemann {

namespace {

/// Sample mean and standard error from sums shifted by the first sample.
class Moments {
 public:
  explicit Moments(std::size_t k) : shift_(k, 0.0), s1_(k, 0.0), s2_(k, 0.0) {}

  /// Adds a run of scalar samples given as sums of x - shift(x0), where x0
  /// is the first sample of the run.
  void add_run(double x0, std::uint64_t count, double d1, double d2) {
    if (n_ == 0) shift_[0] = x0;
    const double off = x0 - shift_[0];
    const double c = static_cast<double>(count);
    s1_[0] += d1 + c * off;
    s2_[0] += d2 + 2.0 * off * d1 + c * off * off;
    n_ += count;
  }

  void add(const std::vector<double>& x) {
    if (n_++ == 0) shift_ = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - shift_[i];
      s1_[i] += d;
      s2_[i] += d * d;
    }
  }

  McResult result() const {
    McResult r;
    const double n = static_cast<double>(n_);
    r.samples = n_;
    r.value.resize(s1_.size());
    r.std_error.assign(s1_.size(), 0.0);
    for (std::size_t i = 0; i < s1_.size(); ++i) {
      const double m = s1_[i] / n;
      r.value[i] = shift_[i] + m;
      if (n_ > 1) r.std_error[i] = std::sqrt(std::max(0.0, s2_[i] - n * m * m) / (n - 1) / n);
    }
    return r;
  }

 private:
  std::uint64_t n_ = 0;
  std::vector<double> shift_, s1_, s2_;
};

double dotp(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool straddles(double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); }

/// Query data in a form the per-sample code can use without allocation.
struct Prepared {
  enum Kind { Seg, Trans, Restricted, BoxQ, Embed } kind;
  std::vector<double> x, y;   // segment endpoints, or basepoint (x) and point (y) for Embed
  std::vector<double> u;      // unit direction of x - y
  double len = 0.0;           // |x - y|
  double sin_tau = 0.0;
  std::vector<double> center, half;  // box
  std::size_t out_dim = 1;
};

Prepared prepare(const Query& q, std::size_t n) {
  Prepared p{};
  auto seg = [&](const Point& x, const Point& y) {
    if (x.dim() != n || y.dim() != n) throw InvalidArgument("query dimension does not match the measure");
    p.x = x.data();
    p.y = y.data();
    const double len = distance(x, y);
    p.len = len;
    p.u.assign(n, 0.0);
    if (len > 0.0) {
      for (std::size_t i = 0; i < n; ++i) p.u[i] = (x[i] - y[i]) / len;
    }
  };
  if (const auto* s = std::get_if<SegMassQuery>(&q)) {
    p.kind = Prepared::Seg;
    seg(s->x, s->y);
  } else if (const auto* t = std::get_if<TransversalQuery>(&q)) {
    p.kind = Prepared::Trans;
    seg(t->x, t->y);
  } else if (const auto* r = std::get_if<RestrictedQuery>(&q)) {
    if (!(r->tau >= 0.0 && r->tau <= 0.5 * 3.14159265358979323846)) throw InvalidArgument("tau must lie in [0, pi/2]");
    p.kind = Prepared::Restricted;
    seg(r->x, r->y);
    p.sin_tau = std::sin(r->tau);
  } else if (const auto* b = std::get_if<BoxMassQuery>(&q)) {
    if (b->box.dim() != n) throw InvalidArgument("query dimension does not match the measure");
    p.kind = Prepared::BoxQ;
    p.center.resize(n);
    p.half.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.center[i] = 0.5 * (b->box.lo[i] + b->box.hi[i]);
      p.half[i] = 0.5 * (b->box.hi[i] - b->box.lo[i]);
    }
  } else {
    const auto& e = std::get<EmbedQuery>(q);
    p.kind = Prepared::Embed;
    seg(e.basepoint, e.x);
    p.out_dim = n;
  }
  return p;
}

/// Scalar contribution of the hyperplane {<z, v> = off} with weight w.
double plane_scalar(const Prepared& q, std::span<const double> v, double off, double w) {
  if (q.kind == Prepared::BoxQ) {
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r += std::abs(v[i]) * q.half[i];
    return std::abs(dotp(q.center, v) - off) <= r ? w : 0.0;
  }
  if (!straddles(dotp(q.x, v) - off, dotp(q.y, v) - off)) return 0.0;
  if (q.kind == Prepared::Trans) return w * std::abs(dotp(q.u, v));
  if (q.kind == Prepared::Restricted) return std::abs(dotp(q.u, v)) >= q.sin_tau ? w : 0.0;
  return w;
}

/// Scalar offset-direction contribution for normal v.
double offset_scalar(const Prepared& q, const BaseMeasure1D& offs, const double* flat, std::span<const double> v,
                     double w) {
  if (flat && q.kind != Prepared::BoxQ) {
    const double c = std::abs(dotp(q.u, v));
    const double m = *flat * q.len * c;
    if (q.kind == Prepared::Trans) return w * m * c;
    if (q.kind == Prepared::Restricted) return c >= q.sin_tau ? w * m : 0.0;
    return w * m;
  }
  if (q.kind == Prepared::BoxQ) {
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r += std::abs(v[i]) * q.half[i];
    const double c = dotp(q.center, v);
    return w * offs.mass(c - r, c + r);
  }
  const double tx = dotp(q.x, v), ty = dotp(q.y, v);
  const double m = offs.mass(std::min(tx, ty), std::max(tx, ty));
  if (q.kind == Prepared::Trans) return w * m * std::abs(dotp(q.u, v));
  if (q.kind == Prepared::Restricted) return std::abs(dotp(q.u, v)) >= q.sin_tau ? w * m : 0.0;
  return w * m;
}

/// Embedding contribution of the hyperplane {<z, v> = off} with weight w.
void plane_contribution(const Prepared& q, std::span<const double> v, double off, double w, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double gx = dotp(q.x, v) - off, gy = dotp(q.y, v) - off;
  if (!straddles(gx, gy) || gx == 0.0) return;  // basepoint on the hyperplane: a nu-null event
  const double s = gx < 0.0 ? w : -w;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
}

/// Offset-direction embedding contribution for normal v, offsets integrated exactly.
void offset_contribution(const Prepared& q, const BaseMeasure1D& offs, std::span<const double> v, double w,
                         std::vector<double>& out) {
  // x is q.y, basepoint is q.x; the normal points from the basepoint side
  const double signed_mass = offs.cumulative(dotp(q.y, v)) - offs.cumulative(dotp(q.x, v));
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = w * signed_mass * v[i];
}

/// Ball containing every point a query set can touch.
struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

Ball query_ball(const std::vector<Prepared>& qs, std::size_t n) {
  std::vector<double> lo(n, kInf), hi(n, -kInf);
  auto add = [&](const std::vector<double>& z, const std::vector<double>* half) {
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double h = half ? (*half)[k] : 0.0;
      lo[k] = std::min(lo[k], z[k] - h);
      hi[k] = std::max(hi[k], z[k] + h);
    }
  };
  for (const auto& q : qs) {
    if (q.kind == Prepared::BoxQ) {
      add(q.center, &q.half);
    } else {
      add(q.x, nullptr);
      add(q.y, nullptr);
    }
  }
  Ball b;
  b.center.resize(n);
  double r2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    b.center[k] = 0.5 * (lo[k] + hi[k]);
    r2 += 0.25 * (hi[k] - lo[k]) * (hi[k] - lo[k]);
  }
  b.radius = std::sqrt(r2) * (1.0 + 1e-9) + 1e-12;
  return b;
}

/// Probability that a uniform unit vector v satisfies |<u, v>| <= s.
double band_probability(std::size_t n, double s) {
  if (s >= 1.0) return 1.0;
  return boost::math::ibeta(0.5, 0.5 * static_cast<double>(n - 1), s * s);
}

/// Draws weighted hyperplanes of nu. Position-direction draws are restricted
/// to hyperplanes meeting `ball` (importance weight = mass of that set); for
/// offset-direction measures the offset is integrated exactly and only the
/// normal is drawn.
class PlaneSource {
 public:
  PlaneSource(const HyperplaneMeasure& nu, std::uint64_t seed, const Ball& ball)
      : nu_(nu), n_(nu.dim()), rng_(seed), v_(n_) {
    if (const auto* pd = nu.position_direction()) {
      prepare_hits(*pd, ball);
    } else if (const auto* od = nu.offset_direction()) {
      weight_ = od->omega.total_mass(n_);
      if (n_ == 2) arcs_ = od->omega.to_arcs();
    }
  }

  /// Fills normal(), offset() and weight() with the next draw.
  void next() {
    if (const auto* pd = nu_.position_direction()) {
      next_position_direction(*pd);
    } else if (const auto* od = nu_.offset_direction()) {
      draw_direction(od->omega);
    } else {
      const WeightedHyperplane h = nu_.sampled()->draw(rng_);
      for (std::size_t k = 0; k < n_; ++k) v_[k] = h.plane.normal()[k];
      offset_ = h.plane.offset();
      weight_ = h.weight;
    }
  }

  std::span<const double> normal() const { return v_; }
  double offset() const { return offset_; }
  double weight() const { return weight_; }

 private:
  // Per-atom hit data: cumulative hit mass, plus the restricted arcs (n = 2)
  // or the band half-width s = R / |c - a| (uniform directions, n >= 3).
  void prepare_hits(const PositionDirection& pd, const Ball& ball) {
    const auto& atoms = pd.mu.resolved();
    const double omega_total = pd.omega.total_mass(n_);
    const bool planar = n_ == 2;
    const bool band = !planar && pd.omega.is_uniform();
    if (planar) arcs_ = pd.omega.to_arcs();
    center_ = ball.center;
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double* a = atoms.at(i);
      double r2 = 0.0;
      for (std::size_t k = 0; k < n_; ++k) r2 += (ball.center[k] - a[k]) * (ball.center[k] - a[k]);
      const double r = std::sqrt(r2);
      const double s = r > ball.radius ? ball.radius / r : 1.0;
      double hit = omega_total;
      if (planar) {
        const double beta = std::atan2(ball.center[1] - a[1], ball.center[0] - a[0]);
        hit_arcs_.push_back(s < 1.0 ? arcs_->restricted(beta + 0.5 * std::numbers::pi, std::asin(s)) : *arcs_);
        hit = hit_arcs_.back().mass();
      } else if (band) {
        band_s_.push_back(s);
        hit = omega_total * band_probability(n_, s);
      }
      total += atoms.weights[i] * hit;
      cumulative_.push_back(total);
    }
    atom_total_ = total;
    for (const auto& l : pd.mu.lines()) total += l.measure.total_mass() * omega_total;
    if (!std::isfinite(total)) throw UnsupportedBackend("Monte Carlo needs a base measure of finite mass");
    weight_ = total;
  }

  void next_position_direction(const PositionDirection& pd) {
    if (!(weight_ > 0.0)) {
      std::fill(v_.begin(), v_.end(), 0.0);
      v_[0] = 1.0;
      offset_ = 0.0;
      return;
    }
    const auto& atoms = pd.mu.resolved();
    double u = rng_.uniform() * weight_;
    offset_ = 0.0;
    if (u < atom_total_) {
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms.size() - 1);
      const double* a = atoms.at(i);
      if (n_ == 2) {
        const double phi = hit_arcs_[i].sample(rng_);
        v_[0] = std::cos(phi);
        v_[1] = std::sin(phi);
      } else if (!band_s_.empty()) {
        draw_band(a, band_s_[i]);
      } else {
        draw_direction(pd.omega);
      }
      for (std::size_t k = 0; k < n_; ++k) offset_ += a[k] * v_[k];
      return;
    }
    u -= atom_total_;
    const double omega_total = pd.omega.total_mass(n_);
    for (const auto& l : pd.mu.lines()) {
      const double m = l.measure.total_mass() * omega_total;
      if (u < m || &l == &pd.mu.lines().back()) {
        const Point a = l.anchor + l.direction * l.measure.sample(rng_);
        draw_direction(pd.omega);
        for (std::size_t k = 0; k < n_; ++k) offset_ += a[k] * v_[k];
        return;
      }
      u -= m;
    }
  }

  /// Uniform unit vector v conditioned on |<u, v>| <= s, u the unit vector
  /// from a to the ball center.
  void draw_band(const double* a, double s) {
    const Vec w = detail::uniform_direction(rng_, n_);
    if (s >= 1.0) {
      for (std::size_t k = 0; k < n_; ++k) v_[k] = w[k];
      return;
    }
    std::vector<double> u(n_);
    double ru = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      u[k] = center_[k] - a[k];
      ru += u[k] * u[k];
    }
    ru = std::sqrt(ru);
    for (auto& c : u) c /= ru;
    const double p = band_probability(n_, s);
    const double t2 = boost::math::ibeta_inv(0.5, 0.5 * static_cast<double>(n_ - 1), rng_.uniform() * p);
    const double t = (rng_.uniform() < 0.5 ? -1.0 : 1.0) * std::sqrt(t2);
    // component of w orthogonal to u, normalized
    double wu = 0.0;
    for (std::size_t k = 0; k < n_; ++k) wu += w[k] * u[k];
    double r2 = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      v_[k] = w[k] - wu * u[k];
      r2 += v_[k] * v_[k];
    }
    const double scale = std::sqrt(std::max(0.0, 1.0 - t * t) / r2);
    for (std::size_t k = 0; k < n_; ++k) v_[k] = t * u[k] + scale * v_[k];
  }

  void draw_direction(const DirectionMeasure& omega) {
    if (n_ == 2) {
      const double phi = arcs_->sample(rng_);
      v_[0] = std::cos(phi);
      v_[1] = std::sin(phi);
      return;
    }
    const Vec v = omega.sample(rng_, n_);
    for (std::size_t k = 0; k < n_; ++k) v_[k] = v[k];
  }

  const HyperplaneMeasure& nu_;
  std::size_t n_;
  Rng rng_;
  std::vector<double> v_;
  double offset_ = 0.0, weight_ = 0.0;
  std::optional<ArcSet> arcs_;
  std::vector<double> cumulative_;
  double atom_total_ = 0.0;
  std::vector<ArcSet> hit_arcs_;
  std::vector<double> band_s_;
  std::vector<double> center_;
};

void check_sampled_bounds(const HyperplaneMeasure& nu, const Query& q, const Prepared& pq) {
  const auto* sm = nu.sampled();
  if (!sm) return;
  auto inside = [&](const std::vector<double>& z) { return z.empty() || sm->bounds.contains(Point(z)); };
  if (!inside(pq.x) || !inside(pq.y) ||
      (pq.kind == Prepared::BoxQ && !(sm->bounds.contains(std::get<BoxMassQuery>(q).box.lo) &&
                                      sm->bounds.contains(std::get<BoxMassQuery>(q).box.hi)))) {
    throw InvalidArgument("query leaves the bounds of the sampled measure");
  }
}

}  // namespace

std::vector<McResult> mc_estimate_batch(const HyperplaneMeasure& nu, const std::vector<Query>& queries,
                                        std::uint64_t budget, std::uint64_t seed) {
  if (budget == 0) throw InvalidArgument("Monte Carlo budget must be positive");
  const std::size_t n = nu.dim();
  std::vector<Prepared> prepared;
  std::vector<Moments> acc;
  std::vector<std::vector<double>> contrib;
  for (const auto& q : queries) {
    prepared.push_back(prepare(q, n));
    check_sampled_bounds(nu, q, prepared.back());
    acc.emplace_back(prepared.back().out_dim);
    contrib.emplace_back(prepared.back().out_dim);
  }
  PlaneSource src(nu, seed, query_ball(prepared, n));
  const auto* od = nu.offset_direction();
  const std::optional<double> flat_density = od ? od->offsets.constant_density() : std::nullopt;
  const double* flat = flat_density ? &*flat_density : nullptr;
  constexpr std::size_t kBlock = 4096;
  std::vector<double> normals(kBlock * n), offsets(kBlock), weights(kBlock);
  for (std::uint64_t start = 0; start < budget; start += kBlock) {
    const std::size_t m = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, budget - start));
    for (std::size_t i = 0; i < m; ++i) {
      src.next();
      std::copy(src.normal().begin(), src.normal().end(), normals.begin() + static_cast<std::ptrdiff_t>(i * n));
      offsets[i] = src.offset();
      weights[i] = src.weight();
    }
    for (std::size_t j = 0; j < prepared.size(); ++j) {
      const Prepared& q = prepared[j];
      if (q.kind != Prepared::Embed) {
        auto value = [&](std::size_t i) {
          const std::span<const double> v(normals.data() + i * n, n);
          return od ? offset_scalar(q, od->offsets, flat, v, weights[i]) : plane_scalar(q, v, offsets[i], weights[i]);
        };
        const double x0 = value(0);
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
          const double d = value(i) - x0;
          d1 += d;
          d2 += d * d;
        }
        acc[j].add_run(x0, m, d1, d2);
        continue;
      }
      for (std::size_t i = 0; i < m; ++i) {
        const std::span<const double> v(normals.data() + i * n, n);
        if (od) offset_contribution(q, od->offsets, v, weights[i], contrib[j]);
        else plane_contribution(q, v, offsets[i], weights[i], contrib[j]);
        acc[j].add(contrib[j]);
      }
    }
  }
  std::vector<McResult> out;
  for (const auto& a : acc) {
    out.push_back(a.result());
    for (double v : out.back().value) {
      if (!std::isfinite(v)) throw DegenerateConfiguration("Monte Carlo estimate is not finite");
    }
  }
  return out;
}

McResult mc_estimate(const HyperplaneMeasure& nu, const Query& q, std::uint64_t budget, std::uint64_t seed) {
  return mc_estimate_batch(nu, {q}, budget, seed).front();
}

}  // namespace busemann
