#include "busemann/evaluators.hpp"

#include <cmath>
#include <string>

#include "kernels.hpp"

namespace busemann {

using detail::kPi;
using detail::SegKind;
using detail::SegQuery;

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::ClosedForm:
      return "closed_form";
    case Backend::Exact2D:
      return "exact2d";
    case Backend::MonteCarlo:
      return "monte_carlo";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "closed_form") return Backend::ClosedForm;
  if (name == "exact2d") return Backend::Exact2D;
  if (name == "monte_carlo") return Backend::MonteCarlo;
  return std::nullopt;
}

double mean_abs_coordinate(std::size_t n) {
  if (n < 1) throw InvalidArgument("dimension must be positive");
  const double d = static_cast<double>(n);
  return std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d + 1.0))) / std::sqrt(kPi);
}

double mean_planar_radius(std::size_t n) {
  if (n < 2) throw InvalidArgument("dimension must be at least 2");
  if (n == 2) return 1.0;
  const double m = 0.5 * (static_cast<double>(n) - 2.0);
  // B(3/2, m) / B(1, m)
  return std::exp(std::lgamma(1.5) + std::lgamma(m) - std::lgamma(1.5 + m)) * m;
}

double kmw_constant_analytic(std::size_t n) { return 0.5 * mean_abs_coordinate(n); }

namespace {

bool offsets_constant(const OffsetDirection& od) { return od.offsets.is_full_line_constant(); }

double mu_mass(const PositionDirection& pd) {
  double m = pd.mu.resolved().total;
  for (const auto& l : pd.mu.lines()) m += l.measure.total_mass();
  return m;
}

}  // namespace

bool supports(const HyperplaneMeasure& nu, Backend b, QueryShape shape) {
  const std::size_t n = nu.dim();
  if (const auto* pd = nu.position_direction()) {
    switch (b) {
      case Backend::ClosedForm:
        return pd->omega.is_uniform() && pd->mu.lines().empty() && (shape == QueryShape::Segment || n == 2);
      case Backend::Exact2D:
        return n == 2;
      case Backend::MonteCarlo: {
        const double m = mu_mass(*pd);
        return std::isfinite(m) && m > 0.0;
      }
    }
  }
  if (const auto* od = nu.offset_direction()) {
    switch (b) {
      case Backend::ClosedForm:
        return od->omega.is_uniform() && offsets_constant(*od);
      case Backend::Exact2D:
        return n == 2 && offsets_constant(*od);
      case Backend::MonteCarlo:
        return true;
    }
  }
  return b == Backend::MonteCarlo;
}

Backend preferred_backend(const HyperplaneMeasure& nu, QueryShape shape) {
  for (Backend b : {Backend::ClosedForm, Backend::Exact2D, Backend::MonteCarlo}) {
    if (supports(nu, b, shape)) return b;
  }
  throw UnsupportedBackend("no backend can evaluate this measure");
}

namespace {

void require(const HyperplaneMeasure& nu, Backend b, QueryShape shape) {
  if (!supports(nu, b, shape)) {
    throw UnsupportedBackend(std::string("backend ") + backend_name(b) + " cannot evaluate this measure");
  }
}

void check_point(const HyperplaneMeasure& nu, const Point& x) {
  if (x.dim() != nu.dim()) {
    throw InvalidArgument("point has dimension " + std::to_string(x.dim()) + ", measure has " +
                          std::to_string(nu.dim()));
  }
}

Estimate from_mc(const McResult& r) { return {r.value[0], r.std_error[0], Backend::MonteCarlo}; }

double angle_of(const Point& x, const Point& y) { return std::atan2(x[1] - y[1], x[0] - y[0]); }

/// Offset-direction segment queries, exact for constant offset density.
double offset_segment(const OffsetDirection& od, const Point& x, const Point& y, const SegQuery& sq, Backend b) {
  const std::size_t n = od.dim;
  const double c = od.offsets.density_at(0.0);
  const double len = distance(x, y);
  if (b == Backend::ClosedForm) {
    switch (sq.kind) {
      case SegKind::Mass:
        return c * mean_abs_coordinate(n) * len;
      case SegKind::Transversal:
        return c * len / static_cast<double>(n);
      case SegKind::Restricted:
        return c * mean_abs_coordinate(n) * len * std::pow(std::cos(sq.tau), static_cast<double>(n) - 1.0);
    }
  }
  const ArcSet arcs = od.omega.to_arcs();
  const double g = angle_of(x, y);
  double acc = 0.0;
  switch (sq.kind) {
    case SegKind::Mass:
      arcs.for_each_piece(0.0, kPi, [&](double a, double e, double d) { acc += d * detail::abs_cos_integral(a, e, g); });
      break;
    case SegKind::Transversal:
      arcs.for_each_piece(0.0, kPi, [&](double a, double e, double d) { acc += d * detail::cos2_integral(a, e, g); });
      break;
    case SegKind::Restricted:
      arcs.restricted(g, 0.5 * kPi - sq.tau).for_each_piece(0.0, kPi, [&](double a, double e, double d) {
        acc += d * detail::abs_cos_integral(a, e, g);
      });
      break;
  }
  return c * len * acc;
}

double position_segment(const PositionDirection& pd, const Point& x, const Point& y, const SegQuery& sq, Backend b) {
  const auto& atoms = pd.mu.resolved();
  if (b == Backend::ClosedForm) {
    return pd.omega.total_mass(pd.mu.dim()) * detail::pd_closed_segment(atoms, x.coords(), y.coords(), sq);
  }
  const ArcSet arcs = pd.omega.to_arcs();
  double total = detail::pd_arc_segment(atoms, arcs, x.coords(), y.coords(), sq);
  for (const auto& l : pd.mu.lines()) total += detail::line_segment(l, arcs, x.coords(), y.coords(), sq);
  return total;
}

Estimate segment_query(const HyperplaneMeasure& nu, const Point& x, const Point& y, const SegQuery& sq, Backend b,
                       const McOptions& mc) {
  check_point(nu, x);
  check_point(nu, y);
  if (!(sq.tau >= 0.0 && sq.tau <= 0.5 * kPi)) throw InvalidArgument("tau must lie in [0, pi/2]");
  require(nu, b, QueryShape::Segment);
  if (b == Backend::MonteCarlo) {
    switch (sq.kind) {
      case SegKind::Mass:
        return from_mc(mc_estimate(nu, SegMassQuery{x, y}, mc.budget, mc.seed));
      case SegKind::Transversal:
        return from_mc(mc_estimate(nu, TransversalQuery{x, y}, mc.budget, mc.seed));
      case SegKind::Restricted:
        return from_mc(mc_estimate(nu, RestrictedQuery{x, y, sq.tau}, mc.budget, mc.seed));
    }
  }
  double v = 0.0;
  if (const auto* pd = nu.position_direction()) {
    v = position_segment(*pd, x, y, sq, b);
  } else {
    v = offset_segment(*nu.offset_direction(), x, y, sq, b);
  }
  if (!std::isfinite(v)) throw DegenerateConfiguration("segment mass is not finite");
  return {v, 0.0, b};
}

}  // namespace

Estimate seg_mass(const HyperplaneMeasure& nu, const Point& x, const Point& y, Backend b, const McOptions& mc) {
  return segment_query(nu, x, y, SegQuery{SegKind::Mass, 0.0}, b, mc);
}

Estimate transversal_integral(const HyperplaneMeasure& nu, const Point& x, const Point& y, Backend b,
                              const McOptions& mc) {
  return segment_query(nu, x, y, SegQuery{SegKind::Transversal, 0.0}, b, mc);
}

Estimate restricted_mass(const HyperplaneMeasure& nu, const Point& x, const Point& y, double tau, Backend b,
                         const McOptions& mc) {
  return segment_query(nu, x, y, SegQuery{SegKind::Restricted, tau}, b, mc);
}

Estimate box_mass(const HyperplaneMeasure& nu, const Box& box, Backend b, const McOptions& mc) {
  check_point(nu, box.lo);
  require(nu, b, QueryShape::Box);
  if (b == Backend::MonteCarlo) return from_mc(mc_estimate(nu, BoxMassQuery{box}, mc.budget, mc.seed));
  double v = 0.0;
  if (const auto* pd = nu.position_direction()) {
    const auto& atoms = pd->mu.resolved();
    if (b == Backend::ClosedForm) {
      v = pd->omega.total_mass(2) * detail::pd_closed_box2d(atoms, box);
    } else {
      const ArcSet arcs = pd->omega.to_arcs();
      v = detail::pd_arc_box(atoms, arcs, box);
      for (const auto& l : pd->mu.lines()) v += detail::line_box(l, arcs, box);
    }
  } else {
    const auto& od = *nu.offset_direction();
    const double c = od.offsets.density_at(0.0);
    if (b == Backend::ClosedForm) {
      double edges = 0.0;
      for (std::size_t i = 0; i < od.dim; ++i) edges += box.hi[i] - box.lo[i];
      v = c * mean_abs_coordinate(od.dim) * edges;
    } else {
      const double w = box.hi[0] - box.lo[0], h = box.hi[1] - box.lo[1];
      double acc = 0.0;
      od.omega.to_arcs().for_each_piece(0.0, kPi, [&](double a, double e, double d) {
        acc += d * (w * detail::abs_cos_integral(a, e, 0.0) + h * detail::abs_cos_integral(a, e, 0.5 * kPi));
      });
      v = c * acc;
    }
  }
  if (!std::isfinite(v)) throw DegenerateConfiguration("box mass is not finite");
  return {v, 0.0, b};
}

Estimate cube_mass(const HyperplaneMeasure& nu, const Cube& q, Backend b, const McOptions& mc) {
  return box_mass(nu, q.box(), b, mc);
}

VecEstimate embed(const HyperplaneMeasure& nu, const Point& basepoint, const Point& x, Backend b,
                  const McOptions& mc) {
  check_point(nu, basepoint);
  check_point(nu, x);
  require(nu, b, QueryShape::Segment);
  const std::size_t n = nu.dim();
  if (b == Backend::MonteCarlo) {
    const McResult r = mc_estimate(nu, EmbedQuery{basepoint, x}, mc.budget, mc.seed);
    return {Vec(r.value), Vec(r.std_error), Backend::MonteCarlo};
  }
  std::vector<double> out(n, 0.0);
  if (const auto* pd = nu.position_direction()) {
    const auto& atoms = pd->mu.resolved();
    if (b == Backend::ClosedForm) {
      const double k = pd->kmw_constant.value_or(kmw_constant_analytic(n)) * pd->omega.total_mass(n);
      out = detail::pd_closed_embed(atoms, basepoint.coords(), x.coords(), k);
    } else {
      const ArcSet arcs = pd->omega.to_arcs();
      auto v = detail::pd_arc_embed(atoms, arcs, basepoint.coords(), x.coords());
      for (const auto& l : pd->mu.lines()) {
        const auto w = detail::line_embed(l, arcs, basepoint.coords(), x.coords());
        v[0] += w[0];
        v[1] += w[1];
      }
      out = {v[0], v[1]};
    }
  } else {
    const auto& od = *nu.offset_direction();
    const double c = od.offsets.density_at(0.0);
    if (b == Backend::ClosedForm) {
      for (std::size_t i = 0; i < n; ++i) out[i] = c * (x[i] - basepoint[i]) / static_cast<double>(n);
    } else {
      // f = c * integral of <x - o, v> v
      const double X = x[0] - basepoint[0], Y = x[1] - basepoint[1];
      double cc = 0.0, ss = 0.0, cs = 0.0;
      od.omega.to_arcs().for_each_piece(0.0, kPi, [&](double a, double e, double d) {
        cc += d * detail::cos2_integral(a, e, 0.0);
        ss += d * detail::cos2_integral(a, e, 0.5 * kPi);
        cs += d * 0.5 * std::sin(a + e) * std::sin(e - a);
      });
      out = {c * (cc * X + cs * Y), c * (cs * X + ss * Y)};
    }
  }
  for (double v : out) {
    if (!std::isfinite(v)) throw DegenerateConfiguration("embedding is not finite");
  }
  return {Vec(std::move(out)), Vec::zero(n), b};
}

EmbeddingMap::EmbeddingMap(std::shared_ptr<const HyperplaneMeasure> nu, Point basepoint, Backend backend, McOptions mc)
    : nu_(std::move(nu)), basepoint_(std::move(basepoint)), backend_(backend), mc_(mc) {
  if (!nu_) throw InvalidArgument("embedding map needs a measure");
  check_point(*nu_, basepoint_);
  require(*nu_, backend_, QueryShape::Segment);
}

Point EmbeddingMap::operator()(const Point& x) const { return evaluate(x).value; }

VecEstimate EmbeddingMap::evaluate(const Point& x) const { return embed(*nu_, basepoint_, x, backend_, mc_); }

VecEstimate EmbeddingMap::increment(const Point& x, const Point& y) const {
  if (backend_ != Backend::MonteCarlo) return embed(*nu_, y, x, backend_, mc_);
  const VecEstimate fx = evaluate(x), fy = evaluate(y);
  std::vector<double> se(fx.std_error.dim());
  for (std::size_t k = 0; k < se.size(); ++k) se[k] = std::hypot(fx.std_error[k], fy.std_error[k]);
  return {fx.value - fy.value, Vec(std::move(se)), backend_};
}

}  // namespace busemann
