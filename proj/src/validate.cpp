#include <cmath>

#include "busemann/evaluators.hpp"
#include "busemann/measure.hpp"
#include "sampling.hpp"

namespace busemann {

bool ValidationReport::no_violation_found() const {
  return point_violations.empty() && min_segment_mass > 0.0 && region_mass_finite;
}

namespace {

/// nu({H : x in H}).
double point_mass(const HyperplaneMeasure& nu, const Point& x) {
  if (const auto* pd = nu.position_direction()) {
    const double om = pd->omega.total_mass(x.dim());
    double m = 0.0;
    for (const auto& a : pd->mu.atoms()) {
      if (a.position == x) m += a.weight * om;
    }
    for (const auto& l : pd->mu.lines()) {
      const Vec d = x - l.anchor;
      const double t = dot(d, l.direction);
      if (norm(d - l.direction * t) > 1e-12 * std::max(1.0, norm(d))) continue;
      for (const auto& at : l.measure.atoms()) {
        if (std::abs(at.position - t) <= 1e-12 * std::max(1.0, std::abs(t))) m += at.weight * om;
      }
    }
    return m;
  }
  // Offset measures with direction densities and sampled measures do not
  // charge pencils through a point.
  return 0.0;
}

}  // namespace

ValidationReport validate(const HyperplaneMeasure& nu, const Box& region, const ValidationPlan& plan) {
  if (region.dim() != nu.dim()) throw InvalidArgument("region dimension does not match the measure");
  ValidationReport rep;
  Rng rng(plan.seed);

  std::vector<Point> points = plan.probes;
  if (const auto* pd = nu.position_direction()) {
    for (const auto& a : pd->mu.atoms()) {
      if (region.contains(a.position)) points.push_back(a.position);
    }
  }
  for (std::size_t i = 0; i < plan.point_count; ++i) points.push_back(detail::uniform_in_box(rng, region));
  for (const auto& p : points) {
    const double m = point_mass(nu, p);
    rep.max_point_mass = std::max(rep.max_point_mass, m);
    if (m > 0.0) rep.point_violations.push_back(p);
  }

  const Backend seg_backend = preferred_backend(nu, QueryShape::Segment);
  const McOptions mc{20000, plan.seed ^ 0x5bd1e995ULL};
  for (std::size_t i = 0; i < plan.segment_count; ++i) {
    const double u = plan.segment_count > 1 ? static_cast<double>(i) / static_cast<double>(plan.segment_count - 1) : 0.0;
    const Segment s = detail::sample_segment(rng, region, plan.min_length, plan.max_length, u);
    double m = 0.0;
    try {
      m = seg_mass(nu, s.a, s.b, seg_backend, mc).value;
    } catch (const DegenerateConfiguration&) {
      continue;  // endpoint on an atom; reported through the point check
    }
    if (m < rep.min_segment_mass) {
      rep.min_segment_mass = m;
      rep.min_segment_witness = s;
    }
  }

  try {
    rep.region_mass = box_mass(nu, region, preferred_backend(nu, QueryShape::Box), mc).value;
    rep.region_mass_finite = std::isfinite(rep.region_mass);
  } catch (const DegenerateConfiguration&) {
    rep.region_mass = kInf;
    rep.region_mass_finite = false;
  }
  return rep;
}

}  // namespace busemann
