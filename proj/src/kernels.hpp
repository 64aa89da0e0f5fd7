#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "busemann/measure.hpp"

namespace busemann::detail {

inline constexpr double kPi = std::numbers::pi;

/// Integral of cos(phi - g) over [a, b], in a form that keeps full relative
/// precision for short intervals.
inline double int_cos(double a, double b, double g) {
  return 2.0 * std::cos(0.5 * (a + b) - g) * std::sin(0.5 * (b - a));
}
inline double int_sin(double a, double b, double g) {
  return 2.0 * std::sin(0.5 * (a + b) - g) * std::sin(0.5 * (b - a));
}

/// Integral of |cos(phi - g)| over [a, b].
double abs_cos_integral(double a, double b, double g);

/// Integral of cos^2(phi - g) over [a, b].
inline double cos2_integral(double a, double b, double g) {
  const double h = 0.5 * (b - a);
  return h + 0.5 * std::cos(2.0 * (0.5 * (a + b) - g)) * std::sin(2.0 * h);
}

/// Integral over [a, b] (subset of [-(pi/2 - tau), pi/2 - tau], s = sin tau)
/// of P(r >= s / |cos phi|), r the planar radius of a uniform unit vector in R^n.
double radial_tail_integral(std::size_t n, double s, double a, double b);

enum class SegKind { Mass, Transversal, Restricted };

struct SegQuery {
  SegKind kind = SegKind::Mass;
  double tau = 0.0;
};

// Position-direction, uniform directions, atoms only (any n).
double pd_closed_segment(const ResolvedAtoms& atoms, std::span<const double> p, std::span<const double> q,
                         const SegQuery& sq);
std::vector<double> pd_closed_embed(const ResolvedAtoms& atoms, std::span<const double> o, std::span<const double> x,
                                    double constant);
double pd_closed_box2d(const ResolvedAtoms& atoms, const Box& box);

// Position-direction, arc densities, n = 2.
double pd_arc_segment(const ResolvedAtoms& atoms, const ArcSet& arcs, std::span<const double> p,
                      std::span<const double> q, const SegQuery& sq);
std::array<double, 2> pd_arc_embed(const ResolvedAtoms& atoms, const ArcSet& arcs, std::span<const double> o,
                                   std::span<const double> x);
double pd_arc_box(const ResolvedAtoms& atoms, const ArcSet& arcs, const Box& box);

// Measures carried by a line, arc densities, n = 2.
double line_segment(const LineMeasure& line, const ArcSet& arcs, std::span<const double> p, std::span<const double> q,
                    const SegQuery& sq);
std::array<double, 2> line_embed(const LineMeasure& line, const ArcSet& arcs, std::span<const double> o,
                                 std::span<const double> x);
double line_box(const LineMeasure& line, const ArcSet& arcs, const Box& box);

}  // namespace busemann::detail
