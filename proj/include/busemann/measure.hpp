#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "busemann/geometry.hpp"
#include "busemann/rng.hpp"

namespace busemann {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Measures on the real line.

struct Atom1D {
  double position;
  double weight;
};

/// Constant density on [lo, hi). Either end may be infinite.
struct DensityPiece {
  double lo;
  double hi;
  double density;
};

/// Atoms plus piecewise-constant density on R.
///
/// Interval masses use the half-open convention (s, t]: an atom sitting at t
/// belongs to the interval ending at t, never to the one starting there.
/// This makes mass(s, t) + mass(t, u) == mass(s, u) for s <= t <= u.
class BaseMeasure1D {
 public:
  BaseMeasure1D() = default;
  BaseMeasure1D(std::vector<Atom1D> atoms, std::vector<DensityPiece> pieces);

  static BaseMeasure1D lebesgue(double density = 1.0, double lo = -kInf, double hi = kInf);

  const std::vector<Atom1D>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  /// The density when the measure is c * Lebesgue on the whole line.
  std::optional<double> constant_density() const;

  /// mu((s, t]); throws when s > t.
  double mass(double s, double t) const;
  double total_mass() const;
  bool is_full_line_constant() const;

  /// Signed cumulative mass relative to 0: M(t) - M(s) == mass(s, t).
  double cumulative(double t) const;
  /// Density of the piece containing t (0 outside the pieces).
  double density_at(double t) const;
  /// Slope of cumulative() at t, by binary search over the knots.
  double slope(double t) const;
  /// Sorted finite positions where the cumulative function is not affine.
  const std::vector<double>& knots() const { return knots_; }

  /// Draws a point from the normalized measure; requires finite total mass.
  double sample(Rng& rng) const;

  BaseMeasure1D scaled(double factor) const;

 private:
  void build_index();

  std::vector<Atom1D> atoms_;
  std::vector<DensityPiece> pieces_;
  std::vector<double> knots_;
  std::vector<double> knot_cum_;      // cumulative() evaluated at each knot
  std::vector<double> gap_density_;   // density on (knots_[i], knots_[i+1])
  double density_below_ = 0.0;
  double density_above_ = 0.0;
};

/// mu((s, t]) as the cdf increment; the public name used by callers.
double cdf(const BaseMeasure1D& m, double s, double t);

// ---------------------------------------------------------------------------
// Measures on R^n.

struct AtomND {
  Point position;
  double weight;
};

struct DensityCell {
  Box box;
  double density;
};

/// A one-dimensional measure carried by the line {anchor + t * direction}.
struct LineMeasure {
  Point anchor;
  Vec direction;  // unit
  BaseMeasure1D measure;
};

/// Flat atom arrays, the form consumed by the per-atom evaluator kernels.
struct ResolvedAtoms {
  std::size_t dim = 0;
  std::vector<double> coords;  // dim * count, row-major
  std::vector<double> weights;
  std::vector<double> cumulative;  // running weight sums, for sampling
  double total = 0.0;

  std::size_t size() const { return weights.size(); }
  const double* at(std::size_t i) const { return coords.data() + i * dim; }
};

/// Atoms, constant-density boxes and (for n = 2) measures on lines.
///
/// Density cells reach the evaluators through a tensor Gauss-Legendre rule of
/// `quadrature_order` nodes per axis and cell; every exact backend integrates
/// that resolved measure exactly.
class BaseMeasureND {
 public:
  BaseMeasureND(std::size_t dim, std::vector<AtomND> atoms, std::vector<DensityCell> cells = {},
                std::vector<LineMeasure> lines = {}, int quadrature_order = 2);

  std::size_t dim() const { return dim_; }
  const std::vector<AtomND>& atoms() const { return atoms_; }
  const std::vector<DensityCell>& cells() const { return cells_; }
  const std::vector<LineMeasure>& lines() const { return lines_; }
  int quadrature_order() const { return quadrature_order_; }

  /// Atoms plus quadrature nodes of the cells (line measures excluded).
  const ResolvedAtoms& resolved() const { return *resolved_; }

  double total_mass() const;
  /// mu(B(x, r)) for the open ball.
  double ball_mass(const Point& x, double r) const;
  /// Affine rank of the support skeleton (atoms, cell corners, line pieces).
  int affine_rank() const;

  BaseMeasureND scaled(double factor) const;
  BaseMeasureND translated(const Vec& shift) const;

 private:
  std::size_t dim_;
  std::vector<AtomND> atoms_;
  std::vector<DensityCell> cells_;
  std::vector<LineMeasure> lines_;
  int quadrature_order_;
  std::shared_ptr<const ResolvedAtoms> resolved_;
};

/// Lebesgue measure on `box`, split into `cells_per_axis`^n cells.
BaseMeasureND lebesgue_box(const Box& box, int cells_per_axis, double density = 1.0, int quadrature_order = 2);

struct DoublingResult {
  double ratio = 1.0;
  Point witness_center;
  double witness_radius = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Max over sampled balls in `window` of mu(B(x, 2r)) / mu(B(x, r)), radii
/// log-uniform in [r_min, r_max]. 0/0 samples are skipped.
DoublingResult doubling_ratio(const BaseMeasureND& m, const Box& window, std::size_t samples, double r_min,
                              double r_max, std::uint64_t seed);

/// Integral of |x|^-1 d mu. Throws on an atom at the origin.
double tail1_check(const BaseMeasureND& m);

// ---------------------------------------------------------------------------
// Direction measures.

/// Densities on normal angles modulo pi (n = 2). Pieces are disjoint, sorted
/// and lie in [0, pi).
class ArcSet {
 public:
  struct Arc {
    double lo;
    double hi;
    double density;
  };
  struct Piece {
    double a;
    double b;
    double density;
  };

  ArcSet() = default;
  /// Intervals may overlap (densities add) and may extend outside [0, pi);
  /// they are reduced modulo pi. Each must have length <= pi.
  explicit ArcSet(const std::vector<Arc>& intervals);

  const std::vector<Arc>& arcs() const { return arcs_; }
  double mass() const;
  double density_at(double phi) const;

  /// Sub-intervals of the real interval [a, b] carrying positive density,
  /// in real (unwrapped) angle coordinates.
  std::vector<Piece> pieces_in(double a, double b) const;

  /// Restriction to angles within `half_width` of `center` modulo pi.
  ArcSet restricted(double center, double half_width) const;

  /// Calls f(a, b, density) for each positive-density sub-interval of [a, b],
  /// in unwrapped angle coordinates and increasing order.
  template <class F>
  void for_each_piece(double a, double b, F&& f) const {
    if (!(b > a) || arcs_.empty()) return;
    constexpr double pi = 3.14159265358979323846;
    const long k0 = static_cast<long>(std::floor(a / pi)) - 1;
    const long k1 = static_cast<long>(std::floor(b / pi)) + 1;
    for (long k = k0; k <= k1; ++k) {
      const double shift = static_cast<double>(k) * pi;
      for (const auto& arc : arcs_) {
        const double lo = std::max(a, arc.lo + shift);
        const double hi = std::min(b, arc.hi + shift);
        if (hi > lo) f(lo, hi, arc.density);
      }
    }
  }
  ArcSet scaled(double factor) const;
  double sample(Rng& rng) const;

 private:
  std::vector<Arc> arcs_;
};

struct UniformDirections {};

/// Two-sided cap {v : |<v, axis>| >= cos(half_angle)} with total mass
/// `mass`, spread by arclength (n = 2) or surface area (n >= 3).
struct SymmetricCap {
  Vec axis;
  double half_angle;
  double mass = 1.0;
};

struct ArcDensity2D {
  ArcSet arcs;
};

class DirectionMeasure {
 public:
  using Variant = std::variant<UniformDirections, SymmetricCap, ArcDensity2D>;

  DirectionMeasure() : v_(UniformDirections{}) {}
  DirectionMeasure(Variant v);

  static DirectionMeasure uniform() { return DirectionMeasure(UniformDirections{}); }
  static DirectionMeasure cap(Vec axis, double half_angle, double mass = 1.0);
  static DirectionMeasure arcs(ArcSet a) { return DirectionMeasure(ArcDensity2D{std::move(a)}); }

  const Variant& variant() const { return v_; }
  bool is_uniform() const { return std::holds_alternative<UniformDirections>(v_); }

  double total_mass(std::size_t n) const;
  /// Equivalent density on normal angles modulo pi; n = 2 only.
  ArcSet to_arcs() const;
  /// Draws a unit normal from the normalized measure.
  Vec sample(Rng& rng, std::size_t n) const;
  void check_dim(std::size_t n) const;

 private:
  Variant v_;
};

// ---------------------------------------------------------------------------
// Hyperplane measures.

/// Pushforward of mu x omega under (a, v) -> {x : <x, v> = <a, v>}.
struct PositionDirection {
  BaseMeasureND mu;
  DirectionMeasure omega;
  /// Overrides the analytic kernel constant of the closed-form embedding.
  std::optional<double> kmw_constant;
};

/// Hyperplanes {x : <x, v> = p}, weighted d omega(v) d offsets(p).
struct OffsetDirection {
  std::size_t dim;
  DirectionMeasure omega;
  BaseMeasure1D offsets;
};

struct WeightedHyperplane {
  Hyperplane plane;
  double weight;
};

/// Opaque seeded hyperplane generator. `draw` returns an importance-weighted
/// hyperplane; the estimator of nu(S) is the mean of weight * [H in S].
/// Queries must stay inside `bounds`.
struct SampledMeasure {
  std::size_t dim;
  std::function<WeightedHyperplane(Rng&)> draw;
  Box bounds;
};

class HyperplaneMeasure {
 public:
  using Variant = std::variant<PositionDirection, OffsetDirection, SampledMeasure>;

  HyperplaneMeasure(Variant v);

  const Variant& variant() const { return v_; }
  std::size_t dim() const;

  const PositionDirection* position_direction() const { return std::get_if<PositionDirection>(&v_); }
  const OffsetDirection* offset_direction() const { return std::get_if<OffsetDirection>(&v_); }
  const SampledMeasure* sampled() const { return std::get_if<SampledMeasure>(&v_); }

  HyperplaneMeasure scaled(double factor) const;
  /// Rigid translation of the whole construction by `shift`.
  HyperplaneMeasure translated(const Vec& shift) const;

 private:
  Variant v_;
};

/// Draws `count` hyperplanes from the normalized measure (for inspection;
/// sampled measures return their own draws).
std::vector<WeightedHyperplane> sample_hyperplanes(const HyperplaneMeasure& nu, std::size_t count,
                                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Admissibility.

struct ValidationPlan {
  std::size_t point_count = 64;
  std::size_t segment_count = 64;
  double min_length = 1e-3;
  double max_length = 1.0;
  std::uint64_t seed = 0;
  std::vector<Point> probes;  // points checked in addition to the samples
};

struct ValidationReport {
  std::vector<Point> point_violations;  // points with nu(pi{x}) > 0
  double max_point_mass = 0.0;
  double min_segment_mass = kInf;
  Segment min_segment_witness;
  double region_mass = 0.0;
  bool region_mass_finite = true;
  bool no_violation_found() const;
};

/// Statistical check of the three admissibility conditions on `region`.
/// A clean report means no violation was found, not that nu is admissible.
ValidationReport validate(const HyperplaneMeasure& nu, const Box& region, const ValidationPlan& plan);

}  // namespace busemann
