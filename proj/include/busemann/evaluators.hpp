#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "busemann/geometry.hpp"
#include "busemann/measure.hpp"

namespace busemann {

/// How an integral query is answered.
///  - ClosedForm: per-atom formulas for uniform directions (any n) and the
///    Crofton moments for translation-invariant offsets.
///  - Exact2D: n = 2, arc-interval integration over normal angles, including
///    measures carried by lines.
///  - MonteCarlo: hit-indicator sampling of hyperplanes, with standard error.
enum class Backend { ClosedForm, Exact2D, MonteCarlo };

const char* backend_name(Backend b);
std::optional<Backend> parse_backend(std::string_view name);

struct McOptions {
  std::uint64_t budget = 200000;
  std::uint64_t seed = 1;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  Backend backend = Backend::ClosedForm;
};

struct VecEstimate {
  Vec value;
  Vec std_error;
  Backend backend = Backend::ClosedForm;
};

enum class QueryShape { Segment, Box };

bool supports(const HyperplaneMeasure& nu, Backend b, QueryShape shape = QueryShape::Segment);
/// ClosedForm, then Exact2D, then MonteCarlo: the first one that applies.
Backend preferred_backend(const HyperplaneMeasure& nu, QueryShape shape = QueryShape::Segment);

/// nu(pi[x, y]), the Busemann distance.
Estimate seg_mass(const HyperplaneMeasure& nu, const Point& x, const Point& y, Backend b, const McOptions& mc = {});

/// Integral of sin alpha(x - y, H) over pi[x, y].
Estimate transversal_integral(const HyperplaneMeasure& nu, const Point& x, const Point& y, Backend b,
                              const McOptions& mc = {});

/// nu({H in pi[x, y] : alpha(x - y, H) >= tau}).
Estimate restricted_mass(const HyperplaneMeasure& nu, const Point& x, const Point& y, double tau, Backend b,
                         const McOptions& mc = {});

/// nu(pi Q) for an axis-aligned box.
Estimate box_mass(const HyperplaneMeasure& nu, const Box& box, Backend b, const McOptions& mc = {});
Estimate cube_mass(const HyperplaneMeasure& nu, const Cube& q, Backend b, const McOptions& mc = {});

/// f(x) = integral over pi[o, x] of the unit normal pointing away from o.
VecEstimate embed(const HyperplaneMeasure& nu, const Point& basepoint, const Point& x, Backend b,
                  const McOptions& mc = {});

// ---------------------------------------------------------------------------
// Monte Carlo oracle.

struct SegMassQuery {
  Point x, y;
};
struct TransversalQuery {
  Point x, y;
};
struct RestrictedQuery {
  Point x, y;
  double tau;
};
struct BoxMassQuery {
  Box box;
};
struct EmbedQuery {
  Point basepoint, x;
};
using Query = std::variant<SegMassQuery, TransversalQuery, RestrictedQuery, BoxMassQuery, EmbedQuery>;

struct McResult {
  std::vector<double> value;
  std::vector<double> std_error;
  std::uint64_t samples = 0;
};

/// Unbiased estimate with standard error; bit-identical for identical seeds.
McResult mc_estimate(const HyperplaneMeasure& nu, const Query& q, std::uint64_t budget, std::uint64_t seed);
/// Scores every query against the same hyperplane draws. Position-direction
/// draws are restricted to hyperplanes meeting a ball around all queries.
std::vector<McResult> mc_estimate_batch(const HyperplaneMeasure& nu, const std::vector<Query>& queries,
                                        std::uint64_t budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Embedding map and the kernel constant of the position-direction closed form.

/// E|v_1| for v uniform on the unit sphere of R^n.
double mean_abs_coordinate(std::size_t n);
/// E|P v| for the projection of a uniform unit vector onto a 2-plane.
double mean_planar_radius(std::size_t n);
/// C(n) in f(x) = C(n) * sum_a w_a [(x - a)/|x - a| + (a - o)/|a - o|].
double kmw_constant_analytic(std::size_t n);

class EmbeddingMap {
 public:
  EmbeddingMap(std::shared_ptr<const HyperplaneMeasure> nu, Point basepoint, Backend backend,
               McOptions mc = {});

  Point operator()(const Point& x) const;
  VecEstimate evaluate(const Point& x) const;
  /// f(x) - f(y). Exact backends evaluate it with basepoint y, which avoids
  /// cancelling two large images; Monte Carlo differences two evaluations.
  VecEstimate increment(const Point& x, const Point& y) const;

  const HyperplaneMeasure& measure() const { return *nu_; }
  std::shared_ptr<const HyperplaneMeasure> measure_ptr() const { return nu_; }
  const Point& basepoint() const { return basepoint_; }
  Backend backend() const { return backend_; }
  std::size_t dim() const { return basepoint_.dim(); }

 private:
  std::shared_ptr<const HyperplaneMeasure> nu_;
  Point basepoint_;
  Backend backend_;
  McOptions mc_;
};

struct KmwRadiusFit {
  double radius;
  double value;
  double std_error;
};

struct KmwConstant {
  enum class Provenance { Analytic, Oracle };

  std::size_t dim = 2;
  double value = 0.0;
  double half_width = 0.0;  // 95% interval half-width; 0 for analytic values
  double std_error = 0.0;
  Provenance provenance = Provenance::Analytic;
  std::vector<KmwRadiusFit> fits;
  bool consistent = true;           // |x|-independence check passed
  bool independence_checked = true; // false when the budget is too small to test
  bool low_sample_warning = false;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
};

/// Estimates C(n) by Monte Carlo on nu = pushforward of (uniform ball x
/// uniform directions), basepoint at the ball center, at |x| in {2, 5, 10}.
KmwConstant calibrate_kmw_constant(std::size_t n, std::uint64_t budget, std::uint64_t seed);

}  // namespace busemann
