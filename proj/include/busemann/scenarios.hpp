#pragma once

#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "busemann/evaluators.hpp"
#include "busemann/measure.hpp"

namespace busemann {

enum class Tristate { Yes, No, Unknown };
const char* tristate_name(Tristate t);

struct Scenario {
  std::string name;
  std::size_t dim = 2;
  Box domain;
  std::shared_ptr<const HyperplaneMeasure> measure;
  Point basepoint;
  Tristate transverse = Tristate::Unknown;
  bool admissible = true;
  std::optional<std::string> closed_form_metric;  // formula tag, e.g. "E|<v,u>| |x-y|"
  std::vector<std::string> notes;                 // builder checks (doubling ratio, rank, ...)

  /// Most exact backend the measure supports for segment queries.
  Backend backend() const { return preferred_backend(*measure); }
  EmbeddingMap embedding(McOptions mc = {}) const { return EmbeddingMap(measure, basepoint, backend(), mc); }
};

/// [-h, h]^n.
Box centered_box(std::size_t n, double half_width);

/// Uniform directions, unit offset density.
Scenario build_crofton(std::size_t n, Box domain);

/// Lebesgue density on [-extent, extent]^n with cells refined near the origin:
/// `inner_cells` per axis on [-inner, inner], then edges growing geometrically
/// by `growth` out to `extent`.
BaseMeasureND graded_lebesgue(std::size_t n, double inner, int inner_cells, double extent, double growth,
                              int quadrature_order, double density = 1.0);

struct KmwChecks {
  std::size_t doubling_samples = 200;
  std::uint64_t seed = 0;
};

/// Pushforward of mu x uniform directions. Rejects mu failing the tail
/// condition or with support in an affine line.
Scenario build_kmw(BaseMeasureND mu, Box domain, const KmwChecks& checks = {});

/// mu carried by the real axis, directions within cap_half_angle of e1 with
/// arclength density 1 (the cap integral of the e1 component equals 2 sin(cap)).
Scenario build_beurling_ahlfors(BaseMeasure1D mu1d, Box domain, double cap_half_angle = std::numbers::pi / 6);

/// Piecewise-constant approximation of |t|^exponent on [-extent, extent] with
/// geometric pieces towards 0 (`pieces` per side); each piece carries the
/// exact integral of |t|^exponent over it.
BaseMeasure1D power_law_pieces(double exponent, double extent, int pieces, double innermost);

/// Lebesgue mu on the graded box; directions two caps of half-angle theta0
/// around e1 and e2, mass 1/2 each.
Scenario build_degenerate_family(double theta0, Box domain, BaseMeasureND mu);

struct GridImage {
  std::size_t dim = 2;
  std::size_t resolution = 0;
  Box window;
  std::vector<Point> nodes;   // row-major, last axis fastest
  std::vector<Point> images;
};

GridImage grid_export(const Scenario& s, std::size_t resolution, const Box& window, McOptions mc = {});

/// Header `dim,resolution,lo...,hi...`, then `i,j[,k],x...,fx...` per node, %.17g.
std::string grid_to_csv(const GridImage& g);
GridImage grid_from_csv(const std::string& text);

}  // namespace busemann
