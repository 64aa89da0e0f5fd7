#include "busemann/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace busemann {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool inside(const Box& outer, const Box& inner) {
  for (std::size_t i = 0; i < outer.dim(); ++i) {
    if (inner.lo[i] < outer.lo[i] || inner.hi[i] > outer.hi[i]) return false;
  }
  return true;
}

}  // namespace

const char* tristate_name(Tristate t) {
  switch (t) {
    case Tristate::Yes:
      return "yes";
    case Tristate::No:
      return "no";
    case Tristate::Unknown:
      return "unknown";
  }
  return "unknown";
}

Box centered_box(std::size_t n, double half_width) {
  return Box(Point(std::vector<double>(n, -half_width)), Point(std::vector<double>(n, half_width)));
}

Scenario build_crofton(std::size_t n, Box domain) {
  if (n < 2) throw InvalidArgument("crofton scenario needs n >= 2");
  if (domain.dim() != n) throw InvalidArgument("domain dimension does not match n");
  Scenario s;
  s.name = "crofton";
  s.dim = n;
  s.basepoint = domain.center();
  s.domain = std::move(domain);
  s.measure = std::make_shared<HyperplaneMeasure>(OffsetDirection{n, DirectionMeasure::uniform(), BaseMeasure1D::lebesgue(1.0)});
  s.transverse = Tristate::Yes;
  s.closed_form_metric = "E|<v,u>| |x-y|";
  return s;
}

BaseMeasureND graded_lebesgue(std::size_t n, double inner, int inner_cells, double extent, double growth,
                              int quadrature_order, double density) {
  if (!(inner > 0.0) || !(extent >= inner) || inner_cells < 1 || !(growth >= 1.0)) {
    throw InvalidArgument("graded grid needs 0 < inner <= extent, innerCells >= 1, growth >= 1");
  }
  std::vector<double> edges;
  const double step0 = 2.0 * inner / inner_cells;
  std::vector<double> outer;
  double e = inner, step = step0;
  while (e < extent) {
    step *= growth;
    double next = std::min(e + step, extent);
    if (extent - next < 0.3 * step) next = extent;
    outer.push_back(next);
    e = next;
  }
  for (auto it = outer.rbegin(); it != outer.rend(); ++it) edges.push_back(-*it);
  for (int i = 0; i <= inner_cells; ++i) edges.push_back(-inner + step0 * i);
  edges.back() = inner;
  for (double v : outer) edges.push_back(v);

  const std::size_t m = edges.size() - 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= m;
  std::vector<DensityCell> cells;
  cells.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> lo(n), hi(n);
    for (std::size_t k = 0; k < n; ++k) {
      lo[k] = edges[idx[k]];
      hi[k] = edges[idx[k] + 1];
    }
    cells.push_back({Box(Point(lo), Point(hi)), density});
    for (std::size_t k = n; k-- > 0;) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
  }
  return BaseMeasureND(n, {}, std::move(cells), {}, quadrature_order);
}

Scenario build_kmw(BaseMeasureND mu, Box domain, const KmwChecks& checks) {
  const std::size_t n = mu.dim();
  if (domain.dim() != n) throw InvalidArgument("domain dimension does not match the base measure");
  if (!mu.lines().empty()) throw InvalidArgument("kmw base measure takes atoms and cells only");
  const double tail = tail1_check(mu);
  if (!std::isfinite(tail) || !(tail > 0.0)) {
    throw InvalidArgument("base measure violates the tail condition (integral of 1/|x| is " + fmt(tail) + ")");
  }
  if (mu.affine_rank() < 2) throw InvalidArgument("support of the base measure lies in a line");
  Scenario s;
  s.name = "kmw";
  s.dim = n;
  s.basepoint = domain.center();
  s.notes.push_back("tail integral " + fmt(tail));
  double min_edge = kInf;
  for (std::size_t i = 0; i < n; ++i) min_edge = std::min(min_edge, domain.hi[i] - domain.lo[i]);
  const DoublingResult d = doubling_ratio(mu, domain, checks.doubling_samples, 1e-2 * min_edge, 0.5 * min_edge, checks.seed);
  s.transverse = std::isfinite(d.ratio) && d.used > 0 ? Tristate::Yes : Tristate::Unknown;
  s.notes.push_back("doubling ratio on the window " + fmt(d.ratio) + " (" + std::to_string(d.used) + " balls)");
  s.domain = std::move(domain);
  s.measure = std::make_shared<HyperplaneMeasure>(PositionDirection{std::move(mu), DirectionMeasure::uniform(), {}});
  return s;
}

Scenario build_beurling_ahlfors(BaseMeasure1D mu1d, Box domain, double cap_half_angle) {
  if (domain.dim() != 2) throw InvalidArgument("beurling-ahlfors scenario is planar");
  if (!(cap_half_angle > 0.0 && cap_half_angle <= 0.5 * kPi)) throw InvalidArgument("cap half-angle must lie in (0, pi/2]");
  for (const auto& a : mu1d.atoms()) {
    if (a.position >= domain.lo[0] && a.position <= domain.hi[0]) {
      throw InvalidArgument("atom of mu at " + fmt(a.position) + " lies inside the query window");
    }
  }
  LineMeasure axis{Point{0.0, 0.0}, Vec{1.0, 0.0}, std::move(mu1d)};
  Scenario s;
  s.name = "beurling_ahlfors";
  s.dim = 2;
  s.basepoint = domain.center();
  s.domain = std::move(domain);
  s.measure = std::make_shared<HyperplaneMeasure>(PositionDirection{
      BaseMeasureND(2, {}, {}, {std::move(axis)}),
      DirectionMeasure::cap(Vec{1.0, 0.0}, cap_half_angle, 2.0 * cap_half_angle), {}});
  s.transverse = Tristate::Yes;
  s.closed_form_metric = "f(t) - f(s) = mu((s, t]) on the real axis";
  return s;
}

BaseMeasure1D power_law_pieces(double exponent, double extent, int pieces, double innermost) {
  if (!(exponent > -1.0) || !(extent > innermost) || !(innermost > 0.0) || pieces < 1) {
    throw InvalidArgument("power law needs exponent > -1, 0 < innermost < extent, pieces >= 1");
  }
  const double p = exponent + 1.0;
  auto mass = [&](double a, double b) { return (std::pow(b, p) - std::pow(a, p)) / p; };
  std::vector<double> edges{innermost};
  const double ratio = std::pow(extent / innermost, 1.0 / pieces);
  for (int i = 1; i <= pieces; ++i) edges.push_back(i == pieces ? extent : innermost * std::pow(ratio, i));
  std::vector<DensityPiece> out;
  for (int i = pieces; i > 0; --i) {
    const double a = edges[i - 1], b = edges[i];
    out.push_back({-b, -a, mass(a, b) / (b - a)});
  }
  out.push_back({-innermost, innermost, 2.0 * mass(0.0, innermost) / (2.0 * innermost)});
  for (int i = 1; i <= pieces; ++i) {
    const double a = edges[i - 1], b = edges[i];
    out.push_back({a, b, mass(a, b) / (b - a)});
  }
  return BaseMeasure1D({}, std::move(out));
}

Scenario build_degenerate_family(double theta0, Box domain, BaseMeasureND mu) {
  if (!(theta0 > 0.0 && theta0 <= 0.5 * kPi)) throw InvalidArgument("theta0 must lie in (0, pi/2]");
  if (domain.dim() != 2 || mu.dim() != 2) throw InvalidArgument("degenerate family is planar");
  const double d = 0.5 / (2.0 * theta0);
  ArcSet arcs({{-theta0, theta0, d}, {0.5 * kPi - theta0, 0.5 * kPi + theta0, d}});
  Scenario s;
  s.name = "degenerate";
  s.dim = 2;
  s.basepoint = domain.center();
  s.domain = std::move(domain);
  s.measure = std::make_shared<HyperplaneMeasure>(PositionDirection{std::move(mu), DirectionMeasure::arcs(std::move(arcs)), {}});
  s.transverse = Tristate::Yes;
  s.notes.push_back("theta0 " + fmt(theta0));
  return s;
}

GridImage grid_export(const Scenario& s, std::size_t resolution, const Box& window, McOptions mc) {
  if (resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
  if (window.dim() != s.dim || !inside(s.domain, window)) throw InvalidArgument("grid window must lie inside the domain");
  const EmbeddingMap f = s.embedding(mc);
  GridImage g;
  g.dim = s.dim;
  g.resolution = resolution;
  g.window = window;
  std::size_t total = 1;
  for (std::size_t k = 0; k < s.dim; ++k) total *= resolution;
  std::vector<std::size_t> idx(s.dim, 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> x(s.dim);
    for (std::size_t k = 0; k < s.dim; ++k) {
      const double u = static_cast<double>(idx[k]) / static_cast<double>(resolution - 1);
      x[k] = idx[k] + 1 == resolution ? window.hi[k] : window.lo[k] + u * (window.hi[k] - window.lo[k]);
    }
    g.nodes.emplace_back(std::move(x));
    g.images.push_back(f(g.nodes.back()));
    for (std::size_t k = s.dim; k-- > 0;) {
      if (++idx[k] < resolution) break;
      idx[k] = 0;
    }
  }
  return g;
}

std::string grid_to_csv(const GridImage& g) {
  std::string out = std::to_string(g.dim) + "," + std::to_string(g.resolution);
  for (std::size_t k = 0; k < g.dim; ++k) out += "," + fmt(g.window.lo[k]);
  for (std::size_t k = 0; k < g.dim; ++k) out += "," + fmt(g.window.hi[k]);
  out += "\n";
  for (std::size_t c = 0; c < g.nodes.size(); ++c) {
    std::size_t rem = c;
    std::vector<std::size_t> idx(g.dim);
    for (std::size_t k = g.dim; k-- > 0;) {
      idx[k] = rem % g.resolution;
      rem /= g.resolution;
    }
    std::string row;
    for (std::size_t k = 0; k < g.dim; ++k) row += (k ? "," : "") + std::to_string(idx[k]);
    for (std::size_t k = 0; k < g.dim; ++k) row += "," + fmt(g.nodes[c][k]);
    for (std::size_t k = 0; k < g.dim; ++k) row += "," + fmt(g.images[c][k]);
    out += row + "\n";
  }
  return out;
}

namespace {

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double x = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') throw InvalidArgument("grid csv: bad number '" + cell + "'");
    v.push_back(x);
  }
  return v;
}

}  // namespace

GridImage grid_from_csv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("grid csv: empty input");
  const auto head = parse_row(line);
  if (head.size() < 2) throw InvalidArgument("grid csv: short header");
  GridImage g;
  g.dim = static_cast<std::size_t>(head[0]);
  g.resolution = static_cast<std::size_t>(head[1]);
  if (g.dim < 1 || head.size() != 2 + 2 * g.dim) throw InvalidArgument("grid csv: header does not match dimension");
  g.window = Box(Point(std::vector<double>(head.begin() + 2, head.begin() + 2 + g.dim)),
                 Point(std::vector<double>(head.begin() + 2 + g.dim, head.end())));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_row(line);
    if (row.size() != 3 * g.dim) throw InvalidArgument("grid csv: row has " + std::to_string(row.size()) + " fields");
    g.nodes.emplace_back(std::vector<double>(row.begin() + g.dim, row.begin() + 2 * g.dim));
    g.images.emplace_back(std::vector<double>(row.begin() + 2 * g.dim, row.end()));
  }
  std::size_t total = 1;
  for (std::size_t k = 0; k < g.dim; ++k) total *= g.resolution;
  if (g.nodes.size() != total) throw InvalidArgument("grid csv: node count does not match resolution");
  return g;
}

}  // namespace busemann
