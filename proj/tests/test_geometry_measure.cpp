#include <cmath>

#include "busemann/evaluators.hpp"
#include "busemann/geometry.hpp"
#include "busemann/measure.hpp"
#include "busemann/rng.hpp"
#include "doctest.h"

using namespace busemann;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("vector arithmetic and dimension checks") {
  const Vec a{1.0, 2.0, 2.0};
  CHECK(norm(a) == doctest::Approx(3.0));
  CHECK(dot(a, Vec{1.0, 0.0, 0.0}) == 1.0);
  CHECK(distance(a, a) == 0.0);
  CHECK((a - a) == Vec::zero(3));
  CHECK_THROWS_AS(dot(a, Vec{1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(Vec({1.0, std::nan("")}), InvalidArgument);
  CHECK_THROWS_AS(normalized(Vec::zero(2)), InvalidArgument);
}

TEST_CASE("hyperplanes compare equal up to orientation") {
  const Hyperplane h(Vec{0.0, 1.0}, 0.5);
  const Hyperplane g(Vec{0.0, -1.0}, -0.5);
  CHECK(h == g);
  CHECK(g.normal()[1] == 1.0);
  CHECK(g.offset() == 0.5);
  CHECK_THROWS_AS(Hyperplane(Vec{0.0, 2.0}, 1.0), InvalidArgument);
  CHECK(Hyperplane::through(Point{1.0, 1.0}, Vec{0.0, -3.0}) == Hyperplane(Vec{0.0, 1.0}, 1.0));
}

TEST_CASE("angle between a line and a hyperplane") {
  const Hyperplane h = Hyperplane::through(Point{0.0, 0.0}, Vec{1.0, 0.0});
  CHECK(alpha(Vec{1.0, 0.0}, h) == doctest::Approx(kPi / 2));
  CHECK(alpha(Vec{0.0, 3.0}, h) == doctest::Approx(0.0));
  CHECK(alpha(Vec{1.0, 1.0}, h) == doctest::Approx(kPi / 4));
  CHECK(alpha(Vec{-1.0, 1.0}, h) == doctest::Approx(kPi / 4));
}

TEST_CASE("oriented normal points away from the basepoint") {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const Vec v{rng.normal(), rng.normal(), rng.normal()};
    const Hyperplane h(normalized(v), rng.uniform(-1, 1));
    const Point o{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    if (std::abs(signed_gap(h, o)) < 1e-9) continue;
    const Vec n = oriented_normal(h, o);
    CHECK(norm(n) == doctest::Approx(1.0));
    // moving from o along n crosses towards H's far side: o sits on the negative side
    CHECK(dot(o, n) - h.offset() * dot(h.normal(), n) < 0.0);
  }
}

TEST_CASE("segment hits and cube vertices") {
  const Hyperplane h(Vec{1.0, 0.0}, 0.5);
  CHECK(hits_segment(h, {Point{0.0, 0.0}, Point{1.0, 0.0}}));
  CHECK_FALSE(hits_segment(h, {Point{0.0, 0.0}, Point{0.4, 3.0}}));
  const auto verts = cube_vertices(Cube(Point{0.0, 0.0, 0.0}, 2.0));
  CHECK(verts.size() == 8);
  for (const auto& v : verts) CHECK(std::abs(v[2]) == 1.0);
  CHECK(wrap_pi(-0.25) == doctest::Approx(kPi - 0.25));
  CHECK(wrap_pi(kPi + 0.5) == doctest::Approx(0.5));
}

TEST_CASE("one-dimensional masses are additive with half-open intervals") {
  const BaseMeasure1D m({{0.5, 2.0}, {-1.0, 0.25}}, {{-2.0, 0.0, 0.5}, {0.0, 3.0, 1.5}});
  CHECK(m.mass(0.0, 0.5) == doctest::Approx(1.5 * 0.5 + 2.0));
  CHECK(m.mass(0.5, 0.6) == doctest::Approx(0.15));
  CHECK(m.mass(-1.0, -1.0) == 0.0);
  CHECK(m.total_mass() == doctest::Approx(1.0 + 4.5 + 2.25));
  CHECK_THROWS_AS(m.mass(1.0, 0.0), InvalidArgument);
  Rng rng(9);
  for (int k = 0; k < 500; ++k) {
    double s = rng.uniform(-3, 4), t = rng.uniform(-3, 4), u = rng.uniform(-3, 4);
    if (s > t) std::swap(s, t);
    if (t > u) std::swap(t, u);
    if (s > t) std::swap(s, t);
    if (k % 7 == 0 && s <= 0.5 && u >= 0.5) t = 0.5;  // middle point on the atom
    CHECK(m.mass(s, t) + m.mass(t, u) == doctest::Approx(m.mass(s, u)).epsilon(1e-12));
    CHECK(m.cumulative(t) - m.cumulative(s) == doctest::Approx(m.mass(s, t)).epsilon(1e-12));
  }
  const auto leb = BaseMeasure1D::lebesgue(2.0);
  CHECK(leb.mass(-1.0, 3.0) == doctest::Approx(8.0));
  CHECK(leb.is_full_line_constant());
  CHECK(std::isinf(leb.total_mass()));
}

TEST_CASE("n-dimensional base measures") {
  const auto box = lebesgue_box(Box(Point{0.0, 0.0}, Point{2.0, 1.0}), 4, 3.0);
  CHECK(box.total_mass() == doctest::Approx(6.0));
  CHECK(box.affine_rank() == 2);
  double resolved = 0.0;
  for (double w : box.resolved().weights) resolved += w;
  CHECK(resolved == doctest::Approx(6.0));

  const BaseMeasureND line(2, {{Point{0.0, 0.0}, 1.0}, {Point{1.0, 1.0}, 1.0}, {Point{2.0, 2.0}, 1.0}});
  CHECK(line.affine_rank() == 1);
  CHECK(line.ball_mass(Point{0.0, 0.0}, 1.0) == doctest::Approx(1.0));
  CHECK(line.ball_mass(Point{0.0, 0.0}, 1.5) == doctest::Approx(2.0));

  const BaseMeasureND origin(2, {{Point{0.0, 0.0}, 1.0}});
  CHECK_THROWS_AS(tail1_check(origin), DegenerateConfiguration);
  const BaseMeasureND far(2, {{Point{3.0, 4.0}, 2.0}});
  CHECK(tail1_check(far) == doctest::Approx(0.4));
}

TEST_CASE("arc sets reduce modulo pi") {
  const ArcSet a({{-0.2, 0.3, 2.0}, {kPi - 0.1, kPi + 0.1, 1.0}});
  CHECK(a.mass() == doctest::Approx(0.5 * 2.0 + 0.2 * 1.0));
  CHECK(a.density_at(0.05) == doctest::Approx(3.0));
  CHECK(a.density_at(kPi - 0.15) == doctest::Approx(2.0));
  CHECK(a.density_at(1.0) == 0.0);
  const ArcSet r = a.restricted(0.0, 0.05);
  CHECK(r.mass() == doctest::Approx(0.1 * 3.0));

  CHECK(DirectionMeasure::uniform().total_mass(3) == 1.0);
  CHECK(DirectionMeasure::uniform().to_arcs().mass() == doctest::Approx(1.0));
  const auto cap = DirectionMeasure::cap(Vec{1.0, 0.0}, 0.3, 0.6);
  CHECK(cap.total_mass(2) == doctest::Approx(0.6));
  CHECK(cap.to_arcs().density_at(0.1) == doctest::Approx(1.0));
  CHECK(cap.to_arcs().density_at(0.4) == 0.0);
}

TEST_CASE("split streams are deterministic and distinct") {
  Rng a = Rng(5).split(3), b = Rng(5).split(3), c = Rng(5).split(4);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
}

TEST_CASE("translation moves every integral with the measure") {
  const BaseMeasureND mu(2, {{Point{0.2, 0.1}, 1.0}, {Point{-0.5, 0.7}, 2.0}, {Point{1.0, -0.4}, 0.5}});
  const HyperplaneMeasure nu(PositionDirection{mu, DirectionMeasure::uniform(), {}});
  const Vec shift{3.0, -1.5};
  const HyperplaneMeasure moved = nu.translated(shift);
  Rng rng(21);
  for (int k = 0; k < 50; ++k) {
    const Point x{rng.uniform(-1, 1), rng.uniform(-1, 1)}, y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double d0 = seg_mass(nu, x, y, Backend::ClosedForm).value;
    const double d1 = seg_mass(moved, x + shift, y + shift, Backend::ClosedForm).value;
    CHECK(d1 == doctest::Approx(d0).epsilon(1e-10));
  }
}
