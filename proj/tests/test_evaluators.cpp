#include <cmath>

#include "busemann/evaluators.hpp"
#include "busemann/rng.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace busemann;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<AtomND> random_atoms(std::size_t n, std::size_t count, std::uint64_t seed) {
  Rng r(seed);
  std::vector<AtomND> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> c(n);
    for (auto& x : c) x = r.uniform(-1.5, 1.5);
    out.push_back({Point(c), r.uniform(0.5, 1.5)});
  }
  return out;
}

std::vector<oracle::Atom> to_oracle(const std::vector<AtomND>& atoms) {
  std::vector<oracle::Atom> out;
  for (const auto& a : atoms) out.push_back({a.position.data(), a.weight});
  return out;
}

Point random_point(Rng& r, std::size_t n, double h = 1.0) {
  std::vector<double> c(n);
  for (auto& x : c) x = r.uniform(-h, h);
  return Point(c);
}

const auto uniform_density = [](double) { return 1.0 / kPi; };

}  // namespace

TEST_CASE("planar atoms: closed form and arc integration match angle quadrature") {
  const auto atoms = random_atoms(2, 6, 11);
  const HyperplaneMeasure nu(PositionDirection{BaseMeasureND(2, atoms), DirectionMeasure::uniform(), {}});
  const auto ref_atoms = to_oracle(atoms);
  Rng r(4);
  for (int k = 0; k < 6; ++k) {
    const Point x = random_point(r, 2), y = random_point(r, 2), o = random_point(r, 2, 0.3);
    const double tau = 0.2 * k;
    const auto ref = oracle::planar(ref_atoms, uniform_density, x.data(), y.data(), o.data(), tau);
    for (Backend b : {Backend::ClosedForm, Backend::Exact2D}) {
      CAPTURE(backend_name(b));
      CHECK(seg_mass(nu, x, y, b).value == doctest::Approx(ref.seg).epsilon(1e-4));
      CHECK(transversal_integral(nu, x, y, b).value == doctest::Approx(ref.trans).epsilon(1e-4));
      CHECK(restricted_mass(nu, x, y, tau, b).value == doctest::Approx(ref.restricted).epsilon(1e-4));
      const auto f = embed(nu, o, x, b).value;
      CHECK(f[0] == doctest::Approx(ref.f[0]).epsilon(1e-4).scale(1.0));
      CHECK(f[1] == doctest::Approx(ref.f[1]).epsilon(1e-4).scale(1.0));
    }
  }
  const Box box(Point{-0.4, -0.2}, Point{0.3, 0.5});
  const double ref_box = oracle::planar_box(ref_atoms, uniform_density, box.lo.data(), box.hi.data());
  CHECK(box_mass(nu, box, Backend::ClosedForm).value == doctest::Approx(ref_box).epsilon(1e-4));
  CHECK(box_mass(nu, box, Backend::Exact2D).value == doctest::Approx(ref_box).epsilon(1e-4));
}

TEST_CASE("planar atoms with a direction cap") {
  const auto atoms = random_atoms(2, 5, 12);
  const double axis_angle = 0.9, half = 0.5, mass = 2.0;
  const HyperplaneMeasure nu(PositionDirection{
      BaseMeasureND(2, atoms), DirectionMeasure::cap(Vec{std::cos(axis_angle), std::sin(axis_angle)}, half, mass), {}});
  auto dens = [&](double phi) {
    double d = std::remainder(phi - axis_angle, kPi);
    return std::abs(d) <= half ? mass / (2 * half) : 0.0;
  };
  const auto ref_atoms = to_oracle(atoms);
  Rng r(5);
  for (int k = 0; k < 5; ++k) {
    const Point x = random_point(r, 2), y = random_point(r, 2), o = random_point(r, 2, 0.3);
    const auto ref = oracle::planar(ref_atoms, dens, x.data(), y.data(), o.data(), 0.3);
    CHECK(seg_mass(nu, x, y, Backend::Exact2D).value == doctest::Approx(ref.seg).epsilon(1e-4));
    CHECK(transversal_integral(nu, x, y, Backend::Exact2D).value == doctest::Approx(ref.trans).epsilon(1e-4));
    CHECK(restricted_mass(nu, x, y, 0.3, Backend::Exact2D).value == doctest::Approx(ref.restricted).epsilon(1e-4));
    const auto f = embed(nu, o, x, Backend::Exact2D).value;
    CHECK(f[0] == doctest::Approx(ref.f[0]).epsilon(1e-4).scale(1.0));
    CHECK(f[1] == doctest::Approx(ref.f[1]).epsilon(1e-4).scale(1.0));
  }
  CHECK_THROWS_AS(seg_mass(nu, Point{0.0, 0.0}, Point{1.0, 0.0}, Backend::ClosedForm), UnsupportedBackend);
}

TEST_CASE("measures on a line match their discretization") {
  const Vec dir = normalized(Vec{1.0, 0.3});
  const Point anchor{0.1, -0.3};
  const BaseMeasure1D m1({{0.2, 0.7}}, {{-2.0, 1.5, 0.8}});
  const HyperplaneMeasure nu(PositionDirection{BaseMeasureND(2, {}, {}, {LineMeasure{anchor, dir, m1}}),
                                               DirectionMeasure::cap(Vec{0.2, 0.9798}, 0.6, 1.0), {}});
  std::vector<oracle::Atom> ref_atoms{{(anchor + 0.2 * dir).data(), 0.7}};
  const int cells = 3000;
  const double h = 3.5 / cells;
  for (int i = 0; i < cells; ++i) ref_atoms.push_back({(anchor + (-2.0 + (i + 0.5) * h) * dir).data(), 0.8 * h});
  const double axis = std::atan2(0.9798, 0.2);
  auto dens = [&](double phi) { return std::abs(std::remainder(phi - axis, kPi)) <= 0.6 ? 1.0 / 1.2 : 0.0; };
  const Point x{0.9, 0.3}, y{-0.2, 0.7}, o{0.05, 0.05};
  const auto ref = oracle::planar(ref_atoms, dens, x.data(), y.data(), o.data(), 0.3, 4000);
  CHECK(seg_mass(nu, x, y, Backend::Exact2D).value == doctest::Approx(ref.seg).epsilon(2e-3));
  CHECK(transversal_integral(nu, x, y, Backend::Exact2D).value == doctest::Approx(ref.trans).epsilon(2e-3));
  CHECK(restricted_mass(nu, x, y, 0.3, Backend::Exact2D).value == doctest::Approx(ref.restricted).epsilon(2e-3));
  const auto f = embed(nu, o, x, Backend::Exact2D).value;
  CHECK(f[0] == doctest::Approx(ref.f[0]).epsilon(2e-3).scale(1.0));
  CHECK(f[1] == doctest::Approx(ref.f[1]).epsilon(2e-3).scale(1.0));
}

TEST_CASE("atoms in higher dimensions agree with an independent sampler") {
  for (std::size_t n : {3u, 4u, 6u}) {
    CAPTURE(n);
    const auto atoms = random_atoms(n, 5, 20 + n);
    const HyperplaneMeasure nu(PositionDirection{BaseMeasureND(n, atoms), DirectionMeasure::uniform(), {}});
    Rng r(n);
    const Point x = random_point(r, n), y = random_point(r, n), o = random_point(r, n, 0.3);
    const auto ref = oracle::uniform_mc(to_oracle(atoms), x.data(), y.data(), o.data(), 400000, 99 + n);
    CHECK(std::abs(seg_mass(nu, x, y, Backend::ClosedForm).value - ref.seg) <= 4.5 * ref.seg_se);
    CHECK(std::abs(transversal_integral(nu, x, y, Backend::ClosedForm).value - ref.trans) <= 4.5 * ref.trans_se);
    const auto f = embed(nu, o, x, Backend::ClosedForm).value;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(f[i] - ref.f[i]) <= 4.5 * ref.f_se[i] + 1e-12);
  }
}

TEST_CASE("sphere moments") {
  CHECK(mean_abs_coordinate(2) == doctest::Approx(2.0 / kPi));
  CHECK(mean_abs_coordinate(3) == doctest::Approx(0.5));
  for (std::size_t n : {4u, 7u}) {
    CHECK(mean_abs_coordinate(n) == doctest::Approx(oracle::mean_abs_coordinate_mc(n, 400000, n)).epsilon(5e-3));
  }
  CHECK(mean_planar_radius(2) == doctest::Approx(1.0));
  CHECK(kmw_constant_analytic(2) == doctest::Approx(1.0 / kPi));
}

TEST_CASE("crofton moments in closed form") {
  for (std::size_t n : {2u, 3u, 5u}) {
    const double c = 1.7;
    const HyperplaneMeasure nu(OffsetDirection{n, DirectionMeasure::uniform(), BaseMeasure1D::lebesgue(c)});
    Rng r(n);
    for (int k = 0; k < 20; ++k) {
      const Point x = random_point(r, n), y = random_point(r, n), o = random_point(r, n);
      const double len = distance(x, y);
      CHECK(seg_mass(nu, x, y, Backend::ClosedForm).value == doctest::Approx(c * mean_abs_coordinate(n) * len));
      CHECK(transversal_integral(nu, x, y, Backend::ClosedForm).value == doctest::Approx(c * len / n));
      const auto f = embed(nu, o, x, Backend::ClosedForm).value;
      for (std::size_t i = 0; i < n; ++i) CHECK(f[i] == doctest::Approx(c * (x[i] - o[i]) / n));
    }
  }
  const HyperplaneMeasure plane(OffsetDirection{2, DirectionMeasure::uniform(), BaseMeasure1D::lebesgue(1.0)});
  const Point x{0.2, -0.1}, y{0.7, 0.4}, o{0.0, 0.0};
  for (Backend b : {Backend::ClosedForm, Backend::Exact2D}) {
    CHECK(seg_mass(plane, x, y, b).value == doctest::Approx(2.0 / kPi * distance(x, y)).epsilon(1e-12));
    CHECK(restricted_mass(plane, x, y, 0.4, b).value ==
          doctest::Approx(2.0 / kPi * distance(x, y) * std::cos(0.4)).epsilon(1e-12));
  }
}

TEST_CASE("identity and Lipschitz bounds hold on random pairs") {
  const auto atoms = random_atoms(2, 8, 31);
  const HyperplaneMeasure pd(PositionDirection{BaseMeasureND(2, atoms), DirectionMeasure::uniform(), {}});
  const HyperplaneMeasure cap(
      PositionDirection{BaseMeasureND(2, atoms), DirectionMeasure::cap(Vec{0.0, 1.0}, 0.7, 1.0), {}});
  const auto atoms3 = random_atoms(3, 8, 32);
  const HyperplaneMeasure pd3(PositionDirection{BaseMeasureND(3, atoms3), DirectionMeasure::uniform(), {}});
  struct Case {
    const HyperplaneMeasure* nu;
    Backend b;
  };
  for (const Case& c : {Case{&pd, Backend::ClosedForm}, Case{&pd, Backend::Exact2D}, Case{&cap, Backend::Exact2D},
                        Case{&pd3, Backend::ClosedForm}}) {
    const std::size_t n = c.nu->dim();
    Rng r(7);
    const Point o = random_point(r, n, 0.1);
    for (int k = 0; k < 200; ++k) {
      const Point x = random_point(r, n), y = random_point(r, n);
      const Vec fx = embed(*c.nu, o, x, c.b).value, fy = embed(*c.nu, o, y, c.b).value;
      const double t = transversal_integral(*c.nu, x, y, c.b).value;
      const double d = seg_mass(*c.nu, x, y, c.b).value;
      const double lhs = dot(fx - fy, x - y), rhs = distance(x, y) * t;
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
      CHECK(t - 1e-12 <= norm(fx - fy));
      CHECK(norm(fx - fy) <= d + 1e-12);
    }
  }
}

TEST_CASE("monte carlo estimates are seeded and unbiased") {
  const auto atoms = random_atoms(2, 4, 41);
  const HyperplaneMeasure nu(PositionDirection{BaseMeasureND(2, atoms), DirectionMeasure::uniform(), {}});
  const Point x{0.3, 0.2}, y{-0.5, 0.9};
  const McOptions mc{200000, 5};
  const Estimate a = seg_mass(nu, x, y, Backend::MonteCarlo, mc);
  const Estimate b = seg_mass(nu, x, y, Backend::MonteCarlo, mc);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.std_error > 0.0);
  CHECK(std::abs(a.value - seg_mass(nu, x, y, Backend::ClosedForm).value) <= 4 * a.std_error);
  const Estimate c = seg_mass(nu, x, y, Backend::MonteCarlo, {200000, 6});
  CHECK(c.value != a.value);
}

TEST_CASE("batched monte carlo agrees with the exact backends") {
  const Point x{0.3, 0.2, -0.1}, y{-0.5, 0.9, 0.4};
  const Box box(Point{-0.5, -0.5, -0.5}, Point{0.5, 0.5, 0.5});
  const std::vector<Query> qs{SegMassQuery{x, y}, TransversalQuery{x, y}, RestrictedQuery{x, y, 0.4},
                              BoxMassQuery{box}, EmbedQuery{y, x}};
  // offset measures draw normals only, so a batch reproduces single queries exactly
  const HyperplaneMeasure od(OffsetDirection{3, DirectionMeasure::uniform(), BaseMeasure1D::lebesgue(1.0)});
  const auto batch = mc_estimate_batch(od, qs, 5000, 8);
  REQUIRE(batch.size() == qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const McResult one = mc_estimate(od, qs[i], 5000, 8);
    CHECK(batch[i].value == one.value);
    CHECK(batch[i].samples == 5000);
  }

  // far atoms dominate the mass; draws are restricted to hyperplanes near the queries
  auto atoms = random_atoms(3, 5, 43);
  for (const auto& a : random_atoms(3, 40, 44)) atoms.push_back({a.position * 30.0, 50.0 * a.weight});
  const HyperplaneMeasure pd(PositionDirection{BaseMeasureND(3, atoms), DirectionMeasure::uniform(), {}});
  const auto est = mc_estimate_batch(pd, qs, 40000, 9);
  const Backend b = Backend::ClosedForm;
  const std::vector<double> exact{seg_mass(pd, x, y, b).value, transversal_integral(pd, x, y, b).value};
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(est[i].value[0] - exact[i]) <= 4 * est[i].std_error[0]);
  }
  const Vec f = embed(pd, y, x, b).value;
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(est[4].value[k] - f[k]) <= 4 * est[4].std_error[k]);

  // planar caps: the normal window of each atom is intersected with the cap
  std::vector<AtomND> planar = random_atoms(2, 4, 45);
  for (const auto& a : random_atoms(2, 300, 46)) planar.push_back({a.position * 40.0, 20.0 * a.weight});
  const HyperplaneMeasure capped(
      PositionDirection{BaseMeasureND(2, planar), DirectionMeasure::cap(Vec{0.0, 1.0}, 0.2, 1.0), {}});
  const Point p{0.3, 0.1}, o{0.0, 0.0};
  const McResult m = mc_estimate(capped, EmbedQuery{o, p}, 20000, 10);
  const Vec g = embed(capped, o, p, Backend::Exact2D).value;
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(m.std_error[k] > 0.0);
    CHECK(std::abs(m.value[k] - g[k]) <= 4 * m.std_error[k]);
  }
}

TEST_CASE("sampled measures answer through monte carlo only") {
  SampledMeasure s{2,
                   [](Rng& rng) {
                     const double phi = rng.uniform(0.0, kPi);
                     return WeightedHyperplane{Hyperplane(Vec{std::cos(phi), std::sin(phi)}, rng.uniform(-3, 3)), 6.0};
                   },
                   Box(Point{-1.0, -1.0}, Point{1.0, 1.0})};
  const HyperplaneMeasure nu(s);
  CHECK_FALSE(supports(nu, Backend::ClosedForm));
  const Point x{-0.5, 0.0}, y{0.5, 0.0};
  const Estimate e = seg_mass(nu, x, y, Backend::MonteCarlo, {400000, 3});
  CHECK(std::abs(e.value - 2.0 / kPi) <= 4 * e.std_error);
  CHECK_THROWS_AS(seg_mass(nu, x, Point{2.0, 0.0}, Backend::MonteCarlo), InvalidArgument);
  CHECK_THROWS_AS(seg_mass(nu, x, y, Backend::ClosedForm), UnsupportedBackend);
}

TEST_CASE("degenerate and invalid queries") {
  const HyperplaneMeasure nu(
      PositionDirection{BaseMeasureND(2, {{Point{0.0, 0.0}, 1.0}}), DirectionMeasure::uniform(), {}});
  CHECK_THROWS_AS(seg_mass(nu, Point{-1.0, 0.0}, Point{1.0, 0.0}, Backend::ClosedForm), DegenerateConfiguration);
  CHECK_THROWS_AS(restricted_mass(nu, Point{-1.0, 1.0}, Point{1.0, 1.0}, 2.0, Backend::ClosedForm), InvalidArgument);
  CHECK_THROWS_AS(seg_mass(nu, Point{0.0, 1.0}, Point{1.0, 1.0, 0.0}, Backend::ClosedForm), InvalidArgument);
  CHECK(seg_mass(nu, Point{0.3, 1.0}, Point{0.3, 1.0}, Backend::ClosedForm).value == 0.0);
  const auto f = embed(nu, Point{0.5, 0.5}, Point{0.5, 0.5}, Backend::ClosedForm).value;
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.0);
  const HyperplaneMeasure lebesgue_offsets(
      PositionDirection{BaseMeasureND(2, {}, {}, {LineMeasure{Point{0.0, 0.0}, Vec{1.0, 0.0}, BaseMeasure1D::lebesgue()}}),
                        DirectionMeasure::uniform(), {}});
  CHECK_THROWS_AS(seg_mass(lebesgue_offsets, Point{0.0, 1.0}, Point{1.0, 1.0}, Backend::MonteCarlo), UnsupportedBackend);
}

TEST_CASE("calibration of the kernel constant") {
  const KmwConstant small = calibrate_kmw_constant(2, 10, 1);
  CHECK(small.low_sample_warning);
  CHECK_FALSE(small.independence_checked);
  const KmwConstant a = calibrate_kmw_constant(2, 300000, 8);
  const KmwConstant b = calibrate_kmw_constant(2, 300000, 8);
  CHECK(a.value == b.value);
  CHECK(a.half_width == b.half_width);
  CHECK(a.provenance == KmwConstant::Provenance::Oracle);
  CHECK(a.consistent);
  CHECK(std::abs(a.value - 1.0 / kPi) <= 4 * a.std_error);
  CHECK(a.fits.size() == 3);
}
