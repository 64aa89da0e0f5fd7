#include "busemann/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace busemann {

namespace {

void check_finite(const std::vector<double>& c) {
  for (double v : c) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite coordinate");
  }
}

}  // namespace

Vec::Vec(std::vector<double> coords) : c_(std::move(coords)) { check_finite(c_); }

Vec::Vec(std::initializer_list<double> coords) : c_(coords) { check_finite(c_); }

Vec Vec::unit(std::size_t n, std::size_t axis) {
  std::vector<double> c(n, 0.0);
  c.at(axis) = 1.0;
  return Vec(std::move(c));
}

Vec& Vec::operator+=(const Vec& o) {
  require_same_dim(*this, o, "vector addition");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  require_same_dim(*this, o, "vector subtraction");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(Vec a, double s) { return a *= s; }
Vec operator*(double s, Vec a) { return a *= s; }
Vec operator-(Vec a) { return a *= -1.0; }

void require_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument(std::string("dimension mismatch in ") + what + ": " +
                          std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

double dot(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) {
  double s = 0.0;
  for (double v : a.coords()) s += v * v;
  return std::sqrt(s);
}

double distance(const Vec& a, const Vec& b) { return norm(a - b); }

Vec normalized(const Vec& a) {
  const double l = norm(a);
  if (l == 0.0) throw InvalidArgument("cannot normalize the zero vector");
  return a * (1.0 / l);
}

Hyperplane::Hyperplane(Vec normal, double offset) : normal_(std::move(normal)), offset_(offset) {
  if (!std::isfinite(offset_)) throw InvalidArgument("non-finite hyperplane offset");
  if (std::abs(norm(normal_) - 1.0) > 1e-12) throw InvalidArgument("hyperplane normal is not a unit vector");
  for (double v : normal_.coords()) {
    if (v == 0.0) continue;
    if (v < 0.0) {
      normal_ *= -1.0;
      offset_ = -offset_;
    }
    break;
  }
}

Hyperplane Hyperplane::through(const Point& a, const Vec& direction) {
  Vec n = normalized(direction);
  const double p = dot(a, n);
  return Hyperplane(std::move(n), p);
}

Box::Box(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  require_same_dim(lo, hi, "box");
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    if (!(lo[i] <= hi[i])) throw InvalidArgument("box lower corner exceeds upper corner");
  }
}

bool Box::contains(const Point& p) const {
  require_same_dim(lo, p, "box containment");
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  }
  return true;
}

Point Box::center() const { return (lo + hi) * 0.5; }

std::vector<Point> Box::vertices() const {
  const std::size_t n = dim();
  std::vector<Point> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> i) & 1U ? hi[i] : lo[i];
    out.emplace_back(std::move(c));
  }
  return out;
}

Cube::Cube(Point c, double e) : center(std::move(c)), edge(e) {
  if (!(edge > 0.0) || !std::isfinite(edge)) throw InvalidArgument("cube edge must be positive");
}

Box Cube::box() const {
  const Vec half(std::vector<double>(center.dim(), edge / 2));
  return Box(center - half, center + half);
}

double signed_gap(const Hyperplane& h, const Point& x) { return dot(x, h.normal()) - h.offset(); }

bool hits_segment(const Hyperplane& h, const Segment& s) {
  // Sign comparison rather than the raw product, which can underflow.
  const double ga = signed_gap(h, s.a);
  const double gb = signed_gap(h, s.b);
  return ga == 0.0 || gb == 0.0 || (ga < 0.0) != (gb < 0.0);
}

double alpha(const Vec& u, const Hyperplane& h) {
  const double c = dot(normalized(u), h.normal());
  return std::asin(std::clamp(std::abs(c), 0.0, 1.0));
}

Vec oriented_normal(const Hyperplane& h, const Point& o) {
  const double g = signed_gap(h, o);
  if (g == 0.0) throw DegenerateConfiguration("basepoint lies on the hyperplane");
  return g < 0.0 ? h.normal() : -h.normal();
}

std::vector<Point> cube_vertices(const Cube& q) { return q.box().vertices(); }

double wrap_pi(double phi) {
  double r = std::fmod(phi, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  if (r >= std::numbers::pi) r = 0.0;
  return r;
}

}  // namespace busemann
