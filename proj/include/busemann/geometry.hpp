#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace busemann {

/// Base of every error raised by the library. The C API maps each subclass
/// onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument: dimension mismatch, non-finite input, violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The queried integral is ill-defined for this configuration
/// (an atom on the query segment, the basepoint on a hyperplane, ...).
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

/// The requested backend cannot serve this measure representation.
class UnsupportedBackend : public Error {
 public:
  using Error::Error;
};

/// A point or displacement in R^n. Coordinates are always finite.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::vector<double> coords);
  Vec(std::initializer_list<double> coords);

  static Vec zero(std::size_t n) { return Vec(std::vector<double>(n, 0.0)); }
  static Vec unit(std::size_t n, std::size_t axis);

  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  std::span<const double> coords() const { return c_; }
  const std::vector<double>& data() const { return c_; }

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double s);

  bool operator==(const Vec& o) const = default;

 private:
  std::vector<double> c_;
};

using Point = Vec;

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(Vec a, double s);
Vec operator*(double s, Vec a);
Vec operator-(Vec a);

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double distance(const Vec& a, const Vec& b);
Vec normalized(const Vec& a);
void require_same_dim(const Vec& a, const Vec& b, const char* what);

struct Segment {
  Point a;
  Point b;
  double length() const { return distance(a, b); }
};

/// {z : <z, normal> = offset}. The normal is stored canonically (first
/// nonzero coordinate positive), so (n, p) and (-n, -p) compare equal.
class Hyperplane {
 public:
  Hyperplane(Vec normal, double offset);

  /// Hyperplane through `a` orthogonal to `direction` (any nonzero length).
  static Hyperplane through(const Point& a, const Vec& direction);

  const Vec& normal() const { return normal_; }
  double offset() const { return offset_; }
  std::size_t dim() const { return normal_.dim(); }
  bool operator==(const Hyperplane& o) const = default;

 private:
  Vec normal_;
  double offset_;
};

/// Axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  Box() = default;
  Box(Point lo_, Point hi_);
  std::size_t dim() const { return lo.dim(); }
  bool contains(const Point& p) const;
  Point center() const;
  std::vector<Point> vertices() const;
};

struct Cube {
  Point center;
  double edge;

  Cube(Point c, double e);
  Box box() const;
};

double signed_gap(const Hyperplane& h, const Point& x);
bool hits_segment(const Hyperplane& h, const Segment& s);
/// Smaller angle between the line spanned by u and the hyperplane.
double alpha(const Vec& u, const Hyperplane& h);
/// Unit normal of h pointing away from the halfspace containing o.
Vec oriented_normal(const Hyperplane& h, const Point& o);
std::vector<Point> cube_vertices(const Cube& q);

/// Wraps an angle into [0, pi).
double wrap_pi(double phi);

}  // namespace busemann
