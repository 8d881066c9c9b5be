#pragma once

// The target space Z = R^m with a selectable norm: vectors, closed balls,
// radial projections and approximate intersection points of ball families.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bairext {

enum class Norm { l2, linf };

Norm parse_norm(std::string_view text);
const char* norm_name(Norm norm) noexcept;

struct TargetVector {
  std::vector<double> coords;
  Norm norm = Norm::linf;

  TargetVector() = default;
  TargetVector(std::vector<double> c, Norm n);

  static TargetVector zero(std::size_t dim, Norm n);

  std::size_t dim() const noexcept { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }

  friend bool operator==(const TargetVector&, const TargetVector&) = default;
};

double norm(std::span<const double> coords, Norm n) noexcept;
double norm(const TargetVector& z) noexcept;
double distance(const TargetVector& a, const TargetVector& b) noexcept;

TargetVector operator-(const TargetVector& a, const TargetVector& b);
TargetVector operator+(const TargetVector& a, const TargetVector& b);
TargetVector operator*(double s, const TargetVector& a);

/// Radial projection onto the closed ball of radius r around the origin.
/// r must be >= 1 or +inf; +inf is the identity.
TargetVector radial_project(const TargetVector& z, double r);

struct TargetBall {
  TargetVector center;
  double radius = 0.0;
  bool closed = true;
};

/// Returns a point p with distance(p, ball.center) <= ball.radius + slack for
/// every ball, or nullopt when the slack-inflated intersection is empty.
///
/// linf: coordinate boxes are intersected exactly and the box center is
/// returned (the exact intersection is preferred when it is nonempty).
/// l2: cyclic projections from the first center, at most 10^4 sweeps. Throws
/// Error(undecided) when the iteration neither reaches feasibility nor finds
/// a pair of balls whose inflated intersection is empty.
///
/// An empty list denotes the whole space; the origin of dimension `dim` is
/// returned.
std::optional<TargetVector> ball_intersection_point(std::span<const TargetBall> balls,
                                                    double slack, std::size_t dim,
                                                    Norm n);

} // namespace bairext
