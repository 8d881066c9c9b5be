#include "bairext/normed_target.hpp"

#include "bairext/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bairext {

Norm parse_norm(std::string_view text) {
  if (text == "l2") return Norm::l2;
  if (text == "linf") return Norm::linf;
  throw Error(ErrorCode::config, "unknown norm '" + std::string(text) + "' (expected l2|linf)");
}

const char* norm_name(Norm n) noexcept { return n == Norm::l2 ? "l2" : "linf"; }

TargetVector::TargetVector(std::vector<double> c, Norm n) : coords(std::move(c)), norm(n) {
  if (coords.empty()) throw Error(ErrorCode::invalid_input, "target vector must have m >= 1");
  for (double v : coords)
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_input, "target vector has a non-finite coordinate");
}

TargetVector TargetVector::zero(std::size_t dim, Norm n) {
  return TargetVector(std::vector<double>(dim, 0.0), n);
}

double norm(std::span<const double> coords, Norm n) noexcept {
  if (n == Norm::linf) {
    double m = 0.0;
    for (double v : coords) m = std::max(m, std::abs(v));
    return m;
  }
  // hypot chain keeps (3,4) -> 5 exact and avoids overflow
  double acc = 0.0;
  for (double v : coords) acc = std::hypot(acc, v);
  return acc;
}

double norm(const TargetVector& z) noexcept { return norm(z.coords, z.norm); }

double distance(const TargetVector& a, const TargetVector& b) noexcept {
  if (a.norm == Norm::linf) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.coords.size(); ++i) m = std::max(m, std::abs(a.coords[i] - b.coords[i]));
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) acc = std::hypot(acc, a.coords[i] - b.coords[i]);
  return acc;
}

TargetVector operator-(const TargetVector& a, const TargetVector& b) {
  TargetVector r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
  return r;
}

TargetVector operator+(const TargetVector& a, const TargetVector& b) {
  TargetVector r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
  return r;
}

TargetVector operator*(double s, const TargetVector& a) {
  TargetVector r = a;
  for (double& v : r.coords) v *= s;
  return r;
}

TargetVector radial_project(const TargetVector& z, double r) {
  if (std::isinf(r)) return z;
  const double nz = norm(z);
  if (nz <= r) return z;
  TargetVector out = z;
  for (double& v : out.coords) v = r * v / nz;
  // rounding may leave the result a hair outside the ball; pull it back in
  for (int i = 0; i < 16 && norm(out) > r; ++i)
    for (double& v : out.coords) v = std::nextafter(v, 0.0);
  return out;
}

namespace {

std::optional<TargetVector> linf_intersection(std::span<const TargetBall> balls, double slack,
                                              std::size_t dim) {
  auto box_center = [&](double inflate) -> std::optional<std::vector<double>> {
    std::vector<double> lo(dim, -std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, std::numeric_limits<double>::infinity());
    for (const TargetBall& b : balls)
      for (std::size_t i = 0; i < dim; ++i) {
        lo[i] = std::max(lo[i], b.center.coords[i] - (b.radius + inflate));
        hi[i] = std::min(hi[i], b.center.coords[i] + (b.radius + inflate));
      }
    std::vector<double> c(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (lo[i] > hi[i]) return std::nullopt;
      c[i] = lo[i] + (hi[i] - lo[i]) / 2.0;
      c[i] = std::clamp(c[i], lo[i], hi[i]);
    }
    return c;
  };
  if (auto c = box_center(0.0)) return TargetVector(std::move(*c), Norm::linf);
  if (slack > 0.0)
    if (auto c = box_center(slack)) return TargetVector(std::move(*c), Norm::linf);
  return std::nullopt;
}

std::optional<TargetVector> l2_intersection(std::span<const TargetBall> balls, double slack) {
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (std::size_t j = i + 1; j < balls.size(); ++j)
      if (distance(balls[i].center, balls[j].center) > balls[i].radius + balls[j].radius + 2.0 * slack)
        return std::nullopt;

  auto feasible = [&](const TargetVector& p) {
    return std::all_of(balls.begin(), balls.end(), [&](const TargetBall& b) {
      return distance(p, b.center) <= b.radius + slack;
    });
  };

  TargetVector p = balls.front().center;
  constexpr int max_sweeps = 10000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (feasible(p)) return p;
    for (const TargetBall& b : balls) {
      const double d = distance(p, b.center);
      if (d > b.radius) p = b.center + (b.radius / d) * (p - b.center);
    }
  }
  if (feasible(p)) return p;
  throw Error(ErrorCode::undecided,
              "l2 ball intersection undecided after 10000 sweeps; shrink the cover or raise k");
}

} // namespace

std::optional<TargetVector> ball_intersection_point(std::span<const TargetBall> balls,
                                                    double slack, std::size_t dim, Norm n) {
  if (balls.empty()) return TargetVector::zero(dim, n);
  for (const TargetBall& b : balls)
    if (b.center.norm != n || b.center.dim() != dim)
      throw Error(ErrorCode::invalid_input, "ball family mixes norms or dimensions");
  return n == Norm::linf ? linf_intersection(balls, slack, dim) : l2_intersection(balls, slack);
}

} // namespace bairext
