#include "bairext/metric_core.hpp"

#include "bairext/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bairext {

SpaceMode parse_mode(const std::string& text) {
  if (text == "finite") return SpaceMode::finite;
  if (text == "sampled") return SpaceMode::sampled;
  throw Error(ErrorCode::config, "unknown mode '" + text + "' (expected finite|sampled)");
}

const char* mode_name(SpaceMode mode) noexcept {
  return mode == SpaceMode::finite ? "finite" : "sampled";
}

// ---------------------------------------------------------------------------
// SpatialIndex

namespace {

constexpr std::int64_t cell_bias = std::int64_t{1} << 20;
constexpr int max_ring_shells = 12;

double euclid(const Point& a, const Point& b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

} // namespace

SpatialIndex::SpatialIndex(std::span<const Point> points, std::span<const std::size_t> ids,
                           double cell)
    : dim_(points.empty() ? 0 : points.front().size()), cell_(cell),
      points_(points.begin(), points.end()), ids_(ids.begin(), ids.end()) {
  if (dim_ > 3) throw Error(ErrorCode::internal, "spatial index supports dim <= 3");
  if (!(cell_ > 0.0)) throw Error(ErrorCode::internal, "spatial index needs a positive cell size");
  for (std::size_t d = 0; d < 3; ++d) {
    lo_[d] = std::numeric_limits<std::int64_t>::max();
    hi_[d] = std::numeric_limits<std::int64_t>::min();
  }
  for (std::size_t s = 0; s < points_.size(); ++s) {
    std::int64_t c[3]{0, 0, 0};
    for (std::size_t d = 0; d < dim_; ++d) c[d] = cell_of(points_[s][d]);
    for (std::size_t d = 0; d < 3; ++d) {
      lo_[d] = std::min(lo_[d], c[d]);
      hi_[d] = std::max(hi_[d], c[d]);
    }
    buckets_[key(c[0], c[1], c[2])].push_back(s);
  }
}

std::int64_t SpatialIndex::cell_of(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_));
}

std::uint64_t SpatialIndex::key(std::int64_t cx, std::int64_t cy, std::int64_t cz) {
  auto part = [](std::int64_t c) { return static_cast<std::uint64_t>(c + cell_bias) & 0x1FFFFF; };
  return (part(cx) << 42) | (part(cy) << 21) | part(cz);
}

void SpatialIndex::within(const Point& x, double radius,
                          const std::function<void(std::size_t, double)>& visit) const {
  std::int64_t from[3]{0, 0, 0}, to[3]{0, 0, 0};
  double cells = 1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    if (!std::isfinite(radius)) { cells = inf; break; }
    from[d] = std::max(lo_[d], cell_of(x[d] - radius));
    to[d] = std::min(hi_[d], cell_of(x[d] + radius));
    cells *= static_cast<double>(std::max<std::int64_t>(0, to[d] - from[d] + 1));
  }
  if (cells > 4.0 * static_cast<double>(points_.size()) + 64.0) {
    for (std::size_t s = 0; s < points_.size(); ++s) {
      const double dd = euclid(x, points_[s], dim_);
      if (dd < radius) visit(ids_[s], dd);
    }
    return;
  }
  for (std::int64_t cx = from[0]; cx <= to[0]; ++cx)
    for (std::int64_t cy = from[1]; cy <= to[1]; ++cy)
      for (std::int64_t cz = from[2]; cz <= to[2]; ++cz) {
        auto it = buckets_.find(key(cx, cy, cz));
        if (it == buckets_.end()) continue;
        for (std::size_t s : it->second) {
          const double dd = euclid(x, points_[s], dim_);
          if (dd < radius) visit(ids_[s], dd);
        }
      }
}

std::optional<std::pair<std::size_t, double>>
SpatialIndex::nearest(const Point& x, const std::function<bool(std::size_t)>& accept) const {
  std::optional<std::pair<std::size_t, double>> best;
  auto consider = [&](std::size_t s) {
    if (!accept(ids_[s])) return;
    const double dd = euclid(x, points_[s], dim_);
    if (!best || dd < best->second || (dd == best->second && ids_[s] < best->first))
      best = std::make_pair(ids_[s], dd);
  };

  std::int64_t c0[3]{0, 0, 0};
  for (std::size_t d = 0; d < dim_; ++d) c0[d] = cell_of(x[d]);
  std::int64_t max_shell = 0;
  for (std::size_t d = 0; d < dim_; ++d)
    max_shell = std::max({max_shell, c0[d] - lo_[d], hi_[d] - c0[d]});

  for (std::int64_t r = 0; r <= max_shell; ++r) {
    if (r > max_ring_shells) {
      best.reset();
      for (std::size_t s = 0; s < points_.size(); ++s) consider(s);
      return best;
    }
    std::int64_t span[3]{0, 0, 0};
    for (std::size_t d = 0; d < dim_; ++d) span[d] = r;
    for (std::int64_t dx = -span[0]; dx <= span[0]; ++dx)
      for (std::int64_t dy = -span[1]; dy <= span[1]; ++dy)
        for (std::int64_t dz = -span[2]; dz <= span[2]; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
          auto it = buckets_.find(key(c0[0] + dx, c0[1] + dy, c0[2] + dz));
          if (it == buckets_.end()) continue;
          for (std::size_t s : it->second) consider(s);
        }
    // every point in shell r+1 or beyond is at least r cells away
    if (best && static_cast<double>(r) * cell_ > best->second) return best;
  }
  return best;
}

// ---------------------------------------------------------------------------
// SampledSpace

SampledSpace SampledSpace::euclidean(std::vector<Point> points, std::vector<std::size_t> h,
                                     SpaceMode mode, double delta) {
  SampledSpace s;
  s.kind_ = MetricKind::euclidean;
  s.mode_ = mode;
  s.delta_ = delta;
  s.dim_ = points.empty() ? 0 : points.front().size();
  for (const Point& p : points) {
    if (p.size() != s.dim_) throw Error(ErrorCode::invalid_input, "points have mixed dimensions");
    for (double v : p)
      if (!std::isfinite(v)) throw Error(ErrorCode::invalid_input, "point has a non-finite coordinate");
  }
  s.points_ = std::move(points);
  s.h_ = std::move(h);
  s.finalize();
  return s;
}

SampledSpace SampledSpace::finite_metric(std::vector<std::string> labels,
                                         std::span<const double> lower_tri,
                                         std::vector<std::size_t> h, SpaceMode mode,
                                         double delta) {
  const std::size_t n = labels.size();
  const bool with_diag = lower_tri.size() == n * (n + 1) / 2;
  if (!with_diag && lower_tri.size() != n * (n - (n > 0 ? 1 : 0)) / 2)
    throw Error(ErrorCode::invalid_input,
                "distance triangle has " + std::to_string(lower_tri.size()) + " entries for " +
                    std::to_string(n) + " points");
  SampledSpace s;
  s.kind_ = MetricKind::matrix;
  s.mode_ = mode;
  s.delta_ = delta;
  s.dim_ = 1;
  s.labels_ = std::move(labels);
  s.matrix_.assign(n * n, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = with_diag ? i + 1 : i;
    for (std::size_t j = 0; j < row; ++j, ++k) {
      const double v = lower_tri[k];
      if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorCode::invalid_input, "distance (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ") is negative or non-finite");
      if (i == j && v != 0.0)
        throw Error(ErrorCode::invalid_input, "d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
      s.matrix_[i * n + j] = v;
      s.matrix_[j * n + i] = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && s.matrix_[i * n + j] == 0.0)
        throw Error(ErrorCode::invalid_input, "distinct points " + std::to_string(i) + "," +
                                                  std::to_string(j) + " at distance 0");
      for (std::size_t q = 0; q < n; ++q)
        if (s.matrix_[i * n + j] > s.matrix_[i * n + q] + s.matrix_[q * n + j]) {
          std::ostringstream msg;
          msg << "triangle inequality fails for triple (" << i << "," << q << "," << j << "): d("
              << i << "," << j << ")=" << s.matrix_[i * n + j] << " > " << s.matrix_[i * n + q]
              << "+" << s.matrix_[q * n + j];
          throw Error(ErrorCode::invalid_input, msg.str());
        }
    }
  s.points_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.points_.push_back({static_cast<double>(i)});
  s.h_ = std::move(h);
  s.finalize();
  return s;
}

SampledSpace SampledSpace::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("finite metric JSON: ") + e.what());
  }
  if (!doc.contains("points") || !doc.contains("dist") || !doc.contains("H"))
    throw Error(ErrorCode::invalid_input, "finite metric JSON needs points, dist and H");
  std::vector<std::string> labels;
  for (const auto& p : doc["points"]) labels.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  std::vector<double> tri;
  for (const auto& row : doc["dist"]) {
    if (row.is_array())
      for (const auto& v : row) tri.push_back(v.get<double>());
    else
      tri.push_back(row.get<double>());
  }
  std::vector<std::size_t> h = doc["H"].get<std::vector<std::size_t>>();
  const SpaceMode mode = doc.contains("mode") ? parse_mode(doc["mode"].get<std::string>()) : SpaceMode::finite;
  const double delta = doc.value("delta", 0.0);
  return finite_metric(std::move(labels), tri, std::move(h), mode, delta);
}

void SampledSpace::finalize() {
  const std::size_t n = points_.size();
  if (h_.empty()) throw Error(ErrorCode::config, "H must be nonempty");
  if (mode_ == SpaceMode::sampled && !(delta_ > 0.0))
    throw Error(ErrorCode::config, "sampled-continuum mode needs a resolution delta > 0");
  h_pos_.assign(n, npos);
  for (std::size_t k = 0; k < h_.size(); ++k) {
    if (h_[k] >= n) throw Error(ErrorCode::invalid_input, "H index " + std::to_string(h_[k]) + " out of range");
    if (h_pos_[h_[k]] != npos) throw Error(ErrorCode::invalid_input, "duplicate H index " + std::to_string(h_[k]));
    h_pos_[h_[k]] = k;
  }
  if (labels_.empty()) {
    labels_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i));
  }
  index_.reset();
  h_index_.reset();
  if (kind_ != MetricKind::euclidean || dim_ == 0 || dim_ > 3 || n < 64) return;

  double cell = delta_;
  if (!(cell > 0.0)) {
    double extent = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      double lo = inf, hi = -inf;
      for (const Point& p : points_) lo = std::min(lo, p[d]), hi = std::max(hi, p[d]);
      extent = std::max(extent, hi - lo);
    }
    cell = extent / std::max(1.0, std::pow(static_cast<double>(n), 1.0 / static_cast<double>(dim_)));
    if (!(cell > 0.0)) cell = 1.0;
  }
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  index_ = std::make_shared<SpatialIndex>(points_, all, cell);
  std::vector<Point> hp;
  hp.reserve(h_.size());
  for (std::size_t i : h_) hp.push_back(points_[i]);
  h_index_ = std::make_shared<SpatialIndex>(hp, h_, cell);
}

double SampledSpace::distance(std::size_t i, std::size_t j) const {
  if (kind_ == MetricKind::matrix) return matrix_[i * points_.size() + j];
  return euclid(points_[i], points_[j], dim_);
}

double SampledSpace::distance(const Point& x, std::size_t j) const {
  if (kind_ == MetricKind::matrix) return matrix_[static_cast<std::size_t>(x.at(0)) * points_.size() + j];
  return euclid(x, points_[j], dim_);
}

double SampledSpace::distance(const Point& x, const Point& y) const {
  if (kind_ == MetricKind::matrix)
    return matrix_[static_cast<std::size_t>(x.at(0)) * points_.size() + static_cast<std::size_t>(y.at(0))];
  return euclid(x, y, dim_);
}

SampledSpace SampledSpace::subspace(std::span<const std::size_t> indices) const {
  SampledSpace s;
  s.kind_ = kind_;
  s.mode_ = mode_;
  s.delta_ = delta_;
  s.dim_ = dim_;
  const std::size_t m = indices.size();
  s.h_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    s.h_[k] = k;
    s.labels_.push_back(labels_.at(indices[k]));
  }
  if (kind_ == MetricKind::matrix) {
    s.matrix_.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      s.points_.push_back({static_cast<double>(a)});
      for (std::size_t b = 0; b < m; ++b) s.matrix_[a * m + b] = distance(indices[a], indices[b]);
    }
  } else {
    for (std::size_t i : indices) s.points_.push_back(points_.at(i));
  }
  s.finalize();
  return s;
}

SampledSpace SampledSpace::with_points(std::span<const Point> extra) const {
  if (kind_ != MetricKind::euclidean)
    throw Error(ErrorCode::misuse, "with_points needs a Euclidean space");
  std::vector<Point> pts = points_;
  pts.insert(pts.end(), extra.begin(), extra.end());
  SampledSpace s = euclidean(std::move(pts), h_, mode_, delta_);
  s.labels_ = labels_;
  for (std::size_t i = labels_.size(); i < s.points_.size(); ++i) s.labels_.push_back(std::to_string(i));
  return s;
}

double SampledSpace::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, distance(i, j));
  return d;
}

bool SampledSpace::on_boundary(std::size_t i) const {
  if (!in_h(i)) return false;
  double scale = delta_;
  if (!(scale > 0.0)) {
    scale = inf;
    for (std::size_t j = 0; j < size(); ++j)
      if (j != i) scale = std::min(scale, distance(i, j));
  }
  const double reach = 2.0 * scale * (1.0 + 1e-12);
  if (index_) {
    bool found = false;
    index_->within(points_[i], reach, [&](std::size_t j, double) { found = found || !in_h(j); });
    return found;
  }
  for (std::size_t j = 0; j < size(); ++j)
    if (!in_h(j) && distance(i, j) < reach) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Distance to H

NearestH nearest_with_slack(const SampledSpace& space, const Point& x) {
  if (space.h_indices().empty()) throw Error(ErrorCode::config, "H is empty");
  if (const SpatialIndex* hi = space.h_index()) {
    auto best = hi->nearest(x, [](std::size_t) { return true; });
    return {best->first, best->second};
  }
  NearestH out;
  out.distance = inf;
  for (std::size_t h : space.h_indices()) {
    const double d = space.distance(x, h);
    if (d < out.distance || (d == out.distance && h < out.index)) out = {h, d};
  }
  return out;
}

NearestH nearest_with_slack(const SampledSpace& space, std::size_t x) {
  if (space.in_h(x)) return {x, 0.0};
  return nearest_with_slack(space, space.point(x));
}

double dist_to_set(const SampledSpace& space, std::size_t x) {
  return nearest_with_slack(space, x).distance;
}

double dist_to_set(const SampledSpace& space, const Point& x) {
  return nearest_with_slack(space, x).distance;
}

// ---------------------------------------------------------------------------
// Covers

bool ball_contains(const SampledSpace& space, const MetricBall& ball, std::size_t y) {
  return space.distance(ball.center, y) < ball.radius;
}

CoverSystem build_refinement(const SampledSpace& space, const CoverSystem& raw,
                             std::span<const double> radius_rule,
                             std::span<const std::size_t> points) {
  if (radius_rule.size() != points.size())
    throw Error(ErrorCode::invalid_input, "radius rule must give one radius per point");
  CoverSystem out;
  out.points.assign(points.begin(), points.end());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::size_t p = points[k];
    const bool covered = std::any_of(out.balls.begin(), out.balls.end(),
                                     [&](const MetricBall& b) { return ball_contains(space, b, p); });
    if (covered) continue;
    const double r = radius_rule[k];
    if (!(r > 0.0))
      throw Error(ErrorCode::refinement_failure,
                  "point " + std::to_string(p) + " has a non-positive rule radius");
    const double half = r / 2.0;
    std::optional<std::size_t> parent;
    for (std::size_t b = 0; b < raw.balls.size(); ++b)
      if (space.distance(raw.balls[b].center, p) + half <= raw.balls[b].radius) {
        parent = b;
        break;
      }
    if (!parent)
      throw Error(ErrorCode::refinement_failure,
                  "point " + std::to_string(p) + " (rule radius " + std::to_string(r) +
                      ") fits inside no raw ball");
    out.balls.push_back({p, half});
    out.refined_from.push_back(parent);
  }
  return out;
}

double raw_weight(const SampledSpace& space, const MetricBall& ball, std::size_t y) {
  const double dcy = space.distance(ball.center, y);
  if (!(dcy < ball.radius)) return 0.0;
  if (space.mode() == SpaceMode::sampled) return std::min(ball.radius - dcy, space.delta());

  auto outside = [&](std::size_t z) { return !(space.distance(ball.center, z) < ball.radius); };
  if (const SpatialIndex* idx = space.index()) {
    auto hit = idx->nearest(space.point(y), outside);
    return hit ? hit->second : 1.0;
  }
  double best = inf;
  for (std::size_t z = 0; z < space.size(); ++z)
    if (outside(z)) best = std::min(best, space.distance(y, z));
  return std::isinf(best) ? 1.0 : best;
}

CoverSystem partition_of_unity(const SampledSpace& space, CoverSystem cover) {
  const std::size_t nb = cover.balls.size();
  double max_radius = 0.0;
  for (const MetricBall& b : cover.balls) max_radius = std::max(max_radius, b.radius);

  std::unique_ptr<SpatialIndex> centers;
  if (space.kind() == MetricKind::euclidean && space.dim() > 0 && space.dim() <= 3 && nb > 64 &&
      std::isfinite(max_radius) && max_radius > 0.0) {
    std::vector<Point> pts;
    std::vector<std::size_t> ids;
    pts.reserve(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      pts.push_back(space.point(cover.balls[b].center));
      ids.push_back(b);
    }
    centers = std::make_unique<SpatialIndex>(pts, ids, max_radius);
  }

  cover.weights.assign(cover.points.size(), {});
  for (std::size_t k = 0; k < cover.points.size(); ++k) {
    const std::size_t y = cover.points[k];
    std::vector<std::size_t> containing;
    if (centers) {
      centers->within(space.point(y), max_radius, [&](std::size_t b, double) {
        if (ball_contains(space, cover.balls[b], y)) containing.push_back(b);
      });
      std::sort(containing.begin(), containing.end());
    } else {
      for (std::size_t b = 0; b < nb; ++b)
        if (ball_contains(space, cover.balls[b], y)) containing.push_back(b);
    }
    if (containing.empty())
      throw Error(ErrorCode::not_covered, "point " + std::to_string(y) + " lies in no cover ball");
    auto& row = cover.weights[k];
    double total = 0.0;
    for (std::size_t b : containing) {
      const double w = raw_weight(space, cover.balls[b], y);
      row.emplace_back(b, w);
      total += w;
    }
    for (auto& [b, w] : row) w /= total;
  }
  return cover;
}

} // namespace bairext
