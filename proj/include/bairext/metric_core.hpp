#pragma once

// Sampled metric spaces, distance-to-set queries, greedy ball refinements
// and partitions of unity over finite ball covers.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bairext {

using Point = std::vector<double>;

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

enum class SpaceMode { finite, sampled };
enum class MetricKind { euclidean, matrix };

SpaceMode parse_mode(const std::string& text);
const char* mode_name(SpaceMode mode) noexcept;

// Uniform bucket grid over points in R^d (d <= 3).
class SpatialIndex {
public:
  SpatialIndex(std::span<const Point> points, std::span<const std::size_t> ids, double cell);

  /// Calls visit(id, distance) for every indexed point with distance < radius.
  void within(const Point& x, double radius,
              const std::function<void(std::size_t, double)>& visit) const;

  /// Nearest indexed point accepted by `accept`; ties go to the lowest id.
  std::optional<std::pair<std::size_t, double>>
  nearest(const Point& x, const std::function<bool(std::size_t)>& accept) const;

  std::size_t size() const noexcept { return ids_.size(); }

private:
  std::int64_t cell_of(double v) const;
  static std::uint64_t key(std::int64_t cx, std::int64_t cy, std::int64_t cz);

  std::size_t dim_;
  double cell_;
  std::vector<Point> points_;
  std::vector<std::size_t> ids_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;  // slot indices
  std::int64_t lo_[3]{0, 0, 0};
  std::int64_t hi_[3]{0, 0, 0};
};

/// A metric space given as a finite point sample plus a metric, carrying the
/// closed subset H as an index mask. Immutable after construction.
///
/// Euclidean spaces store coordinates. Finite metric spaces store a full
/// distance matrix and represent sample i by the one-coordinate point {i}.
class SampledSpace {
public:
  static SampledSpace euclidean(std::vector<Point> points, std::vector<std::size_t> h,
                                SpaceMode mode, double delta);

  /// lower_tri holds n(n+1)/2 entries (diagonal included) or n(n-1)/2
  /// entries (strictly lower), row-major. Throws invalid_input naming the
  /// first violating triple when the triangle inequality fails.
  static SampledSpace finite_metric(std::vector<std::string> labels,
                                    std::span<const double> lower_tri,
                                    std::vector<std::size_t> h, SpaceMode mode, double delta);

  /// {"points": [labels], "dist": lower triangle (flat or nested), "H": [indices],
  ///  "mode": "finite"|"sampled" (optional), "delta": float (optional)}
  static SampledSpace from_json(const std::string& text);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  MetricKind kind() const noexcept { return kind_; }
  SpaceMode mode() const noexcept { return mode_; }
  double delta() const noexcept { return delta_; }

  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool in_h(std::size_t i) const { return h_pos_[i] != npos; }
  /// Position of sample i within h_indices(), or npos.
  std::size_t h_position(std::size_t i) const { return h_pos_[i]; }
  const std::vector<std::size_t>& h_indices() const noexcept { return h_; }

  double distance(std::size_t i, std::size_t j) const;
  double distance(const Point& x, std::size_t j) const;
  double distance(const Point& x, const Point& y) const;

  /// The subspace spanned by `indices`, in that order, with every point in H.
  SampledSpace subspace(std::span<const std::size_t> indices) const;
  /// Appends Euclidean points outside H; existing indices are unchanged.
  SampledSpace with_points(std::span<const Point> extra) const;

  /// Index over all samples (Euclidean, dim <= 3); null otherwise.
  const SpatialIndex* index() const noexcept { return index_.get(); }
  /// Index over H samples (Euclidean, dim <= 3); null otherwise.
  const SpatialIndex* h_index() const noexcept { return h_index_.get(); }

  /// Largest pairwise distance, computed on demand.
  double diameter() const;

  /// Grid-scale boundary test: i is in H and some non-H sample lies within
  /// 2*delta of it (delta = nearest-neighbour distance of i when delta is 0).
  bool on_boundary(std::size_t i) const;

  SampledSpace() = default;  // empty space

private:
  void finalize();

  MetricKind kind_ = MetricKind::euclidean;
  SpaceMode mode_ = SpaceMode::sampled;
  double delta_ = 0.0;
  std::size_t dim_ = 0;
  std::vector<Point> points_;
  std::vector<std::string> labels_;
  std::vector<double> matrix_;  // n*n, matrix kind only
  std::vector<std::size_t> h_;
  std::vector<std::size_t> h_pos_;
  std::shared_ptr<const SpatialIndex> index_;
  std::shared_ptr<const SpatialIndex> h_index_;
};

struct MetricBall {
  std::size_t center = 0;
  double radius = 0.0;
};

struct CoverSystem {
  std::vector<MetricBall> balls;
  std::vector<std::optional<std::size_t>> refined_from;
  /// Sample indices the cover is declared to cover.
  std::vector<std::size_t> points;
  /// weights[p] lists (ball index, weight) for points[p]; filled by partition_of_unity.
  std::vector<std::vector<std::pair<std::size_t, double>>> weights;
};

/// min over H of d(x, h); 0 iff x is an H sample.
double dist_to_set(const SampledSpace& space, std::size_t x);
double dist_to_set(const SampledSpace& space, const Point& x);

struct NearestH {
  std::size_t index = npos;  // sample index of the chosen H point
  double distance = 0.0;
};

/// An exact nearest H sample (lowest index on ties), which satisfies
/// d(x, u) <= 2 dist(x, H).
NearestH nearest_with_slack(const SampledSpace& space, std::size_t x);
NearestH nearest_with_slack(const SampledSpace& space, const Point& x);

bool ball_contains(const SampledSpace& space, const MetricBall& ball, std::size_t y);

/// Greedy refinement: scanning `points` in order, each point not yet covered
/// emits the ball (point, rule/2) linked to the lowest-index raw ball that
/// contains it (center distance + radius <= parent radius).
CoverSystem build_refinement(const SampledSpace& space, const CoverSystem& raw,
                             std::span<const double> radius_rule,
                             std::span<const std::size_t> points);

/// Fills cover.weights for cover.points. The raw weight of U at y is the
/// distance from y to the sampled complement of U (finite mode; 1 when U
/// holds every sample) or min(radius - d(center, y), delta) (sampled mode).
CoverSystem partition_of_unity(const SampledSpace& space, CoverSystem cover);

/// Raw (unnormalised) weight of `ball` at y, 0 outside the ball.
double raw_weight(const SampledSpace& space, const MetricBall& ball, std::size_t y);

} // namespace bairext
