#pragma once

// Extension of the approximants f_n on H to a function g on X \ H and its
// partition-of-unity smoothing g~.

#include "bairext/baire_pipeline.hpp"
#include "bairext/metric_core.hpp"
#include "bairext/normed_target.hpp"

#include <map>
#include <vector>

namespace bairext {

inline double growth_m(int n) { return static_cast<double>(n) + 2.0; }

/// Largest n with n (n M_n + 2) < 1/dist, i.e. the largest n that could ever
/// satisfy the selection inequality since K >= 1. 0 when none.
int select_ceiling(double dist_h);

/// dist_h < 1 / (n K (n M_n + 2)), with 1/inf = 0.
inline bool selection_holds(double dist_h, int n, double k) {
  if (!(k < inf)) return false;
  const double nd = static_cast<double>(n);
  return dist_h < 1.0 / (nd * k * (nd * growth_m(n) + 2.0));
}

struct QueryRecord {
  Point x;
  std::size_t sample = npos;  // index in the query space, if x is a sample
  std::size_t u = npos;       // sample index of u(x) in the base space
  double dist_h = 0.0;
  int n = 0;
  bool capped = false;        // ceiling exceeded the available items
  bool certified = true;      // every consulted K came from certified bounds
  std::vector<std::pair<int, double>> k_table;  // (n, K_{x,n}) consulted
  TargetVector g;
  TargetVector g_smooth;
};

class Extender {
public:
  /// `items[n-1]` is f_n, tabulated over the H samples of `x_space` in
  /// h_indices() order.
  Extender(const SampledSpace& x_space, std::vector<FunSeqItem> items, std::size_t dim, Norm norm);

  const SampledSpace& space() const noexcept { return *x_; }
  const SampledSpace& h_space() const noexcept { return y_; }
  const std::vector<FunSeqItem>& items() const noexcept { return items_; }
  std::size_t dim() const noexcept { return dim_; }
  Norm norm() const noexcept { return norm_; }

  /// f_n(u) for u a sample index in H; f_0 = 0.
  TargetVector item_value(int n, std::size_t u) const;

  /// max(1, Lip of f_n over B_H(u, (n M_n + 2) dist_h)); inf propagates.
  double local_lip_K(std::size_t u, double dist_h, int n, bool* certified = nullptr) const;

  /// Largest n with dist_h < 1 / (n K_{x,n} (n M_n + 2)), scanning down from
  /// the ceiling; 0 when none.
  int select_n(std::size_t u, double dist_h, QueryRecord* record = nullptr) const;

  QueryRecord extend_point(const Point& x) const;
  QueryRecord extend_sample(std::size_t i) const;

private:
  double lip_over_ball(int n, std::size_t u_pos, double radius) const;

  const SampledSpace* x_;
  SampledSpace y_;
  std::vector<FunSeqItem> items_;
  std::size_t dim_;
  Norm norm_;
  // sorted distances from each H position, built on demand
  mutable std::map<std::size_t, std::vector<std::pair<double, std::size_t>>> order_;
  // running-max Lipschitz profile per (n, H position)
  mutable std::map<std::pair<int, std::size_t>, std::vector<double>> profile_;
};

struct SmoothingCenter {
  std::size_t sample = npos;  // index in ExtensionField::space
  QueryRecord record;
  double radius = 0.0;        // ball radius, at most dist_h / 3
};

struct ExtensionField {
  SampledSpace space;  // base space plus smoothing midpoints
  std::vector<QueryRecord> queries;
  std::vector<SmoothingCenter> centers;
  CoverSystem cover;   // balls[c] belongs to centers[c]; points are the queries
};

struct SmoothingOptions {
  bool midpoints = true;       // add centers halfway toward u(x) (Euclidean only)
  double radius_cap = 1.5;     // ball radius <= radius_cap * delta when delta > 0
};

/// Computes g at every query (sample indices of the extender's space, none in H).
ExtensionField extend_field(const Extender& ext, std::span<const std::size_t> queries);

/// Fills g_smooth for every query from the partition of unity over the
/// smoothing centers. Throws not_covered naming an uncovered query.
void smooth_extension(ExtensionField& field, const Extender& ext, const SmoothingOptions& options = {});

} // namespace bairext
