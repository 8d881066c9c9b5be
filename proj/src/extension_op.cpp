#include "bairext/extension_op.hpp"

#include "bairext/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bairext {

namespace {
constexpr std::size_t direct_limit = 48;
}

int select_ceiling(double dist_h) {
  if (!(dist_h > 0.0)) throw Error(ErrorCode::invalid_input, "selection needs dist(x, H) > 0");
  int n = 0;
  while (true) {
    const double next = static_cast<double>(n + 1);
    if (!(next * (next * growth_m(n + 1) + 2.0) < 1.0 / dist_h)) return n;
    ++n;
  }
}

Extender::Extender(const SampledSpace& x_space, std::vector<FunSeqItem> items, std::size_t dim, Norm norm)
    : x_(&x_space), y_(x_space.subspace(x_space.h_indices())), items_(std::move(items)), dim_(dim),
      norm_(norm) {
  if (x_space.h_indices().empty()) throw Error(ErrorCode::config, "H is empty");
  for (const FunSeqItem& it : items_)
    if (it.values.size() != y_.size())
      throw Error(ErrorCode::invalid_input,
                  "item " + std::to_string(it.index) + " is not tabulated over every H sample");
}

TargetVector Extender::item_value(int n, std::size_t u) const {
  if (n == 0) return TargetVector::zero(dim_, norm_);
  const std::size_t pos = x_->h_position(u);
  if (pos == npos) throw Error(ErrorCode::misuse, "u is not an H sample");
  return items_.at(static_cast<std::size_t>(n - 1)).values.at(pos);
}

double Extender::lip_over_ball(int n, std::size_t u_pos, double radius) const {
  const FunSeqItem& item = items_.at(static_cast<std::size_t>(n - 1));
  if (item.lip_oracle) return item.lip_oracle(u_pos, radius);

  auto& order = order_[u_pos];
  if (order.empty()) {
    order.reserve(y_.size());
    for (std::size_t i = 0; i < y_.size(); ++i) order.emplace_back(y_.distance(u_pos, i), i);
    std::sort(order.begin(), order.end());
  }
  const auto end = std::lower_bound(order.begin(), order.end(), std::make_pair(radius, std::size_t{0}));
  const std::size_t count = static_cast<std::size_t>(end - order.begin());
  if (count < 2) return 0.0;

  auto quotient = [&](std::size_t a, std::size_t b) {
    return distance(item.values[a], item.values[b]) / y_.distance(a, b);
  };
  if (count <= direct_limit) {
    double lip = 0.0;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b)
        lip = std::max(lip, quotient(order[a].second, order[b].second));
    return lip;
  }
  // profile[k] = Lip over the first k + 1 samples in distance order
  auto& profile = profile_[{n, u_pos}];
  if (profile.empty()) profile.push_back(0.0);
  while (profile.size() < count) {
    const std::size_t k = profile.size();
    double lip = profile.back();
    for (std::size_t a = 0; a < k; ++a) lip = std::max(lip, quotient(order[a].second, order[k].second));
    profile.push_back(lip);
  }
  return profile[count - 1];
}

double Extender::local_lip_K(std::size_t u, double dist_h, int n, bool* certified) const {
  if (n < 1) throw Error(ErrorCode::invalid_input, "K is defined for n >= 1");
  const std::size_t pos = x_->h_position(u);
  if (pos == npos) throw Error(ErrorCode::misuse, "u is not an H sample");
  const double nd = static_cast<double>(n);
  const double radius = (nd * growth_m(n) + 2.0) * dist_h;
  if (certified) *certified = is_certified(items_.at(static_cast<std::size_t>(n - 1)).certificate);
  return std::max(1.0, lip_over_ball(n, pos, radius));
}

int Extender::select_n(std::size_t u, double dist_h, QueryRecord* record) const {
  const int ceiling = select_ceiling(dist_h);
  const int top = std::min(ceiling, static_cast<int>(items_.size()));
  if (record) record->capped = ceiling > top;
  for (int n = top; n >= 1; --n) {
    bool cert = true;
    const double k = local_lip_K(u, dist_h, n, &cert);
    if (record) {
      record->k_table.emplace_back(n, k);
      record->certified = record->certified && cert;
    }
    if (selection_holds(dist_h, n, k)) return n;
  }
  return 0;
}

QueryRecord Extender::extend_point(const Point& x) const {
  QueryRecord rec;
  rec.x = x;
  const NearestH near = nearest_with_slack(*x_, x);
  if (!(near.distance > 0.0)) throw Error(ErrorCode::misuse, "extension queried at a point of H");
  rec.u = near.index;
  rec.dist_h = near.distance;
  rec.n = select_n(rec.u, rec.dist_h, &rec);
  rec.g = item_value(rec.n, rec.u);
  return rec;
}

QueryRecord Extender::extend_sample(std::size_t i) const {
  if (x_->in_h(i))
    throw Error(ErrorCode::misuse, "extension queried at H sample " + std::to_string(i));
  QueryRecord rec = extend_point(x_->point(i));
  rec.sample = i;
  return rec;
}

// ---------------------------------------------------------------------------

ExtensionField extend_field(const Extender& ext, std::span<const std::size_t> queries) {
  ExtensionField field{ext.space(), {}, {}, {}};
  field.queries.reserve(queries.size());
  for (std::size_t q : queries) field.queries.push_back(ext.extend_sample(q));
  return field;
}

void smooth_extension(ExtensionField& field, const Extender& ext, const SmoothingOptions& options) {
  const SampledSpace& base = ext.space();
  std::vector<Point> mids;
  if (options.midpoints && base.kind() == MetricKind::euclidean) {
    std::set<Point> seen;
    for (const QueryRecord& q : field.queries) {
      const Point& u = base.point(q.u);
      Point m(q.x.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (q.x[i] + u[i]);
      if (!seen.insert(m).second) continue;
      bool clash = false;
      if (const SpatialIndex* idx = base.index())
        idx->within(m, 1e-12, [&](std::size_t, double) { clash = true; });
      else
        for (std::size_t j = 0; j < base.size() && !clash; ++j) clash = base.distance(m, j) < 1e-12;
      if (!clash) mids.push_back(std::move(m));
    }
  }
  field.space = mids.empty() ? base : base.with_points(mids);

  const double delta = base.delta();
  auto radius_for = [&](double dist_h) {
    double r = dist_h / 3.0;
    if (delta > 0.0) r = std::min(r, options.radius_cap * delta);
    return r;
  };

  field.centers.clear();
  for (const QueryRecord& q : field.queries)
    field.centers.push_back({q.sample, q, radius_for(q.dist_h)});
  for (std::size_t k = 0; k < mids.size(); ++k) {
    QueryRecord rec = ext.extend_point(mids[k]);
    rec.sample = base.size() + k;
    const double r = radius_for(rec.dist_h);
    field.centers.push_back({rec.sample, std::move(rec), r});
  }

  CoverSystem cover;
  for (const SmoothingCenter& c : field.centers) {
    cover.balls.push_back({c.sample, c.radius});
    cover.refined_from.push_back(std::nullopt);
  }
  for (const QueryRecord& q : field.queries) cover.points.push_back(q.sample);
  field.cover = partition_of_unity(field.space, std::move(cover));

  for (std::size_t p = 0; p < field.queries.size(); ++p) {
    TargetVector acc = TargetVector::zero(ext.dim(), ext.norm());
    for (const auto& [b, w] : field.cover.weights[p]) {
      const TargetVector& g = field.centers[b].record.g;
      for (std::size_t i = 0; i < acc.coords.size(); ++i) acc.coords[i] += w * g.coords[i];
    }
    field.queries[p].g_smooth = std::move(acc);
  }
}

} // namespace bairext
