#include "bairext/baire_pipeline.hpp"

#include "bairext/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bairext {

const char* certificate_name(LipCertificate c) noexcept {
  switch (c) {
    case LipCertificate::analytic: return "analytic";
    case LipCertificate::exact_on_samples: return "exact_on_samples";
    case LipCertificate::estimate: return "estimate";
  }
  return "unknown";
}

double sampled_lipschitz(const SampledSpace& y, std::span<const TargetVector> values,
                         std::size_t center, double radius) {
  std::vector<std::size_t> ball;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y.distance(center, i) < radius) ball.push_back(i);
  double lip = 0.0;
  for (std::size_t a = 0; a < ball.size(); ++a)
    for (std::size_t b = a + 1; b < ball.size(); ++b) {
      const double d = y.distance(ball[a], ball[b]);
      lip = std::max(lip, distance(values[ball[a]], values[ball[b]]) / d);
    }
  return lip;
}

double FunSeqItem::lip_bound(const SampledSpace& y, std::size_t center, double radius) const {
  if (lip_oracle) return lip_oracle(center, radius);
  return sampled_lipschitz(y, values, center, radius);
}

// ---------------------------------------------------------------------------

std::vector<FunSeqItem> bound_sequence(std::vector<FunSeqItem> seq) {
  for (FunSeqItem& item : seq) {
    const double r = static_cast<double>(item.index);
    bool changed = false;
    for (TargetVector& v : item.values) {
      TargetVector p = radial_project(v, r);
      if (p != v) {
        v = std::move(p);
        changed = true;
      }
    }
    // the radial retraction is 1-Lipschitz for l2 and 2-Lipschitz in general
    if (changed && item.lip_oracle && !item.values.empty() && item.values.front().norm != Norm::l2)
      item.lip_oracle = [inner = item.lip_oracle](std::size_t c, double rad) { return 2.0 * inner(c, rad); };
    item.sup_bound = std::min(item.sup_bound, r);
  }
  return seq;
}

std::vector<double> local_bound_radii(const SampledSpace& y_space, std::span<const TargetVector> f,
                                      const std::optional<std::vector<bool>>& converges) {
  if (!converges) throw Error(ErrorCode::missing_certificate, "no convergence certificate supplied");
  const std::size_t m = y_space.size();
  if (f.size() != m || converges->size() != m)
    throw Error(ErrorCode::invalid_input, "limit values and certificates must cover every sample");

  // S_n only changes at n = floor(|f(y)|) + 1; between those thresholds O_n
  // is unchanged while n + 1 grows, so only the thresholds matter.
  std::set<double> thresholds;
  for (std::size_t y = 0; y < m; ++y)
    if ((*converges)[y]) thresholds.insert(std::floor(norm(f[y])) + 1.0);

  std::vector<double> r(m, inf);
  const double scale = y_space.mode() == SpaceMode::sampled ? y_space.delta() : 0.0;
  for (double n : thresholds) {
    std::vector<bool> in_s(m);
    for (std::size_t y = 0; y < m; ++y) in_s[y] = (*converges)[y] && norm(f[y]) < n;
    std::vector<bool> in_o = in_s;
    if (scale > 0.0)
      for (std::size_t y = 0; y < m; ++y) {
        if (!in_s[y]) continue;
        double d = inf;
        for (std::size_t z = 0; z < m; ++z)
          if (!in_s[z]) d = std::min(d, y_space.distance(y, z));
        in_o[y] = d >= scale;
      }
    for (std::size_t y = 0; y < m; ++y) {
      if (!in_o[y]) continue;
      double d = inf;
      for (std::size_t z = 0; z < m; ++z)
        if (!in_o[z]) d = std::min(d, y_space.distance(y, z));
      const double phi = (n + 1.0) + (std::isinf(d) ? 0.0 : 1.0 / d);
      r[y] = std::min(r[y], phi);
    }
  }
  return r;
}

double local_bound_radius(const SampledSpace& y_space, std::span<const TargetVector> f,
                          const std::optional<std::vector<bool>>& converges, std::size_t y) {
  return local_bound_radii(y_space, f, converges).at(y);
}

std::vector<FunSeqItem> enforce_local_uniform_boundedness(const SampledSpace& y_space,
                                                          std::vector<FunSeqItem> seq,
                                                          std::span<const double> radii) {
  if (radii.size() != y_space.size())
    throw Error(ErrorCode::invalid_input, "one local bound radius per sample required");
  for (FunSeqItem& item : seq) {
    bool changed = false;
    for (std::size_t y = 0; y < item.values.size(); ++y) {
      TargetVector p = radial_project(item.values[y], radii[y]);
      if (p != item.values[y]) {
        item.values[y] = std::move(p);
        changed = true;
      }
    }
    if (changed) {
      item.lip_oracle = nullptr;
      item.certificate = LipCertificate::exact_on_samples;
    }
  }
  return seq;
}

// ---------------------------------------------------------------------------

std::vector<TargetBall> SelectionState::constraints(int k, std::optional<int> j, std::size_t y) const {
  std::vector<TargetBall> out;
  for (int i = 1; i <= k; ++i) {
    const SelectionLevel& level = levels.at(static_cast<std::size_t>(i - 1));
    const double radius = std::ldexp(1.0, -i);
    for (const auto& [g, interior] : level.members[y])
      if (!j || interior >= 1.0 / static_cast<double>(*j))
        out.push_back({level.centers[g], radius, true});
  }
  return out;
}

UcpcResult ucpc_transform(const SampledSpace& y_space, const std::vector<FunSeqItem>& seq,
                          std::span<const TargetVector> f) {
  if (y_space.mode() != SpaceMode::finite)
    throw Error(ErrorCode::misuse, "the selection transform runs in finite mode only");
  const std::size_t m = y_space.size();
  if (f.size() != m) throw Error(ErrorCode::invalid_input, "limit must have one value per sample");
  if (m == 0 || seq.empty()) return {};
  const std::size_t dim = f.front().dim();
  const Norm nrm = f.front().norm;
  const double cap = 2.0 * y_space.diameter() + 1.0;

  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;

  UcpcResult result;
  SelectionState& state = result.state;
  for (std::size_t kk = 0; kk < seq.size(); ++kk) {
    const int k = static_cast<int>(kk) + 1;
    const double eps = std::ldexp(1.0, -k);
    SelectionLevel level;
    level.k = k;

    std::vector<double> rule(m);
    level.raw.points = all;
    for (std::size_t p = 0; p < m; ++p) {
      double reach = inf;
      for (std::size_t q = 0; q < m; ++q)
        if (distance(f[q], f[p]) >= eps) reach = std::min(reach, y_space.distance(p, q));
      rule[p] = std::isinf(reach) ? cap : reach;
      level.raw.balls.push_back({p, rule[p]});
      level.raw.refined_from.push_back(std::nullopt);
    }
    level.refined = build_refinement(y_space, level.raw, rule, all);
    for (std::size_t g = 0; g < level.refined.balls.size(); ++g)
      level.centers.push_back(f[level.raw.balls[*level.refined.refined_from[g]].center]);

    level.members.assign(m, {});
    for (std::size_t g = 0; g < level.refined.balls.size(); ++g) {
      const MetricBall& ball = level.refined.balls[g];
      std::vector<std::size_t> inside, outside;
      for (std::size_t y = 0; y < m; ++y)
        (ball_contains(y_space, ball, y) ? inside : outside).push_back(y);
      for (std::size_t y : inside) {
        double d = inf;
        for (std::size_t z : outside) d = std::min(d, y_space.distance(y, z));
        level.members[y].emplace_back(g, d);
      }
    }
    state.levels.push_back(std::move(level));

    const FunSeqItem& h = seq[kk];
    FunSeqItem out;
    out.index = h.index;
    out.certificate = LipCertificate::exact_on_samples;
    out.values.reserve(m);
    std::vector<bool> in_c(m);
    double sup = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      const auto full = state.constraints(k, std::nullopt, y);
      in_c[y] = std::all_of(full.begin(), full.end(), [&](const TargetBall& b) {
        return distance(h.values[y], b.center) <= b.radius;
      });
      if (in_c[y]) {
        out.values.push_back(h.values[y]);
      } else {
        const auto diag = state.constraints(k, k, y);
        auto p = ball_intersection_point(diag, eps, dim, nrm);
        if (!p)
          throw Error(ErrorCode::internal, "selection constraints empty at sample " + std::to_string(y) +
                                               ", level " + std::to_string(k));
        out.values.push_back(std::move(*p));
      }
      sup = std::max(sup, norm(out.values.back()));
    }
    out.sup_bound = sup;
    state.in_c.push_back(std::move(in_c));
    result.items.push_back(std::move(out));
  }
  return result;
}

// ---------------------------------------------------------------------------

TargetVector evaluate_blend(const CoverSystem& cover, std::span<const TargetVector> anchor_values,
                            std::size_t point_position) {
  const auto& row = cover.weights.at(point_position);
  TargetVector acc = TargetVector::zero(anchor_values.front().dim(), anchor_values.front().norm);
  for (const auto& [b, w] : row)
    for (std::size_t i = 0; i < acc.coords.size(); ++i) acc.coords[i] += w * anchor_values[b].coords[i];
  return acc;
}

MollifyResult lipschitz_mollify(const SampledSpace& y_space, const FunSeqItem& item, int n,
                                const MollifyOptions& options) {
  if (n < 1) throw Error(ErrorCode::invalid_input, "mollification index must be >= 1");
  if (item.certificate == LipCertificate::estimate && !item.lip_oracle && !options.allow_sampling_fallback)
    throw Error(ErrorCode::missing_certificate,
                "item " + std::to_string(item.index) + " has no modulus oracle and sampling fallback is disabled");
  const std::size_t m = y_space.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  MollifyResult res;
  res.radius.resize(m);
  CoverSystem raw;
  for (std::size_t x = 0; x < m; ++x) {
    double sep = inf;
    for (std::size_t z = 0; z < m; ++z)
      if (z != x) sep = std::min(sep, y_space.distance(x, z));
    const double lip = item.lip_bound(y_space, x, inv_n);
    double delta = 0.0;
    if (lip == 0.0) delta = inv_n;
    else if (std::isfinite(lip)) delta = std::min(inv_n, 1.0 / (static_cast<double>(n) * lip));
    // below the sample separation the ball is {x}, so the oscillation bound is automatic
    delta = std::max(delta, std::min(sep, inv_n));
    if (!(delta > 0.0))
      throw Error(ErrorCode::invalid_input, "sample " + std::to_string(x) + " coincides with another sample");
    res.radius[x] = delta;
    raw.balls.push_back({x, delta});
    raw.refined_from.push_back(std::nullopt);
  }
  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  raw.points = all;
  res.cover = partition_of_unity(y_space, build_refinement(y_space, raw, res.radius, all));

  std::vector<TargetVector> anchors;
  anchors.reserve(res.cover.balls.size());
  for (const MetricBall& b : res.cover.balls) anchors.push_back(item.values[b.center]);

  res.item.index = n;
  res.item.certificate = is_certified(item.certificate) ? LipCertificate::exact_on_samples
                                                        : LipCertificate::estimate;
  res.item.sup_bound = item.sup_bound;
  res.item.values.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    res.item.values.push_back(evaluate_blend(res.cover, anchors, k));
    res.max_deviation = std::max(res.max_deviation, distance(res.item.values.back(), item.values[k]));
  }
  return res;
}

// ---------------------------------------------------------------------------

PipelineResult baire_approximate(const SampledSpace& y_space, const FunctionBundle& bundle,
                                 const PipelineOptions& options) {
  if (bundle.raw.empty()) throw Error(ErrorCode::invalid_input, "empty function sequence");
  if (bundle.f.size() != y_space.size())
    throw Error(ErrorCode::invalid_input, "limit must have one value per sample");
  PipelineResult res;

  std::vector<FunSeqItem> seq = bundle.raw;
  if (y_space.mode() == SpaceMode::finite) {
    UcpcResult u = ucpc_transform(y_space, seq, bundle.f);
    for (std::size_t kk = 0; kk < u.items.size(); ++kk) {
      const int k = static_cast<int>(kk) + 1;
      const double eps = std::ldexp(1.0, -k);
      double worst = 0.0;
      for (std::size_t y = 0; y < y_space.size(); ++y) {
        const TargetVector& out = u.items[kk].values[y];
        if (u.state.in_c[kk][y]) {
          worst = std::max(worst, distance(out, seq[kk].values[y]) - eps);
        } else {
          for (const TargetBall& b : u.state.constraints(k, k, y))
            worst = std::max(worst, distance(out, b.center) - (b.radius + eps));
        }
      }
      res.diagnostics.push_back({"ucpc", k, std::max(0.0, worst), true});
    }
    res.selection = std::move(u.state);
    res.selected = u.items;
    seq = std::move(u.items);
  } else if (bundle.raw_ucpc_certified) {
    res.warnings.push_back("selection transform skipped in sampled mode: raw sequence certified UCPC");
  } else {
    res.warnings.push_back("selection transform skipped in sampled mode without a UCPC certificate; "
                           "UCPC of the output is not guaranteed");
  }

  seq = bound_sequence(std::move(seq));
  for (const FunSeqItem& it : seq) {
    double worst = 0.0;
    for (const TargetVector& v : it.values) worst = std::max(worst, norm(v) - it.index);
    res.diagnostics.push_back({"bound", it.index, std::max(0.0, worst), true});
  }

  res.radii = local_bound_radii(y_space, bundle.f, bundle.converges);
  {
    double worst = 0.0;
    for (std::size_t y = 0; y < y_space.size(); ++y)
      if ((*bundle.converges)[y]) worst = std::max(worst, norm(bundle.f[y]) - res.radii[y]);
    res.diagnostics.push_back({"local_bound_limit", 0, std::max(0.0, worst), true});
  }
  seq = enforce_local_uniform_boundedness(y_space, std::move(seq), res.radii);
  for (const FunSeqItem& it : seq) {
    double worst = 0.0;
    for (std::size_t y = 0; y < it.values.size(); ++y)
      worst = std::max(worst, norm(it.values[y]) - res.radii[y]);
    res.diagnostics.push_back({"local_bound", it.index, std::max(0.0, worst), true});
  }
  res.hat = seq;

  for (const FunSeqItem& it : res.hat) {
    MollifyResult mr = lipschitz_mollify(y_space, it, it.index, options.mollify);
    mr.item.sup_bound = static_cast<double>(it.index) + 2.0;
    const bool cert = is_certified(mr.item.certificate);
    res.certified = res.certified && cert;
    res.diagnostics.push_back(
        {"mollify", it.index, std::max(0.0, mr.max_deviation - 2.0 / it.index), cert});
    res.items.push_back(std::move(mr.item));
  }
  return res;
}

} // namespace bairext
