#include "bairext/scenarios.hpp"

#include "bairext/error.hpp"
#include "bairext/extension_op.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bairext {

namespace {

constexpr int max_items = 400;

std::vector<double> linear_axis(double lo, double hi, int n) {
  std::vector<double> ax(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ax[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return ax;
}

// Accumulates samples of X, deduplicating exact repeats.
struct SampleSet {
  std::vector<Point> points;
  std::vector<bool> h;
  std::map<Point, std::size_t> where;

  std::size_t add(const Point& p, bool in_h) {
    auto [it, fresh] = where.emplace(p, points.size());
    if (fresh) {
      points.push_back(p);
      h.push_back(in_h);
    } else if (in_h) {
      h[it->second] = true;
    }
    return it->second;
  }
  std::size_t at(const Point& p) const { return where.at(p); }
};

struct PathSpec {
  Point anchor;
  PathKind kind;
  double side;  // +1 / -1: radial up/down, tangential right/left
  std::string label;
};

std::string coord_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string anchor_text(const Point& a) {
  std::string s = "a=(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + coord_text(a[i]);
  return s + ")";
}

// Planar paths toward an anchor on the line y = 0. Tangential points get
// their foot on the line added to H so the ratio bound holds exactly.
std::vector<std::size_t> plane_path(SampleSet& set, const PathSpec& spec, const ScenarioParams& p) {
  const double e = p.eps * (1.0 - 1e-9);
  const double c = std::sqrt(1.0 - e * e);
  std::vector<std::size_t> out;
  for (int j = 0; j < p.steps; ++j) {
    const double d = std::ldexp(p.d0, -j);
    bool tangential = spec.kind == PathKind::tangential || (spec.kind == PathKind::mixed && j % 2 == 1);
    Point x = spec.anchor;
    if (tangential) {
      x[0] += spec.side * d * c;
      x[1] += d * e;
      set.add({x[0], 0.0}, true);
    } else {
      x[1] += (spec.kind == PathKind::mixed ? 1.0 : spec.side) * d;
    }
    out.push_back(set.add(x, false));
  }
  return out;
}

std::vector<std::size_t> line_path(SampleSet& set, double anchor, double side, const ScenarioParams& p) {
  std::vector<std::size_t> out;
  for (int j = 0; j < p.steps; ++j) out.push_back(set.add({anchor + side * std::ldexp(p.d0, -j)}, false));
  return out;
}

struct Assembled {
  SampledSpace x;
  SampledSpace y;
  std::vector<std::size_t> queries;
};

Assembled assemble(const SampleSet& set, SpaceMode mode, double delta) {
  std::vector<std::size_t> h;
  std::vector<std::size_t> queries;
  for (std::size_t i = 0; i < set.points.size(); ++i) (set.h[i] ? h : queries).push_back(i);
  SampledSpace x = SampledSpace::euclidean(set.points, h, mode, delta);
  std::vector<Point> yp;
  std::vector<std::size_t> all;
  for (std::size_t k = 0; k < h.size(); ++k) {
    yp.push_back(set.points[h[k]]);
    all.push_back(k);
  }
  SampledSpace y = SampledSpace::euclidean(std::move(yp), std::move(all), mode,
                                           mode == SpaceMode::sampled ? delta : 0.0);
  return {std::move(x), std::move(y), std::move(queries)};
}

int items_for(const SampledSpace& x, const std::vector<std::size_t>& queries) {
  double dmin = inf;
  for (std::size_t q : queries) dmin = std::min(dmin, dist_to_set(x, q));
  // smoothing midpoints sit at about half the query distance
  return std::clamp(select_ceiling(dmin / 2.0), 1, max_items);
}

void check_grid(int grid, bool odd) {
  if (grid < 3) throw Error(ErrorCode::config, "grid must be at least 3");
  if (odd && grid % 2 == 0) throw Error(ErrorCode::config, "grid must be odd so that the axis contains 0");
  if (grid > 2001) throw Error(ErrorCode::config, "grid above 2001 is not supported");
}

void check_path_params(const ScenarioParams& p) {
  if (p.steps < 3 || p.steps > 40) throw Error(ErrorCode::config, "steps must lie in [3, 40]");
  if (!(p.d0 > 0.0) || p.d0 > 0.25) throw Error(ErrorCode::config, "d0 must lie in (0, 0.25]");
  if (!(p.eps > 0.0) || p.eps >= 1.0) throw Error(ErrorCode::config, "eps must lie in (0, 1)");
}

using PlaneFn = std::function<TargetVector(double)>;

// Shared construction for the planar scenarios with H on the line y = 0.
BuiltScenario planar(const std::string& name, const ScenarioParams& p, double lo, SpaceMode default_mode,
                     std::vector<PathSpec> nt_specs, std::vector<PathSpec> c_specs, const PlaneFn& f,
                     const std::function<FunSeqItem(int, const SampledSpace&)>& item_n, int fixed_items,
                     double h_lo) {
  check_path_params(p);
  const int n = p.grid;
  const std::vector<double> ax = linear_axis(lo, 1.0, n);
  SampleSet set;
  for (double yv : ax)
    for (double xv : ax) set.add({xv, yv}, yv == 0.0 && xv >= h_lo);

  auto build_paths = [&](const std::vector<PathSpec>& specs, std::vector<NtCase>& out) {
    for (PathSpec s : specs) {
      s.anchor[0] = *std::min_element(ax.begin(), ax.end(), [&](double u, double v) {
        return std::abs(u - s.anchor[0]) < std::abs(v - s.anchor[0]);
      });
      ApproachPath path;
      path.kind = s.kind;
      path.eps = p.eps;
      path.label = anchor_text(s.anchor) + " " + s.label;
      path.samples = plane_path(set, s, p);
      path.anchor = set.at(s.anchor);
      out.push_back({std::move(path), f(s.anchor[0])});
    }
  };
  BuiltScenario sc;
  sc.name = name;
  build_paths(nt_specs, sc.nt);
  build_paths(c_specs, sc.continuity);

  const SpaceMode mode = p.mode.value_or(default_mode);
  const double delta = ax[1] - ax[0];
  Assembled as = assemble(set, mode, delta);
  sc.x = std::move(as.x);
  sc.y = std::move(as.y);
  sc.queries = std::move(as.queries);
  sc.items = fixed_items > 0 ? fixed_items : items_for(sc.x, sc.queries);

  sc.bundle.dim = 2;
  sc.bundle.norm = p.norm;
  for (std::size_t k = 0; k < sc.y.size(); ++k) sc.bundle.f.push_back(f(sc.y.point(k)[0]));
  sc.bundle.converges = std::vector<bool>(sc.y.size(), true);
  for (int i = 1; i <= sc.items; ++i) sc.bundle.raw.push_back(item_n(i, sc.y));
  return sc;
}

// Anchor positions in y for the declared continuity points (first path anchors).
void declare_from_paths(BuiltScenario& sc) {
  for (const NtCase& c : sc.continuity) {
    const std::size_t pos = sc.x.h_position(c.path.anchor);
    if (std::find(sc.declared_continuity_h.begin(), sc.declared_continuity_h.end(), pos) ==
        sc.declared_continuity_h.end())
      sc.declared_continuity_h.push_back(pos);
  }
}

std::vector<PathSpec> around(const Point& a, bool both_tangential, bool both_radial) {
  std::vector<PathSpec> v{{a, PathKind::radial, 1.0, "radial+"}};
  if (both_radial) v.push_back({a, PathKind::radial, -1.0, "radial-"});
  v.push_back({a, PathKind::tangential, 1.0, "tangential+"});
  if (both_tangential) v.push_back({a, PathKind::tangential, -1.0, "tangential-"});
  return v;
}

BuiltScenario build_s0(const ScenarioParams& p) {
  check_grid(p.grid, true);
  const TargetVector c({0.5, -0.25}, p.norm);
  auto f = [c](double) { return c; };
  auto item = [c](int n, const SampledSpace& y) {
    FunSeqItem it;
    it.index = n;
    it.values.assign(y.size(), c);
    it.lip_oracle = [](std::size_t, double) { return 0.0; };
    it.certificate = LipCertificate::analytic;
    it.sup_bound = norm(c);
    return it;
  };
  auto nt = around({0.0, 0.0}, true, true);
  nt.push_back({{0.0, 0.0}, PathKind::mixed, 1.0, "mixed"});
  std::vector<PathSpec> cs = around({0.0, 0.0}, true, true);
  for (const PathSpec& s : around({0.5, 0.0}, true, true)) cs.push_back(s);
  BuiltScenario sc = planar("S0", p, -1.0, SpaceMode::sampled, nt, cs, f, item, 0, -1.0);
  sc.bundle.raw_ucpc_certified = true;
  declare_from_paths(sc);
  sc.ucpc_eps = {0.5, 0.25, 0.125};
  return sc;
}

BuiltScenario build_s1(const ScenarioParams& p) {
  check_grid(p.grid, true);
  const Norm nrm = p.norm;
  auto f = [nrm](double t) { return TargetVector({t >= 0.0 ? 1.0 : -1.0, 0.0}, nrm); };
  auto item = [nrm](int n, const SampledSpace& y) {
    FunSeqItem it;
    it.index = n;
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < y.size(); ++k)
      it.values.push_back(TargetVector({std::clamp(1.0 + nd * y.point(k)[0], -1.0, 1.0), 0.0}, nrm));
    it.lip_oracle = [nd](std::size_t, double) { return nd; };
    it.certificate = LipCertificate::analytic;
    it.sup_bound = 1.0;
    return it;
  };
  auto nt = around({0.0, 0.0}, true, true);
  nt.push_back({{0.0, 0.0}, PathKind::mixed, 1.0, "mixed"});
  std::vector<PathSpec> cs = around({0.5, 0.0}, true, true);
  for (const PathSpec& s : around({-0.5, 0.0}, true, true)) cs.push_back(s);
  BuiltScenario sc = planar("S1", p, -1.0, SpaceMode::sampled, nt, cs, f, item, 0, -1.0);
  // clamp(1 + n t) equals the limit on t >= 0 and on t <= -2/n
  sc.bundle.raw_ucpc_certified = true;
  declare_from_paths(sc);
  sc.ucpc_eps = {0.5, 0.25, 0.125, 0.0625};
  return sc;
}

BuiltScenario build_s2(const ScenarioParams& p) {
  check_grid(p.grid, false);
  const Norm nrm = p.norm;
  auto f = [nrm](double) { return TargetVector::zero(2, nrm); };
  auto item = [nrm](int n, const SampledSpace& y) {
    FunSeqItem it;
    it.index = n;
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double t = y.point(k)[0];
      it.values.push_back(TargetVector({std::max(0.0, 1.0 - 2.0 * nd * std::abs(t - 1.0 / nd)), 0.0}, nrm));
    }
    it.lip_oracle = [nd](std::size_t, double) { return 2.0 * nd; };
    it.certificate = LipCertificate::analytic;
    it.sup_bound = 1.0;
    return it;
  };
  std::vector<PathSpec> nt{{{0.0, 0.0}, PathKind::radial, 1.0, "radial+"},
                           {{0.5, 0.0}, PathKind::radial, 1.0, "radial+"}};
  // radial only: tangential feet would add samples to Y = {i/N}
  std::vector<PathSpec> cs{{{0.5, 0.0}, PathKind::radial, 1.0, "radial+"},
                           {{0.25, 0.0}, PathKind::radial, 1.0, "radial+"}};
  BuiltScenario sc = planar("S2", p, 0.0, SpaceMode::finite, nt, cs, f, item, p.grid - 1, 0.0);
  sc.bundle.raw_ucpc_certified = false;
  for (double t : {0.0, 0.125, 0.25, 0.5, 1.0}) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < sc.y.size(); ++k)
      if (std::abs(sc.y.point(k)[0] - t) < std::abs(sc.y.point(best)[0] - t)) best = k;
    if (std::find(sc.declared_continuity_h.begin(), sc.declared_continuity_h.end(), best) ==
        sc.declared_continuity_h.end())
      sc.declared_continuity_h.push_back(best);
  }
  sc.ucpc_eps = {0.5, 0.25, 0.125, 0.0625};
  return sc;
}

BuiltScenario build_s3(const ScenarioParams& p) {
  check_grid(p.grid, true);
  check_path_params(p);
  constexpr int kmax = 20;
  const std::vector<double> ax = symmetric_axis(p.grid);
  const double delta = ax[1] - ax[0];
  SampleSet set;
  for (double v : ax) set.add({v}, v == 0.0);
  std::map<std::size_t, int> level;  // sample -> k with sample = 1/k
  for (int k = 1; k <= kmax; ++k) {
    const double t = 1.0 / k;
    std::size_t idx = npos;
    for (std::size_t i = 0; i < ax.size(); ++i)
      if (std::abs(ax[i] - t) < 1e-12) idx = set.at({ax[i]});
    if (idx == npos) idx = set.add({t}, true);
    set.h[idx] = true;
    level[idx] = k;
  }
  const std::size_t zero = set.at({0.0});

  BuiltScenario sc;
  sc.name = "S3";
  auto add_paths = [&](double a_t, std::vector<NtCase>& out) {
    const int k = static_cast<int>(std::lround(1.0 / a_t));
    std::size_t anchor = npos;
    for (const auto& [idx, lv] : level)
      if (lv == k) anchor = idx;
    for (double side : {1.0, -1.0}) {
      ApproachPath path;
      path.anchor = anchor;
      path.kind = PathKind::radial;
      path.label = "a=1/" + std::to_string(k) + (side > 0 ? " radial+" : " radial-");
      path.samples = line_path(set, set.points[anchor][0], side, p);
      out.push_back({std::move(path), TargetVector({static_cast<double>(k)}, p.norm)});
    }
  };
  add_paths(0.5, sc.nt);
  add_paths(0.25, sc.nt);
  add_paths(0.5, sc.continuity);
  add_paths(1.0 / 3.0, sc.continuity);

  const SpaceMode mode = p.mode.value_or(SpaceMode::finite);
  Assembled as = assemble(set, mode, delta);
  sc.x = std::move(as.x);
  sc.y = std::move(as.y);
  sc.queries = std::move(as.queries);
  sc.items = items_for(sc.x, sc.queries);

  const auto& hs = sc.x.h_indices();
  auto k_of = [&](std::size_t pos) { return hs[pos] == zero ? 0 : level.at(hs[pos]); };
  sc.bundle.dim = 1;
  sc.bundle.norm = p.norm;
  for (std::size_t pos = 0; pos < hs.size(); ++pos)
    sc.bundle.f.push_back(TargetVector({static_cast<double>(k_of(pos))}, p.norm));
  sc.bundle.converges = std::vector<bool>(hs.size(), true);
  // H is discrete away from 0, where f is discontinuous; continuity points
  // of f are the isolated samples, so pointwise convergence is uniform there
  sc.bundle.raw_ucpc_certified = true;
  for (int n = 1; n <= sc.items; ++n) {
    FunSeqItem it;
    it.index = n;
    for (std::size_t pos = 0; pos < hs.size(); ++pos) {
      const int k = k_of(pos);
      it.values.push_back(TargetVector({k <= n ? static_cast<double>(k) : 0.0}, p.norm));
    }
    it.certificate = LipCertificate::exact_on_samples;
    it.sup_bound = std::min(n, kmax);
    sc.bundle.raw.push_back(std::move(it));
  }
  for (int k = 1; k <= 5; ++k)
    for (std::size_t pos = 0; pos < hs.size(); ++pos)
      if (k_of(pos) == k) sc.declared_continuity_h.push_back(pos);
  sc.continuity_points_isolated = true;
  sc.ucpc_eps = {0.5, 0.25, 0.125};

  auto certificate = [&](double a, double r) -> SupCertificate {
    // f(1/k) = k accumulates at 0, so any ball around a reaching 0 is unbounded
    if (std::abs(a) < 12.0 * r) return {false, 0.0};
    double sup = 0.0;
    for (const auto& [idx, k] : level)
      if (std::abs(set.points[idx][0] - a) < 12.0 * r) sup = std::max(sup, static_cast<double>(k));
    return {true, sup};
  };
  sc.boundedness.push_back({{0.5}, 0.125, certificate(0.5, 0.125)});
  sc.boundedness.push_back({{0.5}, 1.0 / 32.0, certificate(0.5, 1.0 / 32.0)});
  sc.boundedness.push_back({{0.0}, 0.125, certificate(0.0, 0.125)});
  return sc;
}

} // namespace

std::vector<double> symmetric_axis(int n) { return linear_axis(-1.0, 1.0, n); }

const std::vector<ScenarioInfo>& scenario_table() {
  static const std::vector<ScenarioInfo> table{
      {"S0", "constant",
       "f = (0.5, -0.25) on the segment H = [-1,1] x {0} of the square [-1,1]^2. Every item is the same "
       "constant, so the extension is constant wherever n(x) >= 1. NT, continuity and UCPC checks pass "
       "trivially; useful as a smoke test."},
      {"S1", "jump segment",
       "H = [-1,1] x {0} in [-1,1]^2, f(t,0) = (1,0) for t >= 0 and (-1,0) otherwise, "
       "h_n(t) = (clamp(1 + n t, -1, 1), 0). Checks the non-tangential limit at the jump a = (0,0) "
       "along radial, tangential (eps = 0.2) and mixed paths, and continuity of the smoothed extension "
       "at a = (+-0.5, 0)."},
      {"S2", "moving bump",
       "Finite mode. Y = H = {i/N} x {0} with N = grid - 1, f = 0, h_n a tent of height 1 centred at "
       "1/n. The raw sequence is not UCPC at 0; the selection transform (UCPC lemma) makes it so. "
       "Checks UCPC of raw and processed sequences at declared continuity points."},
      {"S3", "boundary blow-up",
       "X = [-1,1], H = {0} u {1/k : k <= 20}, f(0) = 0 and f(1/k) = k. Exercises the local "
       "boundedness hypothesis (f bounded on B(a,12r) cap H), growth of n(x) with unbounded limits, "
       "and the NT limit at a = 1/k."},
  };
  return table;
}

const ScenarioInfo& describe_scenario(const std::string& name) {
  for (const ScenarioInfo& s : scenario_table())
    if (s.name == name) return s;
  throw Error(ErrorCode::unknown_scenario, "unknown scenario '" + name + "'");
}

BuiltScenario build_scenario(const std::string& name, const ScenarioParams& params) {
  if (name == "S0") return build_s0(params);
  if (name == "S1") return build_s1(params);
  if (name == "S2") return build_s2(params);
  if (name == "S3") return build_s3(params);
  throw Error(ErrorCode::unknown_scenario, "unknown scenario '" + name + "'");
}

} // namespace bairext
