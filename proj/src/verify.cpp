#include "bairext/verify.hpp"

#include "bairext/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace bairext {

const char* status_name(CertStatus s) noexcept {
  switch (s) {
    case CertStatus::pass: return "pass";
    case CertStatus::fail: return "fail";
    case CertStatus::inconclusive: return "inconclusive";
    case CertStatus::not_applicable: return "not_applicable";
  }
  return "unknown";
}

const char* path_kind_name(PathKind k) noexcept {
  switch (k) {
    case PathKind::radial: return "radial";
    case PathKind::tangential: return "tangential";
    case PathKind::mixed: return "mixed";
  }
  return "unknown";
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string point_text(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + num(p[i]);
  return s + ")";
}

struct Tally {
  CertReport& report;
  double worst = 0.0;
  void hit(double excess, const std::string& what) {
    if (report.status != CertStatus::fail) {
      report.status = CertStatus::fail;
      report.detail = what;
    }
    worst = std::max(worst, excess);
  }
  void done() { report.metrics.emplace_back("max_violation", worst); }
};

CertReport make_report(std::string property, std::string target, double tol) {
  CertReport r;
  r.property = std::move(property);
  r.target = std::move(target);
  r.tolerance = tol;
  return r;
}

std::unordered_map<std::size_t, std::size_t> query_lookup(const ExtensionField& field) {
  std::unordered_map<std::size_t, std::size_t> m;
  for (std::size_t q = 0; q < field.queries.size(); ++q) m.emplace(field.queries[q].sample, q);
  return m;
}

const QueryRecord& query_at(const ExtensionField& field,
                            const std::unordered_map<std::size_t, std::size_t>& lookup, std::size_t sample) {
  auto it = lookup.find(sample);
  if (it == lookup.end())
    throw Error(ErrorCode::not_covered, "path sample " + std::to_string(sample) + " is not a query");
  return field.queries[it->second];
}

CertStatus status_from(std::span<const double> values, double tol, std::size_t start, std::size_t* first_bad) {
  if (values.empty()) return CertStatus::inconclusive;
  start = std::min(start, values.size() - 1);
  bool all_below = true;
  for (std::size_t j = start; j < values.size(); ++j)
    if (!(values[j] < tol)) {
      if (all_below && first_bad) *first_bad = j;
      all_below = false;
    }
  if (all_below) return CertStatus::pass;
  const auto peak = std::max_element(values.begin(), values.end());
  if (static_cast<std::size_t>(peak - values.begin()) >= start) return CertStatus::fail;
  return CertStatus::inconclusive;
}

double boundary_bound(const Extender& ext, int n, std::size_t anchor, const TargetVector& f_a) {
  if (n <= 0) return inf;
  const double nd = static_cast<double>(n);
  return 1.0 / nd + norm(f_a) / nd + distance(ext.item_value(n, anchor), f_a);
}

} // namespace

void validate_path(const SampledSpace& space, const ApproachPath& path) {
  if (path.anchor == npos || !space.in_h(path.anchor))
    throw Error(ErrorCode::invalid_input, "path anchor is not an H sample");
  double prev = inf;
  for (std::size_t j = 0; j < path.samples.size(); ++j) {
    const std::size_t s = path.samples[j];
    if (space.in_h(s)) throw Error(ErrorCode::invalid_input, "path step " + std::to_string(j) + " lies in H");
    const double d = space.distance(s, path.anchor);
    if (!(d < prev))
      throw Error(ErrorCode::invalid_input, "path step " + std::to_string(j) + " does not approach the anchor");
    prev = d;
    if (path.kind == PathKind::tangential && dist_to_set(space, s) / d > path.eps)
      throw Error(ErrorCode::invalid_input, "path step " + std::to_string(j) + " breaks the tangential bound");
  }
}

CertStatus decay_status(std::span<const double> values, double tol, std::size_t* first_bad) {
  return status_from(values, tol, values.size() - values.size() / 3, first_bad);
}

CertReport check_nt(const ExtensionField& field, const Extender& ext, const ApproachPath& path,
                    const TargetVector& f_a, double tol, bool smoothed) {
  CertReport rep = make_report(smoothed ? "NT-smooth" : "NT", path.label, tol);
  const auto lookup = query_lookup(field);
  std::vector<double> values;
  std::string dominated;
  for (std::size_t j = 0; j < path.samples.size(); ++j) {
    const QueryRecord& q = query_at(field, lookup, path.samples[j]);
    TraceRow row;
    row.step = static_cast<int>(j);
    row.d_xa = field.space.distance(q.sample, path.anchor);
    row.dist_h = q.dist_h;
    row.n = q.n;
    row.value = distance(smoothed ? q.g_smooth : q.g, f_a) * q.dist_h / row.d_xa;
    if (!smoothed) {
      row.bound = boundary_bound(ext, q.n, path.anchor, f_a);
      if (row.value > row.bound + 1e-12 && dominated.empty())
        dominated = "step " + std::to_string(j) + ": quotient " + num(row.value) + " above bound " + num(row.bound);
    }
    values.push_back(row.value);
    rep.trace.push_back(row);
  }
  std::size_t bad = 0;
  rep.status = decay_status(values, tol, &bad);
  rep.checked = values.size();
  if (!dominated.empty()) {
    rep.status = CertStatus::fail;
    rep.detail = dominated;
  } else if (rep.status != CertStatus::pass && !values.empty()) {
    rep.detail = "step " + std::to_string(bad) + ": quotient " + num(values[bad]) + " >= tol";
  }
  if (!values.empty()) rep.metrics.emplace_back("final", values.back());
  return rep;
}

CertReport check_continuity(const ExtensionField& field, const Extender& ext, const ApproachPath& path,
                            const TargetVector& f_a, bool declared_continuous, double tol) {
  (void)ext;
  if (!declared_continuous)
    throw Error(ErrorCode::misuse, "continuity check requested at an undeclared point (" + path.label + ")");
  CertReport rep = make_report("C", path.label, tol);
  const auto lookup = query_lookup(field);
  std::vector<double> values;
  for (std::size_t j = 0; j < path.samples.size(); ++j) {
    const QueryRecord& q = query_at(field, lookup, path.samples[j]);
    TraceRow row;
    row.step = static_cast<int>(j);
    row.d_xa = field.space.distance(q.sample, path.anchor);
    row.dist_h = q.dist_h;
    row.n = q.n;
    row.value = distance(q.g_smooth, f_a);
    values.push_back(row.value);
    rep.trace.push_back(row);
  }
  std::size_t bad = 0;
  rep.status = status_from(values, tol, values.size() / 3, &bad);
  rep.checked = values.size();
  if (rep.status != CertStatus::pass && !values.empty())
    rep.detail = "step " + std::to_string(bad) + ": deviation " + num(values[bad]) + " >= tol";
  return rep;
}

CertReport check_boundedness(const ExtensionField& field, const Extender& ext, const Point& a, double r,
                             const std::optional<SupCertificate>& certificate) {
  CertReport rep = make_report("B", "a=" + point_text(a) + " r=" + num(r), 0.0);
  if (!certificate) throw Error(ErrorCode::missing_certificate, "no sup certificate for " + rep.target);
  if (!certificate->bounded) {
    rep.status = CertStatus::not_applicable;
    rep.detail = "hypothesis not met: f unbounded on B(a, 12r) cap H";
    return rep;
  }
  const double delta = ext.space().delta();
  if (delta > 5.0 * r) {
    rep.status = CertStatus::not_applicable;
    rep.detail = "grid spacing " + num(delta) + " exceeds 5r";
    return rep;
  }
  const double p0 = std::floor(certificate->sup) + 1.0;
  const double m = p0 + 1.0 + 1.0 / r;
  double sup_g = 0.0;
  int n_min = 0;
  for (std::size_t p = 0; p < field.queries.size(); ++p) {
    const QueryRecord& q = field.queries[p];
    if (!(field.space.distance(a, q.sample) < r)) continue;
    ++rep.checked;
    sup_g = std::max(sup_g, norm(q.g_smooth));
    for (const auto& [c, w] : field.cover.weights[p]) {
      const int n = field.centers[c].record.n;
      if (n > 0 && (n_min == 0 || n < n_min)) n_min = n;
    }
  }
  const double bound = m + (n_min > 0 ? 2.0 / n_min : 0.0);
  rep.metrics = {{"sup_g_smooth", sup_g}, {"p0", p0}, {"M", m}, {"n_min", static_cast<double>(n_min)},
                 {"bound", bound}};
  rep.tolerance = bound;
  if (rep.checked == 0) {
    rep.status = CertStatus::inconclusive;
    rep.detail = "no query samples in B(a, r)";
  } else if (!(sup_g <= bound)) {
    rep.status = CertStatus::fail;
    rep.detail = "sup " + num(sup_g) + " above bound " + num(bound);
  }
  return rep;
}

CertReport check_ucpc(const SampledSpace& y_space, const std::vector<FunSeqItem>& items,
                      const TargetVector& f_y0, std::size_t y0, std::span<const double> eps_grid,
                      bool isolated, std::vector<UcpcWitness>* witnesses) {
  CertReport rep = make_report("UCPC", "y0=" + std::to_string(y0), 0.0);
  const int kmax = static_cast<int>(items.size());
  std::vector<std::vector<std::size_t>> balls;
  std::vector<double> radii;
  for (int e = 1; e <= 10; ++e) {
    const double rho = std::ldexp(1.0, -e);
    std::vector<std::size_t> ball;
    for (std::size_t y = 0; y < y_space.size(); ++y)
      if (y_space.distance(y0, y) < rho) ball.push_back(y);
    if (ball.size() < 2 && !isolated) continue;
    balls.push_back(std::move(ball));
    radii.push_back(rho);
  }
  if (balls.empty()) {
    rep.status = CertStatus::inconclusive;
    rep.detail = "no neighbourhood of y0 holds another sample";
    return rep;
  }
  for (std::size_t ei = 0; ei < eps_grid.size(); ++ei) {
    const double eps = eps_grid[ei];
    std::optional<UcpcWitness> found;
    for (std::size_t b = 0; b < balls.size() && !found; ++b) {
      // last level with a violation inside the ball; k0 is the one after it
      int last_bad = 0;
      for (int k = kmax; k >= 1 && last_bad == 0; --k)
        for (std::size_t y : balls[b])
          if (!(distance(items[static_cast<std::size_t>(k - 1)].values[y], f_y0) < eps)) {
            last_bad = k;
            break;
          }
      if (last_bad < kmax) found = UcpcWitness{eps, radii[b], last_bad + 1};
    }
    ++rep.checked;
    TraceRow row;
    row.step = static_cast<int>(ei);
    row.bound = eps;
    if (found) {
      row.value = found->rho;
      row.n = found->k0;
      rep.metrics.emplace_back("k0@eps=" + num(eps), found->k0);
      if (witnesses) witnesses->push_back(*found);
    } else {
      row.value = 0.0;
      if (rep.status != CertStatus::fail) {
        rep.status = CertStatus::fail;
        const auto& ball = balls.back();
        for (std::size_t y : ball)
          if (!(distance(items.back().values[y], f_y0) < eps)) {
            rep.detail = "eps=" + num(eps) + " k=" + std::to_string(kmax) + " y=" + std::to_string(y) +
                         " value distance " + num(distance(items.back().values[y], f_y0));
            break;
          }
      }
    }
    rep.trace.push_back(row);
  }
  return rep;
}

double oscillation(const SampledSpace& space, std::span<const TargetVector> values, std::size_t y,
                   double radius) {
  std::vector<std::size_t> ball;
  for (std::size_t z = 0; z < space.size(); ++z)
    if (space.distance(y, z) < radius) ball.push_back(z);
  double osc = 0.0;
  for (std::size_t a = 0; a < ball.size(); ++a)
    for (std::size_t b = a + 1; b < ball.size(); ++b)
      osc = std::max(osc, distance(values[ball[a]], values[ball[b]]));
  return osc;
}

// ---------------------------------------------------------------------------

CertReport check_general_inequality(const ExtensionField& field, const Extender& ext) {
  CertReport rep = make_report("general-inequality", "all queries", 0.0);
  Tally t{rep};
  const SampledSpace& s = ext.space();
  for (const QueryRecord& q : field.queries) {
    const double xu = s.distance(q.sample, q.u);
    ++rep.checked;
    if (!(xu <= 2.0 * q.dist_h)) t.hit(xu - 2.0 * q.dist_h, "query " + std::to_string(q.sample) + ": d(x,u) > 2 dist");
    for (std::size_t a : s.h_indices()) {
      const double xa = s.distance(q.sample, a);
      const double au = s.distance(a, q.u);
      ++rep.checked;
      if (!(q.dist_h <= xa))
        t.hit(q.dist_h - xa, "query " + std::to_string(q.sample) + ", a=" + std::to_string(a) + ": dist > d(x,a)");
      if (!(au <= 3.0 * xa))
        t.hit(au - 3.0 * xa, "query " + std::to_string(q.sample) + ", a=" + std::to_string(a) + ": d(a,u) > 3 d(a,x)");
    }
  }
  t.done();
  return rep;
}

CertReport check_select_maximality(const ExtensionField& field, const Extender& ext) {
  CertReport rep = make_report("select-maximality", "all queries", 0.0);
  Tally t{rep};
  const int available = static_cast<int>(ext.items().size());
  for (const QueryRecord& q : field.queries) {
    ++rep.checked;
    const int top = std::min(select_ceiling(q.dist_h), available);
    if (q.n > 0 && !selection_holds(q.dist_h, q.n, ext.local_lip_K(q.u, q.dist_h, q.n)))
      t.hit(1.0, "query " + std::to_string(q.sample) + ": n=" + std::to_string(q.n) + " fails the inequality");
    for (int n = q.n + 1; n <= top; ++n)
      if (selection_holds(q.dist_h, n, ext.local_lip_K(q.u, q.dist_h, n)))
        t.hit(1.0, "query " + std::to_string(q.sample) + ": larger n=" + std::to_string(n) + " also qualifies");
  }
  t.done();
  return rep;
}

CertReport check_alp5(const ExtensionField& field, const Extender& ext, std::span<const TargetVector> f_h,
                      std::span<const std::size_t> anchors) {
  CertReport rep = make_report("alp5", "queries x boundary anchors", 1e-12);
  Tally t{rep};
  const SampledSpace& s = ext.space();
  for (const QueryRecord& q : field.queries) {
    if (q.n <= 0) continue;
    for (std::size_t a : anchors) {
      const TargetVector& fa = f_h[s.h_position(a)];
      const double lhs = distance(q.g, fa) * q.dist_h / s.distance(q.sample, a);
      const double rhs = boundary_bound(ext, q.n, a, fa);
      ++rep.checked;
      if (lhs > rhs + 1e-12)
        t.hit(lhs - rhs, "query " + std::to_string(q.sample) + ", a=" + std::to_string(a) + ": " + num(lhs) +
                             " > " + num(rhs));
    }
  }
  t.done();
  return rep;
}

CertReport check_rho_branch(const ExtensionField& field, const Extender& ext) {
  CertReport rep = make_report("rho-branch", "all queries", 0.0);
  Tally t{rep};
  const SampledSpace& s = ext.space();
  for (const QueryRecord& q : field.queries) {
    if (q.n <= 0) continue;
    const double k = ext.local_lip_K(q.u, q.dist_h, q.n);
    if (!(k < inf)) continue;
    const double nd = static_cast<double>(q.n);
    for (std::size_t a : s.h_indices()) {
      if (!(q.dist_h / s.distance(q.sample, a) > 1.0 / (nd * growth_m(q.n)))) continue;
      ++rep.checked;
      const double ua = s.distance(q.u, a);
      if (!(ua < 1.0 / (nd * k)))
        t.hit(ua - 1.0 / (nd * k), "query " + std::to_string(q.sample) + ", a=" + std::to_string(a));
    }
  }
  t.done();
  return rep;
}

CertReport check_factor4(const ExtensionField& field, const Extender& ext) {
  CertReport rep = make_report("factor4", "queries x contributors x H", 0.0);
  Tally t{rep};
  const SampledSpace& s = field.space;
  const auto& hs = ext.space().h_indices();
  for (std::size_t p = 0; p < field.queries.size(); ++p) {
    const QueryRecord& q = field.queries[p];
    for (const auto& [c, w] : field.cover.weights[p]) {
      const SmoothingCenter& ctr = field.centers[c];
      for (std::size_t a : hs) {
        const double qx = q.dist_h / s.distance(q.sample, a);
        const double qc = ctr.record.dist_h / s.distance(ctr.sample, a);
        ++rep.checked;
        if (!(qx / 4.0 <= qc && qc <= 4.0 * qx))
          t.hit(std::max(qx / 4.0 - qc, qc - 4.0 * qx),
                "query " + std::to_string(q.sample) + ", center " + std::to_string(ctr.sample) + ", a=" +
                    std::to_string(a));
      }
    }
  }
  t.done();
  return rep;
}

CertReport check_convexity(const ExtensionField& field, double slack) {
  CertReport rep = make_report("convexity", "all queries", slack);
  Tally t{rep};
  for (std::size_t p = 0; p < field.queries.size(); ++p) {
    const QueryRecord& q = field.queries[p];
    const auto& row = field.cover.weights[p];
    if (row.empty()) continue;
    ++rep.checked;
    const std::size_t m = q.g_smooth.coords.size();
    std::vector<double> lo(m, inf), hi(m, -inf);
    double top = 0.0;
    for (const auto& [c, w] : row) {
      const TargetVector& g = field.centers[c].record.g;
      top = std::max(top, norm(g));
      for (std::size_t i = 0; i < m; ++i) {
        lo[i] = std::min(lo[i], g.coords[i]);
        hi[i] = std::max(hi[i], g.coords[i]);
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double v = q.g_smooth.coords[i];
      if (v < lo[i] - slack || v > hi[i] + slack)
        t.hit(std::max(lo[i] - v, v - hi[i]), "query " + std::to_string(q.sample) + ": outside contributor hull");
    }
    if (norm(q.g_smooth) > top + slack)
      t.hit(norm(q.g_smooth) - top, "query " + std::to_string(q.sample) + ": norm above contributors");
  }
  t.done();
  return rep;
}

CertReport check_fg(const SelectionState& selection, const SampledSpace& y_space,
                    std::span<const TargetVector> f) {
  CertReport rep = make_report("fG", "all levels", 0.0);
  Tally t{rep};
  for (const SelectionLevel& level : selection.levels) {
    const double eps = std::ldexp(1.0, -level.k);
    for (std::size_t g = 0; g < level.refined.balls.size(); ++g)
      for (std::size_t y = 0; y < y_space.size(); ++y) {
        if (!ball_contains(y_space, level.refined.balls[g], y)) continue;
        ++rep.checked;
        const double d = distance(f[y], level.centers[g]);
        if (!(d < eps))
          t.hit(d - eps, "level " + std::to_string(level.k) + ", ball " + std::to_string(g) + ", y=" +
                             std::to_string(y));
      }
  }
  t.done();
  return rep;
}

CertReport check_approx_on_ck(const SelectionState& selection, const std::vector<FunSeqItem>& raw,
                              const std::vector<FunSeqItem>& selected) {
  CertReport rep = make_report("approxOnCk", "all levels", 0.0);
  Tally t{rep};
  for (std::size_t kk = 0; kk < selection.in_c.size(); ++kk) {
    const double eps = std::ldexp(1.0, -static_cast<int>(kk + 1));
    for (std::size_t y = 0; y < selection.in_c[kk].size(); ++y) {
      if (!selection.in_c[kk][y]) continue;
      ++rep.checked;
      const double d = distance(selected[kk].values[y], raw[kk].values[y]);
      if (!(d < eps)) t.hit(d - eps, "level " + std::to_string(kk + 1) + ", y=" + std::to_string(y));
    }
  }
  t.done();
  return rep;
}

CertReport check_blizko(const std::vector<FunSeqItem>& items, const std::vector<FunSeqItem>& hat) {
  CertReport rep = make_report("blizko", "all items", 0.0);
  Tally t{rep};
  for (std::size_t k = 0; k < items.size(); ++k) {
    const double bound = 2.0 / static_cast<double>(items[k].index);
    for (std::size_t y = 0; y < items[k].values.size(); ++y) {
      ++rep.checked;
      const double d = distance(items[k].values[y], hat[k].values[y]);
      if (d > bound) t.hit(d - bound, "n=" + std::to_string(items[k].index) + ", y=" + std::to_string(y));
    }
  }
  t.done();
  return rep;
}

} // namespace bairext
