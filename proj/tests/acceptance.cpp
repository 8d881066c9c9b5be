// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "bairext/runner.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bairext;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int failures = 0;

void report(int id, const char* name, const Outcome& o) {
  std::printf("criterion %d: %s - %s%s%s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.empty() ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

RunConfig config(const std::string& scenario, int grid = 0) {
  RunConfig cfg;
  cfg.scenario = scenario;
  if (grid > 0) cfg.params.grid = grid;
  cfg.seed = 7;
  return cfg;
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const CertReport* find(const RunOutput& out, const std::string& prop, const std::string& target) {
  for (const RunReport& r : out.reports)
    if (r.report.property == prop && r.report.target == target) return &r.report;
  return nullptr;
}

double metric(const CertReport& r, const std::string& key) {
  for (const auto& [k, v] : r.metrics)
    if (k == key) return v;
  return NAN;
}

// --- criterion 1 -----------------------------------------------------------

Outcome inequality_suite(const RunOutput& s1, double t1, const RunOutput& s3, double t3) {
  Outcome o;
  static const char* props[] = {"general-inequality", "fG",   "approxOnCk", "blizko",
                                "select-maximality",  "alp5", "factor4"};
  std::size_t checked = 0;
  for (const RunOutput* out : {&s1, &s3})
    for (const char* p : props) {
      const CertReport* r = nullptr;
      for (const RunReport& rr : out->reports)
        if (rr.report.property == p) r = &rr.report;
      if (!r) o.fail(out->scenario.name + " has no " + p + " report");
      else if (r->status != CertStatus::pass) o.fail(out->scenario.name + " " + p + ": " + r->detail);
      else checked += r->checked;
    }
  if (t1 + t3 >= 10.0) o.fail("runtime " + fixed(t1 + t3) + " s");
  if (o.pass) o.detail = std::to_string(checked) + " checks, " + fixed(t1 + t3) + " s";
  return o;
}

// --- criterion 2 -----------------------------------------------------------

Outcome nt_origin(const RunOutput& s1, double t1) {
  Outcome o;
  int paths = 0;
  double worst = 0.0;
  for (const char* label : {"radial+", "radial-", "tangential+", "tangential-"}) {
    const CertReport* r = find(s1, "NT", std::string("a=(0,0) ") + label);
    if (!r) {
      o.fail(std::string("missing path ") + label);
      continue;
    }
    ++paths;
    if (r->trace.size() != 12) o.fail(std::string(label) + ": " + std::to_string(r->trace.size()) + " steps");
    for (const TraceRow& row : r->trace)
      if (!(row.value <= row.bound + 1e-12))
        o.fail(std::string(label) + " step " + std::to_string(row.step) + " above bound");
    const std::size_t tail = r->trace.size() - r->trace.size() / 3;
    for (std::size_t j = tail; j < r->trace.size(); ++j) {
      worst = std::max(worst, r->trace[j].value);
      if (!(r->trace[j].value < 5e-2)) o.fail(std::string(label) + " envelope " + fixed(r->trace[j].value));
    }
    if (r->status != CertStatus::pass) o.fail(std::string(label) + ": " + status_name(r->status));
  }
  if (t1 >= 30.0) o.fail("runtime " + fixed(t1) + " s");
  if (o.pass) o.detail = std::to_string(paths) + " paths, tail max " + fixed(worst);
  return o;
}

// --- criterion 3 -----------------------------------------------------------

Outcome continuity_s1(const RunOutput& s1) {
  Outcome o;
  int paths = 0;
  double worst = 0.0;
  for (const RunReport& rr : s1.reports) {
    const CertReport& r = rr.report;
    if (r.property != "C") continue;
    if (r.target.rfind("a=(0.5,0)", 0) != 0 && r.target.rfind("a=(-0.5,0)", 0) != 0) continue;
    ++paths;
    for (const TraceRow& row : r.trace)
      if (row.step > 4) {
        worst = std::max(worst, row.value);
        if (!(row.value < 5e-2)) o.fail(r.target + " step " + std::to_string(row.step) + ": " + fixed(row.value));
      }
  }
  if (paths < 8) o.fail("expected 8 paths, found " + std::to_string(paths));
  if (o.pass) o.detail = std::to_string(paths) + " paths, max deviation " + fixed(worst);
  return o;
}

// --- criterion 4 -----------------------------------------------------------

double sampled_sup(const RunOutput& out, double a, double r) {
  double sup = 0.0;
  for (const QueryRecord& q : out.field.queries)
    if (std::abs(q.x[0] - a) < r) sup = std::max(sup, norm(q.g_smooth));
  return sup;
}

Outcome boundedness_s3(const RunOutput& s3) {
  Outcome o;
  const CertReport* half = find(s3, "B", "a=(0.5) r=0.125");
  const CertReport* zero = find(s3, "B", "a=(0) r=0.125");
  if (!half || !zero) {
    o.fail("missing boundedness reports");
    return o;
  }
  if (zero->status != CertStatus::not_applicable)
    o.fail(std::string("a=0 reported ") + status_name(zero->status) + " instead of hypothesis-not-met");
  if (half->status != CertStatus::pass) {
    o.fail(std::string("a=1/2 r=1/8 ") + status_name(half->status) + " (" + half->detail + "); sampled sup " +
           fixed(sampled_sup(s3, 0.5, 0.125)));
    if (const CertReport* small = find(s3, "B", "a=(0.5) r=0.03125"); small && small->status == CertStatus::pass)
      o.detail += "; r=1/32 passes with bound " + fixed(metric(*small, "bound"));
  } else {
    const double sup = sampled_sup(s3, 0.5, 0.125);
    if (!(sup <= metric(*half, "bound"))) o.fail("sup " + fixed(sup) + " above bound");
    if (std::abs(sup - metric(*half, "sup_g_smooth")) > 1e-12) o.fail("reported sup disagrees with brute force");
  }
  if (o.pass) o.detail = "bound " + fixed(metric(*half, "bound"));
  return o;
}

// --- criterion 5 -----------------------------------------------------------

// First (rho, k0) by exhaustive forward scan; nullopt on failure, and
// `eligible` false when no ball qualifies.
std::optional<UcpcWitness> ucpc_oracle(const SampledSpace& y, const std::vector<FunSeqItem>& items,
                                       const TargetVector& f0, std::size_t y0, double eps, bool isolated,
                                       bool& eligible) {
  eligible = false;
  const int n = static_cast<int>(items.size());
  for (int e = 1; e <= 10; ++e) {
    const double rho = std::ldexp(1.0, -e);
    std::vector<std::size_t> ball;
    for (std::size_t p = 0; p < y.size(); ++p)
      if (y.distance(y0, p) < rho) ball.push_back(p);
    if (ball.size() < 2 && !isolated) continue;
    eligible = true;
    for (int k0 = 1; k0 <= n; ++k0) {
      bool ok = true;
      for (int k = k0; k <= n && ok; ++k)
        for (std::size_t p : ball)
          if (!(distance(items[static_cast<std::size_t>(k - 1)].values[p], f0) < eps)) {
            ok = false;
            break;
          }
      if (ok) return UcpcWitness{eps, rho, k0};
    }
  }
  return std::nullopt;
}

void compare_ucpc(const BuiltScenario& sc, const std::vector<FunSeqItem>& items, std::size_t y0,
                  const std::string& what, Outcome& o, int& agreements) {
  std::vector<UcpcWitness> got;
  const CertReport r = check_ucpc(sc.y, items, sc.bundle.f[y0], y0, sc.ucpc_eps, sc.continuity_points_isolated, &got);
  CertStatus want = CertStatus::pass;
  std::vector<UcpcWitness> expect;
  for (double eps : sc.ucpc_eps) {
    bool eligible = false;
    const auto w = ucpc_oracle(sc.y, items, sc.bundle.f[y0], y0, eps, sc.continuity_points_isolated, eligible);
    if (!eligible) {
      want = CertStatus::inconclusive;
      break;
    }
    if (w) expect.push_back(*w);
    else want = CertStatus::fail;
  }
  if (r.status != want) {
    o.fail(what + " y0=" + std::to_string(y0) + ": checker " + status_name(r.status) + ", oracle " + status_name(want));
    return;
  }
  if (want != CertStatus::inconclusive) {
    bool same = got.size() == expect.size();
    for (std::size_t i = 0; same && i < got.size(); ++i)
      same = got[i].eps == expect[i].eps && got[i].rho == expect[i].rho && got[i].k0 == expect[i].k0;
    if (!same) {
      o.fail(what + " y0=" + std::to_string(y0) + ": witnesses differ from the oracle");
      return;
    }
  }
  ++agreements;
}

Outcome ucpc_s2(const RunOutput& s2) {
  Outcome o;
  const BuiltScenario& sc = s2.scenario;
  const CertReport* raw = find(s2, "UCPC-raw", "y0=0");
  if (!raw || raw->status != CertStatus::fail || raw->detail.empty()) o.fail("raw sequence does not fail at y0=0");
  int declared = 0;
  for (std::size_t y0 : sc.declared_continuity_h) {
    const CertReport* r = find(s2, "UCPC", "y0=" + std::to_string(y0));
    if (!r || r->status != CertStatus::pass) o.fail("pipeline output not UCPC at y0=" + std::to_string(y0));
    else if (r->metrics.size() != sc.ucpc_eps.size()) o.fail("missing k0 witnesses at y0=" + std::to_string(y0));
    ++declared;
  }
  int agreements = 0;
  for (std::size_t y0 : sc.declared_continuity_h) {
    compare_ucpc(sc, sc.bundle.raw, y0, "raw", o, agreements);
    compare_ucpc(sc, s2.pipeline.items, y0, "pipeline", o, agreements);
  }
  if (o.pass)
    o.detail = std::to_string(declared) + " declared points, oracle agrees on " + std::to_string(agreements) +
               " verdicts; raw witness " + raw->detail;
  return o;
}

// --- criterion 6 -----------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  std::vector<Point> pts;
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < 50; ++i) {
    pts.push_back({u(rng), u(rng)});
    all.push_back(i);
  }
  double worst = 0.0;
  std::size_t compared = 0;
  for (SpaceMode mode : {SpaceMode::finite, SpaceMode::sampled}) {
    const auto y = SampledSpace::euclidean(pts, all, mode, mode == SpaceMode::sampled ? 0.02 : 0.0);
    FunSeqItem h;
    h.index = 4;
    for (const Point& p : pts)
      h.values.push_back(TargetVector({std::sin(7.0 * p[0]) + (p[1] > 0.5 ? 1.0 : 0.0), p[0] * p[1]}, Norm::l2));
    for (int n : {1, 4, 16}) {
      const MollifyResult res = lipschitz_mollify(y, h, n);
      for (std::size_t k = 0; k < y.size(); ++k) {
        const double d = distance(res.item.values[k], oracle::blend_oracle(y, res, h, k));
        worst = std::max(worst, d);
        ++compared;
      }
    }
  }
  if (!(worst <= 1e-12)) o.fail("mollifier deviates by " + fixed(worst));

  std::uniform_real_distribution<double> radius(0.1, 1.5), coord(-1.0, 1.0);
  std::uniform_int_distribution<int> count(1, 6), dims(1, 3);
  int families = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = static_cast<std::size_t>(dims(rng));
    std::vector<TargetBall> balls;
    for (int b = count(rng); b > 0; --b) {
      std::vector<double> c(m);
      for (double& v : c) v = coord(rng);
      balls.push_back({TargetVector(c, Norm::linf), radius(rng), true});
    }
    const double slack = 0.25;
    const auto got = ball_intersection_point(balls, slack, m, Norm::linf);
    auto want = oracle::box_oracle(balls, m, 0.0);
    if (!want) want = oracle::box_oracle(balls, m, slack);
    if (got.has_value() != want.has_value() || (got && got->coords != *want)) {
      o.fail("box oracle disagrees on family " + std::to_string(t));
      break;
    }
    ++families;
  }
  if (o.pass)
    o.detail = std::to_string(compared) + " mollified values (max diff " + fixed(worst) + "), " +
               std::to_string(families) + " box families";
  return o;
}

// --- criterion 7 -----------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "bairext_acceptance";
  std::filesystem::remove_all(root);
  int files = 0;
  const std::vector<std::pair<std::string, int>> runs{{"S0", 0}, {"S1", 65}, {"S2", 65}, {"S3", 0}};
  for (const auto& [name, grid] : runs)
    for (const char* format : {"csv", "json"}) {
      std::vector<std::filesystem::path> dirs;
      for (int rep = 0; rep < 2; ++rep) {
        RunConfig cfg = config(name, grid);
        cfg.format = format;
        cfg.out = (root / (name + "_" + format + "_" + std::to_string(rep))).string();
        write_outputs(cfg, run_scenario(cfg));
        dirs.emplace_back(cfg.out);
      }
      for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
        const auto other = dirs[1] / entry.path().filename();
        if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other))
          o.fail(name + " " + entry.path().filename().string() + " differs between runs");
        ++files;
      }
    }
  std::filesystem::remove_all(root);
  if (o.pass) o.detail = std::to_string(files) + " file pairs identical";
  return o;
}

} // namespace

int main() {
  try {
    auto t = Clock::now();
    const RunOutput s1 = run_scenario(config("S1"));
    const double t1 = seconds_since(t);
    t = Clock::now();
    const RunOutput s3 = run_scenario(config("S3"));
    const double t3 = seconds_since(t);

    report(1, "inequality suite on S1 and S3", inequality_suite(s1, t1, s3, t3));
    report(2, "NT at the S1 origin", nt_origin(s1, t1));
    report(3, "continuity at S1 (+-0.5, 0)", continuity_s1(s1));
    report(4, "boundedness on S3", boundedness_s3(s3));
    report(5, "UCPC on S2", ucpc_s2(run_scenario(config("S2"))));
    report(6, "mollifier and box oracles", oracle_equivalence());
    report(7, "determinism", determinism());
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
