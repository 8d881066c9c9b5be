#include "bairext/baire_pipeline.hpp"
#include "bairext/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace bairext;
using namespace bairext::oracle;

namespace {

SampledSpace line_space(const std::vector<double>& xs, SpaceMode mode, double delta = 0.0) {
  std::vector<Point> pts;
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts.push_back({xs[i]});
    all.push_back(i);
  }
  return SampledSpace::euclidean(pts, all, mode, delta);
}

std::vector<double> grid01(int n) {
  std::vector<double> xs;
  for (int i = 0; i <= n; ++i) xs.push_back(static_cast<double>(i) / n);
  return xs;
}

TargetVector scalar(double v, Norm n = Norm::l2) { return TargetVector({v}, n); }

FunSeqItem table(int index, const SampledSpace& y, const std::function<double(double)>& fn) {
  FunSeqItem it;
  it.index = index;
  for (std::size_t k = 0; k < y.size(); ++k) it.values.push_back(scalar(fn(y.point(k)[0])));
  return it;
}

// r(y) straight from the definition, scanning every n up to `nmax`.
double radius_oracle(const SampledSpace& y, const std::vector<TargetVector>& f, const std::vector<bool>& conv,
                     std::size_t at, int nmax) {
  const std::size_t m = y.size();
  double best = INFINITY;
  for (int n = 1; n <= nmax; ++n) {
    std::vector<bool> s(m), o(m);
    for (std::size_t i = 0; i < m; ++i) s[i] = conv[i] && norm(f[i]) < n;
    for (std::size_t i = 0; i < m; ++i) {
      o[i] = s[i];
      if (y.mode() == SpaceMode::sampled && s[i])
        for (std::size_t j = 0; j < m; ++j)
          if (!s[j] && y.distance(i, j) < y.delta()) o[i] = false;
    }
    if (!o[at]) continue;
    double d = INFINITY;
    for (std::size_t j = 0; j < m; ++j)
      if (!o[j]) d = std::min(d, y.distance(at, j));
    best = std::min(best, n + 1 + (std::isinf(d) ? 0.0 : 1.0 / d));
  }
  return best;
}

} // namespace

TEST_CASE("bound_sequence clips item n to the ball of radius n") {
  const auto y = line_space(grid01(10), SpaceMode::finite);
  FunSeqItem it = table(2, y, [](double t) { return 10.0 * t - 3.0; });
  it.lip_oracle = [](std::size_t, double) { return 10.0; };
  const auto out = bound_sequence({it});
  for (std::size_t k = 0; k < y.size(); ++k) {
    CHECK(norm(out[0].values[k]) <= 2.0);
    if (std::abs(it.values[k].coords[0]) <= 2.0) CHECK(out[0].values[k] == it.values[k]);
  }
  CHECK(out[0].sup_bound == 2.0);
  CHECK(out[0].lip_oracle(0, 1.0) == 10.0);  // l2: retraction is 1-Lipschitz

  FunSeqItem li = it;
  for (auto& v : li.values) v = TargetVector({v.coords[0], 0.0}, Norm::linf);
  CHECK(bound_sequence({li})[0].lip_oracle(0, 1.0) == 20.0);
}

TEST_CASE("local bound radius: constant zero limit gives 2") {
  const auto y = line_space(grid01(8), SpaceMode::finite);
  const std::vector<TargetVector> f(y.size(), scalar(0.0));
  const auto r = local_bound_radii(y, f, std::vector<bool>(y.size(), true));
  for (double v : r) CHECK(v == 2.0);
  CHECK_THROWS_AS(local_bound_radii(y, f, std::nullopt), Error);
}

TEST_CASE("local bound radius agrees with the definition") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> val(-7.0, 7.0);
  std::bernoulli_distribution conv(0.85);
  for (SpaceMode mode : {SpaceMode::finite, SpaceMode::sampled}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> xs = grid01(30);
      const auto y = line_space(xs, mode, mode == SpaceMode::sampled ? 1.0 / 30.0 : 0.0);
      std::vector<TargetVector> f;
      std::vector<bool> c;
      for (std::size_t k = 0; k < y.size(); ++k) {
        f.push_back(scalar(val(rng)));
        c.push_back(conv(rng));
      }
      const auto r = local_bound_radii(y, f, c);
      for (std::size_t k = 0; k < y.size(); ++k) {
        const double want = radius_oracle(y, f, c, k, 12);
        if (std::isinf(want)) CHECK(std::isinf(r[k]));
        else CHECK(r[k] == doctest::Approx(want).epsilon(1e-14));
        if (c[k]) CHECK(norm(f[k]) <= r[k]);
      }
    }
  }
}

TEST_CASE("enforcing local bounds") {
  const auto y = line_space(grid01(20), SpaceMode::finite);
  std::vector<TargetVector> f;
  for (std::size_t k = 0; k < y.size(); ++k) f.push_back(scalar(y.point(k)[0] < 0.5 ? 0.0 : 3.0));
  const auto r = local_bound_radii(y, f, std::vector<bool>(y.size(), true));
  std::vector<FunSeqItem> seq{table(1, y, [](double t) { return 100.0 * t; })};
  const auto out = enforce_local_uniform_boundedness(y, seq, r);
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(norm(out[0].values[k]) <= r[k]);
  CHECK(out[0].certificate == LipCertificate::exact_on_samples);
}

TEST_CASE("selection transform on the moving bump") {
  const int n = 64;
  const auto y = line_space(grid01(n), SpaceMode::finite);
  const std::vector<TargetVector> f(y.size(), scalar(0.0));
  std::vector<FunSeqItem> seq;
  for (int k = 1; k <= 20; ++k)
    seq.push_back(table(k, y, [k](double t) { return std::max(0.0, 1.0 - 2.0 * k * std::abs(t - 1.0 / k)); }));
  const UcpcResult u = ucpc_transform(y, seq, f);
  REQUIRE(u.items.size() == seq.size());
  for (std::size_t kk = 0; kk < seq.size(); ++kk) {
    const double eps = std::ldexp(1.0, -static_cast<int>(kk + 1));
    for (std::size_t i = 0; i < y.size(); ++i) {
      // in C_k the raw value is kept, otherwise the output sits within slack of every ball
      if (u.state.in_c[kk][i]) CHECK(u.items[kk].values[i] == seq[kk].values[i]);
      CHECK(norm(u.items[kk].values[i]) <= 2.0 * eps);
    }
  }
  // each refined ball maps into the 2^-k ball around its centre value
  for (const SelectionLevel& level : u.state.levels)
    for (std::size_t g = 0; g < level.refined.balls.size(); ++g)
      for (std::size_t i = 0; i < y.size(); ++i)
        if (ball_contains(y, level.refined.balls[g], i))
          CHECK(distance(f[i], level.centers[g]) < std::ldexp(1.0, -level.k));

  const auto ys = line_space(grid01(n), SpaceMode::sampled, 1.0 / n);
  CHECK_THROWS_AS(ucpc_transform(ys, seq, f), Error);
}

TEST_CASE("selection transform keeps a jump limit inside its preimage balls") {
  const auto y = line_space(grid01(40), SpaceMode::finite);
  std::vector<TargetVector> f;
  for (std::size_t k = 0; k < y.size(); ++k) f.push_back(scalar(y.point(k)[0] < 0.5 ? -1.0 : 1.0));
  std::vector<FunSeqItem> seq;
  for (int k = 1; k <= 8; ++k)
    seq.push_back(table(k, y, [k](double t) { return std::clamp(k * (t - 0.5) * 4.0 + 1.0, -1.0, 1.0); }));
  const UcpcResult u = ucpc_transform(y, seq, f);
  for (const SelectionLevel& level : u.state.levels)
    for (std::size_t g = 0; g < level.refined.balls.size(); ++g)
      for (std::size_t i = 0; i < y.size(); ++i)
        if (ball_contains(y, level.refined.balls[g], i))
          CHECK(distance(f[i], level.centers[g]) < std::ldexp(1.0, -level.k));
}

TEST_CASE("mollification matches an independent re-evaluation") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (SpaceMode mode : {SpaceMode::finite, SpaceMode::sampled}) {
    std::vector<double> xs(80);
    for (double& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    const auto y = line_space(xs, mode, mode == SpaceMode::sampled ? 0.01 : 0.0);
    const FunSeqItem h = table(3, y, [](double t) { return std::sin(9.0 * t) + (t > 0.6 ? 1.0 : 0.0); });
    for (int n : {1, 3, 10}) {
      const MollifyResult res = lipschitz_mollify(y, h, n);
      for (std::size_t k = 0; k < y.size(); ++k) {
        const TargetVector want = blend_oracle(y, res, h, k);
        CHECK(distance(res.item.values[k], want) <= 1e-12);
        CHECK(distance(res.item.values[k], h.values[k]) <= 1.0 / n + 1e-12);
      }
      CHECK(res.max_deviation <= 1.0 / n);
    }
  }
}

TEST_CASE("mollification refuses estimate-only items without the fallback") {
  const auto y = line_space(grid01(10), SpaceMode::sampled, 0.1);
  FunSeqItem h = table(1, y, [](double t) { return t; });
  h.certificate = LipCertificate::estimate;
  CHECK_THROWS_AS(lipschitz_mollify(y, h, 2, MollifyOptions{false}), Error);
  const MollifyResult ok = lipschitz_mollify(y, h, 2);
  CHECK(ok.item.certificate == LipCertificate::estimate);
}

TEST_CASE("full pipeline on a jump: bounds and diagnostics") {
  for (SpaceMode mode : {SpaceMode::finite, SpaceMode::sampled}) {
    const auto y = line_space(grid01(50), mode, mode == SpaceMode::sampled ? 0.02 : 0.0);
    FunctionBundle b;
    for (std::size_t k = 0; k < y.size(); ++k) b.f.push_back(scalar(y.point(k)[0] < 0.5 ? -1.0 : 1.0));
    b.converges = std::vector<bool>(y.size(), true);
    b.raw_ucpc_certified = true;
    for (int n = 1; n <= 12; ++n) {
      FunSeqItem it = table(n, y, [n](double t) { return std::clamp(1.0 + n * (t - 0.5), -1.0, 1.0); });
      it.lip_oracle = [n](std::size_t, double) { return static_cast<double>(n); };
      it.certificate = LipCertificate::analytic;
      b.raw.push_back(it);
    }
    const PipelineResult res = baire_approximate(y, b);
    REQUIRE(res.items.size() == 12);
    for (const StageDiagnostic& d : res.diagnostics) CHECK(d.max_violation == 0.0);
    for (std::size_t k = 0; k < res.items.size(); ++k) {
      const double n = static_cast<double>(res.items[k].index);
      CHECK(res.items[k].sup_bound == n + 2.0);
      for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(norm(res.items[k].values[i]) <= n + 2.0);
        CHECK(distance(res.items[k].values[i], res.hat[k].values[i]) <= 2.0 / n);
      }
    }
    CHECK(res.selection.has_value() == (mode == SpaceMode::finite));
    CHECK(res.warnings.empty() == (mode == SpaceMode::finite));
  }
}
