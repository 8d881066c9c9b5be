#include "bairext/error.hpp"
#include "bairext/extension_op.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace bairext;

namespace {

struct Cloud {
  SampledSpace x;
  std::vector<FunSeqItem> items;
  std::vector<std::size_t> queries;
};

// H = random points on the x-axis segment [-1, 1]; queries above it.
Cloud random_cloud(std::mt19937_64& rng, std::size_t nh, std::size_t nq, int nitems, std::size_t m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), up(1e-4, 0.3), val(-2.0, 2.0);
  std::vector<Point> pts;
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < nh; ++i) {
    pts.push_back({u(rng), 0.0});
    h.push_back(i);
  }
  Cloud c;
  for (std::size_t i = 0; i < nq; ++i) {
    c.queries.push_back(pts.size());
    pts.push_back({u(rng), std::pow(up(rng), 2.0)});
  }
  c.x = SampledSpace::euclidean(pts, h, SpaceMode::sampled, 0.01);
  for (int n = 1; n <= nitems; ++n) {
    FunSeqItem it;
    it.index = n;
    for (std::size_t k = 0; k < nh; ++k) {
      std::vector<double> v(m);
      for (double& x : v) x = val(rng);
      it.values.emplace_back(v, Norm::l2);
    }
    c.items.push_back(std::move(it));
  }
  return c;
}

double brute_k(const SampledSpace& x, const FunSeqItem& item, std::size_t u, double dist, int n) {
  const double radius = (n * (n + 2.0) + 2.0) * dist;
  std::vector<std::size_t> ball;
  for (std::size_t a : x.h_indices())
    if (x.distance(u, a) < radius) ball.push_back(a);
  double lip = 0.0;
  for (std::size_t i = 0; i < ball.size(); ++i)
    for (std::size_t j = i + 1; j < ball.size(); ++j)
      lip = std::max(lip, distance(item.values[x.h_position(ball[i])], item.values[x.h_position(ball[j])]) /
                              x.distance(ball[i], ball[j]));
  return std::max(1.0, lip);
}

// Largest admissible n by upward scan over every n the items allow.
int brute_n(const SampledSpace& x, const std::vector<FunSeqItem>& items, std::size_t u, double dist) {
  int best = 0;
  for (int n = 1; n <= static_cast<int>(items.size()); ++n) {
    const double k = brute_k(x, items[n - 1], u, dist, n);
    if (dist * n * k * (n * (n + 2.0) + 2.0) < 1.0) best = n;
  }
  return best;
}

} // namespace

TEST_CASE("selection ceiling and hand-evaluated selections") {
  CHECK(select_ceiling(0.05) == 1);  // n = 2: 2 (2*4 + 2) = 20, not < 20
  CHECK(select_ceiling(0.049) == 2);
  CHECK(select_ceiling(0.5) == 0);
  CHECK(selection_holds(0.05, 1, 1.0));
  CHECK_FALSE(selection_holds(0.05, 2, 1.0));
  CHECK(selection_holds(0.049, 2, 1.0));
  CHECK_FALSE(selection_holds(0.049, 3, 1.0));  // needs < 1/51
  CHECK_FALSE(selection_holds(1e-9, 1, INFINITY));
  CHECK_THROWS_AS(select_ceiling(0.0), Error);
}

TEST_CASE("K from constant items and global bounds") {
  const auto x = SampledSpace::euclidean({{0.0}, {0.5}, {1.0}, {3.0}}, {0, 1, 2}, SpaceMode::finite, 0.0);
  FunSeqItem c;
  c.index = 1;
  c.values.assign(3, TargetVector({2.0}, Norm::l2));
  const Extender e(x, {c}, 1, Norm::l2);
  CHECK(e.local_lip_K(2, 2.0, 1) == 1.0);

  FunSeqItem g = c;
  g.lip_oracle = [](std::size_t, double) { return 7.5; };
  const Extender eg(x, {g}, 1, Norm::l2);
  CHECK(eg.local_lip_K(2, 0.001, 1) == 7.5);
  CHECK(eg.local_lip_K(2, 1.0, 1) == 7.5);
}

TEST_CASE("n(x) and K agree with brute-force scans") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    // enough H samples to exercise the cached profile path as well
    Cloud c = random_cloud(rng, trial < 2 ? 40 : 400, 150, 30, 2);
    const Extender e(c.x, c.items, 2, Norm::l2);
    for (std::size_t q : c.queries) {
      const NearestH nh = nearest_with_slack(c.x, q);
      for (int n : {1, 2, 5}) CHECK(e.local_lip_K(nh.index, nh.distance, n) == brute_k(c.x, c.items[n - 1], nh.index, nh.distance, n));
      const QueryRecord rec = e.extend_sample(q);
      CHECK(rec.u == nh.index);
      CHECK(rec.n == brute_n(c.x, c.items, nh.index, nh.distance));
      if (rec.n == 0) CHECK(rec.g == TargetVector::zero(2, Norm::l2));
      else CHECK(rec.g == c.items[rec.n - 1].values[c.x.h_position(rec.u)]);
    }
  }
}

TEST_CASE("constant items extend to the constant once n(x) >= 1") {
  std::vector<Point> pts{{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.01}, {0.0, 0.9}};
  const auto x = SampledSpace::euclidean(pts, {0, 1}, SpaceMode::finite, 0.0);
  const TargetVector cval({0.5, -0.25}, Norm::l2);
  std::vector<FunSeqItem> items;
  for (int n = 1; n <= 5; ++n) {
    FunSeqItem it;
    it.index = n;
    it.values.assign(2, cval);
    items.push_back(it);
  }
  const Extender e(x, items, 2, Norm::l2);
  const QueryRecord near = e.extend_sample(2);
  CHECK(near.n >= 1);
  CHECK(near.g == cval);
  const QueryRecord far = e.extend_sample(3);
  CHECK(far.n == 0);
  CHECK(far.g == TargetVector::zero(2, Norm::l2));
  CHECK_THROWS_AS(e.extend_sample(0), Error);
}

TEST_CASE("smoothing: lone centre, convexity and coverage") {
  {
    const auto x = SampledSpace::euclidean({{0.0}, {0.3}}, {0}, SpaceMode::finite, 0.0);
    FunSeqItem it;
    it.index = 1;
    it.values = {TargetVector({4.0}, Norm::l2)};
    const Extender e(x, {it}, 1, Norm::l2);
    const std::vector<std::size_t> q{1};
    ExtensionField f = extend_field(e, q);
    smooth_extension(f, e, SmoothingOptions{false, 1.5});
    REQUIRE(f.centers.size() == 1);
    CHECK(f.queries[0].g_smooth == f.queries[0].g);
  }
  std::mt19937_64 rng(32);
  Cloud c = random_cloud(rng, 60, 300, 20, 2);
  const Extender e(c.x, c.items, 2, Norm::l2);
  ExtensionField f = extend_field(e, c.queries);
  smooth_extension(f, e);
  CHECK(f.centers.size() > f.queries.size());  // midpoints were added
  for (std::size_t p = 0; p < f.queries.size(); ++p) {
    const QueryRecord& q = f.queries[p];
    REQUIRE_FALSE(f.cover.weights[p].empty());
    double top = 0.0, sum = 0.0;
    for (const auto& [b, w] : f.cover.weights[p]) {
      const SmoothingCenter& ctr = f.centers[b];
      CHECK(ctr.radius <= ctr.record.dist_h / 3.0);
      CHECK(f.space.distance(ctr.sample, q.sample) < ctr.radius);
      top = std::max(top, norm(ctr.record.g));
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(q.g_smooth) <= top + 1e-12);
  }
}
