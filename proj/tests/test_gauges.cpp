#include <doctest.h>

#include <cmath>

#include "gaugekit/gauges.hpp"
#include "gaugekit/rng.hpp"

using namespace gaugekit;

namespace {

Figure unit_square() { return make_figure(2, {make_cube(0, {0, 0})}); }

}  // namespace

TEST_CASE("packing predicate is exact about touching balls") {
  Ball a{{Rat(0), Rat(0)}, Rat(1, 4)};
  Ball b{{Rat(1), Rat(0)}, Rat(3, 4)};  // touches a at x=1/4
  CHECK(is_packing({a, b}));
  b.radius = Rat(3, 4) + Rat(1, 1024);
  CHECK_FALSE(is_packing({a, b}));
  b.radius = Rat(0);
  CHECK_THROWS_AS(is_packing({a, b}), PreconditionError);
}

TEST_CASE("packing fineness is strict") {
  Ball a{{Rat(1, 2), Rat(1, 2)}, Rat(1, 8)};
  auto loose = make_constant_gauge(2, 0.3);
  auto tight = make_constant_gauge(2, 0.25);
  CHECK(is_delta_fine(std::vector<Ball>{a}, loose));
  CHECK_FALSE(is_delta_fine(std::vector<Ball>{a}, tight));  // 2r == delta
}

TEST_CASE("sampled packings are admissible and reproducible") {
  auto g = make_constant_gauge(2, 0.1);
  auto region = unit_square();
  auto p1 = sample_packing(region, g, 42);
  auto p2 = sample_packing(region, g, 42);
  auto p3 = sample_packing(region, g, 43);
  REQUIRE(!p1.empty());
  CHECK(is_packing(p1));
  CHECK(is_delta_fine(p1, g));
  for (const auto& b : p1) CHECK(contains_point(region, b.center));
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i].center == p2[i].center);
    CHECK(p1[i].radius == p2[i].radius);
  }
  bool same = p1.size() == p3.size();
  if (same)
    for (std::size_t i = 0; i < p1.size(); ++i)
      same = same && p1[i].center == p3[i].center;
  CHECK_FALSE(same);
}

TEST_CASE("sampling fails loudly under a vanishing gauge") {
  auto dead = make_custom_gauge(2, "zero", [](const RatPoint&) { return 0.0; });
  CHECK_THROWS_AS(sample_packing(unit_square(), dead, 1), BudgetError);
}

TEST_CASE("distance gauge reaches its zero set") {
  ZeroSet zs;
  zs.points.push_back({Rat(0), Rat(0)});
  zs.planes.push_back({0, Rat(1, 2)});
  auto g = make_distance_gauge(2, 1.0, zs);
  CHECK(g({Rat(1, 4), Rat(0)}) == doctest::Approx(0.25));
  CHECK(g({Rat(0), Rat(1, 5)}) == doctest::Approx(0.2));
  CHECK(g({Rat(30), Rat(40)}) == doctest::Approx(1.0));  // capped
  CHECK(g({Rat(1, 2), Rat(7)}) == doctest::Approx(0.0));
}

TEST_CASE("boundary distance gauge is positive off the boundary") {
  auto g = make_boundary_distance_gauge(unit_square(), 10.0);
  CHECK(g({Rat(1, 2), Rat(1, 2)}) == doctest::Approx(0.5));
  CHECK(g({Rat(1, 4), Rat(1, 2)}) == doctest::Approx(0.25));
  CHECK(g({Rat(2), Rat(1, 2)}) == doctest::Approx(1.0));   // outside
  CHECK(g({Rat(1), Rat(1, 2)}) == doctest::Approx(0.0));   // on the edge
  auto l = make_figure(2, {make_cube(0, {0, 0}), make_cube(0, {1, 0}),
                           make_cube(0, {0, 1})});
  auto gl = make_boundary_distance_gauge(l, 10.0);
  // the reentrant corner of the L is a boundary point
  CHECK(gl({Rat(1), Rat(1)}) == doctest::Approx(0.0));
  CHECK(gl({Rat(3, 2), Rat(1, 2)}) == doctest::Approx(0.5));
}

TEST_CASE("gauge combinators compose pointwise") {
  auto a = make_constant_gauge(1, 0.5);
  auto b = make_custom_gauge(1, "coord", [](const RatPoint& x) {
    return to_double(x[0]);
  });
  auto m = make_min_gauge(a, b);
  CHECK(m.at(Rat(1, 4)) == doctest::Approx(0.25));
  CHECK(m.at(Rat(3)) == doctest::Approx(0.5));
  auto s = make_scaled_gauge(m, 2.0);
  CHECK(s.at(Rat(1, 4)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(make_scaled_gauge(a, 0.0), PreconditionError);
}

TEST_CASE("bisection partition under a constant gauge") {
  auto g = make_constant_gauge(1, 0.3);
  auto parts = cousin_partition_1d(Rat(0), Rat(1), g);
  REQUIRE(parts.size() == 4);
  Rat total(0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    total += parts[i].b - parts[i].a;
    CHECK(parts[i].tag == parts[i].a);  // endpoint policy, left wins
    if (i) CHECK(parts[i].a == parts[i - 1].b);
  }
  CHECK(total == Rat(1));
  CHECK(is_delta_fine(parts, g));
}

TEST_CASE("bisection adapts to a shrinking gauge") {
  auto g = make_custom_gauge(1, "quarter-coord", [](const RatPoint& x) {
    return to_double(x[0]) / 4;
  });
  auto parts = cousin_partition_1d(Rat(1, 16), Rat(1), g);
  REQUIRE(parts.size() > 1);
  CHECK(parts.front().a == Rat(1, 16));
  CHECK(parts.back().b == Rat(1));
  Rat total(0);
  for (const auto& iv : parts) total += iv.b - iv.a;
  CHECK(total == Rat(15, 16));
  CHECK(is_delta_fine(parts, g));
  // intervals must shrink toward the left end where the gauge is small
  CHECK(parts.front().b - parts.front().a < parts.back().b - parts.back().a);
}

TEST_CASE("bisection reports a gauge that dies inside the interval") {
  auto g = make_custom_gauge(1, "coord", [](const RatPoint& x) {
    return to_double(x[0]);
  });
  CHECK_THROWS_AS(cousin_partition_1d(Rat(0), Rat(1), g, TagPolicy::EndpointsThenMidpoint, 40),
                  PreconditionError);
}

TEST_CASE("bisection reports an exhausted depth budget") {
  auto g = make_constant_gauge(1, 1e-9);
  CHECK_THROWS_AS(cousin_partition_1d(Rat(0), Rat(1), g, TagPolicy::EndpointsThenMidpoint, 8),
                  BudgetError);
}

TEST_CASE("midpoint-only policy tags interiors") {
  auto g = make_constant_gauge(1, 0.3);
  auto parts = cousin_partition_1d(Rat(0), Rat(1), g, TagPolicy::MidpointOnly);
  for (const auto& iv : parts) {
    CHECK(iv.tag == (iv.a + iv.b) / 2);
  }
  CHECK(is_delta_fine(parts, g));
}

TEST_CASE("figure partitions: exactness of the predicate") {
  auto whole = unit_square();
  std::vector<TaggedFigure> quarters;
  for (long i : {0, 1})
    for (long j : {0, 1}) {
      TaggedFigure tf;
      tf.piece = make_figure(2, {make_cube(1, {i, j})});
      tf.tag = {Rat(2 * i + 1, 4), Rat(2 * j + 1, 4)};
      quarters.push_back(tf);
    }
  CHECK(is_partition_of(quarters, whole));

  auto loose = make_constant_gauge(2, 0.8);
  auto tight = make_constant_gauge(2, 0.70);  // quarter diameter is ~.707
  CHECK(is_delta_fine(quarters, loose));
  CHECK_FALSE(is_delta_fine(quarters, tight));

  auto missing = quarters;
  missing.pop_back();
  CHECK_FALSE(is_partition_of(missing, whole));

  auto overlapping = quarters;
  overlapping.back().piece = make_figure(2, {make_cube(0, {0, 0})});
  CHECK_FALSE(is_partition_of(overlapping, whole));

  auto escaping = quarters;
  escaping.back().piece = make_figure(2, {make_cube(1, {5, 5})});
  CHECK_FALSE(is_partition_of(escaping, whole));
}

TEST_CASE("vitali selection on a hand-built overlap") {
  std::vector<Ball> balls;
  balls.push_back({{Rat(0), Rat(0)}, Rat(1)});
  balls.push_back({{Rat(3, 2), Rat(0)}, Rat(1)});   // overlaps the first
  balls.push_back({{Rat(10), Rat(0)}, Rat(1, 2)});  // far away
  auto sel = vitali_disjoint_subfamily(balls);
  REQUIRE(sel.selected.size() == 2);
  CHECK(sel.selected[0] == 0);  // stable tie-break by index
  CHECK(sel.selected[1] == 2);
  REQUIRE(sel.certificates.size() == 1);
  CHECK(sel.certificates[0].rejected == 1);
  CHECK(sel.certificates[0].covered_by == 0);
}

TEST_CASE("vitali selection invariants on random families") {
  Rng rng = make_rng(5, 9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Ball> balls;
    int n = static_cast<int>(rng.uniform_int(1, 24));
    for (int i = 0; i < n; ++i) {
      Ball b;
      b.center = {Rat(rng.uniform_int(-16, 16), 4),
                  Rat(rng.uniform_int(-16, 16), 4)};
      b.center[0].canonicalize();
      b.center[1].canonicalize();
      b.radius = Rat(1 + rng.uniform_int(0, 7), 8);
      b.radius.canonicalize();
      balls.push_back(b);
    }
    auto sel = vitali_disjoint_subfamily(balls);
    CHECK(sel.selected.size() + sel.certificates.size() == balls.size());
    // selected balls are strictly separated as closed balls
    for (std::size_t i = 0; i < sel.selected.size(); ++i)
      for (std::size_t j = i + 1; j < sel.selected.size(); ++j) {
        const Ball& a = balls[sel.selected[i]];
        const Ball& b = balls[sel.selected[j]];
        Rat sum = a.radius + b.radius;
        CHECK(dist_sq(a.center, b.center) > sum * sum);
      }
    for (const auto& cert : sel.certificates) {
      const Ball& rej = balls[cert.rejected];
      const Ball& cov = balls[cert.covered_by];
      CHECK(cov.radius >= rej.radius);
      // containment in the 5x enlargement, checked at the extreme point
      Rat slack = 5 * cov.radius - rej.radius;
      REQUIRE(slack >= 0);
      CHECK(dist_sq(rej.center, cov.center) <= slack * slack);
      // spot-check interior points of the rejected ball
      for (int axis = 0; axis < 2; ++axis)
        for (int sgn : {-1, 1}) {
          RatPoint p = rej.center;
          p[axis] += sgn * rej.radius * Rat(7, 8);
          Rat rr = 5 * cov.radius;
          CHECK(dist_sq(p, cov.center) <= rr * rr);
        }
    }
  }
}
