#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "gaugekit/geometry.hpp"
#include "gaugekit/rng.hpp"

using namespace gaugekit;

namespace {

// Independent perimeter oracle: refine to the finest level by brute force
// (interval arithmetic per cube, no CellSet), then count unmatched faces by
// quadratic pair scanning.
Rat perimeter_oracle(const Figure& f) {
  if (f.empty()) return Rat(0);
  int level = 0;
  for (const auto& q : f.cubes) level = std::max(level, q.level);
  std::vector<std::vector<long>> cells;
  for (const auto& q : f.cubes) {
    int d = level - q.level;
    long span = 1l << d;
    std::vector<long> base(q.index.begin(), q.index.end());
    for (auto& b : base) b <<= d;
    std::vector<long> off(q.dim(), 0);
    while (true) {
      std::vector<long> cur(q.dim());
      for (int i = 0; i < q.dim(); ++i) cur[i] = base[i] + off[i];
      cells.push_back(cur);
      int axis = 0;
      while (axis < q.dim()) {
        if (++off[axis] < span) break;
        off[axis] = 0;
        ++axis;
      }
      if (axis == q.dim()) break;
    }
  }
  long exposed = 0;
  for (const auto& c : cells) {
    for (std::size_t axis = 0; axis < c.size(); ++axis) {
      for (int dir : {-1, +1}) {
        std::vector<long> nb = c;
        nb[axis] += dir;
        if (std::find(cells.begin(), cells.end(), nb) == cells.end())
          ++exposed;
      }
    }
  }
  return Rat(exposed) * rat_pow(rat_pow2(-level),
                                static_cast<unsigned>(f.dim - 1));
}

Figure random_figure(Rng& rng, int dim, int max_cubes) {
  int count = static_cast<int>(rng.uniform_int(1, max_cubes));
  std::vector<DyadicCube> cubes;
  for (int i = 0; i < count; ++i) {
    int level = static_cast<int>(rng.uniform_int(0, 3));
    std::vector<std::int64_t> idx(dim);
    long span = (1l << level) * 2;  // keep everything within [-2, 2]^dim
    for (int a = 0; a < dim; ++a) idx[a] = rng.uniform_int(-span, span - 1);
    cubes.push_back(make_cube(level, idx));
  }
  return make_figure(dim, cubes);
}

RatPoint rp(std::vector<Rat> v) { return v; }

}  // namespace

TEST_CASE("dyadic cube basics") {
  DyadicCube q = make_cube(1, {1, 0});
  CHECK(q.side() == Rat(1, 2));
  CHECK(q.lo(0) == Rat(1, 2));
  CHECK(q.hi(0) == Rat(1));
  CHECK(q.lo(1) == Rat(0));

  DyadicCube m = q.mother();
  CHECK(m.level == 0);
  CHECK(m.index == std::vector<std::int64_t>{0, 0});
  CHECK(m.contains_cube(q));
  CHECK(!q.contains_cube(m));

  // negative indices floor toward -infinity
  DyadicCube neg = make_cube(2, {-1, -3});
  DyadicCube nm = neg.mother();
  CHECK(nm.index == std::vector<std::int64_t>{-1, -2});
  CHECK(nm.contains_cube(neg));

  CHECK(q.contains_point(rp({Rat(3, 4), Rat(1, 4)})));
  CHECK(q.contains_point(rp({Rat(1, 2), Rat(0)})));  // closed boundary
  CHECK(!q.contains_point(rp({Rat(1, 4), Rat(1, 4)})));

  CHECK_THROWS_AS(make_cube(kMinLevel - 1, {0}), PreconditionError);
}

TEST_CASE("figure normalization removes contained cubes and duplicates") {
  // unit square plus one of its quarters plus a duplicate
  auto f = make_figure(2, {make_cube(0, {0, 0}), make_cube(1, {1, 1}),
                           make_cube(0, {0, 0})});
  CHECK(f.cubes.size() == 1);
  CHECK(f.cubes[0] == make_cube(0, {0, 0}));

  // disjoint cubes at mixed levels survive
  auto g = make_figure(2, {make_cube(0, {0, 0}), make_cube(1, {2, 0})});
  CHECK(g.cubes.size() == 2);
}

TEST_CASE("sibling merge is only on request and preserves measures") {
  std::vector<DyadicCube> quarters;
  for (long i : {0, 1})
    for (long j : {0, 1}) quarters.push_back(make_cube(1, {i, j}));
  auto f = make_figure(2, quarters);
  CHECK(f.cubes.size() == 4);  // normalization alone does not merge

  auto merged = merge_siblings(f);
  CHECK(merged.cubes.size() == 1);
  CHECK(merged.cubes[0] == make_cube(0, {0, 0}));

  CHECK(volume(f) == volume(merged));
  CHECK(perimeter(f) == perimeter(merged));
  CHECK(diameter_sq(f) == diameter_sq(merged));
  CHECK(symmetric_difference(f, merged) == 0);
}

TEST_CASE("volume of the L-shape is 3") {
  auto l = make_figure(2, {make_cube(0, {0, 0}), make_cube(0, {1, 0}),
                           make_cube(0, {0, 1})});
  CHECK(volume(l) == Rat(3));
  CHECK(perimeter(l) == Rat(8));
  CHECK(perimeter(l) == perimeter_oracle(l));
}

TEST_CASE("perimeter cancels interior faces at mixed levels") {
  // unit square as one level-0 cube next to two level-1 cubes stacked:
  // [0,1]^2 union [1,3/2]x[0,1]
  auto f = make_figure(2, {make_cube(0, {0, 0}), make_cube(1, {2, 0}),
                           make_cube(1, {2, 1})});
  CHECK(volume(f) == Rat(3, 2));
  CHECK(perimeter(f) == Rat(5));
  CHECK(perimeter(f) == perimeter_oracle(f));
}

TEST_CASE("relative perimeter counts the exposed faces inside the host") {
  auto square = make_figure(2, {make_cube(0, {0, 0})});
  auto left = make_figure(2, {make_cube(1, {0, 0}), make_cube(1, {0, 1})});

  CHECK(relative_perimeter(left, square) == Rat(1));
  CHECK(relative_perimeter(square, square) == Rat(0));

  auto far = make_figure(2, {make_cube(0, {5, 5})});
  CHECK(relative_perimeter(far, square) == Rat(0));
}

TEST_CASE("diameter with and without tag") {
  auto square = make_figure(2, {make_cube(0, {0, 0})});
  CHECK(diameter_sq(square) == Rat(2));
  CHECK(diameter_sq_with_tag(square, rp({Rat(1, 2), Rat(1, 2)})) == Rat(2));
  CHECK(diameter_sq_with_tag(square, rp({Rat(2), Rat(0)})) == Rat(5));
}

TEST_CASE("regularity of the unit square") {
  auto square = make_figure(2, {make_cube(0, {0, 0})});
  double r = regularity(square);
  CHECK(r == doctest::Approx(1.0 / (4.0 * std::sqrt(2.0))).epsilon(1e-12));

  // exact form: r^2 = 1/32, so it is (1/(4 sqrt 2))-regular minus epsilon
  CHECK(is_regular_sq(square, nullptr, Rat(1, 32) - Rat(1, 1000)));
  CHECK(!is_regular_sq(square, nullptr, Rat(1, 32)));  // strict inequality
}

TEST_CASE("degenerate conventions: empty figure") {
  auto e = empty_figure(2);
  CHECK(volume(e) == 0);
  CHECK(perimeter(e) == 0);
  CHECK(diameter_sq(e) == 0);
  CHECK(regularity(e) == 0.0);
  CHECK(!is_regular_sq(e, nullptr, Rat(1, 100)));
}

TEST_CASE("regularity upper bound 1/(2n) on random figures") {
  for (int dim : {1, 2, 3}) {
    Rng rng = make_rng(20260822, 100 + dim);
    Rat bound_sq = Rat(1, 4 * dim * dim);  // (1/(2n))^2
    for (int trial = 0; trial < 1000; ++trial) {
      Figure f = random_figure(rng, dim, 6);
      // exact: |E|^2 <= bound_sq * d^2 * P^2
      Rat v = volume(f);
      Rat d2 = diameter_sq(f);
      Rat p = perimeter(f);
      CHECK(v * v <= bound_sq * d2 * p * p);
    }
  }
}

TEST_CASE("perimeter matches oracle on random figures") {
  for (int dim : {1, 2, 3}) {
    Rng rng = make_rng(20260822, 200 + dim);
    for (int trial = 0; trial < 40; ++trial) {
      Figure f = random_figure(rng, dim, 4);
      CHECK(perimeter(f) == perimeter_oracle(f));
    }
  }
}

TEST_CASE("set algebra and symmetric difference") {
  auto a = make_figure(2, {make_cube(0, {0, 0}), make_cube(0, {1, 0})});
  auto b = make_figure(2, {make_cube(0, {1, 0}), make_cube(0, {2, 0})});

  CHECK(volume(fig_intersect(a, b)) == Rat(1));
  CHECK(volume(fig_union(a, b)) == Rat(3));
  CHECK(volume(fig_difference(a, b)) == Rat(1));
  CHECK(symmetric_difference(a, b) == Rat(2));
  CHECK(symmetric_difference(a, a) == Rat(0));

  CHECK(is_subfigure(fig_intersect(a, b), a));
  CHECK(is_subfigure(fig_intersect(a, b), b));
  CHECK(!is_subfigure(a, b));

  // intersection at mixed levels
  auto q = make_figure(2, {make_cube(1, {1, 1})});  // [1/2,1]^2
  auto i = fig_intersect(a, q);
  CHECK(volume(i) == Rat(1, 4));
  CHECK(is_subfigure(i, q));
}

TEST_CASE("refinement budget is enforced with a typed error") {
  auto big = make_figure(3, {make_cube(0, {0, 0, 0})});
  CHECK_THROWS_AS(refine_to(big, 10, /*budget=*/1000), BudgetError);
  try {
    refine_to(big, 10, 1000);
  } catch (const BudgetError& e) {
    CHECK(e.limit == 1000);
    CHECK(e.requested > e.limit);
  }
}

TEST_CASE("dyadic ball approximation stays inside the ball") {
  RatPoint c = rp({Rat(0), Rat(0)});

  // unit disk at level 0: no unit cube fits inside
  CHECK(dyadic_ball_approx(c, Rat(1), 0).empty());

  for (int level : {2, 3, 4}) {
    Figure f = dyadic_ball_approx(c, Rat(1), level);
    CHECK(!f.empty());
    CHECK(figure_inside_ball_sq(f, c, Rat(1), /*strict=*/false));
    CHECK(volume(f) < Rat(355, 113));  // below pi
  }

  // finer levels capture more of the ball
  Rat v3 = volume(dyadic_ball_approx(c, Rat(1), 3));
  Rat v5 = volume(dyadic_ball_approx(c, Rat(1), 5));
  CHECK(v3 < v5);
}

TEST_CASE("ball predicates are exact") {
  DyadicCube q = make_cube(1, {0, 0});  // [0,1/2]^2
  RatPoint c = rp({Rat(0), Rat(0)});
  // farthest corner (1/2,1/2): |.|^2 = 1/2
  CHECK(cube_inside_ball_sq(q, c, Rat(1, 2), /*strict=*/false));
  CHECK(!cube_inside_ball_sq(q, c, Rat(1, 2), /*strict=*/true));
  CHECK(cube_inside_ball_sq(q, c, Rat(1, 2) + Rat(1, 1000), true));

  DyadicCube far = make_cube(0, {3, 0});
  CHECK(cube_meets_ball_sq(far, c, Rat(9), false));   // corner at distance 3
  CHECK(!cube_meets_ball_sq(far, c, Rat(9), true));   // open ball misses it
}

TEST_CASE("rational boxes") {
  RatBox b = make_box({Rat(0), Rat(0)}, {Rat(2), Rat(1, 2)});
  CHECK(volume(b) == Rat(1));
  CHECK(perimeter(b) == Rat(5));
  CHECK(diameter_sq(b) == Rat(17, 4));
  CHECK(b.min_side() == Rat(1, 2));
  CHECK(b.max_side() == Rat(2));

  CHECK_THROWS_AS(make_box({Rat(0)}, {Rat(0)}), PreconditionError);

  auto i = box_intersect(b, make_box({Rat(1), Rat(0)}, {Rat(3), Rat(2)}));
  REQUIRE(i.has_value());
  CHECK(volume(*i) == Rat(1, 2));
  CHECK(!box_intersect(b, make_box({Rat(2), Rat(0)}, {Rat(3), Rat(1)}))
             .has_value());  // touching means measure-zero overlap
}

TEST_CASE("1D BV sets") {
  BVSet1D s = make_bvset({{Rat(0), Rat(1)}, {Rat(2), Rat(3)}});
  CHECK(measure(s) == Rat(2));
  CHECK(perimeter(s) == Rat(4));
  CHECK(diameter(s) == Rat(3));
  CHECK(diameter_with_tag(s, Rat(-1)) == Rat(4));
  CHECK(contains_point(s, Rat(1)));
  CHECK(!contains_point(s, Rat(3, 2)));

  // touching intervals merge to one component
  BVSet1D t = make_bvset({{Rat(0), Rat(1)}, {Rat(1), Rat(2)}});
  CHECK(t.intervals.size() == 1);
  CHECK(perimeter(t) == Rat(2));

  // degenerate intervals vanish
  CHECK(make_bvset({{Rat(1), Rat(1)}}).empty());

  BVSet1D u = make_bvset({{Rat(1, 2), Rat(5, 2)}});
  CHECK(measure(bv_intersect(s, u)) == Rat(1));
  CHECK(measure(bv_union(s, u)) == Rat(3));
  CHECK(symmetric_difference(s, u) == Rat(2));

  // interval regularity: single interval has r = 1/2 in 1D
  BVSet1D one = make_bvset({{Rat(0), Rat(1)}});
  CHECK(regularity(one) == doctest::Approx(0.5));
  CHECK(is_regular_sq(one, nullptr, Rat(1, 4) - Rat(1, 100)));
  CHECK(!is_regular_sq(one, nullptr, Rat(1, 4)));
}

TEST_CASE("figure to BV set conversion merges touching cubes") {
  auto f = make_figure(1, {make_cube(1, {0}), make_cube(1, {1}),
                           make_cube(0, {3})});
  BVSet1D s = bvset_from_figure(f);
  REQUIRE(s.intervals.size() == 2);
  CHECK(s.intervals[0] == std::pair<Rat, Rat>{Rat(0), Rat(1)});
  CHECK(s.intervals[1] == std::pair<Rat, Rat>{Rat(3), Rat(4)});
}

TEST_CASE("constants in dimension 2") {
  Constants k(2);
  CHECK(k.alpha() == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(k.rho() == doctest::Approx(0.022097086912079608).epsilon(1e-14));
  CHECK(to_double(k.rho_sq()) ==
        doctest::Approx(k.rho() * k.rho()).epsilon(1e-14));
  CHECK(k.c1() == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(k.c_cover() == doctest::Approx(32.0 * M_PI).epsilon(1e-14));
  CHECK(k.c2() == doctest::Approx(128.0 * M_PI * M_PI).epsilon(1e-14));

  CHECK(k.eta == doctest::Approx(4.0));
  CHECK(k.gamma(0.5) == doctest::Approx(8.0));
  CHECK(k.beta(0.5) == doctest::Approx(1.0 / 9.0));

  // default isoperimetric constant: 1/(2 sqrt(pi)), so c_crit = 1/(4 pi)
  CHECK(k.p_iso == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))));
  CHECK(k.c_crit() == doctest::Approx(1.0 / (4.0 * M_PI)));
}

TEST_CASE("constants in dimensions 1 and 3") {
  Constants k1(1);
  CHECK(k1.alpha() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(k1.rho() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(k1.c1() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(k1.p_iso == doctest::Approx(0.5));
  CHECK(k1.c_crit() == doctest::Approx(0.5));

  Constants k3(3);
  CHECK(k3.alpha() == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-13));
  CHECK(k3.rho() == doctest::Approx(1.0 / (9.0 * 128.0)).epsilon(1e-13));
  CHECK(k3.c1() == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("eps_prime shrinks eps and stays positive in range") {
  for (int n : {1, 2, 3}) {
    Constants k(n);
    double cap = 1.0 / (k.c_crit() * k.alpha());
    for (double eps : {0.5, 0.1, 0.02}) {
      REQUIRE(eps < cap);
      double ep = k.eps_prime(eps);
      CHECK(ep > 0.0);
      CHECK(ep < eps);
    }
  }
  CHECK_THROWS_AS(Constants(2).eps_prime(0.0), PreconditionError);
}

TEST_CASE("custom eta and p_iso are honored") {
  Constants k(2, /*eta=*/7.0, /*p_iso=*/0.25);
  CHECK(k.gamma(0.5) == doctest::Approx(14.0));
  CHECK(k.c_crit() == doctest::Approx(0.0625));
}

TEST_CASE("isoperimetric deficiency on hand-checked splitters") {
  Figure square = make_figure(2, {make_cube(0, {0, 0})});
  Figure left = make_figure(2, {make_cube(1, {0, 0}), make_cube(1, {0, 1})});

  // splitting off everything costs nothing
  auto whole = isoperimetric_deficiency(square, square, Rat(1, 2));
  CHECK(whole.passes);
  CHECK(whole.ratio == 0);

  // half cut: min{P = 3, P = 3} = 3 against relative perimeter 1
  auto half = isoperimetric_deficiency(square, left, Rat(1, 2));
  CHECK(!half.passes);
  CHECK(!half.infinite);
  CHECK(half.ratio == Rat(3, 2));
  CHECK(isoperimetric_deficiency(square, left, Rat(1, 4)).passes);

  // splitter is clipped to the host first
  Figure shifted = make_figure(2, {make_cube(1, {0, 0}), make_cube(1, {0, 1}),
                                   make_cube(0, {-1, 0})});
  auto clipped = isoperimetric_deficiency(square, shifted, Rat(1, 2));
  CHECK(clipped.ratio == half.ratio);

  CHECK_THROWS_AS(isoperimetric_deficiency(square, left, Rat(0)),
                  PreconditionError);
}

TEST_CASE("deficiency passing is monotone when eps shrinks") {
  Rng rng(411);
  for (int trial = 0; trial < 40; ++trial) {
    int dim = trial % 2 + 1;
    Figure e = random_figure(rng, dim, 5);
    Figure t = random_figure(rng, dim, 3);
    auto coarse = isoperimetric_deficiency(e, t, Rat(1, 2));
    auto fine = isoperimetric_deficiency(e, t, Rat(1, 10));
    if (coarse.passes) CHECK(fine.passes);
    if (!coarse.infinite && !fine.infinite)
      CHECK(fine.ratio * 5 == coarse.ratio);
  }
}

TEST_CASE("separated components falsify the sampled check") {
  Figure two = make_figure(2, {make_cube(0, {0, 0}), make_cube(0, {3, 0})});
  auto v = is_eps_isoperimetric_sampled(two, Rat(9, 10), 0);
  CHECK(!v.passed);
  CHECK(v.worst_infinite);
  REQUIRE(!v.witness.empty());
  // the witness is one whole component: relative perimeter zero
  CHECK(relative_perimeter(v.witness, two) == 0);
  CHECK(perimeter(v.witness) > 0);
}

TEST_CASE("sampled check accepts cubes and the empty figure") {
  Constants k(2);
  double beta_rho = k.beta(k.rho());
  Figure cube = make_figure(2, {make_cube(1, {0, 0})});
  auto v = is_eps_isoperimetric_sampled(cube, Rat(beta_rho), 1);
  CHECK(v.passed);
  CHECK(v.tested > 4);

  auto e = is_eps_isoperimetric_sampled(empty_figure(2), Rat(1, 2), 2);
  CHECK(e.passed);
  CHECK(e.tested == 0);
}

TEST_CASE("regular dyadic boxes pass the sampled check at their beta") {
  Rng rng(907);
  for (int trial = 0; trial < 12; ++trial) {
    int dim = trial % 2 + 1;
    Constants k(dim);
    int level = 2;
    std::vector<std::int64_t> lo(dim), wid(dim);
    std::vector<DyadicCube> cubes;
    for (int a = 0; a < dim; ++a) {
      lo[a] = rng.uniform_int(-4, 3);
      wid[a] = rng.uniform_int(1, 4);
    }
    std::vector<std::int64_t> off(dim, 0);
    while (true) {
      std::vector<std::int64_t> idx(dim);
      for (int a = 0; a < dim; ++a) idx[a] = lo[a] + off[a];
      cubes.push_back(make_cube(level, idx));
      int a = 0;
      while (a < dim) {
        if (++off[a] < wid[a]) break;
        off[a] = 0;
        ++a;
      }
      if (a == dim) break;
    }
    Figure box = make_figure(dim, cubes);
    double reg = regularity(box);
    REQUIRE(reg > 0.0);
    auto v = is_eps_isoperimetric_sampled(box, Rat(k.beta(reg)), 1,
                                          /*seed=*/trial);
    CHECK(v.passed);
  }
}
