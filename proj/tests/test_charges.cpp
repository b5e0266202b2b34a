#include <doctest.h>

#include <cmath>

#include "gaugekit/charges.hpp"
#include "gaugekit/fields.hpp"
#include "gaugekit/rng.hpp"

using namespace gaugekit;

namespace {

Figure unit_square() { return make_figure(2, {make_cube(0, {0, 0})}); }

Figure random_figure(Rng& rng, int dim, int max_cubes) {
  int count = static_cast<int>(rng.uniform_int(1, max_cubes));
  std::vector<DyadicCube> cubes;
  for (int i = 0; i < count; ++i) {
    int level = static_cast<int>(rng.uniform_int(0, 3));
    std::vector<std::int64_t> idx(dim);
    for (int j = 0; j < dim; ++j)
      idx[j] = rng.uniform_int(-(1l << level), (1l << level) - 1);
    cubes.push_back(make_cube(level, idx));
  }
  return make_figure(dim, cubes);
}

Polynomial random_poly(Rng& rng, int dim, int max_deg) {
  std::vector<Monomial> terms;
  int nterms = static_cast<int>(rng.uniform_int(1, 4));
  for (int t = 0; t < nterms; ++t) {
    Monomial m;
    m.coef = Rat(rng.uniform_int(-8, 8), 1 + rng.uniform_int(0, 3));
    m.coef.canonicalize();
    m.powers.resize(dim);
    for (int j = 0; j < dim; ++j)
      m.powers[j] = static_cast<unsigned>(rng.uniform_int(0, max_deg));
    terms.push_back(m);
  }
  return make_polynomial(dim, terms);
}

}  // namespace

TEST_CASE("flux of horizontal linear field over unit square") {
  std::vector<Polynomial> comps;
  comps.push_back(make_polynomial(2, {{Rat(1), {1, 0}}}));  // x1
  comps.push_back(make_polynomial(2, {{Rat(0), {0, 0}}}));
  auto charge = make_flux_charge(field_from_polynomials(comps));
  CHECK(charge_eval(charge, unit_square()) == doctest::Approx(1.0).epsilon(1e-12));
  auto exact = charge_eval_exact(charge, unit_square());
  REQUIRE(exact.has_value());
  CHECK(*exact == Rat(1));
}

TEST_CASE("flux of quadratic field matches divergence integral value") {
  auto u = field_from_catalog("quadratic", 2);
  auto charge = make_flux_charge(u);
  // div(x1^2, x2^2) = 2 x1 + 2 x2 integrates to 2 over the unit square
  auto exact = charge_eval_exact(charge, unit_square());
  REQUIRE(exact.has_value());
  CHECK(*exact == Rat(2));
}

TEST_CASE("quadrature flux agrees with the rational path on random fields") {
  Rng rng = make_rng(17, 1);
  for (int trial = 0; trial < 25; ++trial) {
    int dim = 2 + static_cast<int>(rng.uniform_int(0, 1));
    std::vector<Polynomial> comps;
    for (int i = 0; i < dim; ++i) comps.push_back(random_poly(rng, dim, 3));
    auto charge = make_flux_charge(field_from_polynomials(comps));
    Figure e = random_figure(rng, dim, 6);
    auto exact = charge_eval_exact(charge, e);
    REQUIRE(exact.has_value());
    CHECK(charge_eval(charge, e) ==
          doctest::Approx(to_double(*exact)).epsilon(1e-9));
  }
}

TEST_CASE("flux is additive over figures that share a face") {
  auto u = field_from_catalog("quadratic", 2);
  auto charge = make_flux_charge(u);
  auto a = make_figure(2, {make_cube(0, {0, 0})});
  auto b = make_figure(2, {make_cube(0, {1, 0})});
  auto both = fig_union(a, b);
  auto va = charge_eval_exact(charge, a);
  auto vb = charge_eval_exact(charge, b);
  auto vu = charge_eval_exact(charge, both);
  REQUIRE(vu.has_value());
  CHECK(*vu == *va + *vb);
}

TEST_CASE("flux of a polynomial field equals the integral of its divergence") {
  Rng rng = make_rng(23, 2);
  for (int trial = 0; trial < 15; ++trial) {
    int dim = 2 + static_cast<int>(rng.uniform_int(0, 1));
    std::vector<Polynomial> comps;
    for (int i = 0; i < dim; ++i) comps.push_back(random_poly(rng, dim, 3));
    auto u = field_from_polynomials(comps);
    auto flux = make_flux_charge(u);
    auto dens = make_density_charge(divergence_field(u));
    Figure e = random_figure(rng, dim, 8);
    auto vf = charge_eval_exact(flux, e);
    auto vd = charge_eval_exact(dens, e);
    REQUIRE(vf.has_value());
    REQUIRE(vd.has_value());
    CHECK(*vf == *vd);
  }
}

TEST_CASE("density charge on figures, boxes, and 1D sets") {
  auto leb = make_lebesgue_charge(2);
  auto lshape = make_figure(2, {make_cube(0, {0, 0}), make_cube(0, {1, 0}),
                                make_cube(0, {0, 1})});
  CHECK(*charge_eval_exact(leb, lshape) == Rat(3));
  CHECK(charge_eval(leb, lshape) == doctest::Approx(3.0).epsilon(1e-12));

  auto box = make_box({Rat(0), Rat(0)}, {Rat(1, 2), Rat(1, 3)});
  CHECK(charge_eval_box(leb, box) == doctest::Approx(1.0 / 6).epsilon(1e-12));

  auto leb1 = make_lebesgue_charge(1);
  auto s = make_bvset({{Rat(0), Rat(1)}, {Rat(2), Rat(5, 2)}});
  CHECK(charge_eval(leb1, s) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("function charge telescopes over interval endpoints") {
  auto charge = make_function_charge(function1d_from_catalog("square"));
  auto s = make_bvset({{Rat(0), Rat(1)}, {Rat(2), Rat(3)}});
  CHECK(charge_eval(charge, s) == doctest::Approx(6.0).epsilon(1e-12));
  auto f = make_figure(1, {make_cube(0, {0})});
  CHECK(charge_eval(charge, f) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("segment measure counts overlap length once across cube rows") {
  SegmentDescriptor seg;
  seg.base = {Rat(0), Rat(1, 2)};
  seg.axis = 0;
  seg.length = Rat(1);
  auto charge = make_segment_measure_charge(seg, 2);
  CHECK(*charge_eval_exact(charge, unit_square()) == Rat(1));
  // the segment lies on the shared edge of the two rows of the left half
  auto left = make_figure(2, {make_cube(1, {0, 0}), make_cube(1, {0, 1})});
  CHECK(*charge_eval_exact(charge, left) == Rat(1, 2));
  auto off = make_figure(2, {make_cube(0, {4, 4})});
  CHECK(*charge_eval_exact(charge, off) == Rat(0));
}

TEST_CASE("restriction and combination evaluate through the tree") {
  auto leb = make_lebesgue_charge(2);
  auto left = make_figure(2, {make_cube(1, {0, 0}), make_cube(1, {0, 1})});
  auto restricted = restrict_charge(leb, left);
  CHECK(*charge_eval_exact(restricted, unit_square()) == Rat(1, 2));

  auto flux = make_flux_charge(field_from_catalog("linear", 2));
  auto combo = combine_charges({{2.0, leb}, {-1.0, flux}});
  CHECK(charge_eval(combo, unit_square()) == doctest::Approx(0.0).epsilon(1e-10));

  auto box = make_box({Rat(0), Rat(0)}, {Rat(1), Rat(1)});
  CHECK(charge_eval_box(restricted, box) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("construction rejects malformed inputs") {
  CHECK_THROWS_AS(make_segment_measure_charge(SegmentDescriptor{}, 1),
                  PreconditionError);
  CHECK_THROWS_AS(combine_charges({}), PreconditionError);
  auto leb = make_lebesgue_charge(2);
  CHECK_THROWS_AS(restrict_charge(leb, make_figure(1, {make_cube(0, {0})})),
                  PreconditionError);
  CHECK_THROWS_AS(charge_eval(leb, make_figure(3, {make_cube(0, {0, 0, 0})})),
                  PreconditionError);
  SegmentDescriptor seg;
  seg.base = {Rat(0), Rat(0)};
  seg.axis = 0;
  seg.length = Rat(1);
  auto sm = make_segment_measure_charge(seg, 2);
  CHECK_THROWS_AS(charge_eval(sm, make_bvset({{Rat(0), Rat(1)}})),
                  PreconditionError);
}

TEST_CASE("volume-continuous charges survive the shrinking-sequence search") {
  auto leb = make_lebesgue_charge(2);
  auto report = charge_axiom_falsifier(leb, unit_square(), 0.05, 60, 99);
  CHECK_FALSE(report.refuted);
  CHECK(report.sequences_checked > 0);
}

TEST_CASE("length concentrated on a segment is caught by a tube sequence") {
  SegmentDescriptor seg;
  seg.base = {Rat(0), Rat(1, 2)};
  seg.axis = 0;
  seg.length = Rat(1);
  auto charge = make_segment_measure_charge(seg, 2);
  auto report = charge_axiom_falsifier(charge, unit_square(), 0.9, 20, 7);
  REQUIRE(report.refuted);
  REQUIRE(report.witness.has_value());
  const auto& w = *report.witness;
  CHECK(w.description.find("tube") != std::string::npos);
  for (std::size_t k = 0; k < w.stages.size(); ++k) {
    CHECK(w.values[k] >= 0.9);
    CHECK(w.volumes[k] <= rat_pow2(-static_cast<int>(k) - 1));
  }
}

TEST_CASE("derivative bracket straddles a density jump") {
  auto step = make_density_charge(scalar_from_catalog("half-space-step", 2));
  auto est = charge_derivative_estimate(step, {Rat(1, 2), Rat(1, 2)}, 0.05);
  CHECK(est.lower <= 0.01);
  CHECK(est.upper >= 0.99);
}

TEST_CASE("derivative bracket pins down a continuous density") {
  auto dens = make_density_charge(scalar_from_catalog("coordinate-sum", 2));
  auto est = charge_derivative_estimate(dens, {Rat(1, 4), Rat(3, 8)}, 0.05);
  double truth = 0.25 + 0.375;
  CHECK(est.lower <= truth + 1e-12);
  CHECK(est.upper >= truth - 1e-12);
  CHECK(est.upper - est.lower < 2e-3);
}

TEST_CASE("derivative estimate rejects an unachievable regularity cutoff") {
  auto leb = make_lebesgue_charge(2);
  CHECK_THROWS_AS(charge_derivative_estimate(leb, {Rat(0), Rat(0)}, 10.0),
                  PreconditionError);
}
