#include <doctest.h>

#include <cmath>
#include <vector>

#include "gaugekit/fields.hpp"
#include "gaugekit/hk1d.hpp"

using namespace gaugekit;

namespace {

Function1D one() {
  return {"one", [](double) { return 1.0; }};
}

Function1D doubled_identity() {
  return {"2x", [](double x) { return 2.0 * x; }};
}

}  // namespace

TEST_CASE("identity claims stream to zero sums") {
  Function1D id = function1d_from_catalog("identity");
  Gauge g = make_constant_gauge(1, 0.25);
  HKReport rep = hk_check(one(), id, id, 0.0, 1.0, g, {Rat(1, 100)});
  CHECK(!rep.refuted);
  CHECK(rep.worst_sum == 0.0);
  CHECK(rep.eps_reported == Rat(1, 100));
  CHECK(rep.trial_sums.size() == 6);
  for (double s : rep.trial_sums) CHECK(s == 0.0);
  CHECK(rep.intervals_streamed >= 48);  // eight pieces per trial at least
  CHECK(!rep.note.empty());
}

TEST_CASE("doubled primitive is refuted with a compact witness") {
  Function1D id = function1d_from_catalog("identity");
  Function1D f = one();
  Function1D F = doubled_identity();
  Gauge g = make_constant_gauge(1, 0.125);
  HKReport rep = hk_check(f, F, id, 0.0, 1.0, g, {Rat(1, 2), Rat(1, 10)});
  REQUIRE(rep.refuted);
  CHECK(rep.eps_reported == Rat(1, 2));
  CHECK(rep.worst_sum == doctest::Approx(1.0));
  CHECK(rep.witness_sum == doctest::Approx(1.0));
  CHECK(rep.trial_sums.size() == 6);  // all trials still run at the failing eps
  REQUIRE(!rep.witness.empty());
  CHECK(rep.witness_complete);
  CHECK(is_delta_fine(rep.witness, g));
  double total = 0.0;
  for (const TaggedInterval& iv : rep.witness) {
    REQUIRE(iv.a < iv.b);
    CHECK(iv.a <= iv.tag);
    CHECK(iv.tag <= iv.b);
    const double u = to_double(iv.a), v = to_double(iv.b);
    total += std::fabs(F.fn(v) - F.fn(u) - f.fn(to_double(iv.tag)) * (v - u));
  }
  CHECK(total >= 0.5);
  for (std::size_t i = 0; i + 1 < rep.witness.size(); ++i)
    CHECK(rep.witness[i].b <= rep.witness[i + 1].a);

  HKCheckOptions par;
  par.jobs = 4;
  HKReport rep2 =
      hk_check(f, F, id, 0.0, 1.0, g, {Rat(1, 2), Rat(1, 10)}, par);
  CHECK(rep2.refuted == rep.refuted);
  CHECK(rep2.worst_sum == rep.worst_sum);
  CHECK(rep2.witness_sum == rep.witness_sum);
  CHECK(rep2.intervals_streamed == rep.intervals_streamed);
  CHECK(rep2.trial_sums == rep.trial_sums);
  REQUIRE(rep2.witness.size() == rep.witness.size());
  for (std::size_t i = 0; i < rep.witness.size(); ++i) {
    CHECK(rep2.witness[i].a == rep.witness[i].a);
    CHECK(rep2.witness[i].b == rep.witness[i].b);
    CHECK(rep2.witness[i].tag == rep.witness[i].tag);
  }
}

TEST_CASE("oscillation profile passes its tailored gauges") {
  Function1D f = function1d_from_catalog("x2sin-derivative");
  Function1D F = function1d_from_catalog("x2sin");
  Function1D G = function1d_from_catalog("identity");
  HKCheckOptions opt;
  opt.trials = 2;
  opt.policy = TagPolicy::MidpointThenLeft;
  opt.min_scale = 0.7;
  for (const Rat& eps : {Rat(1, 10), Rat(1, 100)}) {
    Gauge g = make_osc_profile_gauge(to_double(eps));
    HKReport rep = hk_check(f, F, G, 0.0, 1.0, g, {eps}, opt);
    CHECK(!rep.refuted);
    CHECK(rep.worst_sum < to_double(eps));
    CHECK(rep.trial_sums.size() == 2);
  }
}

TEST_CASE("cantor integrator telescopes exactly") {
  Function1D cantor = function1d_from_catalog("cantor");
  CHECK(cantor.fn(0.0) == 0.0);
  CHECK(cantor.fn(1.0) == 1.0);
  Gauge g = make_constant_gauge(1, 1.0 / 64);
  HKReport rep =
      hk_check(one(), cantor, cantor, 0.0, 1.0, g, {Rat(1, 1000000000)});
  CHECK(!rep.refuted);
  CHECK(rep.worst_sum == 0.0);
  for (double s : rep.trial_sums) CHECK(s == 0.0);
}

TEST_CASE("streamed partitions respect the gauge and tile the interval") {
  Function1D id = function1d_from_catalog("identity");
  Gauge g = make_constant_gauge(1, 0.125);
  HKCheckOptions opt;
  opt.trials = 1;  // the witness is then the full partition
  HKReport rep = hk_check(one(), doubled_identity(), id, 0.0, 1.0, g,
                          {Rat(1, 4)}, opt);
  REQUIRE(rep.refuted);
  REQUIRE(rep.witness.size() == 16);
  CHECK(rep.witness.front().a == Rat(0));
  CHECK(rep.witness.back().b == Rat(1));
  Rat covered(0);
  for (std::size_t i = 0; i < rep.witness.size(); ++i) {
    covered += rep.witness[i].b - rep.witness[i].a;
    if (i + 1 < rep.witness.size())
      CHECK(rep.witness[i].b == rep.witness[i + 1].a);
  }
  CHECK(covered == Rat(1));
  CHECK(is_delta_fine(rep.witness, g));
}

TEST_CASE("adaptive singular integrator hits closed forms") {
  HKIntegralResult flat = hk_integrate_adaptive(one(), 0.0, 1.0, {}, 1e-12);
  CHECK(flat.converged);
  CHECK(flat.trace.empty());
  CHECK(flat.value == doctest::Approx(1.0).epsilon(1e-12));

  Function1D invsqrt{"half-invsqrt",
                     [](double x) { return x > 0 ? 0.5 / std::sqrt(x) : 0.0; }};
  HKIntegralResult root = hk_integrate_adaptive(invsqrt, 0.0, 1.0, {0.0}, 1e-6);
  CHECK(root.converged);
  CHECK(std::fabs(root.value - 1.0) <= 1e-6);
  REQUIRE(root.trace.size() >= 2);
  for (std::size_t i = 0; i + 1 < root.trace.size(); ++i)
    CHECK(root.trace[i + 1].width == doctest::Approx(root.trace[i].width / 2));
  CHECK(root.trace.back().total == doctest::Approx(root.value).epsilon(1e-12));

  Function1D osc = function1d_from_catalog("x2sin-derivative");
  HKIntegralResult s = hk_integrate_adaptive(osc, 0.0, 1.0, {0.0}, 1e-6);
  CHECK(s.converged);
  CHECK(std::fabs(s.value - std::sin(1.0)) <= 1e-6);

  CHECK_THROWS_AS(hk_integrate_adaptive(one(), 0.0, 1.0, {2.0}, 1e-6),
                  PreconditionError);
}

TEST_CASE("difference quotients vanish under the declared control") {
  Function1D f = function1d_from_catalog("x2sin-derivative");
  Function1D F = function1d_from_catalog("x2sin");
  Function1D id = function1d_from_catalog("identity");
  MCReport rep = mc_alpha_check(f, F, id, id, 1.0, {0.0, 0.7, 0.9, 1.0});
  CHECK(!rep.refuted);
  CHECK(rep.worst_tail < 0.01);
  REQUIRE(rep.points.size() == 4);
  for (const MCPointTrace& p : rep.points) {
    CHECK(p.level_max.size() == 14);
    CHECK(p.tail < 0.01);
  }

  Function1D arctan = function1d_from_catalog("arctan");
  MCReport trivial = mc_alpha_check(one(), id, id, arctan, 1.0, {0.0, 0.5});
  CHECK(!trivial.refuted);
  CHECK(trivial.worst_tail == 0.0);
}

TEST_CASE("alpha ordering transfers consistency on the shared grid") {
  Function1D arctan = function1d_from_catalog("arctan");
  std::vector<double> samples{0.0, 0.7, 0.9};
  ControlOrder ord = control_increment_order(arctan, 1.0, 2.0, samples);
  CHECK(ord.ordered);
  CHECK(ord.checked == samples.size() * 14 * 2);

  Function1D f = function1d_from_catalog("x2sin-derivative");
  Function1D F = function1d_from_catalog("x2sin");
  Function1D id = function1d_from_catalog("identity");
  MCReport ra = mc_alpha_check(f, F, id, id, 1.0, samples);
  MCReport rb = mc_alpha_check(f, F, id, id, 2.0, samples);
  CHECK(!rb.refuted);
  REQUIRE(ra.points.size() == rb.points.size());
  for (std::size_t i = 0; i < ra.points.size(); ++i) {
    REQUIRE(ra.points[i].level_max.size() == rb.points[i].level_max.size());
    for (std::size_t l = 0; l < ra.points[i].level_max.size(); ++l)
      CHECK(rb.points[i].level_max[l] <= ra.points[i].level_max[l]);
  }

  Function1D neg{"neg", [](double x) { return -x; }};
  CHECK_THROWS_AS(mc_alpha_check(f, F, id, neg, 1.0, {0.5}),
                  PreconditionError);
  CHECK_THROWS_AS(mc_alpha_check(f, F, id, id, 0.5, {0.5}), PreconditionError);
  CHECK_THROWS_AS(control_increment_order(arctan, 2.0, 1.0, samples),
                  PreconditionError);
}

TEST_CASE("precondition failures are reported on the gauge and the schedule") {
  Function1D id = function1d_from_catalog("identity");
  Gauge g = make_constant_gauge(1, 0.25);

  HKCheckOptions bad_trials;
  bad_trials.trials = 0;
  CHECK_THROWS_AS(
      hk_check(one(), id, id, 0.0, 1.0, g, {Rat(1, 2)}, bad_trials),
      PreconditionError);
  CHECK_THROWS_AS(hk_check(one(), id, id, 0.0, 1.0,
                           make_constant_gauge(2, 0.25), {Rat(1, 2)}),
                  PreconditionError);
  CHECK_THROWS_AS(hk_check(one(), id, id, 1.0, 0.0, g, {Rat(1, 2)}),
                  PreconditionError);
  CHECK_THROWS_AS(hk_check(one(), id, id, 0.0, 1.0, g, {Rat(0)}),
                  PreconditionError);

  // empty schedule falls back to the default one
  HKReport rep = hk_check(one(), id, id, 0.0, 1.0, g, {});
  CHECK(!rep.refuted);
  CHECK(rep.eps_reported == Rat(1, 50));

  // a gauge vanishing inside the interval is a precondition failure...
  ZeroSet zs;
  zs.points.push_back(RatPoint{Rat(1, 2)});
  Gauge pinched = make_distance_gauge(1, 0.25, zs);
  CHECK_THROWS_AS(hk_check(one(), id, id, 0.0, 1.0, pinched, {Rat(1, 2)}),
                  PreconditionError);

  // ...while running out of depth or stream budget is a budget failure
  HKCheckOptions shallow;
  shallow.max_depth = 8;
  CHECK_THROWS_AS(hk_check(one(), id, id, 0.0, 1.0,
                           make_constant_gauge(1, 1e-9), {Rat(1, 2)}, shallow),
                  BudgetError);
  HKCheckOptions tiny;
  tiny.interval_budget = 4;
  CHECK_THROWS_AS(hk_check(one(), id, id, 0.0, 1.0,
                           make_constant_gauge(1, 1.0 / 64), {Rat(1, 2)},
                           tiny),
                  BudgetError);

  MCOptions bad_window;
  bad_window.tail_window = 99;
  CHECK_THROWS_AS(
      mc_alpha_check(one(), id, id, id, 1.0, {0.5}, bad_window),
      PreconditionError);
  CHECK_THROWS_AS(mc_alpha_check(one(), id, id, id, 1.0, {}),
                  PreconditionError);
}
