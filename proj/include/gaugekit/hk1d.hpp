#pragma once

// Interval notions on the line: a streaming falsifier for claims of the
// form "F is an indefinite integral of f against the integrator G",
// judged by gauge-fine tagged interval sums; a band-refining integrator
// for integrands with declared singular points; and the pointwise
// difference-quotient checker driven by a strictly increasing control
// function.  Everything here works in double precision on dyadic grids,
// so identical inputs reproduce identical reports.

#include <cstdint>
#include <string>
#include <vector>

#include "gaugekit/fields.hpp"
#include "gaugekit/gauges.hpp"
#include "gaugekit/rational.hpp"

namespace gaugekit {

// ======================= tagged interval sums ==========================

struct HKCheckOptions {
  int trials = 6;
  std::uint64_t seed = 1;
  int jobs = 1;  // threads across trials; results match the serial run
  // Tag choice inside each emitted interval.  The checker never needs the
  // tags to be distinct from the endpoints, only contained in the piece.
  TagPolicy policy = TagPolicy::EndpointsThenMidpoint;
  // Trial 0 runs the gauge as given and keeps every interval; later
  // trials shrink the gauge by a random factor in [min_scale, 1) and keep
  // each interval with probability keep_prob, so sub-selections of finer
  // partitions are exercised too.
  double min_scale = 0.3;
  double keep_prob = 0.75;
  int max_depth = 48;  // bisection floor: intervals stay exact in double
  std::uint64_t interval_budget = 1ull << 26;  // per trial
  std::size_t witness_cap = 256;  // largest terms kept for the witness
};

struct HKReport {
  bool refuted = false;
  Rat eps_reported;        // failing eps, or the last one checked
  double worst_sum = 0.0;  // max trial sum at eps_reported
  double witness_sum = 0.0;  // full sum of the first refuting trial
  std::vector<double> trial_sums;
  std::uint64_t intervals_streamed = 0;  // emitted across trials at eps_reported
  // Largest terms of the first refuting trial, in interval order.  They
  // form a gauge-fine disjoint tagged system on their own; when
  // witness_complete is set their terms alone already reach the eps.
  std::vector<TaggedInterval> witness;
  bool witness_complete = false;
  std::string note;
};

// Streams a bisection partition of [a, b] (finest pieces first emitted
// left to right), tags each piece by the first policy candidate the gauge
// admits, and accumulates sum |F(v) - F(u) - f(tag) (G(v) - G(u))| over
// the kept pieces.  Nothing is materialized, so gauges forcing millions
// of pieces near a singular point stay affordable.  A trial sum at or
// above the eps under test refutes the claim for this gauge; consistency
// only ever speaks for the sampled trials.  Eps values are tried in
// order, stopping at the first refuted.
HKReport hk_check(const Function1D& f, const Function1D& F,
                  const Function1D& G, double a, double b, const Gauge& gauge,
                  const std::vector<Rat>& eps_schedule,
                  const HKCheckOptions& opt = {});

// Gauge tailored to the x^2 sin(x^-2) profile on [0, 1]: cubic growth
// away from 0 undercuts the second-derivative blowup there, and the
// width at 0 itself is sized so the single piece closing on the origin
// contributes only quadratically.  Under this gauge every midpoint-tagged
// fine partition (policy MidpointThenLeft) keeps its interval sum below
// 3/4 * eps; endpoint tags away from 0 would need quartically finer
// pieces than any desk-scale run can stream.
Gauge make_osc_profile_gauge(double eps);

// ====================== band-refining integration ======================

struct SingularStage {
  double width = 0.0;   // inner cutoff after this stage
  double shell = 0.0;   // contribution of the band peeled off
  double total = 0.0;   // running integral estimate
};

struct HKIntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  std::uint64_t evals = 0;
  std::vector<SingularStage> trace;
};

// Integrates f over [a, b] while halving cutoff bands around the declared
// singular points: the core away from them is integrated once, then
// shells are peeled until two consecutive shell contributions drop below
// tol / 8 on every singular side.  A shell probing as rapidly
// oscillating switches the side to a zero-marching walk that integrates
// one sign-constant lobe at a time and Euler-transforms the alternating
// lobe sums, which estimates the infinite tail from a few dozen lobes
// instead of resolving every cycle.  The estimate is an extrapolation
// diagnostic, not a certified value; converged=false (never a throw)
// reports a cutoff or evaluation budget running out first.
HKIntegralResult hk_integrate_adaptive(const Function1D& f, double a, double b,
                                       std::vector<double> singular_points,
                                       double tol,
                                       std::uint64_t eval_budget = 1ull << 29);

// ==================== control-function quotients =======================

struct MCOptions {
  double h0 = 0.125;  // coarsest step; levels halve it
  int levels = 14;
  int tail_window = 3;  // levels entering the tail maximum
  double threshold = 0.01;
};

struct MCPointTrace {
  double x = 0.0;
  std::vector<double> level_max;  // max |quotient| per level, both signs
  double tail = 0.0;              // max over the last tail_window levels
};

struct MCReport {
  bool refuted = false;
  double threshold = 0.0;
  double worst_tail = 0.0;
  double worst_x = 0.0;
  std::vector<MCPointTrace> points;
  std::string note;
};

// Difference quotients (F(x+h) - F(x) - f(x)(G(x+h) - G(x))) divided by
// the control increment phi(x + alpha h) - phi(x), evaluated on the
// halving h-grid with both signs at every sample point.  Refuted when
// some point's tail maximum stays at or above the threshold; phi failing
// to increase across any evaluated pair is a precondition error, not a
// refutation.  Requires alpha >= 1.
MCReport mc_alpha_check(const Function1D& f, const Function1D& F,
                        const Function1D& G, const Function1D& phi,
                        double alpha, const std::vector<double>& samples,
                        const MCOptions& opt = {});

struct ControlOrder {
  bool ordered = true;
  double violating_x = 0.0;
  double violating_h = 0.0;
  std::size_t checked = 0;
};

// Grid fact behind the alpha ordering: for increasing phi and
// 0 < alpha <= beta, |phi(x + alpha h) - phi(x)| never exceeds
// |phi(x + beta h) - phi(x)|.  Since the quotient numerators agree, the
// beta quotients are pointwise no larger on a shared grid, so a
// consistent alpha report transfers to beta.  Checked at every (x, h)
// the quotient grid would use.
ControlOrder control_increment_order(const Function1D& phi, double alpha,
                                     double beta,
                                     const std::vector<double>& samples,
                                     const MCOptions& opt = {});

}  // namespace gaugekit
