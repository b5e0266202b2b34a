#pragma once

// Definition checkers for the figure-based integral notions.  Each
// checker samples admissible configurations (delta-fine packings, or
// disjoint tagged figure systems), evaluates the defining sum and keeps
// the worst case.  A sum at or above the eps under test is a genuine
// refutation for the supplied gauge and comes with its witness;
// "consistent" only ever means no sampled configuration failed at the
// configured search depth.  The asymmetry is by design: the definitions
// let the gauge depend on eps, so consistency of one gauge proves
// nothing, while a witness whose sum no admissible shrinking can reduce
// refutes the claim outright.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gaugekit/charges.hpp"
#include "gaugekit/gauges.hpp"
#include "gaugekit/geometry.hpp"
#include "gaugekit/seminorm.hpp"

namespace gaugekit {

// Pointwise integrand with exact query points.
struct Integrand {
  int dim = 1;
  std::string name;
  std::function<double(const RatPoint&)> fn;
  double operator()(const RatPoint& x) const { return fn(x); }
};

Integrand integrand_constant(int dim, double value);
Integrand integrand_from_scalar(const ScalarField& s);
// chi_A * f: zero beyond the (closed) figure.
Integrand integrand_zero_extension(Integrand f, Figure a);

enum class IntegralNotion {
  PackingR,
  PackingRStar,
  PfefferR,
  PfefferRIntrinsic,
  RStar,
  HK,
  HKS,
  MCalpha,
};

// A candidate indefinite integral F of f against a reference charge G
// over a figure domain, plus the defining parameters of the notion.
struct IntegralClaim {
  IntegralNotion notion = IntegralNotion::PackingRStar;
  Integrand f;
  ChargePtr F;
  ChargePtr G;
  Figure domain;
  Rat tau = Rat(1);               // packing notions, in (0, 1]
  std::vector<Rat> eps_schedule;  // empty means {1/2, 1/10, 1/50}
  double alpha = 1.0;             // MCalpha only
};

std::vector<Rat> default_eps_schedule();

struct TrialRecord {
  double sum = 0.0;
  std::size_t pieces = 0;  // balls or kept partition pieces
};

struct HarnessReport {
  bool refuted = false;
  Rat eps_reported;          // the failing eps, or the last one checked
  double worst_sum = 0.0;    // over the trials at eps_reported
  double witness_sum = 0.0;  // the sum of the first refuting trial
  std::vector<TrialRecord> trials;
  std::size_t pieces_sampled = 0;   // partition checker only
  std::size_t pieces_rejected = 0;  // dropped before summation
  std::vector<Ball> witness_packing;
  std::vector<TaggedFigure> witness_partition;
  std::string note;
};

struct PackingCheckOptions {
  int trials = 6;
  std::uint64_t seed = 1;
  int jobs = 1;  // threads across trials; results match the serial run
  SeminormOptions seminorm;  // per-ball search; seed is re-derived
  SamplePackingOptions packing;
};

// Samples delta-fine packings with centers in the domain and sums the
// per-ball seminorm lower bounds of F - f(x_i) G at radius tau * r_i
// (plain variant for PackingR, tagged isoperimetric for PackingRStar).
// Sums are lower bounds: they can refute, never certify.
HarnessReport check_packing_integral(const IntegralClaim& claim,
                                     const Gauge& gauge,
                                     const PackingCheckOptions& opt = {});

struct PartitionCheckOptions {
  int trials = 8;
  std::uint64_t seed = 1;
  int jobs = 1;  // threads across trials; results match the serial run
  int extra_levels = 2;         // refinement beyond the domain's finest level
  int pieces_target = 8;        // per sampled system
  int iso_depth = 1;            // sampled isoperimetric depth (RStar)
  double outside_prob = 0.25;   // chance a piece grows beyond the domain
  double far_tag_prob = 0.125;  // chance of a tag detached from its piece
  std::uint64_t cell_budget = kDefaultCellBudget;
};

// Samples disjoint tagged figure systems, drops pieces failing the
// notion's admissibility filters (delta-fineness and pair regularity at
// eps always; PfefferRIntrinsic also keeps only pieces inside the
// domain, RStar also needs the tag inside its piece plus the sampled
// isoperimetric check), then evaluates sum |F(A_i) - f(x_i) G(A_i)|
// over the kept pieces.  Any subsystem of a disjoint system is again an
// admissible system, so dropping pieces stays within the definition.
HarnessReport check_bv_partition_integral(
    const IntegralClaim& claim, const Gauge& gauge,
    const PartitionCheckOptions& opt = {});

enum class DivSource { Symbolic, CentralDifference };

struct GaussGreenResult {
  double flux = 0.0;
  double volume_integral = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

// Boundary flux of u over the figure against the volume integral of its
// divergence (symbolic when available, central differences otherwise).
GaussGreenResult gauss_green_verify(const VectorField& u, const Figure& a,
                                    DivSource div_source = DivSource::Symbolic,
                                    int quad_order = 7,
                                    std::uint64_t budget = kDefaultCellBudget);

// Bounding box of the figure at its finest level (floored at 0), padded
// by `pad` cells on every side.  Host region for zero-extension runs.
Figure padded_host(const Figure& a, int pad = 1);

struct RestrictionReport {
  HarnessReport in_domain;       // centers sampled inside A
  HarnessReport zero_extension;  // centers roam the padded host of A
  bool consistent = false;
};

// Re-checks a packing claim for (chi_A f, F restricted to A, G).  Both
// runs use the gauge cut down by distance to the boundary of A, which
// vanishes exactly on it, so balls never straddle the boundary: inside
// tags see the original local behaviour of F, outside tags see the zero
// charge.
RestrictionReport restriction_consistency(const IntegralClaim& claim,
                                          const Figure& a, const Gauge& gauge,
                                          const PackingCheckOptions& opt = {});

}  // namespace gaugekit
