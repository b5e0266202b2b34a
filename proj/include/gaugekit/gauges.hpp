#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gaugekit/geometry.hpp"
#include "gaugekit/rational.hpp"

namespace gaugekit {

// ============================== gauges =================================

// Radius function evaluated at exact points.  Values are plain doubles;
// all fineness comparisons against them are strict, so a gauge that
// vanishes somewhere simply makes no ball/interval at that point
// admissible.
struct Gauge {
  int dim = 1;
  std::string name;
  std::function<double(const RatPoint&)> fn;
  // Optional 1D fast path for the streaming interval checker; when set it
  // must agree with fn at every dyadic point.
  std::function<double(double)> fn1;

  double operator()(const RatPoint& x) const { return fn(x); }
  // 1D convenience; the double->rational conversion is exact
  double at(const Rat& x) const { return fn({x}); }
};

Gauge make_constant_gauge(int dim, double delta);
Gauge make_custom_gauge(int dim, std::string name,
                        std::function<double(const RatPoint&)> fn);
Gauge make_scaled_gauge(Gauge g, double factor);
Gauge make_min_gauge(Gauge a, Gauge b);

// min(cap, distance to the declared zero set): isolated points and/or
// full hyperplanes {x_axis = offset}.
struct ZeroSet {
  std::vector<RatPoint> points;
  std::vector<std::pair<int, Rat>> planes;  // (axis, offset)
};
Gauge make_distance_gauge(int dim, double cap, ZeroSet zs);

// min(cap, distance to the boundary of A).  Positive on both sides of
// the boundary; zero exactly on it.
Gauge make_boundary_distance_gauge(const Figure& a, double cap,
                                   std::uint64_t budget = kDefaultCellBudget);

// ============================= packings ================================

struct Ball {
  RatPoint center;
  Rat radius;  // > 0
};

// Pairwise disjoint open balls (touching is allowed): |x-y| >= r+s, exact.
bool is_packing(const std::vector<Ball>& balls);

// 2 r_i < delta(x_i), strict, every ball.
bool is_delta_fine(const std::vector<Ball>& balls, const Gauge& g);

struct SamplePackingOptions {
  int target = 16;          // stop after this many accepted balls
  int attempts = 4000;      // total rejection-sampling budget
  int coord_level = 12;     // dyadic resolution of sampled centers
  int max_radius_exp = 10;  // radii capped at 2^max_radius_exp
};

// Seeded rejection sampling of a delta-fine packing with centers interior
// to the region's cubes.  Deterministic in (region, gauge, seed, options).
// Throws BudgetError if not even one admissible ball is found.
std::vector<Ball> sample_packing(const Figure& region, const Gauge& g,
                                 std::uint64_t seed,
                                 SamplePackingOptions opt = {});

// ========================= tagged partitions ===========================

struct TaggedFigure {
  Figure piece;
  RatPoint tag;
};

// Pieces interior-disjoint with union equal to `whole`, all exact.
bool is_partition_of(const std::vector<TaggedFigure>& pieces,
                     const Figure& whole,
                     std::uint64_t budget = kDefaultCellBudget);

// d(piece u {tag}) < delta(tag), strict, every piece.
bool is_delta_fine(const std::vector<TaggedFigure>& pieces, const Gauge& g);

struct TaggedInterval {
  Rat a, b;  // a < b
  Rat tag;   // in [a, b]
};

enum class TagPolicy {
  EndpointsThenMidpoint,  // try a, then b, then (a+b)/2
  MidpointOnly,
  // Midpoint unless only the left end admits the piece.  For gauges that
  // grow away from a singular left endpoint this provably emits midpoint
  // tags everywhere except the one piece closing on that endpoint.
  MidpointThenLeft,
};

// Bisection proof of the 1D fineness theorem: a partition of [a,b] into
// tagged intervals with b_i - a_i < delta(tag_i).  Throws
// PreconditionError when bisection bottoms out against a spot where the
// gauge is not positive, BudgetError when max_depth is hit with a
// positive gauge.
std::vector<TaggedInterval> cousin_partition_1d(
    const Rat& a, const Rat& b, const Gauge& g,
    TagPolicy policy = TagPolicy::EndpointsThenMidpoint, int max_depth = 60);

bool is_delta_fine(const std::vector<TaggedInterval>& intervals,
                   const Gauge& g);

// ========================== Vitali selection ===========================

// Greedy disjoint subfamily in decreasing radius order, with a coverage
// certificate for every rejected ball: an earlier selected ball of at
// least its radius whose 5x enlargement contains it, checked exactly.
struct VitaliSelection {
  std::vector<std::size_t> selected;
  struct Certificate {
    std::size_t rejected;
    std::size_t covered_by;  // index into the input family, not `selected`
  };
  std::vector<Certificate> certificates;
};

VitaliSelection vitali_disjoint_subfamily(const std::vector<Ball>& balls);

}  // namespace gaugekit
