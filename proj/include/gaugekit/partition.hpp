#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gaugekit/gauges.hpp"
#include "gaugekit/geometry.hpp"
#include "gaugekit/rational.hpp"

namespace gaugekit {

// ================== partition subordinate to a ball cover ==============

// One maximal dyadic subcube together with its owner ball and the exact
// side/perimeter bounds that the construction promises for it.
struct SubordinatePiece {
  DyadicCube cube;
  std::size_t owner;       // least admissible ball index
  bool side_lower_ok;      // R^2 < 4 n a^2   (mother escapes the 2R ball)
  bool side_upper_ok;      // n a^2 < 16 R^2  (cube fits in the 2R ball)
  bool perimeter_ok;       // (2 n a^{n-1})^2 <= 2^{4n-2} n^{3-n} R^{2n-2}
};

struct SubordinatePartition {
  std::vector<SubordinatePiece> pieces;
  std::vector<std::size_t> per_ball_counts;
  double count_bound = 0.0;  // the covering constant for this dimension
  bool counts_within_bound = false;
};

// Top-down walk over the dyadic subcubes of K.  A cube is emitted once
// some ball admits it: the cube meets B(x_i, R_i), lies inside
// B(x_i, 2R_i), and its mother does not; otherwise it is split.  Owners
// take the least admissible index.  Preconditions, both checked: K is
// not inside any B(x_i, 2R_i), and the open balls cover K (certified by
// refining K until every cell fits in a single ball; a cell that never
// does is reported as an uncovered witness).
SubordinatePartition subordinate_partition(
    const DyadicCube& k, const std::vector<Ball>& balls,
    int max_extra_depth = 40, int cover_check_depth = 12,
    std::uint64_t budget = kDefaultCellBudget);

Figure subordinate_partition_figure(const SubordinatePartition& p, int dim);

// ===================== signed reflection pieces ========================

// Writes an interval Q as a signed combination of intervals that all
// contain the point x: the axes where x falls outside are straightened
// one at a time by mirroring the interval across x, each step trading a
// piece for an enlarged one minus its overshoot.  Produces 2^m pieces for
// m offending axes; signs telescope back to the indicator of Q.
struct SignedBox {
  int sign;  // +1 or -1
  RatBox box;
};

std::vector<SignedBox> reflection_decomposition(const RatBox& q,
                                                const RatPoint& x);

// Exact a.e. identity sum_k sign_k * 1_{box_k} == 1_q, checked on the
// arrangement grid spanned by all involved coordinates.
bool signed_boxes_telescope(const std::vector<SignedBox>& pieces,
                            const RatBox& q);

// ======================= doubling radius search ========================

// Scans r = R/2, R/4, ... for a radius at which growing the ball from
// tau*r to 10r inflates phi + eps*volume by at most a factor c_t.  When
// no radius on the grid works, the report carries the least inflation
// ratio seen so the caller can tell how far away c_t was.
struct DoublingRadiusResult {
  bool found = false;
  Rat radius;         // accepted radius, if found
  int steps_tried = 0;
  double min_ratio = 0.0;  // min over the grid of LHS / (c_t * RHS-core)
  Rat min_ratio_radius;
};

DoublingRadiusResult find_doubling_radius(
    const std::function<double(double)>& phi, int dim, double eps, double tau,
    double c_t, const Rat& radius_cap, int max_steps = 200);

}  // namespace gaugekit
