#pragma once

// Lower-bound search for the ball seminorms of a charge: the supremum of
// |F(E)| over figures compactly contained in an open ball B(x,r), where E
// must be eps-regular as seen from the center x; the starred variant
// additionally requires x to lie in E and E to survive the sampled
// isoperimetric check.  The search walks a versioned family of dyadic
// candidates (full in-ball figure, single cells, cell-aligned boxes,
// greedy unions, random unions) at the base cell size and up to `depth`
// finer levels.  Families are nested in depth and independent of the
// variant, so reported values are monotone in depth and the starred value
// never exceeds the plain one on identical queries.  Values are lower
// bounds for the supremum by construction; the witness realizes the value.

#include <cstdint>

#include "gaugekit/charges.hpp"
#include "gaugekit/geometry.hpp"

namespace gaugekit {

enum class SeminormVariant {
  Regular,             // E strictly inside the ball, (E,x) eps-regular
  TaggedIsoperimetric, // additionally x in E and sampled eps-isoperimetric
};

struct SeminormOptions {
  int depth = 4;                  // extra levels below the base cell size
  std::uint64_t seed = 0;
  int iso_depth = 1;              // refinement of the isoperimetric check
  std::size_t single_cap = 256;   // single-cell candidates per level
  std::size_t box_budget = 2500;  // full box enumeration cap per level
  std::size_t random_boxes = 48;  // sampled boxes when over the cap
  int growth_steps = 48;          // greedy union length
  int random_unions = 24;         // random connected unions per level
  std::size_t max_cells_per_level = std::size_t(1) << 17;
  std::uint64_t cell_budget = kDefaultCellBudget;
};

struct SeminormResult {
  double value = 0.0;  // best |F(E)| found; 0 when nothing was admissible
  Figure witness;      // empty when no admissible candidate exists
  // bookkeeping: distinct candidates drawn from the family, and how many
  // passed the exact admissibility filters.  The sampled isoperimetric
  // filter is applied lazily to improving candidates only; value and
  // witness always passed every filter of the variant.
  std::size_t candidates = 0;
  std::size_t admissible = 0;
  int base_level = 0;
};

struct SeminormQuery {
  ChargePtr charge;
  RatPoint center;
  Rat radius;
  Rat eps;
  SeminormVariant variant = SeminormVariant::Regular;
  SeminormOptions options;
};

SeminormResult seminorm_lower_bound(const SeminormQuery& q);

SeminormResult seminorm_lower_bound(const ChargePtr& charge, const RatPoint& x,
                                    const Rat& radius, const Rat& eps,
                                    SeminormVariant variant,
                                    const SeminormOptions& opt = {});

}  // namespace gaugekit
