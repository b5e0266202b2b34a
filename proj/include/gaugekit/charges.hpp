#pragma once

// Charges: additive set functions evaluated on figures, rational boxes and
// 1D BV sets.  Kinds: boundary flux of a vector field, volume integral of
// a density, endpoint-difference of a 1D function, length measure carried
// by a segment (the canonical non-charge), window restriction, and linear
// combination.  Plus the two analysis tools: a falsifier for the
// continuity-at-the-empty-set axiom and a set-derivative estimator.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gaugekit/fields.hpp"
#include "gaugekit/geometry.hpp"

namespace gaugekit {

enum class ChargeKind {
  Flux,
  Density,
  FunctionDiff,
  SegmentMeasure,
  Restricted,
  Combination,
};

struct Charge;
using ChargePtr = std::shared_ptr<const Charge>;

// Axis-aligned segment {base + t*e_axis : t in [0, length]}.
struct SegmentDescriptor {
  RatPoint base;
  int axis = 0;
  Rat length;
};

struct Charge {
  ChargeKind kind = ChargeKind::Density;
  int dim = 1;
  int quad_order = 7;

  VectorField field;                       // Flux
  ScalarField density;                     // Density
  Function1D f1;                           // FunctionDiff (dim 1)
  SegmentDescriptor segment;               // SegmentMeasure
  ChargePtr base;                          // Restricted
  Figure window;                           // Restricted
  std::vector<std::pair<double, ChargePtr>> parts;  // Combination

  std::string describe() const;
};

ChargePtr make_flux_charge(VectorField u, int quad_order = 7);
ChargePtr make_density_charge(ScalarField f, int quad_order = 7);
ChargePtr make_lebesgue_charge(int dim);
ChargePtr make_function_charge(Function1D f);
ChargePtr make_segment_measure_charge(SegmentDescriptor seg, int dim);
ChargePtr restrict_charge(ChargePtr base, Figure window);
ChargePtr combine_charges(std::vector<std::pair<double, ChargePtr>> parts);

double charge_eval(const ChargePtr& c, const Figure& e,
                   std::uint64_t budget = kDefaultCellBudget);
double charge_eval(const ChargePtr& c, const BVSet1D& e);
double charge_eval_box(const ChargePtr& c, const RatBox& b);

// Exact value where a fully rational path exists (polynomial flux and
// density, Lebesgue, segment measure, restrictions of those); nullopt
// otherwise.
std::optional<Rat> charge_eval_exact(const ChargePtr& c, const Figure& e,
                                     std::uint64_t budget = kDefaultCellBudget);

// ======================= empty-set continuity ==========================

// One candidate counterexample: figures shrinking in volume with bounded
// perimeters inside a fixed box, plus the observed charge values.
struct ShrinkingSequence {
  std::string description;
  std::vector<Figure> stages;
  std::vector<double> values;
  std::vector<Rat> volumes;
  std::vector<Rat> perimeters;
};

struct FalsifierReport {
  bool refuted = false;
  double threshold = 0.0;
  int sequences_checked = 0;
  std::optional<ShrinkingSequence> witness;
};

// Searches for a sequence with |A_k| <= |domain|*2^-k, perimeter below
// perimeter_cap, and |C(A_k)| >= threshold at every stage.  The search
// family contains shrinking tubes around declared and cataloged segments
// and randomized thin slabs/cube clusters; "not refuted" is always
// relative to this sampled family.
FalsifierReport charge_axiom_falsifier(const ChargePtr& c,
                                       const Figure& domain, double threshold,
                                       int trials, std::uint64_t seed,
                                       int stages = 10,
                                       double perimeter_cap = 64.0);

// ========================== set derivative =============================

struct DerivativeEstimate {
  struct Row {
    double radius = 0.0;
    double inf_ratio = 0.0;
    double sup_ratio = 0.0;
    int family_size = 0;
  };
  std::vector<Row> rows;
  double lower = 0.0;  // max over rows of inf_ratio
  double upper = 0.0;  // min over rows of sup_ratio
};

// Ratios C(E)/|E| over the versioned search family at each radius: the
// dyadic cubes containing x at the matching level plus their face-adjacent
// two-cube unions, filtered to regularity (with tag) > eta.
DerivativeEstimate charge_derivative_estimate(const ChargePtr& c,
                                              const RatPoint& x, double eta,
                                              double r0 = 0.25, int steps = 9);

}  // namespace gaugekit
