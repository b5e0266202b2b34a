#pragma once

// Exact geometry kernel: dyadic cubes, figures (finite unions of dyadic
// cubes), rational boxes, and 1D sets of finite perimeter.  Volume,
// perimeter, relative perimeter and symmetric difference are exact
// rationals; diameters are carried as exact squares plus double
// approximations, so every regularity comparison can be done without
// rounding.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gaugekit/rational.hpp"

namespace gaugekit {

constexpr int kMinLevel = -16;   // coarsest admissible dyadic level
constexpr int kMaxLevel = 40;    // finest level the cell grid supports
constexpr int kMaxCellDim = 4;   // cell-grid operations support dim <= 4
constexpr std::uint64_t kDefaultCellBudget = 1ull << 24;

// ============================ dyadic cubes =============================

// [k_i/2^m, (k_i+1)/2^m] per axis, closed.
struct DyadicCube {
  int level = 0;
  std::vector<std::int64_t> index;

  int dim() const { return static_cast<int>(index.size()); }
  Rat side() const { return rat_pow2(-level); }
  Rat lo(int axis) const { return Rat(index[axis]) * side(); }
  Rat hi(int axis) const { return Rat(index[axis] + 1) * side(); }
  RatPoint low_corner() const;
  RatPoint center() const;

  // Smallest dyadic cube properly containing this one.
  DyadicCube mother() const;

  bool contains_cube(const DyadicCube& other) const;
  bool contains_point(const RatPoint& x) const;  // closed membership

  auto operator<=>(const DyadicCube&) const = default;
};

DyadicCube make_cube(int level, std::vector<std::int64_t> index);

// ============================ figures ==================================

// Normalized finite union of dyadic cubes: sorted, deduplicated, no cube
// contained in another (so interiors are pairwise disjoint).
struct Figure {
  int dim = 0;
  std::vector<DyadicCube> cubes;

  bool empty() const { return cubes.empty(); }
  auto operator<=>(const Figure&) const = default;
};

Figure make_figure(int dim, std::vector<DyadicCube> cubes);
Figure empty_figure(int dim);

// Coarsens by repeatedly replacing complete sibling blocks with their
// mother.  Normalization itself never merges.
Figure merge_siblings(const Figure& f);

int finest_level(const Figure& f);  // throws on empty figure
bool contains_point(const Figure& f, const RatPoint& x);
std::pair<RatPoint, RatPoint> bounding_box(const Figure& f);

// ============================ cell grids ===============================

// A figure refined to a single level, stored as packed integer cells.
struct Cell {
  std::array<std::int64_t, kMaxCellDim> c{};
  bool operator==(const Cell&) const = default;
};

struct CellHash {
  std::size_t operator()(const Cell& k) const {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto v : k.c) {
      std::uint64_t x = static_cast<std::uint64_t>(v) + h;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      h ^= x ^ (x >> 31);
    }
    return static_cast<std::size_t>(h);
  }
};

class CellSet {
 public:
  CellSet(int dim, int level);

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::size_t size() const { return cells_.size(); }
  bool contains(const Cell& c) const { return cells_.count(c) != 0; }
  void insert(const Cell& c) { cells_.insert(c); }
  const std::unordered_set<Cell, CellHash>& cells() const { return cells_; }

  Rat cell_volume() const { return rat_pow(rat_pow2(-level_), static_cast<unsigned>(dim_)); }
  Rat face_area() const { return rat_pow(rat_pow2(-level_), static_cast<unsigned>(dim_ - 1)); }
  RatPoint cell_low(const Cell& c) const;

 private:
  int dim_;
  int level_;
  std::unordered_set<Cell, CellHash> cells_;
};

Cell cell_neighbor(const Cell& c, int axis, int dir);

// One exposed cell face: boundary face of the cell in direction sign*e_axis.
struct Face {
  Cell cell;
  int axis = 0;
  int sign = +1;
};

CellSet refine_to(const Figure& f, int level,
                  std::uint64_t budget = kDefaultCellBudget);
std::vector<Face> exposed_faces(const CellSet& cs);
Figure figure_from_cells(const CellSet& cs);

// ============================ measures =================================

Rat volume(const Figure& f);
Rat perimeter(const Figure& f, std::uint64_t budget = kDefaultCellBudget);

// Perimeter of E inside the essential interior of A: exposed faces of E
// whose both adjacent cells lie in A.
Rat relative_perimeter(const Figure& e, const Figure& a,
                       std::uint64_t budget = kDefaultCellBudget);

Rat diameter_sq(const Figure& f);
Rat diameter_sq_with_tag(const Figure& f, const RatPoint& tag);
double diameter(const Figure& f);

// |E| / (d(E) * ||E||); 0 for empty E.  Tagged form uses d(E u {x}).
double regularity(const Figure& f, std::uint64_t budget = kDefaultCellBudget);
double regularity_with_tag(const Figure& f, const RatPoint& tag,
                           std::uint64_t budget = kDefaultCellBudget);

// Exact r(E[,x]) > sqrt(eps_sq); pass the squared threshold so irrational
// thresholds with rational squares stay exact.
bool is_regular_sq(const Figure& f, const RatPoint* tag, const Rat& eps_sq,
                   std::uint64_t budget = kDefaultCellBudget);

Rat symmetric_difference(const Figure& a, const Figure& b,
                         std::uint64_t budget = kDefaultCellBudget);

// Test of min{P(E cap T), P(E minus T)} <= (1/eps) * P(T, interior of E)
// for one splitting set T (intersected with E first).  ratio is the
// eps-scaled quotient, so passes == (ratio <= 1); a zero relative
// perimeter with a nonzero left side reports infinite instead.
struct IsoDeficiency {
  bool passes = true;
  bool infinite = false;
  Rat ratio;
};

IsoDeficiency isoperimetric_deficiency(const Figure& e, const Figure& t,
                                       const Rat& eps,
                                       std::uint64_t budget = kDefaultCellBudget);

// Runs the deficiency test over a sampled family of splitters: connected
// components, axis half-splits at up to `depth` extra levels, single
// cells and random unions.  A failure is a genuine counterexample with
// witness; "passed" only means no sampled splitter failed.
struct IsoSampledVerdict {
  bool passed = true;
  Figure witness;              // failing splitter when !passed
  Rat worst_ratio;             // largest finite ratio seen
  bool worst_infinite = false;
  std::size_t tested = 0;
};

IsoSampledVerdict is_eps_isoperimetric_sampled(
    const Figure& e, const Rat& eps, int depth, std::uint64_t seed = 0,
    std::uint64_t budget = kDefaultCellBudget);

// ============================ set algebra ==============================

bool is_subfigure(const Figure& a, const Figure& b,
                  std::uint64_t budget = kDefaultCellBudget);
Figure fig_intersect(const Figure& a, const Figure& b,
                     std::uint64_t budget = kDefaultCellBudget);
Figure fig_union(const Figure& a, const Figure& b,
                 std::uint64_t budget = kDefaultCellBudget);
Figure fig_difference(const Figure& a, const Figure& b,
                      std::uint64_t budget = kDefaultCellBudget);

// All level-`level` cells contained in the closed ball; result may be empty.
Figure dyadic_ball_approx(const RatPoint& center, const Rat& radius, int level,
                          std::uint64_t budget = kDefaultCellBudget);

// Exact tests against the closed/open ball.
bool cube_inside_ball_sq(const DyadicCube& q, const RatPoint& center,
                         const Rat& radius_sq, bool strict);
bool cube_meets_ball_sq(const DyadicCube& q, const RatPoint& center,
                        const Rat& radius_sq, bool strict);
bool figure_inside_ball_sq(const Figure& f, const RatPoint& center,
                           const Rat& radius_sq, bool strict);

// ============================ rational boxes ===========================

// Closed axis-aligned box with rational corners; the non-dyadic interval
// type used by the reflection decomposition and interval lemmas.
struct RatBox {
  std::vector<Rat> lo, hi;  // lo[i] < hi[i]

  int dim() const { return static_cast<int>(lo.size()); }
  Rat side(int axis) const { return hi[axis] - lo[axis]; }
  Rat min_side() const;
  Rat max_side() const;
  bool contains_point(const RatPoint& x) const;  // closed
};

RatBox make_box(std::vector<Rat> lo, std::vector<Rat> hi);
RatBox box_of_cube(const DyadicCube& q);

Rat volume(const RatBox& b);
Rat perimeter(const RatBox& b);
Rat diameter_sq(const RatBox& b);
Rat diameter_sq_with_tag(const RatBox& b, const RatPoint& tag);
double regularity_with_tag(const RatBox& b, const RatPoint& tag);
bool is_regular_sq(const RatBox& b, const RatPoint* tag, const Rat& eps_sq);
bool box_inside_ball_sq(const RatBox& b, const RatPoint& center,
                        const Rat& radius_sq, bool strict);
std::optional<RatBox> box_intersect(const RatBox& a, const RatBox& b);

// ============================ 1D BV sets ===============================

// Finite union of nondegenerate closed intervals, normalized: sorted,
// pairwise positive gaps (touching intervals are merged).
struct BVSet1D {
  std::vector<std::pair<Rat, Rat>> intervals;

  bool empty() const { return intervals.empty(); }
  auto operator<=>(const BVSet1D&) const = default;
};

BVSet1D make_bvset(std::vector<std::pair<Rat, Rat>> intervals);
BVSet1D bvset_from_figure(const Figure& f);  // dim must be 1

Rat measure(const BVSet1D& s);
Rat perimeter(const BVSet1D& s);  // 2 * number of components
Rat diameter(const BVSet1D& s);
Rat diameter_with_tag(const BVSet1D& s, const Rat& tag);
double regularity(const BVSet1D& s);
double regularity_with_tag(const BVSet1D& s, const Rat& tag);
bool is_regular_sq(const BVSet1D& s, const Rat* tag, const Rat& eps_sq);
bool contains_point(const BVSet1D& s, const Rat& x);
BVSet1D bv_intersect(const BVSet1D& a, const BVSet1D& b);
BVSet1D bv_union(const BVSet1D& a, const BVSet1D& b);
Rat symmetric_difference(const BVSet1D& a, const BVSet1D& b);

// ============================ constants ================================

// Dimension-dependent constants of the regularity/covering toolkit.  eta
// is the comparability factor in the interval isoperimetric bound (not
// pinned by the construction; configurable, default 2n).  p_iso is the
// isoperimetric constant in |A|^{(n-1)/n} <= p_iso * P(A) (default the
// sharp value 1/(n * alpha^{1/n})).
struct Constants {
  int n;
  double eta;
  double p_iso;

  explicit Constants(int n_, double eta_ = -1.0, double p_iso_ = -1.0);

  double alpha() const;   // unit ball volume
  double rho() const;     // regularity floor of reflected intervals
  Rat rho_sq() const;     // exact square of rho
  double c1() const;      // perimeter comparability for subordinate cubes
  double c_cover() const; // cap on cubes assigned to one ball
  double c2() const;      // combined perimeter bound
  double c_crit() const;  // p_iso^n, diameter-volume comparability
  double gamma(double eps) const;  // eta / eps^{n-1}
  double beta(double eps) const;   // 1/(1+gamma(eps))
  // Regularity retained after restricting an eps-regular set; positive and
  // strictly below eps for eps < 1/(c_crit * alpha).
  double eps_prime(double eps) const;
};

}  // namespace gaugekit
