#include "gaugekit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gaugekit/rng.hpp"

namespace gaugekit {

namespace {

void check_dim(int dim) {
  if (dim < 1) throw PreconditionError("dimension must be >= 1");
}

void check_cell_dim(int dim) {
  check_dim(dim);
  if (dim > kMaxCellDim)
    throw PreconditionError("cell-grid operation limited to dim <= " +
                            std::to_string(kMaxCellDim));
}

std::int64_t shift_left_checked(std::int64_t k, int d) {
  if (d == 0) return k;
  std::int64_t bound = std::int64_t(1) << (62 - d);
  if (k > bound || k < -bound)
    throw PreconditionError("cube index magnitude out of supported range");
  return k << d;
}

}  // namespace

// ============================ dyadic cubes =============================

RatPoint DyadicCube::low_corner() const {
  RatPoint p(index.size());
  Rat s = side();
  for (std::size_t i = 0; i < index.size(); ++i) p[i] = Rat(index[i]) * s;
  return p;
}

RatPoint DyadicCube::center() const {
  RatPoint p(index.size());
  Rat s = side();
  for (std::size_t i = 0; i < index.size(); ++i)
    p[i] = (Rat(index[i]) + Rat(1, 2)) * s;
  return p;
}

DyadicCube DyadicCube::mother() const {
  DyadicCube m;
  m.level = level - 1;
  m.index.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) m.index[i] = index[i] >> 1;
  return m;
}

bool DyadicCube::contains_cube(const DyadicCube& other) const {
  if (other.dim() != dim() || other.level < level) return false;
  int d = other.level - level;
  for (std::size_t i = 0; i < index.size(); ++i)
    if ((other.index[i] >> d) != index[i]) return false;
  return true;
}

bool DyadicCube::contains_point(const RatPoint& x) const {
  if (static_cast<int>(x.size()) != dim())
    throw PreconditionError("dimension mismatch");
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo(i) || x[i] > hi(i)) return false;
  return true;
}

DyadicCube make_cube(int level, std::vector<std::int64_t> index) {
  if (index.empty()) throw PreconditionError("cube needs at least one axis");
  if (level < kMinLevel || level > kMaxLevel)
    throw PreconditionError("cube level " + std::to_string(level) +
                            " outside [" + std::to_string(kMinLevel) + ", " +
                            std::to_string(kMaxLevel) + "]");
  for (auto k : index)
    if (k > (std::int64_t(1) << 50) || k < -(std::int64_t(1) << 50))
      throw PreconditionError("cube index magnitude out of supported range");
  DyadicCube q;
  q.level = level;
  q.index = std::move(index);
  return q;
}

// ============================ figures ==================================

Figure make_figure(int dim, std::vector<DyadicCube> cubes) {
  check_dim(dim);
  for (const auto& q : cubes) {
    if (q.dim() != dim) throw PreconditionError("cube dimension mismatch");
    if (q.level < kMinLevel || q.level > kMaxLevel)
      throw PreconditionError("cube level outside supported range");
  }
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());

  // Drop any cube contained in a coarser member.  Distinct dyadic cubes
  // either nest or have disjoint interiors, so this is all normalization
  // has to do.
  std::set<std::pair<int, std::vector<std::int64_t>>> present;
  std::set<int> levels;
  for (const auto& q : cubes) {
    present.insert({q.level, q.index});
    levels.insert(q.level);
  }
  std::vector<DyadicCube> kept;
  kept.reserve(cubes.size());
  for (const auto& q : cubes) {
    bool contained = false;
    for (int l : levels) {
      if (l >= q.level) break;
      int d = q.level - l;
      std::vector<std::int64_t> anc(q.index.size());
      for (std::size_t i = 0; i < q.index.size(); ++i)
        anc[i] = q.index[i] >> d;
      if (present.count({l, anc})) {
        contained = true;
        break;
      }
    }
    if (!contained) kept.push_back(q);
  }
  Figure f;
  f.dim = dim;
  f.cubes = std::move(kept);
  return f;
}

Figure empty_figure(int dim) {
  check_dim(dim);
  Figure f;
  f.dim = dim;
  return f;
}

Figure merge_siblings(const Figure& f) {
  std::vector<DyadicCube> cubes = f.cubes;
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<DyadicCube, std::vector<std::size_t>> by_mother;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      if (cubes[i].level <= kMinLevel) continue;
      by_mother[cubes[i].mother()].push_back(i);
    }
    std::vector<bool> drop(cubes.size(), false);
    std::vector<DyadicCube> added;
    std::uint64_t full = 1ull << f.dim;
    for (auto& [m, members] : by_mother) {
      if (members.size() == full) {
        for (auto i : members) drop[i] = true;
        added.push_back(m);
        changed = true;
      }
    }
    if (changed) {
      std::vector<DyadicCube> next;
      for (std::size_t i = 0; i < cubes.size(); ++i)
        if (!drop[i]) next.push_back(cubes[i]);
      next.insert(next.end(), added.begin(), added.end());
      cubes = std::move(next);
    }
  }
  return make_figure(f.dim, std::move(cubes));
}

int finest_level(const Figure& f) {
  if (f.empty()) throw PreconditionError("finest_level of empty figure");
  int m = f.cubes.front().level;
  for (const auto& q : f.cubes) m = std::max(m, q.level);
  return m;
}

bool contains_point(const Figure& f, const RatPoint& x) {
  for (const auto& q : f.cubes)
    if (q.contains_point(x)) return true;
  return false;
}

std::pair<RatPoint, RatPoint> bounding_box(const Figure& f) {
  if (f.empty()) throw PreconditionError("bounding box of empty figure");
  RatPoint lo(f.dim), hi(f.dim);
  for (int i = 0; i < f.dim; ++i) {
    lo[i] = f.cubes.front().lo(i);
    hi[i] = f.cubes.front().hi(i);
  }
  for (const auto& q : f.cubes) {
    for (int i = 0; i < f.dim; ++i) {
      lo[i] = std::min(lo[i], q.lo(i));
      hi[i] = std::max(hi[i], q.hi(i));
    }
  }
  return {lo, hi};
}

// ============================ cell grids ===============================

CellSet::CellSet(int dim, int level) : dim_(dim), level_(level) {
  check_cell_dim(dim);
  if (level < kMinLevel || level > kMaxLevel)
    throw PreconditionError("cell level outside supported range");
}

RatPoint CellSet::cell_low(const Cell& c) const {
  RatPoint p(dim_);
  Rat s = rat_pow2(-level_);
  for (int i = 0; i < dim_; ++i) p[i] = Rat(c.c[i]) * s;
  return p;
}

Cell cell_neighbor(const Cell& c, int axis, int dir) {
  Cell r = c;
  r.c[axis] += dir;
  return r;
}

CellSet refine_to(const Figure& f, int level, std::uint64_t budget) {
  check_cell_dim(f.dim);
  if (level > kMaxLevel)
    throw PreconditionError("refinement level outside supported range");
  if (!f.empty() && level < finest_level(f))
    throw PreconditionError("refinement level coarser than figure");

  std::uint64_t total = 0;
  for (const auto& q : f.cubes) {
    int d = level - q.level;
    if (static_cast<std::uint64_t>(d) * f.dim >= 63)
      throw BudgetError("refinement cell count", ~0ull, budget);
    std::uint64_t cnt = 1ull << (static_cast<std::uint64_t>(d) * f.dim);
    total += cnt;
    if (total > budget) throw BudgetError("refinement cell count", total, budget);
  }

  CellSet cs(f.dim, level);
  for (const auto& q : f.cubes) {
    int d = level - q.level;
    std::int64_t span = std::int64_t(1) << d;
    Cell base{};
    for (int i = 0; i < f.dim; ++i)
      base.c[i] = shift_left_checked(q.index[i], d);
    Cell off{};
    while (true) {
      Cell cur = base;
      for (int i = 0; i < f.dim; ++i) cur.c[i] += off.c[i];
      cs.insert(cur);
      int axis = 0;
      while (axis < f.dim) {
        if (++off.c[axis] < span) break;
        off.c[axis] = 0;
        ++axis;
      }
      if (axis == f.dim) break;
    }
  }
  return cs;
}

std::vector<Face> exposed_faces(const CellSet& cs) {
  std::vector<Face> faces;
  for (const auto& c : cs.cells()) {
    for (int axis = 0; axis < cs.dim(); ++axis) {
      for (int dir : {-1, +1}) {
        if (!cs.contains(cell_neighbor(c, axis, dir)))
          faces.push_back(Face{c, axis, dir});
      }
    }
  }
  return faces;
}

Figure figure_from_cells(const CellSet& cs) {
  std::vector<DyadicCube> cubes;
  cubes.reserve(cs.size());
  for (const auto& c : cs.cells()) {
    std::vector<std::int64_t> idx(cs.dim());
    for (int i = 0; i < cs.dim(); ++i) idx[i] = c.c[i];
    cubes.push_back(make_cube(cs.level(), std::move(idx)));
  }
  return make_figure(cs.dim(), std::move(cubes));
}

// ============================ measures =================================

Rat volume(const Figure& f) {
  Rat v(0);
  for (const auto& q : f.cubes)
    v += rat_pow(q.side(), static_cast<unsigned>(f.dim));
  return v;
}

Rat perimeter(const Figure& f, std::uint64_t budget) {
  if (f.empty()) return Rat(0);
  CellSet cs = refine_to(f, finest_level(f), budget);
  std::uint64_t exposed = exposed_faces(cs).size();
  return Rat(static_cast<long>(exposed)) * cs.face_area();
}

Rat relative_perimeter(const Figure& e, const Figure& a, std::uint64_t budget) {
  if (e.empty() || a.empty()) return Rat(0);
  int level = std::max(finest_level(e), finest_level(a));
  CellSet ce = refine_to(e, level, budget);
  CellSet ca = refine_to(a, level, budget);
  std::uint64_t count = 0;
  for (const auto& face : exposed_faces(ce)) {
    Cell outside = cell_neighbor(face.cell, face.axis, face.sign);
    if (ca.contains(face.cell) && ca.contains(outside)) ++count;
  }
  return Rat(static_cast<long>(count)) * ce.face_area();
}

namespace {

std::vector<RatPoint> figure_corners(const Figure& f) {
  std::set<RatPoint> pts;
  for (const auto& q : f.cubes) {
    int n = q.dim();
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      RatPoint p(n);
      for (int i = 0; i < n; ++i)
        p[i] = (mask >> i) & 1 ? q.hi(i) : q.lo(i);
      pts.insert(std::move(p));
    }
    if (pts.size() > 5000)
      throw BudgetError("diameter corner enumeration", pts.size(), 5000);
  }
  return {pts.begin(), pts.end()};
}

}  // namespace

Rat diameter_sq(const Figure& f) {
  if (f.empty()) return Rat(0);
  auto pts = figure_corners(f);
  Rat best(0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, dist_sq(pts[i], pts[j]));
  return best;
}

Rat diameter_sq_with_tag(const Figure& f, const RatPoint& tag) {
  if (f.empty()) return Rat(0);
  Rat best = diameter_sq(f);
  for (const auto& p : figure_corners(f))
    best = std::max(best, dist_sq(p, tag));
  return best;
}

double diameter(const Figure& f) { return std::sqrt(to_double(diameter_sq(f))); }

double regularity(const Figure& f, std::uint64_t budget) {
  Rat v = volume(f);
  if (v == 0) return 0.0;
  double d = std::sqrt(to_double(diameter_sq(f)));
  double p = to_double(perimeter(f, budget));
  return to_double(v) / (d * p);
}

double regularity_with_tag(const Figure& f, const RatPoint& tag,
                           std::uint64_t budget) {
  Rat v = volume(f);
  if (v == 0) return 0.0;
  double d = std::sqrt(to_double(diameter_sq_with_tag(f, tag)));
  double p = to_double(perimeter(f, budget));
  return to_double(v) / (d * p);
}

bool is_regular_sq(const Figure& f, const RatPoint* tag, const Rat& eps_sq,
                   std::uint64_t budget) {
  Rat v = volume(f);
  if (v == 0) return false;
  Rat d2 = tag ? diameter_sq_with_tag(f, *tag) : diameter_sq(f);
  Rat p = perimeter(f, budget);
  return v * v > eps_sq * d2 * p * p;
}

Rat symmetric_difference(const Figure& a, const Figure& b,
                         std::uint64_t budget) {
  if (a.empty()) return volume(b);
  if (b.empty()) return volume(a);
  if (a.dim != b.dim) throw PreconditionError("dimension mismatch");
  Rat va = volume(a);
  Rat vb = volume(b);
  Rat vi = volume(fig_intersect(a, b, budget));
  return va + vb - 2 * vi;
}

IsoDeficiency isoperimetric_deficiency(const Figure& e, const Figure& t_in,
                                       const Rat& eps, std::uint64_t budget) {
  if (eps <= 0) throw PreconditionError("isoperimetric eps must be positive");
  IsoDeficiency out;
  out.ratio = Rat(0);
  if (e.empty()) return out;
  Figure t = fig_intersect(t_in, e, budget);
  Rat pt = perimeter(t, budget);
  Rat pd = perimeter(fig_difference(e, t, budget), budget);
  Rat smaller = std::min(pt, pd);
  Rat rel = relative_perimeter(t, e, budget);
  if (rel == 0) {
    if (smaller != 0) {
      out.passes = false;
      out.infinite = true;
    }
    return out;
  }
  out.ratio = eps * smaller / rel;
  out.passes = out.ratio <= 1;
  return out;
}

namespace {

std::vector<Figure> cell_components(const CellSet& cs) {
  std::vector<Figure> comps;
  std::unordered_set<Cell, CellHash> seen;
  for (const auto& start : cs.cells()) {
    if (seen.count(start)) continue;
    CellSet comp(cs.dim(), cs.level());
    std::vector<Cell> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      Cell c = stack.back();
      stack.pop_back();
      comp.insert(c);
      for (int axis = 0; axis < cs.dim(); ++axis) {
        for (int dir : {-1, +1}) {
          Cell nb = cell_neighbor(c, axis, dir);
          if (cs.contains(nb) && !seen.count(nb)) {
            seen.insert(nb);
            stack.push_back(nb);
          }
        }
      }
    }
    comps.push_back(figure_from_cells(comp));
  }
  return comps;
}

std::vector<Cell> sorted_cells(const CellSet& cs) {
  std::vector<Cell> v(cs.cells().begin(), cs.cells().end());
  std::sort(v.begin(), v.end(), [&](const Cell& a, const Cell& b) {
    for (int i = 0; i < cs.dim(); ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  });
  return v;
}

}  // namespace

IsoSampledVerdict is_eps_isoperimetric_sampled(const Figure& e, const Rat& eps,
                                               int depth, std::uint64_t seed,
                                               std::uint64_t budget) {
  if (eps <= 0) throw PreconditionError("isoperimetric eps must be positive");
  if (depth < 0) throw PreconditionError("negative refinement depth");
  IsoSampledVerdict out;
  out.worst_ratio = Rat(0);
  if (e.empty()) return out;

  auto consider = [&](const Figure& t) {
    if (t.empty() || t == e) return true;
    IsoDeficiency d = isoperimetric_deficiency(e, t, eps, budget);
    ++out.tested;
    if (!d.passes) {
      out.passed = false;
      out.witness = t;
      out.worst_infinite = d.infinite;
      if (!d.infinite) out.worst_ratio = d.ratio;
      return false;
    }
    if (d.ratio > out.worst_ratio) out.worst_ratio = d.ratio;
    return true;
  };

  int base = finest_level(e);
  // disconnected pieces are the canonical failures: splitting off a
  // component has zero relative perimeter
  for (const auto& comp : cell_components(refine_to(e, base, budget)))
    if (!consider(comp)) return out;

  for (int level = base; level <= base + depth && level <= kMaxLevel; ++level) {
    CellSet cs = refine_to(e, level, budget);
    std::vector<Cell> cells = sorted_cells(cs);

    // axis half-splits at every grid plane met by the figure
    for (int axis = 0; axis < cs.dim(); ++axis) {
      std::int64_t lo = cells.front().c[axis], hi = lo;
      for (const auto& c : cells) {
        lo = std::min(lo, c.c[axis]);
        hi = std::max(hi, c.c[axis]);
      }
      for (std::int64_t cut = lo + 1; cut <= hi; ++cut) {
        CellSet part(cs.dim(), cs.level());
        for (const auto& c : cells)
          if (c.c[axis] < cut) part.insert(c);
        if (!consider(figure_from_cells(part))) return out;
      }
    }
  }

  CellSet fine = refine_to(e, std::min(base + depth, int(kMaxLevel)), budget);
  std::vector<Cell> cells = sorted_cells(fine);
  Rng rng = make_rng(seed, 0x150b);

  // single cells, sampled when there are many
  std::size_t nsingle = std::min<std::size_t>(cells.size(), 64);
  for (std::size_t i = 0; i < nsingle; ++i) {
    std::size_t pick = cells.size() <= 64
                           ? i
                           : std::size_t(rng.uniform_int(0, long(cells.size()) - 1));
    CellSet one(fine.dim(), fine.level());
    one.insert(cells[pick]);
    if (!consider(figure_from_cells(one))) return out;
  }

  // random connected unions
  for (int trial = 0; trial < 16; ++trial) {
    Rng tr = rng.derive(trial + 1);
    std::vector<Cell> grown{cells[std::size_t(
        tr.uniform_int(0, long(cells.size()) - 1))]};
    CellSet set(fine.dim(), fine.level());
    set.insert(grown[0]);
    long want = tr.uniform_int(1, std::max<long>(1, long(cells.size()) / 2));
    for (long step = 0; step < 8 * want && long(set.size()) < want + 1; ++step) {
      const Cell& from = grown[std::size_t(
          tr.uniform_int(0, long(grown.size()) - 1))];
      Cell nb = cell_neighbor(from, int(tr.uniform_int(0, fine.dim() - 1)),
                              tr.coin() ? +1 : -1);
      if (fine.contains(nb) && !set.contains(nb)) {
        set.insert(nb);
        grown.push_back(nb);
      }
    }
    if (!consider(figure_from_cells(set))) return out;
  }

  // random subsets, not necessarily connected
  for (int trial = 0; trial < 8; ++trial) {
    Rng tr = rng.derive(0x100 + trial);
    CellSet sub(fine.dim(), fine.level());
    for (const auto& c : cells)
      if (tr.coin()) sub.insert(c);
    if (!consider(figure_from_cells(sub))) return out;
  }

  return out;
}

// ============================ set algebra ==============================

bool is_subfigure(const Figure& a, const Figure& b, std::uint64_t budget) {
  if (a.empty()) return true;
  if (b.empty()) return false;
  if (a.dim != b.dim) throw PreconditionError("dimension mismatch");
  // cheap path: every cube of a inside some cube of b
  bool all = true;
  for (const auto& qa : a.cubes) {
    bool in = false;
    for (const auto& qb : b.cubes)
      if (qb.contains_cube(qa)) {
        in = true;
        break;
      }
    if (!in) {
      all = false;
      break;
    }
  }
  if (all) return true;
  int level = std::max(finest_level(a), finest_level(b));
  CellSet ca = refine_to(a, level, budget);
  CellSet cb = refine_to(b, level, budget);
  for (const auto& c : ca.cells())
    if (!cb.contains(c)) return false;
  return true;
}

Figure fig_union(const Figure& a, const Figure& b, std::uint64_t) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dim != b.dim) throw PreconditionError("dimension mismatch");
  std::vector<DyadicCube> cubes = a.cubes;
  cubes.insert(cubes.end(), b.cubes.begin(), b.cubes.end());
  return make_figure(a.dim, std::move(cubes));
}

namespace {

// Membership index over a figure's cubes: distinct dyadic cubes either
// nest or have disjoint interiors, so coverage tests are ancestor
// lookups, never refinements.
struct CubeIndex {
  std::set<std::pair<int, std::vector<std::int64_t>>> keys;
  std::vector<int> levels;  // ascending, distinct

  explicit CubeIndex(const Figure& f) {
    std::set<int> ls;
    for (const auto& q : f.cubes) {
      keys.insert({q.level, q.index});
      ls.insert(q.level);
    }
    levels.assign(ls.begin(), ls.end());
  }

  // q lies inside a member cube (equality counts iff allow_equal)
  bool covers(const DyadicCube& q, bool allow_equal) const {
    for (int lb : levels) {
      if (lb > q.level || (lb == q.level && !allow_equal)) break;
      int up = q.level - lb;
      std::vector<std::int64_t> idx(q.index.size());
      for (std::size_t ax = 0; ax < idx.size(); ++ax)
        idx[ax] = q.index[ax] >> up;
      if (keys.count({lb, idx})) return true;
    }
    return false;
  }
};

}  // namespace

Figure fig_intersect(const Figure& a, const Figure& b, std::uint64_t budget) {
  if (a.empty() || b.empty()) return empty_figure(a.dim ? a.dim : b.dim);
  if (a.dim != b.dim) throw PreconditionError("dimension mismatch");
  (void)budget;
  CubeIndex ia(a), ib(b);
  std::vector<DyadicCube> out;
  for (const auto& q : a.cubes)
    if (ib.covers(q, true)) out.push_back(q);
  for (const auto& q : b.cubes)
    if (ia.covers(q, false)) out.push_back(q);
  if (out.empty()) return empty_figure(a.dim);
  return make_figure(a.dim, std::move(out));
}

Figure fig_difference(const Figure& a, const Figure& b, std::uint64_t budget) {
  if (a.empty()) return empty_figure(a.dim ? a.dim : b.dim);
  if (b.empty()) return a;
  if (a.dim != b.dim) throw PreconditionError("dimension mismatch");
  CubeIndex ia(a), ib(b);

  // the only cubes of `a` that need splitting are those with b-cubes
  // strictly inside; record how deep each must go
  std::map<std::pair<int, std::vector<std::int64_t>>, int> split_to;
  for (const auto& qb : b.cubes) {
    for (int la : ia.levels) {
      if (la >= qb.level) break;
      int up = qb.level - la;
      std::vector<std::int64_t> idx(qb.index.size());
      for (std::size_t ax = 0; ax < idx.size(); ++ax)
        idx[ax] = qb.index[ax] >> up;
      auto key = std::make_pair(la, std::move(idx));
      if (ia.keys.count(key)) {
        auto [it, fresh] = split_to.try_emplace(key, qb.level);
        if (!fresh && it->second < qb.level) it->second = qb.level;
        break;
      }
    }
  }

  std::vector<DyadicCube> out;
  std::uint64_t emitted = 0;
  for (const auto& qa : a.cubes) {
    if (ib.covers(qa, true)) continue;
    auto it = split_to.find({qa.level, qa.index});
    if (it == split_to.end()) {
      out.push_back(qa);
      continue;
    }
    int up = it->second - qa.level;
    if (static_cast<std::uint64_t>(up) * a.dim >= 63)
      throw BudgetError("figure difference refinement", ~0ULL, budget);
    std::uint64_t cells = 1ULL << (up * a.dim);
    if (cells > budget)
      throw BudgetError("figure difference refinement", cells, budget);
    std::int64_t per_axis = std::int64_t(1) << up;
    std::vector<std::int64_t> lo(a.dim), cur(a.dim);
    for (int ax = 0; ax < a.dim; ++ax) {
      lo[ax] = qa.index[ax] * per_axis;
      cur[ax] = lo[ax];
    }
    while (true) {
      DyadicCube cell{it->second, cur};
      if (!ib.covers(cell, true)) {
        out.push_back(std::move(cell));
        if (++emitted > budget)
          throw BudgetError("figure difference refinement", emitted, budget);
      }
      int ax = 0;
      for (; ax < a.dim; ++ax) {
        if (++cur[ax] < lo[ax] + per_axis) break;
        cur[ax] = lo[ax];
      }
      if (ax == a.dim) break;
    }
  }
  if (out.empty()) return empty_figure(a.dim);
  return make_figure(a.dim, std::move(out));
}

Figure dyadic_ball_approx(const RatPoint& center, const Rat& radius, int level,
                          std::uint64_t budget) {
  int n = static_cast<int>(center.size());
  check_cell_dim(n);
  if (radius <= 0) throw PreconditionError("ball radius must be positive");
  Rat scale = rat_pow2(level);
  std::vector<std::int64_t> klo(n), khi(n);
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    klo[i] = rat_floor((center[i] - radius) * scale);
    khi[i] = rat_floor((center[i] + radius) * scale);
    std::uint64_t span = static_cast<std::uint64_t>(khi[i] - klo[i] + 1);
    if (span == 0 || total > budget / span)
      throw BudgetError("ball approximation candidate count", ~0ull, budget);
    total *= span;
  }
  Rat r2 = radius * radius;
  CellSet cs(n, level);
  std::vector<std::int64_t> k = klo;
  while (true) {
    DyadicCube q;
    q.level = level;
    q.index = k;
    if (cube_inside_ball_sq(q, center, r2, /*strict=*/false)) {
      Cell c{};
      for (int i = 0; i < n; ++i) c.c[i] = k[i];
      cs.insert(c);
    }
    int axis = 0;
    while (axis < n) {
      if (++k[axis] <= khi[axis]) break;
      k[axis] = klo[axis];
      ++axis;
    }
    if (axis == n) break;
  }
  return figure_from_cells(cs);
}

bool cube_inside_ball_sq(const DyadicCube& q, const RatPoint& center,
                         const Rat& radius_sq, bool strict) {
  Rat s(0);
  for (int i = 0; i < q.dim(); ++i) {
    Rat a = rat_abs(q.lo(i) - center[i]);
    Rat b = rat_abs(q.hi(i) - center[i]);
    Rat m = std::max(a, b);
    s += m * m;
  }
  return strict ? s < radius_sq : s <= radius_sq;
}

bool cube_meets_ball_sq(const DyadicCube& q, const RatPoint& center,
                        const Rat& radius_sq, bool strict) {
  Rat s(0);
  for (int i = 0; i < q.dim(); ++i) {
    Rat d(0);
    if (center[i] < q.lo(i)) d = q.lo(i) - center[i];
    else if (center[i] > q.hi(i)) d = center[i] - q.hi(i);
    s += d * d;
  }
  return strict ? s < radius_sq : s <= radius_sq;
}

bool figure_inside_ball_sq(const Figure& f, const RatPoint& center,
                           const Rat& radius_sq, bool strict) {
  for (const auto& q : f.cubes)
    if (!cube_inside_ball_sq(q, center, radius_sq, strict)) return false;
  return true;
}

// ============================ rational boxes ===========================

Rat RatBox::min_side() const {
  Rat m = side(0);
  for (int i = 1; i < dim(); ++i) m = std::min(m, side(i));
  return m;
}

Rat RatBox::max_side() const {
  Rat m = side(0);
  for (int i = 1; i < dim(); ++i) m = std::max(m, side(i));
  return m;
}

bool RatBox::contains_point(const RatPoint& x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

RatBox make_box(std::vector<Rat> lo, std::vector<Rat> hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw PreconditionError("box bounds malformed");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i]))
      throw PreconditionError("box side must have positive length");
  RatBox b;
  b.lo = std::move(lo);
  b.hi = std::move(hi);
  return b;
}

RatBox box_of_cube(const DyadicCube& q) {
  std::vector<Rat> lo(q.dim()), hi(q.dim());
  for (int i = 0; i < q.dim(); ++i) {
    lo[i] = q.lo(i);
    hi[i] = q.hi(i);
  }
  return make_box(std::move(lo), std::move(hi));
}

Rat volume(const RatBox& b) {
  Rat v(1);
  for (int i = 0; i < b.dim(); ++i) v *= b.side(i);
  return v;
}

Rat perimeter(const RatBox& b) {
  Rat p(0);
  for (int i = 0; i < b.dim(); ++i) {
    Rat face(1);
    for (int j = 0; j < b.dim(); ++j)
      if (j != i) face *= b.side(j);
    p += 2 * face;
  }
  return p;
}

Rat diameter_sq(const RatBox& b) {
  Rat s(0);
  for (int i = 0; i < b.dim(); ++i) s += b.side(i) * b.side(i);
  return s;
}

Rat diameter_sq_with_tag(const RatBox& b, const RatPoint& tag) {
  Rat far(0);
  for (int i = 0; i < b.dim(); ++i) {
    Rat m = std::max(rat_abs(b.lo[i] - tag[i]), rat_abs(b.hi[i] - tag[i]));
    far += m * m;
  }
  return std::max(diameter_sq(b), far);
}

double regularity_with_tag(const RatBox& b, const RatPoint& tag) {
  double v = to_double(volume(b));
  double d = std::sqrt(to_double(diameter_sq_with_tag(b, tag)));
  double p = to_double(perimeter(b));
  return v / (d * p);
}

bool is_regular_sq(const RatBox& b, const RatPoint* tag, const Rat& eps_sq) {
  Rat v = volume(b);
  Rat d2 = tag ? diameter_sq_with_tag(b, *tag) : diameter_sq(b);
  Rat p = perimeter(b);
  return v * v > eps_sq * d2 * p * p;
}

bool box_inside_ball_sq(const RatBox& b, const RatPoint& center,
                        const Rat& radius_sq, bool strict) {
  Rat s(0);
  for (int i = 0; i < b.dim(); ++i) {
    Rat m = std::max(rat_abs(b.lo[i] - center[i]), rat_abs(b.hi[i] - center[i]));
    s += m * m;
  }
  return strict ? s < radius_sq : s <= radius_sq;
}

std::optional<RatBox> box_intersect(const RatBox& a, const RatBox& b) {
  if (a.dim() != b.dim()) throw PreconditionError("dimension mismatch");
  std::vector<Rat> lo(a.dim()), hi(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.lo[i], b.lo[i]);
    hi[i] = std::min(a.hi[i], b.hi[i]);
    if (!(lo[i] < hi[i])) return std::nullopt;
  }
  return make_box(std::move(lo), std::move(hi));
}

// ============================ 1D BV sets ===============================

BVSet1D make_bvset(std::vector<std::pair<Rat, Rat>> intervals) {
  std::vector<std::pair<Rat, Rat>> kept;
  for (auto& iv : intervals)
    if (iv.first < iv.second) kept.push_back(iv);
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  BVSet1D s;
  for (auto& iv : kept) {
    if (!s.intervals.empty() && iv.first <= s.intervals.back().second) {
      s.intervals.back().second = std::max(s.intervals.back().second, iv.second);
    } else {
      s.intervals.push_back(iv);
    }
  }
  return s;
}

BVSet1D bvset_from_figure(const Figure& f) {
  if (f.dim != 1) throw PreconditionError("figure is not one-dimensional");
  std::vector<std::pair<Rat, Rat>> iv;
  iv.reserve(f.cubes.size());
  for (const auto& q : f.cubes) iv.push_back({q.lo(0), q.hi(0)});
  return make_bvset(std::move(iv));
}

Rat measure(const BVSet1D& s) {
  Rat m(0);
  for (const auto& iv : s.intervals) m += iv.second - iv.first;
  return m;
}

Rat perimeter(const BVSet1D& s) {
  return Rat(2) * Rat(static_cast<long>(s.intervals.size()));
}

Rat diameter(const BVSet1D& s) {
  if (s.empty()) return Rat(0);
  return s.intervals.back().second - s.intervals.front().first;
}

Rat diameter_with_tag(const BVSet1D& s, const Rat& tag) {
  if (s.empty()) return Rat(0);
  Rat lo = std::min(s.intervals.front().first, tag);
  Rat hi = std::max(s.intervals.back().second, tag);
  return hi - lo;
}

double regularity(const BVSet1D& s) {
  Rat m = measure(s);
  if (m == 0) return 0.0;
  return to_double(m) / (to_double(diameter(s)) * to_double(perimeter(s)));
}

double regularity_with_tag(const BVSet1D& s, const Rat& tag) {
  Rat m = measure(s);
  if (m == 0) return 0.0;
  return to_double(m) /
         (to_double(diameter_with_tag(s, tag)) * to_double(perimeter(s)));
}

bool is_regular_sq(const BVSet1D& s, const Rat* tag, const Rat& eps_sq) {
  Rat m = measure(s);
  if (m == 0) return false;
  Rat d = tag ? diameter_with_tag(s, *tag) : diameter(s);
  Rat p = perimeter(s);
  return m * m > eps_sq * d * d * p * p;
}

bool contains_point(const BVSet1D& s, const Rat& x) {
  for (const auto& iv : s.intervals)
    if (iv.first <= x && x <= iv.second) return true;
  return false;
}

BVSet1D bv_intersect(const BVSet1D& a, const BVSet1D& b) {
  std::vector<std::pair<Rat, Rat>> out;
  std::size_t i = 0, j = 0;
  while (i < a.intervals.size() && j < b.intervals.size()) {
    Rat lo = std::max(a.intervals[i].first, b.intervals[j].first);
    Rat hi = std::min(a.intervals[i].second, b.intervals[j].second);
    if (lo < hi) out.push_back({lo, hi});
    if (a.intervals[i].second < b.intervals[j].second) ++i;
    else ++j;
  }
  return make_bvset(std::move(out));
}

BVSet1D bv_union(const BVSet1D& a, const BVSet1D& b) {
  std::vector<std::pair<Rat, Rat>> iv = a.intervals;
  iv.insert(iv.end(), b.intervals.begin(), b.intervals.end());
  return make_bvset(std::move(iv));
}

Rat symmetric_difference(const BVSet1D& a, const BVSet1D& b) {
  return measure(a) + measure(b) - 2 * measure(bv_intersect(a, b));
}

// ============================ constants ================================

Constants::Constants(int n_, double eta_, double p_iso_) : n(n_) {
  if (n < 1) throw PreconditionError("dimension must be >= 1");
  eta = eta_ > 0 ? eta_ : 2.0 * n;
  p_iso = p_iso_ > 0 ? p_iso_ : 1.0 / (n * std::pow(alpha(), 1.0 / n));
}

double Constants::alpha() const {
  return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double Constants::rho() const {
  return 1.0 / (std::pow(n, (n + 1) / 2.0) * std::pow(2.0, 3 * n - 2));
}

Rat Constants::rho_sq() const {
  return Rat(1) / (rat_pow(Rat(n), static_cast<unsigned>(n + 1)) *
                   rat_pow2(6 * n - 4));
}

double Constants::c1() const {
  return std::pow(2.0, n) * std::pow(n, (3 - n) / 2.0);
}

double Constants::c_cover() const {
  return alpha() * std::pow(2.0, 2 * n) * std::pow(n, n / 2.0);
}

double Constants::c2() const { return alpha() * c_cover() * std::pow(2.0, n); }

double Constants::c_crit() const { return std::pow(p_iso, n); }

double Constants::gamma(double eps) const {
  if (eps <= 0) throw PreconditionError("gamma needs eps > 0");
  return eta / std::pow(eps, n - 1);
}

double Constants::beta(double eps) const { return 1.0 / (1.0 + gamma(eps)); }

double Constants::eps_prime(double eps) const {
  if (eps <= 0) throw PreconditionError("eps_prime needs eps > 0");
  double c = c_crit();
  return eps * (1.0 - c * alpha() * eps) / (1.0 + c);
}

}  // namespace gaugekit
