#include "gaugekit/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_map>
#include <vector>

#include "gaugekit/rng.hpp"

namespace gaugekit {

namespace {

// Smallest level whose cells have diameter at most r/2, so the cell
// holding the center is itself strictly inside the open ball.
int base_level_for(const Rat& radius, int dim) {
  Rat need = radius * radius / 4;
  int level = kMinLevel;
  while (level < kMaxLevel && Rat(dim) * rat_pow2(-2 * level) > need) ++level;
  return level;
}

struct LevelGrid {
  int level = 0;
  std::vector<Cell> cells;  // lex sorted, each strictly inside the ball
  std::unordered_set<Cell, CellHash> inside;
  std::array<std::int64_t, kMaxCellDim> lo{}, hi{};  // actual index span
  bool overflow = false;
};

// Enumerates the cells of one level whose closed cube lies strictly inside
// B(x, r), walking axis by axis and pruning on the farthest-corner partial
// sums.  Aborts once `cap` cells were collected.
LevelGrid level_grid(const RatPoint& x, const Rat& radius, const Rat& radius_sq,
                     int level, int dim, std::size_t cap) {
  LevelGrid g;
  g.level = level;
  Rat scale = rat_pow2(level);
  std::vector<std::int64_t> klo(dim), khi(dim);
  for (int a = 0; a < dim; ++a) {
    klo[a] = rat_floor((x[a] - radius) * scale);
    khi[a] = rat_ceil((x[a] + radius) * scale);
  }

  Cell cur{};
  std::function<bool(int, const Rat&)> walk = [&](int axis, const Rat& acc) {
    if (axis == dim) {
      if (g.cells.size() >= cap) {
        g.overflow = true;
        return false;
      }
      g.cells.push_back(cur);
      return true;
    }
    Rat side = rat_pow2(-level);
    for (std::int64_t k = klo[axis]; k <= khi[axis]; ++k) {
      Rat lo = Rat(k) * side;
      Rat far = std::max(rat_abs(x[axis] - lo), rat_abs(x[axis] - (lo + side)));
      Rat a2 = acc + far * far;
      if (a2 >= radius_sq) continue;
      cur.c[axis] = k;
      if (!walk(axis + 1, a2)) return false;
    }
    return true;
  };
  walk(0, Rat(0));
  if (g.overflow) return g;

  std::sort(g.cells.begin(), g.cells.end(), [&](const Cell& a, const Cell& b) {
    for (int i = 0; i < dim; ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  });
  for (const auto& c : g.cells) g.inside.insert(c);
  if (!g.cells.empty()) {
    for (int a = 0; a < dim; ++a) {
      g.lo[a] = g.hi[a] = g.cells.front().c[a];
      for (const auto& c : g.cells) {
        g.lo[a] = std::min(g.lo[a], c.c[a]);
        g.hi[a] = std::max(g.hi[a], c.c[a]);
      }
    }
  }
  return g;
}

Figure cells_to_figure(int dim, int level, const std::vector<Cell>& cells) {
  std::vector<DyadicCube> cubes;
  cubes.reserve(cells.size());
  for (const auto& c : cells) {
    std::vector<std::int64_t> idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = c.c[i];
    cubes.push_back(make_cube(level, std::move(idx)));
  }
  return make_figure(dim, std::move(cubes));
}

// Exact tagged regularity for small candidates.  Large ones replace the
// tagged diameter by the bounding-box diameter, an upper bound, so every
// accepted figure is genuinely eps-regular; a huge ragged union may be
// skipped conservatively.
bool regular_filter(const Figure& fig, const RatPoint& x, const Rat& eps_sq,
                    std::uint64_t budget) {
  std::size_t corners = fig.cubes.size() << fig.dim;
  if (corners <= 4000) return is_regular_sq(fig, &x, eps_sq, budget);
  Rat v = volume(fig);
  if (v == 0) return false;
  auto bb = bounding_box(fig);
  int n = fig.dim;
  Rat d2(0);
  for (std::uint64_t m1 = 0; m1 < (1ull << n); ++m1) {
    RatPoint p(n);
    for (int i = 0; i < n; ++i)
      p[i] = (m1 >> i) & 1 ? bb.second[i] : bb.first[i];
    d2 = std::max(d2, dist_sq(p, x));
    for (std::uint64_t m2 = m1 + 1; m2 < (1ull << n); ++m2) {
      RatPoint q(n);
      for (int i = 0; i < n; ++i)
        q[i] = (m2 >> i) & 1 ? bb.second[i] : bb.first[i];
      d2 = std::max(d2, dist_sq(p, q));
    }
  }
  Rat per = perimeter(fig, budget);
  return v * v > eps_sq * d2 * per * per;
}

}  // namespace

SeminormResult seminorm_lower_bound(const ChargePtr& charge, const RatPoint& x,
                                    const Rat& radius, const Rat& eps,
                                    SeminormVariant variant,
                                    const SeminormOptions& opt) {
  if (!charge) throw PreconditionError("null charge");
  int dim = charge->dim;
  if (int(x.size()) != dim) throw PreconditionError("center dimension mismatch");
  if (dim < 1 || dim > kMaxCellDim)
    throw PreconditionError("seminorm search limited to dim <= " +
                            std::to_string(kMaxCellDim));
  if (radius <= 0) throw PreconditionError("ball radius must be positive");
  if (eps <= 0) throw PreconditionError("regularity eps must be positive");
  if (opt.depth < 0) throw PreconditionError("negative search depth");

  Rat radius_sq = radius * radius;
  Rat eps_sq = eps * eps;
  SeminormResult res;
  res.base_level = base_level_for(radius, dim);
  const std::uint64_t iso_seed = splitmix64(opt.seed ^ 0x15a4);

  std::set<Figure> seen;
  auto handle = [&](Figure fig) {
    if (fig.empty()) return;
    if (!seen.insert(fig).second) return;
    ++res.candidates;
    if (!regular_filter(fig, x, eps_sq, opt.cell_budget)) return;
    if (variant == SeminormVariant::TaggedIsoperimetric &&
        !contains_point(fig, x))
      return;
    ++res.admissible;
    double v = std::fabs(charge_eval(charge, fig, opt.cell_budget));
    if (v <= res.value) return;
    if (variant == SeminormVariant::TaggedIsoperimetric) {
      auto iso = is_eps_isoperimetric_sampled(fig, eps, opt.iso_depth, iso_seed,
                                              opt.cell_budget);
      if (!iso.passed) return;
    }
    res.value = v;
    res.witness = std::move(fig);
  };

  for (int level = res.base_level;
       level <= res.base_level + opt.depth && level <= kMaxLevel; ++level) {
    LevelGrid g =
        level_grid(x, radius, radius_sq, level, dim, opt.max_cells_per_level);
    if (g.overflow) break;  // finer levels only get larger
    if (g.cells.empty()) continue;
    std::uint64_t stream = std::uint64_t(level - kMinLevel) << 4;

    // memoized per-cell charge values steer the union growth
    std::unordered_map<Cell, double, CellHash> cell_vals;
    auto cell_val = [&](const Cell& c) {
      auto it = cell_vals.find(c);
      if (it != cell_vals.end()) return it->second;
      double v = charge_eval(charge, cells_to_figure(dim, level, {c}),
                             opt.cell_budget);
      cell_vals.emplace(c, v);
      return v;
    };

    // the whole in-ball figure
    handle(cells_to_figure(dim, level, g.cells));

    // single cells, nearest to the center first
    std::vector<Cell> by_dist = g.cells;
    Rat side = rat_pow2(-level);
    auto center_dist = [&](const Cell& c) {
      Rat d(0);
      for (int a = 0; a < dim; ++a) {
        Rat mid = (Rat(c.c[a]) + Rat(1, 2)) * side;
        d += (mid - x[a]) * (mid - x[a]);
      }
      return d;
    };
    std::stable_sort(by_dist.begin(), by_dist.end(),
                     [&](const Cell& a, const Cell& b) {
                       return center_dist(a) < center_dist(b);
                     });
    std::size_t nsingle = std::min(by_dist.size(), opt.single_cap);
    for (std::size_t i = 0; i < nsingle; ++i)
      handle(cells_to_figure(dim, level, {by_dist[i]}));

    // cell-aligned boxes: exhaustive when the count fits the budget,
    // otherwise center-anchored dyadic sizes plus random ranges
    unsigned long long total_boxes = 1;
    for (int a = 0; a < dim; ++a) {
      unsigned long long s = g.hi[a] - g.lo[a] + 1;
      total_boxes *= s * (s + 1) / 2;
      if (total_boxes > opt.box_budget * 64) break;
    }
    auto emit_box = [&](const std::array<std::int64_t, kMaxCellDim>& blo,
                        const std::array<std::int64_t, kMaxCellDim>& bhi) {
      std::vector<Cell> kept;
      Cell c{};
      std::function<void(int)> fill = [&](int axis) {
        if (axis == dim) {
          if (g.inside.count(c)) kept.push_back(c);
          return;
        }
        for (std::int64_t k = blo[axis]; k <= bhi[axis]; ++k) {
          c.c[axis] = k;
          fill(axis + 1);
        }
      };
      fill(0);
      if (!kept.empty()) handle(cells_to_figure(dim, level, kept));
    };
    if (total_boxes <= opt.box_budget) {
      std::array<std::int64_t, kMaxCellDim> blo{}, bhi{};
      std::function<void(int)> ranges = [&](int axis) {
        if (axis == dim) {
          emit_box(blo, bhi);
          return;
        }
        for (std::int64_t lo = g.lo[axis]; lo <= g.hi[axis]; ++lo)
          for (std::int64_t hi = lo; hi <= g.hi[axis]; ++hi) {
            blo[axis] = lo;
            bhi[axis] = hi;
            ranges(axis + 1);
          }
      };
      ranges(0);
    } else {
      Cell c0{};
      for (int a = 0; a < dim; ++a) {
        c0.c[a] = rat_floor(x[a] * rat_pow2(level));
        c0.c[a] = std::clamp(c0.c[a], g.lo[a], g.hi[a]);
      }
      std::vector<std::int64_t> widths{0};
      std::int64_t span = 0;
      for (int a = 0; a < dim; ++a)
        span = std::max(span, g.hi[a] - g.lo[a] + 1);
      for (std::int64_t w = 1; w <= span; w *= 2) widths.push_back(w);
      std::vector<std::size_t> pick(dim, 0);
      std::size_t combos = 0;
      while (combos < 128) {
        std::array<std::int64_t, kMaxCellDim> blo{}, bhi{};
        for (int a = 0; a < dim; ++a) {
          blo[a] = std::max(g.lo[a], c0.c[a] - widths[pick[a]]);
          bhi[a] = std::min(g.hi[a], c0.c[a] + widths[pick[a]]);
        }
        emit_box(blo, bhi);
        ++combos;
        int a = 0;
        while (a < dim) {
          if (++pick[a] < widths.size()) break;
          pick[a] = 0;
          ++a;
        }
        if (a == dim) break;
      }
      Rng rb = make_rng(opt.seed, stream | 1);
      for (std::size_t t = 0; t < opt.random_boxes; ++t) {
        std::array<std::int64_t, kMaxCellDim> blo{}, bhi{};
        for (int a = 0; a < dim; ++a) {
          blo[a] = rb.uniform_int(g.lo[a], g.hi[a]);
          std::int64_t len = std::int64_t(1)
                             << rb.uniform_int(0, 63 - __builtin_clzll(
                                                        std::uint64_t(span)));
          bhi[a] = std::min(g.hi[a], blo[a] + len - 1);
        }
        emit_box(blo, bhi);
      }
    }

    // greedy unions from the strongest cell and from the center cell
    std::vector<Cell> seeds;
    if (nsingle > 0) {
      Cell best = by_dist[0];
      double best_v = std::fabs(cell_val(best));
      for (std::size_t i = 1; i < nsingle; ++i) {
        double v = std::fabs(cell_val(by_dist[i]));
        if (v > best_v) {
          best_v = v;
          best = by_dist[i];
        }
      }
      seeds.push_back(best);
    }
    {
      Cell c0{};
      for (int a = 0; a < dim; ++a) {
        c0.c[a] = rat_floor(x[a] * rat_pow2(level));
        c0.c[a] = std::clamp(c0.c[a], g.lo[a], g.hi[a]);
      }
      if (g.inside.count(c0) && !(seeds.size() == 1 && seeds[0] == c0))
        seeds.push_back(c0);
    }
    for (const Cell& seed : seeds) {
      std::vector<Cell> members{seed};
      std::unordered_set<Cell, CellHash> in_set;
      in_set.insert(seed);
      double running = cell_val(seed);
      for (int step = 0; step < opt.growth_steps; ++step) {
        bool found = false;
        Cell pick{};
        double pick_score = 0.0;
        for (const auto& m : members) {
          for (int a = 0; a < dim; ++a) {
            for (int dir : {-1, +1}) {
              Cell nb = cell_neighbor(m, a, dir);
              if (!g.inside.count(nb) || in_set.count(nb)) continue;
              double score = std::fabs(running + cell_val(nb));
              if (!found || score > pick_score) {
                found = true;
                pick = nb;
                pick_score = score;
              }
            }
          }
        }
        if (!found) break;
        members.push_back(pick);
        in_set.insert(pick);
        running += cell_val(pick);
        handle(cells_to_figure(dim, level, members));
      }
    }

    // random connected unions
    for (int trial = 0; trial < opt.random_unions; ++trial) {
      Rng tr = make_rng(opt.seed, stream | 2).derive(trial);
      std::vector<Cell> members{
          g.cells[std::size_t(tr.uniform_int(0, long(g.cells.size()) - 1))]};
      std::unordered_set<Cell, CellHash> in_set;
      in_set.insert(members[0]);
      long want = tr.uniform_int(2, 64);
      for (long step = 0; step < 8 * want && long(members.size()) < want;
           ++step) {
        const Cell& from = members[std::size_t(
            tr.uniform_int(0, long(members.size()) - 1))];
        Cell nb = cell_neighbor(from, int(tr.uniform_int(0, dim - 1)),
                                tr.coin() ? +1 : -1);
        if (g.inside.count(nb) && !in_set.count(nb)) {
          members.push_back(nb);
          in_set.insert(nb);
        }
      }
      handle(cells_to_figure(dim, level, members));
    }
  }

  return res;
}

SeminormResult seminorm_lower_bound(const SeminormQuery& q) {
  return seminorm_lower_bound(q.charge, q.center, q.radius, q.eps, q.variant,
                              q.options);
}

}  // namespace gaugekit
