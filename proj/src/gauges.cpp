#include "gaugekit/gauges.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gaugekit/rng.hpp"

namespace gaugekit {

// ============================== gauges =================================

Gauge make_constant_gauge(int dim, double delta) {
  Gauge g;
  g.dim = dim;
  g.name = "constant(" + std::to_string(delta) + ")";
  g.fn = [delta](const RatPoint&) { return delta; };
  g.fn1 = [delta](double) { return delta; };
  return g;
}

Gauge make_custom_gauge(int dim, std::string name,
                        std::function<double(const RatPoint&)> fn) {
  Gauge g;
  g.dim = dim;
  g.name = std::move(name);
  g.fn = std::move(fn);
  return g;
}

Gauge make_scaled_gauge(Gauge g, double factor) {
  if (factor <= 0) throw PreconditionError("gauge scale must be positive");
  Gauge out;
  out.dim = g.dim;
  out.name = std::to_string(factor) + "*" + g.name;
  auto inner = std::move(g.fn);
  out.fn = [inner, factor](const RatPoint& x) { return factor * inner(x); };
  if (g.fn1) {
    auto inner1 = std::move(g.fn1);
    out.fn1 = [inner1, factor](double x) { return factor * inner1(x); };
  }
  return out;
}

Gauge make_min_gauge(Gauge a, Gauge b) {
  if (a.dim != b.dim) throw PreconditionError("gauge dimension mismatch");
  Gauge out;
  out.dim = a.dim;
  out.name = "min(" + a.name + ", " + b.name + ")";
  auto fa = std::move(a.fn);
  auto fb = std::move(b.fn);
  out.fn = [fa, fb](const RatPoint& x) { return std::min(fa(x), fb(x)); };
  if (a.fn1 && b.fn1) {
    auto fa1 = std::move(a.fn1);
    auto fb1 = std::move(b.fn1);
    out.fn1 = [fa1, fb1](double x) { return std::min(fa1(x), fb1(x)); };
  }
  return out;
}

Gauge make_distance_gauge(int dim, double cap, ZeroSet zs) {
  if (cap <= 0) throw PreconditionError("distance gauge cap must be positive");
  for (const auto& p : zs.points)
    if (static_cast<int>(p.size()) != dim)
      throw PreconditionError("zero-set point dimension mismatch");
  for (const auto& [axis, off] : zs.planes)
    if (axis < 0 || axis >= dim)
      throw PreconditionError("zero-set plane axis out of range");
  std::vector<std::vector<double>> pts;
  for (const auto& p : zs.points) pts.push_back(to_double(p));
  std::vector<std::pair<int, double>> planes;
  for (const auto& [axis, off] : zs.planes) planes.emplace_back(axis, to_double(off));
  Gauge g;
  g.dim = dim;
  g.name = "distance-to-zero-set";
  g.fn = [cap, pts, planes](const RatPoint& xr) {
    std::vector<double> x = to_double(xr);
    double best = cap;
    for (const auto& p : pts) {
      double d2 = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        d2 += (x[i] - p[i]) * (x[i] - p[i]);
      best = std::min(best, std::sqrt(d2));
    }
    for (const auto& [axis, off] : planes)
      best = std::min(best, std::abs(x[axis] - off));
    return best;
  };
  return g;
}

Gauge make_boundary_distance_gauge(const Figure& a, double cap,
                                   std::uint64_t budget) {
  if (cap <= 0) throw PreconditionError("distance gauge cap must be positive");
  if (a.empty()) throw PreconditionError("boundary gauge needs a nonempty figure");
  CellSet cs = refine_to(a, finest_level(a), budget);
  double side = to_double(rat_pow2(-cs.level()));
  // face record: fixed coordinate on `axis`, box extents on the others
  struct FaceBox {
    int axis;
    double fixed;
    std::vector<double> lo, hi;
  };
  std::vector<FaceBox> faces;
  for (const auto& face : exposed_faces(cs)) {
    RatPoint low = cs.cell_low(face.cell);
    FaceBox fb;
    fb.axis = face.axis;
    fb.fixed = to_double(low[face.axis]) + (face.sign > 0 ? side : 0.0);
    for (int i = 0; i < a.dim; ++i) {
      if (i == face.axis) continue;
      double l = to_double(low[i]);
      fb.lo.push_back(l);
      fb.hi.push_back(l + side);
    }
    faces.push_back(std::move(fb));
  }
  Gauge g;
  g.dim = a.dim;
  g.name = "distance-to-boundary";
  g.fn = [cap, faces](const RatPoint& xr) {
    std::vector<double> x = to_double(xr);
    double best = cap;
    for (const auto& fb : faces) {
      double d2 = (x[fb.axis] - fb.fixed) * (x[fb.axis] - fb.fixed);
      std::size_t j = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (static_cast<int>(i) == fb.axis) continue;
        double c = std::clamp(x[i], fb.lo[j], fb.hi[j]);
        d2 += (x[i] - c) * (x[i] - c);
        ++j;
      }
      best = std::min(best, std::sqrt(d2));
    }
    return best;
  };
  return g;
}

// ============================= packings ================================

bool is_packing(const std::vector<Ball>& balls) {
  for (const auto& b : balls)
    if (b.radius <= 0) throw PreconditionError("ball radius must be positive");
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      Rat sum = balls[i].radius + balls[j].radius;
      if (dist_sq(balls[i].center, balls[j].center) < sum * sum) return false;
    }
  return true;
}

bool is_delta_fine(const std::vector<Ball>& balls, const Gauge& g) {
  for (const auto& b : balls)
    if (!(2 * to_double(b.radius) < g(b.center))) return false;
  return true;
}

std::vector<Ball> sample_packing(const Figure& region, const Gauge& g,
                                 std::uint64_t seed, SamplePackingOptions opt) {
  if (region.empty()) throw PreconditionError("cannot pack an empty region");
  if (g.dim != region.dim) throw PreconditionError("gauge dimension mismatch");
  Rng rng = make_rng(seed, 0x9ac);
  std::vector<Ball> out;
  long grid = (1l << opt.coord_level);
  for (int attempt = 0;
       attempt < opt.attempts && static_cast<int>(out.size()) < opt.target;
       ++attempt) {
    const DyadicCube& q =
        region.cubes[rng.uniform_int(0, static_cast<long>(region.cubes.size()) - 1)];
    Rat side = q.side();
    RatPoint x(region.dim);
    for (int i = 0; i < region.dim; ++i)
      x[i] = q.lo(i) + side * Rat(rng.uniform_int(1, grid - 1), grid);
    double delta = g(x);
    if (!(delta > 0)) continue;
    int e = static_cast<int>(std::floor(std::log2(delta / 4.0)));
    e = std::min(e, opt.max_radius_exp);
    if (e < -60) continue;
    Rat r = rat_pow2(e);
    bool ok = true;
    for (const auto& b : out) {
      Rat sum = r + b.radius;
      if (dist_sq(x, b.center) < sum * sum) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(Ball{std::move(x), std::move(r)});
  }
  if (out.empty())
    throw BudgetError("no admissible ball found while sampling a packing",
                      static_cast<std::uint64_t>(opt.target),
                      static_cast<std::uint64_t>(opt.attempts));
  return out;
}

// ========================= tagged partitions ===========================

bool is_partition_of(const std::vector<TaggedFigure>& pieces,
                     const Figure& whole, std::uint64_t budget) {
  if (pieces.empty()) return whole.empty();
  Figure u = empty_figure(whole.dim);
  Rat vol_sum(0);
  for (const auto& p : pieces) {
    if (p.piece.dim != whole.dim || p.piece.empty()) return false;
    vol_sum += volume(p.piece);
    u = fig_union(u, p.piece, budget);
  }
  return volume(u) == vol_sum && volume(u) == volume(whole) &&
         is_subfigure(u, whole, budget);
}

bool is_delta_fine(const std::vector<TaggedFigure>& pieces, const Gauge& g) {
  for (const auto& p : pieces) {
    double d = std::sqrt(to_double(diameter_sq_with_tag(p.piece, p.tag)));
    if (!(d < g(p.tag))) return false;
  }
  return true;
}

std::vector<TaggedInterval> cousin_partition_1d(const Rat& a, const Rat& b,
                                                const Gauge& g,
                                                TagPolicy policy,
                                                int max_depth) {
  if (!(a < b)) throw PreconditionError("empty interval");
  if (g.dim != 1) throw PreconditionError("cousin bisection is 1D");

  std::vector<TaggedInterval> out;
  struct Node {
    Rat u, v;
    int depth;
  };
  std::vector<Node> stack;
  stack.push_back({a, b, 0});
  while (!stack.empty()) {
    Node nd = std::move(stack.back());
    stack.pop_back();
    Rat mid = (nd.u + nd.v) / 2;
    std::vector<Rat> candidates;
    if (policy == TagPolicy::EndpointsThenMidpoint)
      candidates = {nd.u, nd.v, mid};
    else if (policy == TagPolicy::MidpointThenLeft)
      candidates = {mid, nd.u};
    else
      candidates = {mid};
    Rat len = nd.v - nd.u;
    bool emitted = false;
    bool saw_nonpositive = false;
    for (const Rat& t : candidates) {
      double delta = g.at(t);
      if (!(delta > 0)) {
        saw_nonpositive = true;
        continue;
      }
      if (to_double(len) < delta) {
        out.push_back({nd.u, nd.v, t});
        emitted = true;
        break;
      }
    }
    if (emitted) continue;
    if (nd.depth >= max_depth) {
      if (saw_nonpositive)
        throw PreconditionError(
            "gauge is not positive inside [" + rat_str(nd.u) + ", " +
            rat_str(nd.v) + "]");
      throw BudgetError("bisection depth exhausted before the gauge let go",
                        static_cast<std::uint64_t>(nd.depth),
                        static_cast<std::uint64_t>(max_depth));
    }
    // push right before left so intervals come out sorted
    stack.push_back({mid, nd.v, nd.depth + 1});
    stack.push_back({nd.u, mid, nd.depth + 1});
  }
  return out;
}

bool is_delta_fine(const std::vector<TaggedInterval>& intervals,
                   const Gauge& g) {
  for (const auto& iv : intervals) {
    if (!(iv.a < iv.b) || iv.tag < iv.a || iv.tag > iv.b) return false;
    if (!(to_double(iv.b - iv.a) < g.at(iv.tag))) return false;
  }
  return true;
}

// ========================== Vitali selection ===========================

VitaliSelection vitali_disjoint_subfamily(const std::vector<Ball>& balls) {
  if (balls.empty()) return {};
  std::size_t dim = balls.front().center.size();
  for (const auto& b : balls) {
    if (b.center.size() != dim) throw PreconditionError("mixed dimensions");
    if (b.radius <= 0) throw PreconditionError("ball radius must be positive");
  }
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return balls[i].radius > balls[j].radius;
  });

  VitaliSelection sel;
  for (std::size_t idx : order) {
    const Ball& cand = balls[idx];
    std::size_t hit = balls.size();
    for (std::size_t s : sel.selected) {
      Rat sum = cand.radius + balls[s].radius;
      if (dist_sq(cand.center, balls[s].center) <= sum * sum) {
        hit = s;
        break;
      }
    }
    if (hit == balls.size()) {
      sel.selected.push_back(idx);
      continue;
    }
    // the blocker is at least as large, so its 5x enlargement covers the
    // candidate; keep that claim honest with an exact check
    const Ball& big = balls[hit];
    Rat slack = 5 * big.radius - cand.radius;
    if (slack < 0 ||
        dist_sq(cand.center, big.center) > slack * slack)
      throw std::logic_error("five-times enlargement failed to cover");
    sel.certificates.push_back({idx, hit});
  }
  return sel;
}

}  // namespace gaugekit
