#include "gaugekit/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace gaugekit {

namespace {

std::vector<DyadicCube> children_of(const DyadicCube& q) {
  int dim = static_cast<int>(q.index.size());
  std::vector<DyadicCube> out;
  for (int bits = 0; bits < (1 << dim); ++bits) {
    std::vector<std::int64_t> idx(dim);
    for (int i = 0; i < dim; ++i)
      idx[i] = 2 * q.index[i] + ((bits >> i) & 1);
    out.push_back(make_cube(q.level + 1, idx));
  }
  return out;
}

std::string cube_center_str(const DyadicCube& q) {
  RatPoint c = q.center();
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ", ";
    s += rat_str(c[i]);
  }
  return s + ")";
}

}  // namespace

SubordinatePartition subordinate_partition(const DyadicCube& k,
                                           const std::vector<Ball>& balls,
                                           int max_extra_depth,
                                           int cover_check_depth,
                                           std::uint64_t budget) {
  int dim = static_cast<int>(k.index.size());
  if (balls.empty()) throw PreconditionError("no balls to subordinate to");
  std::vector<Rat> r_sq, r4_sq;
  for (const auto& b : balls) {
    if (static_cast<int>(b.center.size()) != dim)
      throw PreconditionError("ball dimension mismatch");
    if (b.radius <= 0) throw PreconditionError("ball radius must be positive");
    r_sq.push_back(b.radius * b.radius);
    r4_sq.push_back(4 * b.radius * b.radius);
  }

  for (std::size_t i = 0; i < balls.size(); ++i)
    if (cube_inside_ball_sq(k, balls[i].center, r4_sq[i], true))
      throw PreconditionError("cube is swallowed by the doubled ball #" +
                              std::to_string(i) +
                              "; no maximal subcube exists for it");

  // cover certificate: refine until every cell sits inside a single ball
  {
    std::uint64_t visited = 0;
    std::vector<DyadicCube> stack{k};
    while (!stack.empty()) {
      DyadicCube q = stack.back();
      stack.pop_back();
      if (++visited > budget)
        throw BudgetError("cover certification exceeded the cell budget",
                          visited, budget);
      bool inside_one = false;
      for (std::size_t i = 0; i < balls.size() && !inside_one; ++i)
        inside_one = cube_inside_ball_sq(q, balls[i].center, r_sq[i], true);
      if (inside_one) continue;
      if (q.level - k.level >= cover_check_depth)
        throw PreconditionError(
            "balls do not cover the cube: no single ball contains the cell "
            "around " +
            cube_center_str(q));
      for (auto& c : children_of(q)) stack.push_back(std::move(c));
    }
  }

  Constants consts(dim);
  SubordinatePartition result;
  result.per_ball_counts.assign(balls.size(), 0);
  result.count_bound = consts.c_cover();

  std::uint64_t visited = 0;
  std::vector<DyadicCube> stack{k};
  while (!stack.empty()) {
    DyadicCube q = stack.back();
    stack.pop_back();
    if (++visited > budget)
      throw BudgetError("subordinate walk exceeded the cell budget", visited,
                        budget);
    std::size_t owner = balls.size();
    for (std::size_t i = 0; i < balls.size(); ++i) {
      if (cube_meets_ball_sq(q, balls[i].center, r_sq[i], true) &&
          cube_inside_ball_sq(q, balls[i].center, r4_sq[i], true) &&
          !cube_inside_ball_sq(q.mother(), balls[i].center, r4_sq[i], true)) {
        owner = i;
        break;
      }
    }
    if (owner < balls.size()) {
      Rat a = q.side();
      Rat a_sq = a * a;
      SubordinatePiece piece;
      piece.cube = q;
      piece.owner = owner;
      piece.side_lower_ok = r_sq[owner] < 4 * dim * a_sq;
      piece.side_upper_ok = dim * a_sq < 16 * r_sq[owner];
      {
        // (2 n a^{n-1})^2 <= 2^{4n-2} n^{3-n} R^{2n-2}, kept rational by
        // shifting the n power to whichever side needs it
        Rat lhs = Rat(4 * dim * dim) * rat_pow(a, 2 * dim - 2);
        Rat rhs = rat_pow2(4 * dim - 2) *
                  rat_pow(balls[owner].radius, 2 * dim - 2);
        if (dim >= 3)
          lhs *= rat_pow(Rat(dim), dim - 3);
        else
          rhs *= rat_pow(Rat(dim), 3 - dim);
        piece.perimeter_ok = lhs <= rhs;
      }
      result.pieces.push_back(std::move(piece));
      ++result.per_ball_counts[owner];
      continue;
    }
    if (q.level - k.level >= max_extra_depth || q.level >= kMaxLevel)
      throw BudgetError("subordinate walk descended past the depth bound",
                        static_cast<std::uint64_t>(q.level - k.level),
                        static_cast<std::uint64_t>(max_extra_depth));
    for (auto& c : children_of(q)) stack.push_back(std::move(c));
  }

  std::sort(result.pieces.begin(), result.pieces.end(),
            [](const SubordinatePiece& a, const SubordinatePiece& b) {
              return std::tie(a.cube.level, a.cube.index) <
                     std::tie(b.cube.level, b.cube.index);
            });
  result.counts_within_bound = true;
  for (std::size_t c : result.per_ball_counts)
    if (static_cast<double>(c) > result.count_bound)
      result.counts_within_bound = false;
  return result;
}

Figure subordinate_partition_figure(const SubordinatePartition& p, int dim) {
  std::vector<DyadicCube> cubes;
  cubes.reserve(p.pieces.size());
  for (const auto& piece : p.pieces) cubes.push_back(piece.cube);
  return make_figure(dim, std::move(cubes));
}

// ===================== signed reflection pieces ========================

namespace {

void reflect_rec(const RatBox& box, const RatPoint& x, int sign,
                 std::vector<SignedBox>& out) {
  int axis = -1;
  for (int l = 0; l < box.dim(); ++l) {
    if (x[l] < box.lo[l] || x[l] > box.hi[l]) {
      axis = l;
      break;
    }
  }
  if (axis < 0) {
    out.push_back({sign, box});
    return;
  }
  RatBox big = box, cut = box;
  if (x[axis] < box.lo[axis]) {
    Rat mirrored = 2 * x[axis] - box.hi[axis];
    big.lo[axis] = mirrored;
    cut.lo[axis] = mirrored;
    cut.hi[axis] = box.lo[axis];
  } else {
    Rat mirrored = 2 * x[axis] - box.lo[axis];
    big.hi[axis] = mirrored;
    cut.lo[axis] = box.hi[axis];
    cut.hi[axis] = mirrored;
  }
  reflect_rec(big, x, sign, out);
  reflect_rec(cut, x, -sign, out);
}

}  // namespace

std::vector<SignedBox> reflection_decomposition(const RatBox& q,
                                                const RatPoint& x) {
  if (static_cast<int>(x.size()) != q.dim())
    throw PreconditionError("point dimension mismatch");
  std::vector<SignedBox> out;
  reflect_rec(q, x, +1, out);
  return out;
}

bool signed_boxes_telescope(const std::vector<SignedBox>& pieces,
                            const RatBox& q) {
  int dim = q.dim();
  std::vector<std::vector<Rat>> cuts(dim);
  for (int l = 0; l < dim; ++l) {
    std::set<Rat> s{q.lo[l], q.hi[l]};
    for (const auto& p : pieces) {
      s.insert(p.box.lo[l]);
      s.insert(p.box.hi[l]);
    }
    cuts[l].assign(s.begin(), s.end());
  }
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    RatPoint mid(dim);
    for (int l = 0; l < dim; ++l)
      mid[l] = (cuts[l][idx[l]] + cuts[l][idx[l] + 1]) / 2;
    int total = 0;
    for (const auto& p : pieces)
      if (p.box.contains_point(mid)) total += p.sign;
    int want = q.contains_point(mid) ? 1 : 0;
    if (total != want) return false;
    int l = 0;
    while (l < dim) {
      if (++idx[l] + 1 < cuts[l].size()) break;
      idx[l] = 0;
      ++l;
    }
    if (l == dim) break;
  }
  return true;
}

// ======================= doubling radius search ========================

DoublingRadiusResult find_doubling_radius(
    const std::function<double(double)>& phi, int dim, double eps, double tau,
    double c_t, const Rat& radius_cap, int max_steps) {
  if (dim < 1 || dim > kMaxCellDim) throw PreconditionError("bad dimension");
  if (!(tau > 0) || tau > 1) throw PreconditionError("tau must be in (0, 1]");
  if (!(eps > 0) || !(c_t > 0) || radius_cap <= 0)
    throw PreconditionError("eps, c_t and the radius cap must be positive");

  double alpha = Constants(dim).alpha();
  DoublingRadiusResult res;
  res.min_ratio = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= max_steps; ++j) {
    Rat r = radius_cap * rat_pow2(-j);
    double rd = to_double(r);
    double lhs = phi(10 * rd) + eps * alpha * std::pow(10 * rd, dim);
    double rhs = c_t * (phi(tau * rd) + eps * alpha * std::pow(tau * rd, dim));
    res.steps_tried = j;
    double ratio = rhs > 0 ? lhs / rhs
                           : std::numeric_limits<double>::infinity();
    if (ratio < res.min_ratio) {
      res.min_ratio = ratio;
      res.min_ratio_radius = r;
    }
    if (lhs <= rhs) {
      res.found = true;
      res.radius = r;
      return res;
    }
  }
  return res;
}

}  // namespace gaugekit
