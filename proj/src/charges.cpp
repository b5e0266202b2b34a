#include "gaugekit/charges.hpp"

#include <algorithm>
#include <cmath>

#include "gaugekit/quadrature.hpp"
#include "gaugekit/rng.hpp"

namespace gaugekit {

namespace {

void check_dim(const Charge& c, int dim) {
  if (c.dim != dim)
    throw PreconditionError("charge dimension " + std::to_string(c.dim) +
                            " does not match argument dimension " +
                            std::to_string(dim));
}

// ---- flux over exposed faces -----------------------------------------

double flux_face_integral(const VectorField& u, int axis, double fixed,
                          const std::vector<double>& lo,
                          const std::vector<double>& hi, int order) {
  auto integrand = [&](const std::vector<double>& y) {
    std::vector<double> x(lo.size() + 1);
    int j = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (static_cast<int>(i) == axis) x[i] = fixed;
      else x[i] = y[j++];
    }
    return u.eval(x, axis);
  };
  return integrate_box(integrand, lo, hi, order);
}

double flux_eval_figure(const Charge& c, const Figure& e,
                        std::uint64_t budget) {
  if (e.empty()) return 0.0;
  CellSet cs = refine_to(e, finest_level(e), budget);
  double side = to_double(rat_pow2(-cs.level()));
  double total = 0.0;
  for (const auto& face : exposed_faces(cs)) {
    RatPoint low = cs.cell_low(face.cell);
    std::vector<double> lo, hi;
    lo.reserve(e.dim - 1);
    for (int i = 0; i < e.dim; ++i) {
      if (i == face.axis) continue;
      double l = to_double(low[i]);
      lo.push_back(l);
      hi.push_back(l + side);
    }
    double fixed = to_double(low[face.axis]) + (face.sign > 0 ? side : 0.0);
    total += face.sign *
             flux_face_integral(c.field, face.axis, fixed, lo, hi, c.quad_order);
  }
  return total;
}

std::optional<Rat> flux_eval_figure_exact(const Charge& c, const Figure& e,
                                          std::uint64_t budget) {
  if (!c.field.is_polynomial()) return std::nullopt;
  if (e.empty()) return Rat(0);
  CellSet cs = refine_to(e, finest_level(e), budget);
  Rat side = rat_pow2(-cs.level());
  Rat total(0);
  for (const auto& face : exposed_faces(cs)) {
    RatPoint low = cs.cell_low(face.cell);
    std::vector<Rat> lo(e.dim), hi(e.dim);
    for (int i = 0; i < e.dim; ++i) {
      lo[i] = low[i];
      hi[i] = low[i] + side;
    }
    Rat fixed = face.sign > 0 ? hi[face.axis] : lo[face.axis];
    Rat v = poly_integral_box(c.field.components[face.axis], lo, hi, face.axis,
                              fixed);
    total += Rat(face.sign) * v;
  }
  return total;
}

double flux_eval_box(const Charge& c, const RatBox& b) {
  double total = 0.0;
  for (int axis = 0; axis < b.dim(); ++axis) {
    std::vector<double> lo, hi;
    for (int i = 0; i < b.dim(); ++i) {
      if (i == axis) continue;
      lo.push_back(to_double(b.lo[i]));
      hi.push_back(to_double(b.hi[i]));
    }
    total += flux_face_integral(c.field, axis, to_double(b.hi[axis]), lo, hi,
                                c.quad_order);
    total -= flux_face_integral(c.field, axis, to_double(b.lo[axis]), lo, hi,
                                c.quad_order);
  }
  return total;
}

// ---- density ---------------------------------------------------------

double density_eval_cube(const Charge& c, const std::vector<double>& lo,
                         const std::vector<double>& hi) {
  auto integrand = [&](const std::vector<double>& x) {
    return c.density.eval(x);
  };
  return integrate_box(integrand, lo, hi, c.quad_order);
}

double density_eval_figure(const Charge& c, const Figure& e) {
  double total = 0.0;
  for (const auto& q : e.cubes) {
    std::vector<double> lo(e.dim), hi(e.dim);
    double side = to_double(q.side());
    for (int i = 0; i < e.dim; ++i) {
      lo[i] = to_double(q.lo(i));
      hi[i] = lo[i] + side;
    }
    total += density_eval_cube(c, lo, hi);
  }
  return total;
}

std::optional<Rat> density_eval_figure_exact(const Charge& c, const Figure& e) {
  if (!c.density.is_polynomial()) return std::nullopt;
  Rat total(0);
  for (const auto& q : e.cubes) {
    std::vector<Rat> lo(e.dim), hi(e.dim);
    for (int i = 0; i < e.dim; ++i) {
      lo[i] = q.lo(i);
      hi[i] = q.hi(i);
    }
    total += poly_integral_box(*c.density.poly, lo, hi);
  }
  return total;
}

// ---- segment measure -------------------------------------------------

std::optional<std::pair<Rat, Rat>> segment_clip(const SegmentDescriptor& seg,
                                                const std::vector<Rat>& lo,
                                                const std::vector<Rat>& hi) {
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (static_cast<int>(j) == seg.axis) continue;
    if (seg.base[j] < lo[j] || seg.base[j] > hi[j]) return std::nullopt;
  }
  Rat t0 = std::max(lo[seg.axis], seg.base[seg.axis]);
  Rat t1 = std::min(hi[seg.axis], Rat(seg.base[seg.axis] + seg.length));
  if (!(t0 < t1)) return std::nullopt;
  return std::pair<Rat, Rat>{t0, t1};
}

Rat segment_eval_figure_exact(const Charge& c, const Figure& e) {
  std::vector<std::pair<Rat, Rat>> pieces;
  for (const auto& q : e.cubes) {
    std::vector<Rat> lo(e.dim), hi(e.dim);
    for (int i = 0; i < e.dim; ++i) {
      lo[i] = q.lo(i);
      hi[i] = q.hi(i);
    }
    if (auto iv = segment_clip(c.segment, lo, hi)) pieces.push_back(*iv);
  }
  return measure(make_bvset(std::move(pieces)));
}

}  // namespace

// ============================ construction =============================

std::string Charge::describe() const {
  switch (kind) {
    case ChargeKind::Flux:
      return "flux(" + field.name + ")";
    case ChargeKind::Density:
      return "density(" + density.name + ")";
    case ChargeKind::FunctionDiff:
      return "function(" + f1.name + ")";
    case ChargeKind::SegmentMeasure:
      return "segment-measure";
    case ChargeKind::Restricted:
      return base->describe() + "|window";
    case ChargeKind::Combination: {
      std::string s = "combo(";
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(parts[i].first) + "*" + parts[i].second->describe();
      }
      return s + ")";
    }
  }
  return "charge";
}

ChargePtr make_flux_charge(VectorField u, int quad_order) {
  auto c = std::make_shared<Charge>();
  c->kind = ChargeKind::Flux;
  c->dim = u.dim;
  c->quad_order = quad_order;
  c->field = std::move(u);
  return c;
}

ChargePtr make_density_charge(ScalarField f, int quad_order) {
  auto c = std::make_shared<Charge>();
  c->kind = ChargeKind::Density;
  c->dim = f.dim;
  c->quad_order = quad_order;
  c->density = std::move(f);
  return c;
}

ChargePtr make_lebesgue_charge(int dim) {
  return make_density_charge(scalar_from_catalog("one", dim));
}

ChargePtr make_function_charge(Function1D f) {
  auto c = std::make_shared<Charge>();
  c->kind = ChargeKind::FunctionDiff;
  c->dim = 1;
  c->f1 = std::move(f);
  return c;
}

ChargePtr make_segment_measure_charge(SegmentDescriptor seg, int dim) {
  if (dim < 2)
    throw PreconditionError("segment measure needs ambient dimension >= 2");
  if (static_cast<int>(seg.base.size()) != dim || seg.axis < 0 ||
      seg.axis >= dim || seg.length <= 0)
    throw PreconditionError("malformed segment descriptor");
  auto c = std::make_shared<Charge>();
  c->kind = ChargeKind::SegmentMeasure;
  c->dim = dim;
  c->segment = std::move(seg);
  return c;
}

ChargePtr restrict_charge(ChargePtr base, Figure window) {
  if (!base) throw PreconditionError("null charge");
  if (window.dim != base->dim)
    throw PreconditionError("window dimension mismatch");
  auto c = std::make_shared<Charge>();
  c->kind = ChargeKind::Restricted;
  c->dim = base->dim;
  c->quad_order = base->quad_order;
  c->base = std::move(base);
  c->window = std::move(window);
  return c;
}

ChargePtr combine_charges(std::vector<std::pair<double, ChargePtr>> parts) {
  if (parts.empty()) throw PreconditionError("empty combination");
  int dim = parts.front().second->dim;
  for (const auto& [coef, p] : parts) {
    if (!p) throw PreconditionError("null charge");
    if (p->dim != dim) throw PreconditionError("combination dimension mismatch");
  }
  auto c = std::make_shared<Charge>();
  c->kind = ChargeKind::Combination;
  c->dim = dim;
  c->parts = std::move(parts);
  return c;
}

// ============================ evaluation ===============================

double charge_eval(const ChargePtr& c, const Figure& e, std::uint64_t budget) {
  check_dim(*c, e.dim);
  switch (c->kind) {
    case ChargeKind::Flux:
      return flux_eval_figure(*c, e, budget);
    case ChargeKind::Density:
      return density_eval_figure(*c, e);
    case ChargeKind::FunctionDiff: {
      if (e.dim != 1)
        throw PreconditionError("function charge is one-dimensional");
      return charge_eval(c, bvset_from_figure(e));
    }
    case ChargeKind::SegmentMeasure:
      return to_double(segment_eval_figure_exact(*c, e));
    case ChargeKind::Restricted:
      return charge_eval(c->base, fig_intersect(e, c->window, budget), budget);
    case ChargeKind::Combination: {
      double s = 0.0;
      for (const auto& [coef, p] : c->parts) s += coef * charge_eval(p, e, budget);
      return s;
    }
  }
  return 0.0;
}

double charge_eval(const ChargePtr& c, const BVSet1D& e) {
  check_dim(*c, 1);
  switch (c->kind) {
    case ChargeKind::Flux: {
      double s = 0.0;
      for (const auto& iv : e.intervals)
        s += c->field.eval({to_double(iv.second)}, 0) -
             c->field.eval({to_double(iv.first)}, 0);
      return s;
    }
    case ChargeKind::Density: {
      double s = 0.0;
      for (const auto& iv : e.intervals)
        s += density_eval_cube(*c, {to_double(iv.first)},
                               {to_double(iv.second)});
      return s;
    }
    case ChargeKind::FunctionDiff: {
      double s = 0.0;
      for (const auto& iv : e.intervals)
        s += c->f1(to_double(iv.second)) - c->f1(to_double(iv.first));
      return s;
    }
    case ChargeKind::SegmentMeasure:
      throw PreconditionError("segment measure undefined on 1D sets");
    case ChargeKind::Restricted:
      return charge_eval(c->base, bv_intersect(e, bvset_from_figure(c->window)));
    case ChargeKind::Combination: {
      double s = 0.0;
      for (const auto& [coef, p] : c->parts) s += coef * charge_eval(p, e);
      return s;
    }
  }
  return 0.0;
}

double charge_eval_box(const ChargePtr& c, const RatBox& b) {
  check_dim(*c, b.dim());
  switch (c->kind) {
    case ChargeKind::Flux:
      return flux_eval_box(*c, b);
    case ChargeKind::Density: {
      std::vector<double> lo(b.dim()), hi(b.dim());
      for (int i = 0; i < b.dim(); ++i) {
        lo[i] = to_double(b.lo[i]);
        hi[i] = to_double(b.hi[i]);
      }
      return density_eval_cube(*c, lo, hi);
    }
    case ChargeKind::FunctionDiff:
      return c->f1(to_double(b.hi[0])) - c->f1(to_double(b.lo[0]));
    case ChargeKind::SegmentMeasure: {
      auto iv = segment_clip(c->segment, b.lo, b.hi);
      return iv ? to_double(iv->second - iv->first) : 0.0;
    }
    case ChargeKind::Restricted: {
      // windows are figures; charges are additive over the cube pieces
      double s = 0.0;
      for (const auto& q : c->window.cubes) {
        if (auto piece = box_intersect(b, box_of_cube(q)))
          s += charge_eval_box(c->base, *piece);
      }
      return s;
    }
    case ChargeKind::Combination: {
      double s = 0.0;
      for (const auto& [coef, p] : c->parts) s += coef * charge_eval_box(p, b);
      return s;
    }
  }
  return 0.0;
}

std::optional<Rat> charge_eval_exact(const ChargePtr& c, const Figure& e,
                                     std::uint64_t budget) {
  check_dim(*c, e.dim);
  switch (c->kind) {
    case ChargeKind::Flux:
      return flux_eval_figure_exact(*c, e, budget);
    case ChargeKind::Density:
      return density_eval_figure_exact(*c, e);
    case ChargeKind::SegmentMeasure:
      return segment_eval_figure_exact(*c, e);
    case ChargeKind::Restricted:
      return charge_eval_exact(c->base, fig_intersect(e, c->window, budget),
                               budget);
    default:
      return std::nullopt;
  }
}

// ======================= empty-set continuity ==========================

namespace {

void collect_segments(const ChargePtr& c, std::vector<SegmentDescriptor>& out) {
  switch (c->kind) {
    case ChargeKind::SegmentMeasure:
      out.push_back(c->segment);
      break;
    case ChargeKind::Restricted:
      collect_segments(c->base, out);
      break;
    case ChargeKind::Combination:
      for (const auto& [coef, p] : c->parts) collect_segments(p, out);
      break;
    default:
      break;
  }
}

// Row of level-`level` cells covering the segment (one cell thick in every
// transverse axis).  The closed cells contain the segment.
Figure tube_figure(const SegmentDescriptor& seg, int dim, int level) {
  Rat scale = rat_pow2(level);
  long k0 = rat_floor(seg.base[seg.axis] * scale);
  long k1 = rat_ceil((seg.base[seg.axis] + seg.length) * scale) - 1;
  std::vector<DyadicCube> cubes;
  for (long k = k0; k <= k1; ++k) {
    std::vector<std::int64_t> idx(dim);
    for (int j = 0; j < dim; ++j)
      idx[j] = (j == seg.axis) ? k : rat_floor(seg.base[j] * scale);
    cubes.push_back(make_cube(level, idx));
  }
  return make_figure(dim, std::move(cubes));
}

ShrinkingSequence build_tube_sequence(const SegmentDescriptor& seg, int dim,
                                      const Rat& vol0, int stages,
                                      const std::string& label) {
  ShrinkingSequence s;
  s.description = label;
  for (int k = 1; k <= stages; ++k) {
    Rat target = vol0 * rat_pow2(-k);
    int level = k + 2;
    Figure tube = tube_figure(seg, dim, level);
    while (volume(tube) > target && level < kMaxLevel - 1) {
      ++level;
      tube = tube_figure(seg, dim, level);
    }
    s.stages.push_back(std::move(tube));
  }
  return s;
}

ShrinkingSequence build_random_cluster_sequence(Rng rng, int dim,
                                                const RatPoint& blo,
                                                const RatPoint& bhi,
                                                const Rat& vol0, int stages) {
  ShrinkingSequence s;
  s.description = "random-cluster";
  for (int k = 1; k <= stages; ++k) {
    int level = (k + 2 + dim - 1) / dim + 2;
    Rat target = vol0 * rat_pow2(-k);
    // shrink cells until one cell fits the volume target
    while (rat_pow(rat_pow2(-level), static_cast<unsigned>(dim)) * 4 > target &&
           level < kMaxLevel - 1)
      ++level;
    Rat scale = rat_pow2(level);
    std::vector<DyadicCube> cubes;
    int count = static_cast<int>(rng.uniform_int(1, 4));
    for (int i = 0; i < count; ++i) {
      std::vector<std::int64_t> idx(dim);
      for (int j = 0; j < dim; ++j) {
        long lo = rat_floor(blo[j] * scale);
        long hi = rat_ceil(bhi[j] * scale) - 1;
        idx[j] = rng.uniform_int(lo, std::max(lo, hi));
      }
      cubes.push_back(make_cube(level, idx));
    }
    s.stages.push_back(make_figure(dim, std::move(cubes)));
  }
  return s;
}

ShrinkingSequence build_random_slab_sequence(Rng rng, int dim,
                                             const RatPoint& blo,
                                             const RatPoint& bhi,
                                             const Rat& vol0, int stages) {
  // thin random slab: one cell thick across `axis`, a short random run of
  // cells along the remaining axes
  ShrinkingSequence s;
  s.description = "random-slab";
  int axis = static_cast<int>(rng.uniform_int(0, dim - 1));
  for (int k = 1; k <= stages; ++k) {
    Rat target = vol0 * rat_pow2(-k);
    int level = k + 2;
    Rat scale = rat_pow2(level);
    std::vector<std::int64_t> base(dim);
    for (int j = 0; j < dim; ++j) {
      long lo = rat_floor(blo[j] * scale);
      long hi = rat_ceil(bhi[j] * scale) - 1;
      base[j] = rng.uniform_int(lo, std::max(lo, hi));
    }
    long run = std::max(1l, std::min(1l << level,
                                     static_cast<long>(rng.uniform_int(1, 16))));
    std::vector<DyadicCube> cubes;
    int other = (axis + 1) % dim;
    for (long i = 0; i < run; ++i) {
      auto idx = base;
      if (dim > 1) idx[other] = base[other] + i;
      cubes.push_back(make_cube(level, idx));
    }
    Figure f = make_figure(dim, std::move(cubes));
    while (volume(f) > target && !f.cubes.empty()) f.cubes.pop_back();
    if (f.cubes.empty())
      f = make_figure(dim, {make_cube(level, base)});
    s.stages.push_back(std::move(f));
  }
  return s;
}

// Values plus validity: stage volumes below the shrinking target and
// perimeters below the cap.
bool finalize_sequence(ShrinkingSequence& s, const ChargePtr& c,
                       const Rat& vol0, double perimeter_cap,
                       std::uint64_t budget) {
  s.values.clear();
  s.volumes.clear();
  s.perimeters.clear();
  for (std::size_t i = 0; i < s.stages.size(); ++i) {
    const Figure& f = s.stages[i];
    if (f.empty()) return false;
    Rat v = volume(f);
    Rat p = perimeter(f, budget);
    if (v > vol0 * rat_pow2(-static_cast<int>(i) - 1)) return false;
    if (to_double(p) > perimeter_cap) return false;
    s.volumes.push_back(v);
    s.perimeters.push_back(p);
    s.values.push_back(charge_eval(c, f, budget));
  }
  return true;
}

}  // namespace

FalsifierReport charge_axiom_falsifier(const ChargePtr& c, const Figure& domain,
                                       double threshold, int trials,
                                       std::uint64_t seed, int stages,
                                       double perimeter_cap) {
  if (domain.empty()) throw PreconditionError("falsifier needs a domain");
  check_dim(*c, domain.dim);
  if (threshold <= 0) throw PreconditionError("threshold must be positive");

  FalsifierReport report;
  report.threshold = threshold;
  Rat vol0 = volume(domain);
  auto [blo, bhi] = bounding_box(domain);

  std::vector<ShrinkingSequence> structured;
  if (domain.dim >= 2) {
    std::vector<SegmentDescriptor> segs;
    collect_segments(c, segs);
    std::size_t declared = segs.size();
    // cataloged probes: axis-aligned midlines of the bounding box
    for (int axis = 0; axis < domain.dim; ++axis) {
      SegmentDescriptor seg;
      seg.axis = axis;
      seg.base = blo;
      for (int j = 0; j < domain.dim; ++j)
        if (j != axis) seg.base[j] = (blo[j] + bhi[j]) / 2;
      seg.length = bhi[axis] - blo[axis];
      if (seg.length > 0) segs.push_back(seg);
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
      std::string label =
          i < declared ? "tube(declared-segment)" : "tube(midline)";
      structured.push_back(
          build_tube_sequence(segs[i], domain.dim, vol0, stages, label));
    }
  }

  auto consider = [&](ShrinkingSequence seq) {
    if (!finalize_sequence(seq, c, vol0, perimeter_cap, kDefaultCellBudget))
      return false;
    ++report.sequences_checked;
    bool away = true;
    for (double v : seq.values)
      if (std::abs(v) < threshold) {
        away = false;
        break;
      }
    if (away && !report.refuted) {
      report.refuted = true;
      report.witness = std::move(seq);
    }
    return away;
  };

  for (auto& seq : structured)
    if (consider(std::move(seq)) && report.refuted) return report;

  Rng rng = make_rng(seed, 0xfa15);
  for (int t = 0; t < trials; ++t) {
    Rng child = rng.derive(static_cast<std::uint64_t>(t));
    ShrinkingSequence seq =
        (t % 2 == 0)
            ? build_random_cluster_sequence(child, domain.dim, blo, bhi, vol0,
                                            stages)
            : build_random_slab_sequence(child, domain.dim, blo, bhi, vol0,
                                         stages);
    if (consider(std::move(seq)) && report.refuted) return report;
  }
  return report;
}

// ========================== set derivative =============================

DerivativeEstimate charge_derivative_estimate(const ChargePtr& c,
                                              const RatPoint& x, double eta,
                                              double r0, int steps) {
  int n = static_cast<int>(x.size());
  check_dim(*c, n);
  if (r0 <= 0 || steps < 1) throw PreconditionError("bad radius schedule");

  DerivativeEstimate est;
  bool have_lower = false, have_upper = false;
  for (int j = 0; j < steps; ++j) {
    double r = r0 * std::pow(0.5, j);
    int level = static_cast<int>(
        std::ceil(std::log2(2.0 * std::sqrt(static_cast<double>(n)) / r)));
    level = std::clamp(level, kMinLevel, kMaxLevel);
    Rat scale = rat_pow2(level);

    // all level cells whose closed cube contains x
    std::vector<std::vector<std::int64_t>> axis_choices(n);
    for (int i = 0; i < n; ++i) {
      Rat v = x[i] * scale;
      long k = rat_floor(v);
      axis_choices[i].push_back(k);
      if (v == Rat(k)) axis_choices[i].push_back(k - 1);
    }
    std::vector<DyadicCube> cubes;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      std::vector<std::int64_t> idx(n);
      for (int i = 0; i < n; ++i) idx[i] = axis_choices[i][pick[i]];
      cubes.push_back(make_cube(level, idx));
      int axis = 0;
      while (axis < n) {
        if (++pick[axis] < axis_choices[axis].size()) break;
        pick[axis] = 0;
        ++axis;
      }
      if (axis == n) break;
    }

    std::vector<Figure> family;
    for (const auto& q : cubes) family.push_back(make_figure(n, {q}));
    for (std::size_t a = 0; a < cubes.size(); ++a) {
      for (std::size_t b = a + 1; b < cubes.size(); ++b) {
        int diff_axes = 0;
        for (int i = 0; i < n; ++i)
          if (cubes[a].index[i] != cubes[b].index[i]) ++diff_axes;
        if (diff_axes == 1)
          family.push_back(make_figure(n, {cubes[a], cubes[b]}));
      }
    }

    DerivativeEstimate::Row row;
    row.radius = r;
    bool first = true;
    for (const auto& e : family) {
      if (regularity_with_tag(e, x) <= eta) continue;
      double ratio = charge_eval(c, e) / to_double(volume(e));
      if (first) {
        row.inf_ratio = row.sup_ratio = ratio;
        first = false;
      } else {
        row.inf_ratio = std::min(row.inf_ratio, ratio);
        row.sup_ratio = std::max(row.sup_ratio, ratio);
      }
      ++row.family_size;
    }
    if (row.family_size > 0) {
      if (!have_lower || row.inf_ratio > est.lower) est.lower = row.inf_ratio;
      if (!have_upper || row.sup_ratio < est.upper) est.upper = row.sup_ratio;
      have_lower = have_upper = true;
    }
    est.rows.push_back(row);
  }
  if (!have_lower)
    throw PreconditionError(
        "derivative family empty at every radius (eta too large?)");
  return est;
}

}  // namespace gaugekit
