#include "gaugekit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <unordered_set>
#include <utility>

#include "gaugekit/fields.hpp"
#include "gaugekit/rng.hpp"
#include "parallel.hpp"

namespace gaugekit {

Integrand integrand_constant(int dim, double value) {
  Integrand g;
  g.dim = dim;
  g.name = "constant";
  g.fn = [value](const RatPoint&) { return value; };
  return g;
}

Integrand integrand_from_scalar(const ScalarField& s) {
  Integrand g;
  g.dim = s.dim;
  g.name = s.name;
  g.fn = [s](const RatPoint& x) { return s.eval(to_double(x)); };
  return g;
}

Integrand integrand_zero_extension(Integrand f, Figure a) {
  Integrand g;
  g.dim = f.dim;
  g.name = f.name + " zero-extended";
  g.fn = [f = std::move(f), a = std::move(a)](const RatPoint& x) {
    return contains_point(a, x) ? f(x) : 0.0;
  };
  return g;
}

std::vector<Rat> default_eps_schedule() {
  return {Rat(1, 2), Rat(1, 10), Rat(1, 50)};
}

namespace {

void validate_claim_common(const IntegralClaim& claim, const Gauge& gauge) {
  if (!claim.F || !claim.G)
    throw PreconditionError("claim needs both the candidate and the reference charge");
  if (!claim.f.fn) throw PreconditionError("claim integrand is empty");
  if (claim.domain.empty())
    throw PreconditionError("claim domain figure is empty");
  int dim = claim.domain.dim;
  if (claim.F->dim != dim || claim.G->dim != dim || claim.f.dim != dim ||
      gauge.dim != dim)
    throw PreconditionError("claim parts disagree on dimension");
  for (const Rat& e : claim.eps_schedule)
    if (e <= 0) throw PreconditionError("eps schedule entries must be positive");
}

RatPoint cell_center(const Cell& c, int dim, int level) {
  RatPoint p(dim);
  for (int a = 0; a < dim; ++a) p[a] = Rat(2 * c.c[a] + 1) * rat_pow2(-level - 1);
  return p;
}

const char* kAsymmetryNote =
    "refutation is against this gauge at the reported eps; consistency is "
    "only the absence of a failing sample at this search depth";

}  // namespace

HarnessReport check_packing_integral(const IntegralClaim& claim,
                                     const Gauge& gauge,
                                     const PackingCheckOptions& opt) {
  if (claim.notion != IntegralNotion::PackingR &&
      claim.notion != IntegralNotion::PackingRStar)
    throw PreconditionError("packing checker handles the packing notions only");
  validate_claim_common(claim, gauge);
  if (!(claim.tau > 0) || claim.tau > 1)
    throw PreconditionError("tau must lie in (0, 1]");
  if (opt.trials <= 0) throw PreconditionError("need at least one trial");

  SeminormVariant variant = claim.notion == IntegralNotion::PackingRStar
                                ? SeminormVariant::TaggedIsoperimetric
                                : SeminormVariant::Regular;
  std::vector<Rat> schedule =
      claim.eps_schedule.empty() ? default_eps_schedule() : claim.eps_schedule;

  HarnessReport rep;
  rep.note = kAsymmetryNote;
  for (std::size_t ei = 0; ei < schedule.size(); ++ei) {
    const Rat& eps = schedule[ei];
    rep.eps_reported = eps;
    rep.trials.clear();
    rep.worst_sum = 0.0;
    struct Slot {
      double sum = 0.0;
      std::vector<Ball> packing;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(opt.trials));
    run_indexed(opt.trials, opt.jobs, [&](int t) {
      std::uint64_t pseed = make_rng(opt.seed, 0x9ac41ULL)
                                .derive(ei)
                                .derive(static_cast<std::uint64_t>(t))
                                .bits();
      std::vector<Ball> packing =
          sample_packing(claim.domain, gauge, pseed, opt.packing);
      double sum = 0.0;
      for (std::size_t i = 0; i < packing.size(); ++i) {
        const Ball& b = packing[i];
        double fx = claim.f(b.center);
        ChargePtr diff = combine_charges({{1.0, claim.F}, {-fx, claim.G}});
        SeminormOptions so = opt.seminorm;
        so.seed = splitmix64(pseed ^ (0xb111ULL + i));
        SeminormResult sr = seminorm_lower_bound(
            diff, b.center, claim.tau * b.radius, eps, variant, so);
        sum += sr.value;
      }
      slots[static_cast<std::size_t>(t)] = {sum, std::move(packing)};
    });
    for (Slot& s : slots) {
      rep.trials.push_back({s.sum, s.packing.size()});
      rep.worst_sum = std::max(rep.worst_sum, s.sum);
      if (!rep.refuted && s.sum >= to_double(eps)) {
        rep.refuted = true;
        rep.witness_sum = s.sum;
        rep.witness_packing = std::move(s.packing);
      }
    }
    if (rep.refuted) break;
  }
  return rep;
}

HarnessReport check_bv_partition_integral(const IntegralClaim& claim,
                                          const Gauge& gauge,
                                          const PartitionCheckOptions& opt) {
  if (claim.notion != IntegralNotion::PfefferR &&
      claim.notion != IntegralNotion::PfefferRIntrinsic &&
      claim.notion != IntegralNotion::RStar)
    throw PreconditionError("partition checker handles the BV partition notions only");
  validate_claim_common(claim, gauge);
  if (opt.trials <= 0 || opt.pieces_target <= 0)
    throw PreconditionError("need at least one trial and one piece");

  const Figure& dom = claim.domain;
  int dim = dom.dim;
  int base = finest_level(dom);
  std::vector<Rat> schedule =
      claim.eps_schedule.empty() ? default_eps_schedule() : claim.eps_schedule;

  struct Host {
    const CellSet* set;
    const std::vector<Cell>* order;
  };
  std::map<int, CellSet> hosts;
  std::map<int, std::vector<Cell>> orders;
  std::mutex host_mu;
  // node-based maps keep references stable, so the lock only covers the
  // find-or-create step
  auto host_at = [&](int level) -> Host {
    std::lock_guard<std::mutex> lk(host_mu);
    auto it = hosts.find(level);
    if (it == hosts.end()) {
      it = hosts.emplace(level, refine_to(dom, level, opt.cell_budget)).first;
      std::vector<Cell> order(it->second.cells().begin(),
                              it->second.cells().end());
      std::sort(order.begin(), order.end(),
                [](const Cell& a, const Cell& b) { return a.c < b.c; });
      orders.emplace(level, std::move(order));
    }
    return {&it->second, &orders.at(level)};
  };

  HarnessReport rep;
  rep.note = kAsymmetryNote;
  for (std::size_t ei = 0; ei < schedule.size(); ++ei) {
    const Rat& eps = schedule[ei];
    Rat eps_sq = eps * eps;
    rep.eps_reported = eps;
    rep.trials.clear();
    rep.worst_sum = 0.0;
    rep.pieces_sampled = 0;
    rep.pieces_rejected = 0;
    struct Slot {
      bool ran = false;
      double sum = 0.0;
      std::vector<TaggedFigure> kept;
      std::uint64_t sampled = 0;
      std::uint64_t rejected = 0;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(opt.trials));
    run_indexed(opt.trials, opt.jobs, [&](int t) {
      Slot& slot = slots[static_cast<std::size_t>(t)];
      Rng tr = make_rng(opt.seed, 0xBA271410ULL + ei).derive(
          static_cast<std::uint64_t>(t));
      int extra = static_cast<int>(tr.uniform_int(0, opt.extra_levels));
      int level = std::min(base + extra, kMaxLevel);
      Host hh = host_at(level);
      const CellSet& host = *hh.set;
      const std::vector<Cell>& order = *hh.order;
      if (order.empty()) return;

      std::unordered_set<Cell, CellHash> used;
      std::vector<TaggedFigure> raw;
      for (int p = 0; p < opt.pieces_target; ++p) {
        Cell start;
        bool found = false;
        for (int att = 0; att < 8 && !found; ++att) {
          const Cell& cand =
              order[tr.uniform_int(0, static_cast<long>(order.size()) - 1)];
          if (!used.count(cand)) {
            start = cand;
            found = true;
          }
        }
        if (!found) break;
        int want = static_cast<int>(tr.uniform_int(1, 4));
        bool allow_outside = tr.coin(opt.outside_prob);
        std::vector<Cell> members{start};
        used.insert(start);
        int att = 0;
        while (static_cast<int>(members.size()) < want && att < 8 * want) {
          ++att;
          const Cell& from =
              members[tr.uniform_int(0, static_cast<long>(members.size()) - 1)];
          int axis = static_cast<int>(tr.uniform_int(0, dim - 1));
          int dir = tr.coin() ? 1 : -1;
          Cell nb = cell_neighbor(from, axis, dir);
          if (used.count(nb)) continue;
          if (!host.contains(nb) && !allow_outside) continue;
          members.push_back(nb);
          used.insert(nb);
        }

        CellSet ps(dim, level);
        std::vector<Cell> in_dom;
        for (const Cell& m : members) {
          ps.insert(m);
          if (host.contains(m)) in_dom.push_back(m);
        }
        if (in_dom.empty()) continue;
        RatPoint tag;
        if (claim.notion != IntegralNotion::RStar && tr.coin(opt.far_tag_prob)) {
          // detached tag, still a point of the domain: legal per the
          // definitions, normally killed by the pair-regularity filter
          tag = cell_center(
              order[tr.uniform_int(0, static_cast<long>(order.size()) - 1)],
              dim, level);
        } else {
          tag = cell_center(
              in_dom[tr.uniform_int(0, static_cast<long>(in_dom.size()) - 1)],
              dim, level);
        }
        raw.push_back({figure_from_cells(ps), tag});
      }

      slot.ran = true;
      double sum = 0.0;
      std::vector<TaggedFigure> kept;
      for (std::size_t pi = 0; pi < raw.size(); ++pi) {
        const TaggedFigure& tf = raw[pi];
        ++slot.sampled;
        bool ok = true;
        double dv = gauge(tf.tag);
        if (!(dv > 0.0)) {
          ok = false;
        } else {
          Rat dr(dv);
          ok = diameter_sq_with_tag(tf.piece, tf.tag) < dr * dr;
        }
        if (ok) ok = is_regular_sq(tf.piece, &tf.tag, eps_sq, opt.cell_budget);
        if (ok && claim.notion == IntegralNotion::PfefferRIntrinsic)
          ok = is_subfigure(tf.piece, dom, opt.cell_budget);
        if (ok && claim.notion == IntegralNotion::RStar) {
          ok = contains_point(tf.piece, tf.tag);
          if (ok)
            ok = is_eps_isoperimetric_sampled(
                     tf.piece, eps, opt.iso_depth,
                     splitmix64(opt.seed ^ (0x150bULL + pi)), opt.cell_budget)
                     .passed;
        }
        if (!ok) {
          ++slot.rejected;
          continue;
        }
        kept.push_back(tf);
        double fv = claim.f(tf.tag);
        sum += std::fabs(charge_eval(claim.F, tf.piece, opt.cell_budget) -
                         fv * charge_eval(claim.G, tf.piece, opt.cell_budget));
      }
      slot.sum = sum;
      slot.kept = std::move(kept);
    });
    for (Slot& s : slots) {
      rep.pieces_sampled += s.sampled;
      rep.pieces_rejected += s.rejected;
      if (!s.ran) continue;
      rep.trials.push_back({s.sum, s.kept.size()});
      rep.worst_sum = std::max(rep.worst_sum, s.sum);
      if (!rep.refuted && s.sum >= to_double(eps)) {
        rep.refuted = true;
        rep.witness_sum = s.sum;
        rep.witness_partition = std::move(s.kept);
      }
    }
    if (rep.refuted) break;
  }
  return rep;
}

GaussGreenResult gauss_green_verify(const VectorField& u, const Figure& a,
                                    DivSource div_source, int quad_order,
                                    std::uint64_t budget) {
  if (a.empty()) throw PreconditionError("flux domain figure is empty");
  if (u.dim != a.dim)
    throw PreconditionError("field and figure disagree on dimension");
  if (quad_order < 1 || quad_order > 40)
    throw PreconditionError("quadrature order out of range");

  ScalarField div;
  if (div_source == DivSource::Symbolic) {
    div = divergence_field(u);
  } else {
    div.dim = u.dim;
    div.name = "central-difference divergence";
    div.fn = [u](const std::vector<double>& x) {
      const double h = 1e-5;
      double s = 0.0;
      for (int axis = 0; axis < u.dim; ++axis) {
        std::vector<double> xp = x, xm = x;
        xp[axis] += h;
        xm[axis] -= h;
        s += (u.eval(xp, axis) - u.eval(xm, axis)) / (2.0 * h);
      }
      return s;
    };
  }

  GaussGreenResult r;
  r.flux = charge_eval(make_flux_charge(u, quad_order), a, budget);
  r.volume_integral = charge_eval(make_density_charge(div, quad_order), a, budget);
  r.abs_error = std::fabs(r.flux - r.volume_integral);
  double scale = std::max(std::fabs(r.flux), std::fabs(r.volume_integral));
  r.rel_error = scale > 0.0 ? r.abs_error / scale : 0.0;
  return r;
}

Figure padded_host(const Figure& a, int pad) {
  if (a.empty()) throw PreconditionError("cannot pad an empty figure");
  if (pad < 0) throw PreconditionError("pad must be nonnegative");
  int dim = a.dim;
  int level = std::max(finest_level(a), 0);
  auto [lo, hi] = bounding_box(a);
  Rat scale = rat_pow2(level);
  std::vector<std::int64_t> klo(dim), khi(dim);
  unsigned long long count = 1;
  for (int ax = 0; ax < dim; ++ax) {
    klo[ax] = rat_floor(lo[ax] * scale) - pad;
    Rat s = hi[ax] * scale;
    long kh = rat_floor(s);
    if (Rat(kh) == s) kh -= 1;  // upper face on the grid: no extra cell
    khi[ax] = kh + pad;
    count *= static_cast<unsigned long long>(khi[ax] - klo[ax] + 1);
    if (count > (1ULL << 22))
      throw BudgetError("padded host cell enumeration", count, 1ULL << 22);
  }
  CellSet cs(dim, level);
  Cell c;
  std::vector<std::int64_t> cur(klo);
  while (true) {
    for (int ax = 0; ax < dim; ++ax) c.c[ax] = cur[ax];
    cs.insert(c);
    int ax = 0;
    for (; ax < dim; ++ax) {
      if (++cur[ax] <= khi[ax]) break;
      cur[ax] = klo[ax];
    }
    if (ax == dim) break;
  }
  return figure_from_cells(cs);
}

RestrictionReport restriction_consistency(const IntegralClaim& claim,
                                          const Figure& a, const Gauge& gauge,
                                          const PackingCheckOptions& opt) {
  if (claim.notion != IntegralNotion::PackingR &&
      claim.notion != IntegralNotion::PackingRStar)
    throw PreconditionError("restriction checker re-runs the packing notions only");
  if (a.empty()) throw PreconditionError("restriction figure is empty");
  if (a.dim != claim.domain.dim)
    throw PreconditionError("restriction figure dimension mismatch");

  IntegralClaim restricted = claim;
  restricted.f = integrand_zero_extension(claim.f, a);
  restricted.F = restrict_charge(claim.F, a);

  Gauge cut = make_min_gauge(gauge, make_boundary_distance_gauge(a, 1.0));

  RestrictionReport out;
  restricted.domain = a;
  out.in_domain = check_packing_integral(restricted, cut, opt);
  restricted.domain = padded_host(a, 1);
  out.zero_extension = check_packing_integral(restricted, cut, opt);
  out.consistent = !out.in_domain.refuted && !out.zero_extension.refuted;
  return out;
}

}  // namespace gaugekit
