#include "gaugekit/hk1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gaugekit/harness.hpp"
#include "gaugekit/quadrature.hpp"
#include "gaugekit/rng.hpp"
#include "parallel.hpp"

namespace gaugekit {

namespace {

const char* kTrialNote =
    "refutation is against this gauge at the reported eps; consistency is "
    "only the absence of a failing sample at this search depth";

void require_fn(const Function1D& f, const char* role) {
  if (!f.fn) throw PreconditionError(std::string(role) + " has no evaluator");
}

// One piece of the streamed partition, identified by its dyadic address so
// exact rational endpoints can be reconstructed on demand.
struct StreamPiece {
  double term = 0.0;
  std::int64_t j = 0;
  int k = 0;
  int tag_kind = 0;  // 0 left, 1 right, 2 midpoint
};

struct ByTermDesc {
  bool operator()(const StreamPiece& a, const StreamPiece& b) const {
    return a.term > b.term;
  }
};

Rat stream_coord(const Rat& a, const Rat& span, std::int64_t num, int k) {
  return a + span * Rat(num) * rat_pow2(-k);
}

}  // namespace

HKReport hk_check(const Function1D& f, const Function1D& F,
                  const Function1D& G, double a, double b, const Gauge& gauge,
                  const std::vector<Rat>& eps_schedule,
                  const HKCheckOptions& opt) {
  require_fn(f, "integrand");
  require_fn(F, "candidate integral");
  require_fn(G, "integrator");
  if (!(a < b)) throw PreconditionError("empty interval");
  if (gauge.dim != 1) throw PreconditionError("interval checks are 1D");
  if (opt.trials <= 0) throw PreconditionError("trials must be positive");
  if (!(opt.min_scale > 0) || opt.min_scale > 1)
    throw PreconditionError("min_scale must lie in (0, 1]");
  if (!(opt.keep_prob > 0) || opt.keep_prob > 1)
    throw PreconditionError("keep_prob must lie in (0, 1]");
  if (opt.witness_cap == 0) throw PreconditionError("witness_cap must be positive");
  std::vector<Rat> schedule =
      eps_schedule.empty() ? default_eps_schedule() : eps_schedule;
  for (const Rat& e : schedule)
    if (!(e > 0)) throw PreconditionError("eps values must be positive");

  std::function<double(double)> delta;
  if (gauge.fn1) {
    delta = gauge.fn1;
  } else {
    delta = [&gauge](double x) { return gauge.fn(RatPoint{Rat(x)}); };
  }

  const double span = b - a;
  const Rat ra(a), rspan(span);

  HKReport rep;
  rep.note = kTrialNote;

  for (std::size_t ei = 0; ei < schedule.size(); ++ei) {
    const Rat& eps = schedule[ei];
    const double eps_d = to_double(eps);
    rep.refuted = false;
    rep.eps_reported = eps;
    rep.worst_sum = 0.0;
    rep.trial_sums.clear();
    rep.intervals_streamed = 0;
    rep.witness.clear();
    rep.witness_complete = false;
    rep.witness_sum = 0.0;

    struct Slot {
      double sum = 0.0;
      std::uint64_t emitted = 0;
      std::vector<StreamPiece> top_pieces;  // unordered heap contents
    };
    std::vector<Slot> slots(static_cast<std::size_t>(opt.trials));
    run_indexed(opt.trials, opt.jobs, [&](int t) {
      Rng rng = make_rng(opt.seed, 0x48AD1ULL).derive(ei).derive(
          static_cast<std::uint64_t>(t));
      const double scale = t == 0 ? 1.0 : rng.uniform(opt.min_scale, 1.0);
      const bool subsel = t != 0;

      double sum = 0.0;
      std::uint64_t emitted = 0;
      std::priority_queue<StreamPiece, std::vector<StreamPiece>, ByTermDesc>
          top;

      // endpoint carry: emitted pieces tile [a, b] left to right, so the
      // left values of the next kept piece usually sit in the carry
      double carry_x = a;
      double carry_F = F.fn(a);
      double carry_G = G.fn(a);

      struct Node {
        std::int64_t j;
        int k;
      };
      std::vector<Node> stack{{0, 0}};
      while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        const double h = span * std::ldexp(1.0, -nd.k);
        const double lo = a + span * std::ldexp(static_cast<double>(nd.j), -nd.k);
        const double hi =
            a + span * std::ldexp(static_cast<double>(nd.j + 1), -nd.k);
        const double mid =
            a + span * std::ldexp(static_cast<double>(2 * nd.j + 1), -(nd.k + 1));

        double cand[3] = {0, 0, 0};
        int kind[3] = {0, 0, 0};
        int nc = 0;
        switch (opt.policy) {
          case TagPolicy::EndpointsThenMidpoint:
            cand[0] = lo; kind[0] = 0;
            cand[1] = hi; kind[1] = 1;
            cand[2] = mid; kind[2] = 2;
            nc = 3;
            break;
          case TagPolicy::MidpointOnly:
            cand[0] = mid; kind[0] = 2;
            nc = 1;
            break;
          case TagPolicy::MidpointThenLeft:
            cand[0] = mid; kind[0] = 2;
            cand[1] = lo; kind[1] = 0;
            nc = 2;
            break;
        }

        double tag = 0.0;
        int tag_kind = -1;
        bool saw_nonpositive = false;
        for (int c = 0; c < nc; ++c) {
          const double d = scale * delta(cand[c]);
          if (!(d > 0)) {
            saw_nonpositive = true;
            continue;
          }
          if (h < d) {
            tag = cand[c];
            tag_kind = kind[c];
            break;
          }
        }

        if (tag_kind < 0) {
          if (nd.k >= opt.max_depth) {
            if (saw_nonpositive)
              throw PreconditionError("gauge is not positive inside [" +
                                      std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
            throw BudgetError(
                "bisection depth exhausted before the gauge let go",
                static_cast<std::uint64_t>(nd.k),
                static_cast<std::uint64_t>(opt.max_depth));
          }
          stack.push_back({2 * nd.j + 1, nd.k + 1});
          stack.push_back({2 * nd.j, nd.k + 1});
          continue;
        }

        if (++emitted > opt.interval_budget)
          throw BudgetError("streamed interval budget exhausted", emitted,
                            opt.interval_budget);
        const bool keep = !subsel || rng.coin(opt.keep_prob);
        if (!keep) continue;

        const double Flo = lo == carry_x ? carry_F : F.fn(lo);
        const double Glo = lo == carry_x ? carry_G : G.fn(lo);
        const double Fhi = F.fn(hi);
        const double Ghi = G.fn(hi);
        carry_x = hi;
        carry_F = Fhi;
        carry_G = Ghi;

        const double term = std::fabs(Fhi - Flo - f.fn(tag) * (Ghi - Glo));
        sum += term;
        if (top.size() < opt.witness_cap) {
          top.push({term, nd.j, nd.k, tag_kind});
        } else if (term > top.top().term) {
          top.pop();
          top.push({term, nd.j, nd.k, tag_kind});
        }
      }

      Slot& slot = slots[static_cast<std::size_t>(t)];
      slot.sum = sum;
      slot.emitted = emitted;
      while (!top.empty()) {
        slot.top_pieces.push_back(top.top());
        top.pop();
      }
    });
    for (Slot& s : slots) {
      rep.trial_sums.push_back(s.sum);
      rep.intervals_streamed += s.emitted;
      rep.worst_sum = std::max(rep.worst_sum, s.sum);
      if (!rep.refuted && s.sum >= eps_d) {
        rep.refuted = true;
        rep.witness_sum = s.sum;
        std::vector<StreamPiece> pieces = std::move(s.top_pieces);
        double top_sum = 0.0;
        for (const StreamPiece& p : pieces) top_sum += p.term;
        std::sort(pieces.begin(), pieces.end(),
                  [](const StreamPiece& x, const StreamPiece& y) {
                    // position order: x.j / 2^x.k vs y.j / 2^y.k
                    const int shift = std::max(x.k, y.k);
                    return (x.j << (shift - x.k)) < (y.j << (shift - y.k));
                  });
        for (const StreamPiece& p : pieces) {
          TaggedInterval iv;
          iv.a = stream_coord(ra, rspan, p.j, p.k);
          iv.b = stream_coord(ra, rspan, p.j + 1, p.k);
          iv.tag = p.tag_kind == 0   ? iv.a
                   : p.tag_kind == 1 ? iv.b
                                     : stream_coord(ra, rspan, 2 * p.j + 1,
                                                    p.k + 1);
          rep.witness.push_back(std::move(iv));
        }
        rep.witness_complete = top_sum >= eps_d;
      }
    }
    if (rep.refuted) break;
  }
  return rep;
}

Gauge make_osc_profile_gauge(double eps) {
  if (!(eps > 0)) throw PreconditionError("eps must be positive");
  // Piece closing on the origin: width d0 contributes at most d0^2 = eps/4.
  const double d0 = 0.5 * std::sqrt(eps);
  // Midpoint pieces in the dyadic band around 2^-j contribute at most
  // 168 c^2 together; bands above the origin piece number about
  // 2 + log2(1 / sqrt(eps)), so this keeps their total under eps/2.
  const double bands = std::max(2.0, 2.0 + 0.5 * std::log2(1.0 / eps));
  const double c = std::sqrt(eps / (336.0 * bands));
  auto delta = [d0, c](double x) {
    const double ax = std::fabs(x);
    if (ax == 0.0) return d0;
    return std::min(ax / 10.0, c * ax * ax * ax);
  };
  Gauge g;
  g.dim = 1;
  g.name = "osc-profile(" + std::to_string(eps) + ")";
  g.fn1 = delta;
  g.fn = [delta](const RatPoint& x) { return delta(to_double(x[0])); };
  return g;
}

// ====================== band-refining integration ======================

namespace {

struct ShellSide {
  double sum = 0.0;
  double err = 0.0;
  bool converged = true;
  std::uint64_t evals = 0;
};

// Euler transformation of an alternating series: feed the signed terms in
// order, read back the running estimate of the infinite sum.
struct EulerSum {
  std::vector<double> wksp;
  double sum = 0.0;
  void add(double term) {
    if (wksp.empty()) {
      wksp.push_back(term);
      sum = 0.5 * term;
      return;
    }
    double tmp = wksp[0];
    wksp[0] = term;
    for (std::size_t j = 1; j < wksp.size(); ++j) {
      const double dum = wksp[j];
      wksp[j] = 0.5 * (wksp[j - 1] + tmp);
      tmp = dum;
    }
    const double next = 0.5 * (wksp.back() + tmp);
    if (std::fabs(next) <= std::fabs(wksp.back())) {
      wksp.push_back(next);
      sum += 0.5 * next;
    } else {
      sum += next;
    }
  }
};

// Sign changes of f over `intervals` equal subdivisions of [lo, hi];
// exact zeros count as positive.
int count_sign_changes(const Function1D& f, double lo, double hi,
                       int intervals, std::uint64_t& evals) {
  int changes = 0;
  bool prev_neg = f.fn(lo) < 0;
  ++evals;
  for (int i = 1; i <= intervals; ++i) {
    const double x = lo + (hi - lo) * i / intervals;
    const bool neg = f.fn(x) < 0;
    ++evals;
    if (neg != prev_neg) ++changes;
    prev_neg = neg;
  }
  return changes;
}

struct OscWalk {
  double sum = 0.0;     // contribution of everything the walk covered
  double err = 0.0;
  std::uint64_t evals = 0;
  double reached = 0.0;  // innermost zero found, as distance from s
  bool estimated = false;  // transform covered the tail all the way in
};

// Rapidly oscillating tail: march the zeros of f from `width` toward the
// singular point, integrate one sign-constant lobe at a time, and feed
// the lobe integrals (alternating by construction) to the Euler
// transform, which estimates the whole infinite tail after a few dozen
// lobes.  Breaks off if a lobe repeats the previous sign (a missed zero)
// so the caller can fall back to plain shells from `reached`.
OscWalk osc_tail_walk(const Function1D& f, double s, int dir, double width,
                      double spacing_hint, double tol,
                      std::uint64_t eval_budget,
                      std::vector<SingularStage>& trace, double base) {
  OscWalk walk;
  walk.reached = width;
  EulerSum euler;
  const double floor_width = std::ldexp(1.0, -48);
  double xi = width;           // outer edge of the lobe being closed
  double fxi = f.fn(s + dir * xi);
  ++walk.evals;
  double step = std::max(spacing_hint / 8, floor_width);
  double prev_sign = 0.0;
  double raw = 0.0;
  int calm = 0;  // consecutive transform increments below tol / 16
  const int max_lobes = 512;
  for (int lobe = 0; lobe < max_lobes; ++lobe) {
    // bracket the next zero below xi
    double hi = xi, flo = fxi, lo = hi;
    int idle = 0;
    while (true) {
      if (walk.evals >= eval_budget || lo <= floor_width) {
        walk.sum = raw;
        walk.reached = xi;
        return walk;
      }
      lo = hi - step;
      if (lo <= floor_width) {
        walk.sum = raw;
        walk.reached = xi;
        return walk;
      }
      const double fl = f.fn(s + dir * lo);
      ++walk.evals;
      if ((fl < 0) != (flo < 0)) break;
      hi = lo;
      flo = fl;
      if (++idle >= 64) {
        step *= 2;  // zeros thinned out; widen the march
        idle = 0;
      }
    }
    double zhi = hi, zlo = lo;
    while (zhi - zlo > 1e-12 * zhi && walk.evals < eval_budget) {
      const double m = 0.5 * (zlo + zhi);
      const double fm = f.fn(s + dir * m);
      ++walk.evals;
      if ((fm < 0) != (flo < 0)) {
        zlo = m;
      } else {
        zhi = m;
      }
    }
    const double z = 0.5 * (zlo + zhi);
    const double a1 = s + dir * z, b1 = s + dir * xi;
    AdaptiveResult r = integrate_adaptive_1d(
        f.fn, std::min(a1, b1), std::max(a1, b1), tol / 1024,
        eval_budget > walk.evals ? eval_budget - walk.evals : 0);
    if (!r.converged) {
      walk.sum = raw;
      walk.reached = xi;
      return walk;
    }
    walk.evals += r.evals;
    walk.err += r.error_estimate;
    const double u = r.value;
    raw += u;
    const double sign = u > 0 ? 1.0 : u < 0 ? -1.0 : 0.0;
    if (lobe > 0 && sign != 0.0 && sign == prev_sign) {
      // missed a zero; report what was walked and let shells resume
      walk.sum = raw;
      walk.reached = z;
      return walk;
    }
    if (sign != 0.0) prev_sign = sign;
    const double before = euler.sum;
    euler.add(u);
    trace.push_back({z, u, base + euler.sum});
    const double inc = std::fabs(euler.sum - before);
    if (lobe >= 6 && inc < tol / 16) {
      if (++calm >= 2) {
        walk.sum = euler.sum;
        walk.err += 8 * inc;
        walk.reached = z;
        walk.estimated = true;
        return walk;
      }
    } else {
      calm = 0;
    }
    // march on from the zero, one step inside the next lobe
    step = std::max((xi - z) / 8, floor_width);
    xi = z;
    fxi = f.fn(s + dir * (z - 0.49 * step));
    ++walk.evals;
  }
  walk.sum = raw;
  walk.reached = xi;
  return walk;
}

// Peels halving shells toward the singular point until two consecutive
// contributions drop below tol / 8; a shell probing as rapidly
// oscillating hands the remaining tail to the zero-marching walk.
ShellSide peel_shells(const Function1D& f, double s, int dir, double width,
                      double tol, std::uint64_t eval_budget,
                      std::vector<SingularStage>& trace, double& running) {
  ShellSide side;
  const double floor_width = std::ldexp(1.0, -48);
  double last1 = std::numeric_limits<double>::infinity();
  double last2 = last1;
  int osc_attempts = 0;
  while (!(last1 < tol / 8 && last2 < tol / 8)) {
    if (width < floor_width || side.evals >= eval_budget) {
      side.converged = false;
      break;
    }
    const double inner = width / 2;
    const double p = s + dir * inner;
    const double q = s + dir * width;
    const int probe = 128;
    const int changes = count_sign_changes(f, std::min(p, q), std::max(p, q),
                                           probe, side.evals);
    if (changes >= 8 && osc_attempts < 2) {
      ++osc_attempts;
      const double hint = inner / std::max(changes, 1);
      OscWalk walk = osc_tail_walk(
          f, s, dir, width, hint, tol,
          eval_budget > side.evals ? eval_budget - side.evals : 0, trace,
          running);
      side.sum += walk.sum;
      side.err += walk.err;
      side.evals += walk.evals;
      running += walk.sum;
      if (walk.estimated) return side;  // tail estimate includes everything
      if (walk.reached < width && walk.reached > floor_width) {
        width = walk.reached;  // resume shells below the walked stretch
        continue;
      }
      side.converged = false;
      break;
    }
    AdaptiveResult r = integrate_adaptive_1d(
        f.fn, std::min(p, q), std::max(p, q), tol / 256,
        eval_budget > side.evals ? eval_budget - side.evals : 0);
    const double shell = r.value;
    side.sum += shell;
    side.err += r.error_estimate;
    side.evals += r.evals;
    if (!r.converged) side.converged = false;
    running += shell;
    trace.push_back({inner, shell, running});
    last2 = last1;
    last1 = std::fabs(shell);
    width = inner;
  }
  double tail = 0.0;
  if (std::isfinite(last1)) tail = std::max(tail, last1);
  if (std::isfinite(last2)) tail = std::max(tail, last2);
  side.err += 8 * tail;
  return side;
}

}  // namespace

HKIntegralResult hk_integrate_adaptive(const Function1D& f, double a, double b,
                                       std::vector<double> singular_points,
                                       double tol, std::uint64_t eval_budget) {
  require_fn(f, "integrand");
  if (!(a < b)) throw PreconditionError("empty interval");
  if (!(tol > 0)) throw PreconditionError("tolerance must be positive");
  std::sort(singular_points.begin(), singular_points.end());
  singular_points.erase(
      std::unique(singular_points.begin(), singular_points.end()),
      singular_points.end());
  for (double s : singular_points)
    if (s < a || s > b)
      throw PreconditionError("singular point outside the interval");

  HKIntegralResult res;
  double running = 0.0;

  // split [a, b] at the singular points; each sub-segment knows whether
  // its ends need shells
  std::vector<double> cuts{a};
  for (double s : singular_points)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  auto is_singular = [&](double x) {
    return std::binary_search(singular_points.begin(), singular_points.end(),
                              x);
  };

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double p = cuts[i];
    const double q = cuts[i + 1];
    const bool sl = is_singular(p);
    const bool sr = is_singular(q);
    const double w = (q - p) / 4;
    const double core_lo = sl ? p + w : p;
    const double core_hi = sr ? q - w : q;
    if (core_lo < core_hi) {
      AdaptiveResult r =
          integrate_adaptive_1d(f.fn, core_lo, core_hi, tol / 16,
                                eval_budget > res.evals
                                    ? eval_budget - res.evals
                                    : 0);
      res.value += r.value;
      running += r.value;
      res.error_estimate += r.error_estimate;
      res.evals += r.evals;
      if (!r.converged) res.converged = false;
    }
    if (sl) {
      ShellSide side =
          peel_shells(f, p, +1, w, tol,
                      eval_budget > res.evals ? eval_budget - res.evals : 0,
                      res.trace, running);
      res.value += side.sum;
      res.error_estimate += side.err;
      res.evals += side.evals;
      if (!side.converged) res.converged = false;
    }
    if (sr) {
      ShellSide side =
          peel_shells(f, q, -1, w, tol,
                      eval_budget > res.evals ? eval_budget - res.evals : 0,
                      res.trace, running);
      res.value += side.sum;
      res.error_estimate += side.err;
      res.evals += side.evals;
      if (!side.converged) res.converged = false;
    }
  }
  return res;
}

// ==================== control-function quotients =======================

namespace {

void validate_mc_options(const MCOptions& opt) {
  if (!(opt.h0 > 0)) throw PreconditionError("h0 must be positive");
  if (opt.levels <= 0) throw PreconditionError("levels must be positive");
  if (opt.tail_window <= 0 || opt.tail_window > opt.levels)
    throw PreconditionError("tail_window must lie in [1, levels]");
  if (!(opt.threshold > 0)) throw PreconditionError("threshold must be positive");
}

}  // namespace

MCReport mc_alpha_check(const Function1D& f, const Function1D& F,
                        const Function1D& G, const Function1D& phi,
                        double alpha, const std::vector<double>& samples,
                        const MCOptions& opt) {
  require_fn(f, "integrand");
  require_fn(F, "candidate integral");
  require_fn(G, "integrator");
  require_fn(phi, "control function");
  if (!(alpha >= 1)) throw PreconditionError("alpha must be at least 1");
  if (samples.empty()) throw PreconditionError("no sample points");
  validate_mc_options(opt);

  MCReport rep;
  rep.threshold = opt.threshold;
  rep.note = kTrialNote;
  for (double x : samples) {
    MCPointTrace tr;
    tr.x = x;
    const double Fx = F.fn(x);
    const double Gx = G.fn(x);
    const double px = phi.fn(x);
    const double fx = f.fn(x);
    for (int l = 0; l < opt.levels; ++l) {
      const double h = opt.h0 * std::ldexp(1.0, -l);
      double level = 0.0;
      for (double sh : {h, -h}) {
        const double den = phi.fn(x + alpha * sh) - px;
        if (!((sh > 0 && den > 0) || (sh < 0 && den < 0)))
          throw PreconditionError(
              "control function fails to increase between " +
              std::to_string(x) + " and " + std::to_string(x + alpha * sh));
        const double num = F.fn(x + sh) - Fx - fx * (G.fn(x + sh) - Gx);
        level = std::max(level, std::fabs(num / den));
      }
      tr.level_max.push_back(level);
    }
    tr.tail = 0.0;
    for (int l = opt.levels - opt.tail_window; l < opt.levels; ++l)
      tr.tail = std::max(tr.tail, tr.level_max[static_cast<std::size_t>(l)]);
    if (tr.tail > rep.worst_tail) {
      rep.worst_tail = tr.tail;
      rep.worst_x = x;
    }
    rep.points.push_back(std::move(tr));
  }
  rep.refuted = rep.worst_tail >= opt.threshold;
  return rep;
}

ControlOrder control_increment_order(const Function1D& phi, double alpha,
                                     double beta,
                                     const std::vector<double>& samples,
                                     const MCOptions& opt) {
  require_fn(phi, "control function");
  if (!(alpha > 0) || !(beta >= alpha))
    throw PreconditionError("need 0 < alpha <= beta");
  validate_mc_options(opt);
  ControlOrder out;
  for (double x : samples) {
    const double px = phi.fn(x);
    for (int l = 0; l < opt.levels; ++l) {
      const double h = opt.h0 * std::ldexp(1.0, -l);
      for (double sh : {h, -h}) {
        const double da = std::fabs(phi.fn(x + alpha * sh) - px);
        const double db = std::fabs(phi.fn(x + beta * sh) - px);
        ++out.checked;
        if (da > db) {
          out.ordered = false;
          out.violating_x = x;
          out.violating_h = sh;
          return out;
        }
      }
    }
  }
  return out;
}

}  // namespace gaugekit
