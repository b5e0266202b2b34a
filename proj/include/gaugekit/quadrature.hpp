#pragma once

// Numeric integration: tensor Gauss-Legendre rules over boxes (used by the
// flux and density charges) and an adaptive Gauss-Kronrod integrator for
// 1D improper integrals.

#include <cstdint>
#include <functional>
#include <vector>

namespace gaugekit {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Cached Legendre rule with `order` points, order in [1, 40].
const GaussRule& gauss_rule(int order);

// Tensor-product integral of f over the box [lo, hi]; dim may be 0, in
// which case f is evaluated once at the empty point (useful for 0-faces).
double integrate_box(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& lo,
                     const std::vector<double>& hi, int order);

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::uint64_t evals = 0;
  bool converged = true;
};

// Adaptive G7/K15 with an absolute tolerance and an evaluation budget.
// Never throws on budget exhaustion: reports converged=false instead so
// callers can fold the flag into their own verdicts.
AdaptiveResult integrate_adaptive_1d(const std::function<double(double)>& f,
                                     double a, double b, double abs_tol,
                                     std::uint64_t max_evals);

}  // namespace gaugekit
