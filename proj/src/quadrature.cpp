#include "gaugekit/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace gaugekit {

// ============================ Gauss-Legendre ===========================

namespace {

// P_order and P_{order-1} via the three-term recurrence.
std::pair<double, double> legendre_pair(int order, double x) {
  double prev = 1.0, cur = x;
  for (int m = 2; m <= order; ++m) {
    double next = ((2 * m - 1) * x * cur - (m - 1) * prev) / m;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

GaussRule build_rule(int order) {
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  if (order == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
    return r;
  }
  for (int k = 0; k < order; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (order + 0.5));
    double deriv = 1.0;
    for (int it = 0; it < 100; ++it) {
      auto [pn, pn1] = legendre_pair(order, x);
      deriv = order * (x * pn - pn1) / (x * x - 1.0);
      double dx = pn / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [pn, pn1] = legendre_pair(order, x);
    deriv = order * (x * pn - pn1) / (x * x - 1.0);
    r.nodes[k] = x;
    r.weights[k] = 2.0 / ((1.0 - x * x) * deriv * deriv);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  if (order < 1 || order > 40)
    throw std::invalid_argument("gauss rule order out of range");
  static std::map<int, GaussRule> cache;
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double integrate_box(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& lo,
                     const std::vector<double>& hi, int order) {
  int dim = static_cast<int>(lo.size());
  if (dim == 0) return f({});
  const GaussRule& rule = gauss_rule(order);
  std::vector<int> idx(dim, 0);
  std::vector<double> x(dim);
  double jac = 1.0;
  for (int i = 0; i < dim; ++i) jac *= 0.5 * (hi[i] - lo[i]);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < dim; ++i) {
      x[i] = 0.5 * (lo[i] + hi[i]) + 0.5 * (hi[i] - lo[i]) * rule.nodes[idx[i]];
      w *= rule.weights[idx[i]];
    }
    sum += w * f(x);
    int axis = 0;
    while (axis < dim) {
      if (++idx[axis] < order) break;
      idx[axis] = 0;
      ++axis;
    }
    if (axis == dim) break;
  }
  return sum * jac;
}

// ============================ adaptive G7/K15 ==========================

namespace {

constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kG7Weights[4] = {0.129484966168870, 0.279705391489277,
                                  0.381830050505119, 0.417959183673469};

struct PanelEval {
  double i15;
  double err;
};

PanelEval eval_panel(const std::function<double(double)>& f, double a,
                     double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double i7 = kG7Weights[3] * fc;
  double i15 = kK15Weights[7] * fc;
  for (int k = 0; k < 7; ++k) {
    double v = f(c - h * kK15Nodes[k]) + f(c + h * kK15Nodes[k]);
    i15 += kK15Weights[k] * v;
    if (k % 2 == 1) i7 += kG7Weights[k / 2] * v;
  }
  i15 *= h;
  i7 *= h;
  return {i15, std::abs(i15 - i7)};
}

}  // namespace

AdaptiveResult integrate_adaptive_1d(const std::function<double(double)>& f,
                                     double a, double b, double abs_tol,
                                     std::uint64_t max_evals) {
  AdaptiveResult out;
  if (a == b) return out;
  struct Item {
    double a, b, tol;
  };
  std::vector<Item> stack{{a, b, abs_tol}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (out.evals + 15 > max_evals) {
      // fall back to accepting the panel as-is
      PanelEval pe = eval_panel(f, it.a, it.b);
      out.evals += 15;
      out.value += pe.i15;
      out.error_estimate += pe.err;
      out.converged = false;
      continue;
    }
    PanelEval pe = eval_panel(f, it.a, it.b);
    out.evals += 15;
    double width = it.b - it.a;
    if (pe.err <= it.tol || width < 1e-15 * (std::abs(it.a) + 1.0)) {
      out.value += pe.i15;
      out.error_estimate += pe.err;
    } else {
      double m = 0.5 * (it.a + it.b);
      stack.push_back({it.a, m, it.tol * 0.5});
      stack.push_back({m, it.b, it.tol * 0.5});
    }
  }
  return out;
}

}  // namespace gaugekit
