#pragma once

// Integrand catalog: polynomials with exact rational coefficients (with
// symbolic differentiation and box integration), named vector and scalar
// fields, and the 1D function library used by interval integration and
// control-function convergence checks.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaugekit/geometry.hpp"
#include "gaugekit/rational.hpp"

namespace gaugekit {

// ============================ polynomials ==============================

struct Monomial {
  Rat coef;
  std::vector<unsigned> powers;
};

struct Polynomial {
  int dim = 1;
  std::vector<Monomial> terms;

  double eval(const std::vector<double>& x) const;
  Rat eval_exact(const RatPoint& x) const;
};

Polynomial make_polynomial(int dim, std::vector<Monomial> terms);
Polynomial poly_derivative(const Polynomial& p, int axis);

// Exact integral over a box; if fixed_axis >= 0 the polynomial is instead
// integrated over the (dim-1)-face where that coordinate equals
// fixed_value.
Rat poly_integral_box(const Polynomial& p, const std::vector<Rat>& lo,
                      const std::vector<Rat>& hi, int fixed_axis = -1,
                      const Rat& fixed_value = Rat(0));

// ============================ scalar fields ============================

struct ScalarField {
  int dim = 1;
  std::string name;  // catalog name, or "polynomial"
  std::optional<Polynomial> poly;
  std::function<double(const std::vector<double>&)> fn;

  bool is_polynomial() const { return poly.has_value(); }
  double eval(const std::vector<double>& x) const;
};

// Catalog: "one", "zero", "coordinate-sum", "half-space-step" (indicator
// of x0 <= 1/2), "oscillatory-derivative" (derivative of the x^2 sin x^-2
// profile in the first coordinate; 0 on the singular hyperplane).
ScalarField scalar_from_catalog(const std::string& name, int dim);
ScalarField scalar_from_polynomial(Polynomial p);

// ============================ vector fields ============================

struct VectorField {
  int dim = 1;
  std::string name;  // catalog name, or "polynomial"
  std::vector<Polynomial> components;  // empty for non-polynomial catalogs
  std::function<double(const std::vector<double>&, int)> fn;
  std::function<double(const std::vector<double>&)> divergence_fn;

  bool is_polynomial() const { return !components.empty(); }
  double eval(const std::vector<double>& x, int comp) const;
  bool has_divergence() const;
  double divergence(const std::vector<double>& x) const;
};

// Catalog: "linear" (u_i = x_i), "quadratic" (u_i = x_i^2), "rotational"
// ((-x2, x1, 0, ...)), "singular-sin" (u_i = x_i^2 sin(x_i^-2), the
// everywhere-differentiable field whose pointwise divergence is not
// locally integrable at the origin).
VectorField field_from_catalog(const std::string& name, int dim);
VectorField field_from_polynomials(std::vector<Polynomial> components);

// Scalar field of the (symbolic when polynomial, declared otherwise)
// divergence of u.  Throws PreconditionError if none is known.
ScalarField divergence_field(const VectorField& u);

// ============================ 1D functions =============================

// x^2 sin(1/x^2) profile and its pointwise derivative (both 0 at 0).
double osc_profile(double t);
double osc_profile_deriv(double t);

// The middle-thirds singular monotone function on [0,1], clamped outside.
double cantor_function(double x);

struct Function1D {
  std::string name;
  std::function<double(double)> fn;
  double operator()(double x) const { return fn(x); }
};

// Catalog: "identity", "zero", "square", "x2sin" (the oscillation
// profile), "x2sin-derivative", "cantor", "arctan", "sin".
Function1D function1d_from_catalog(const std::string& name);
Function1D function1d_from_polynomial(const Polynomial& p);

}  // namespace gaugekit
