#include "gaugekit/fields.hpp"

#include <cmath>

namespace gaugekit {

// ============================ polynomials ==============================

double Polynomial::eval(const std::vector<double>& x) const {
  double s = 0.0;
  for (const auto& t : terms) {
    double m = to_double(t.coef);
    for (int i = 0; i < dim; ++i)
      for (unsigned k = 0; k < t.powers[i]; ++k) m *= x[i];
    s += m;
  }
  return s;
}

Rat Polynomial::eval_exact(const RatPoint& x) const {
  Rat s(0);
  for (const auto& t : terms) {
    Rat m = t.coef;
    for (int i = 0; i < dim; ++i) m *= rat_pow(x[i], t.powers[i]);
    s += m;
  }
  return s;
}

Polynomial make_polynomial(int dim, std::vector<Monomial> terms) {
  if (dim < 1) throw PreconditionError("polynomial dimension must be >= 1");
  for (auto& t : terms)
    if (static_cast<int>(t.powers.size()) != dim)
      throw PreconditionError("monomial power list has wrong length");
  Polynomial p;
  p.dim = dim;
  p.terms = std::move(terms);
  return p;
}

Polynomial poly_derivative(const Polynomial& p, int axis) {
  std::vector<Monomial> out;
  for (const auto& t : p.terms) {
    if (t.powers[axis] == 0) continue;
    Monomial d = t;
    d.coef *= static_cast<long>(t.powers[axis]);
    d.powers[axis] -= 1;
    out.push_back(std::move(d));
  }
  return make_polynomial(p.dim, std::move(out));
}

Rat poly_integral_box(const Polynomial& p, const std::vector<Rat>& lo,
                      const std::vector<Rat>& hi, int fixed_axis,
                      const Rat& fixed_value) {
  Rat total(0);
  for (const auto& t : p.terms) {
    Rat m = t.coef;
    for (int i = 0; i < p.dim; ++i) {
      unsigned k = t.powers[i];
      if (i == fixed_axis) {
        m *= rat_pow(fixed_value, k);
      } else {
        m *= (rat_pow(hi[i], k + 1) - rat_pow(lo[i], k + 1)) / Rat(k + 1);
      }
    }
    total += m;
  }
  return total;
}

// ============================ scalar fields ============================

double ScalarField::eval(const std::vector<double>& x) const {
  if (poly) return poly->eval(x);
  return fn(x);
}

ScalarField scalar_from_catalog(const std::string& name, int dim) {
  ScalarField s;
  s.dim = dim;
  s.name = name;
  if (name == "one") {
    s.poly = make_polynomial(dim, {{Rat(1), std::vector<unsigned>(dim, 0)}});
  } else if (name == "zero") {
    s.poly = make_polynomial(dim, {});
  } else if (name == "coordinate-sum") {
    std::vector<Monomial> terms;
    for (int i = 0; i < dim; ++i) {
      std::vector<unsigned> pw(dim, 0);
      pw[i] = 1;
      terms.push_back({Rat(1), pw});
    }
    s.poly = make_polynomial(dim, terms);
  } else if (name == "half-space-step") {
    s.fn = [](const std::vector<double>& x) {
      return x[0] <= 0.5 ? 1.0 : 0.0;
    };
  } else if (name == "oscillatory-derivative") {
    s.fn = [](const std::vector<double>& x) { return osc_profile_deriv(x[0]); };
  } else {
    throw SchemaError("unknown scalar field catalog name: " + name);
  }
  return s;
}

ScalarField scalar_from_polynomial(Polynomial p) {
  ScalarField s;
  s.dim = p.dim;
  s.name = "polynomial";
  s.poly = std::move(p);
  return s;
}

// ============================ vector fields ============================

double VectorField::eval(const std::vector<double>& x, int comp) const {
  if (!components.empty()) return components[comp].eval(x);
  return fn(x, comp);
}

bool VectorField::has_divergence() const {
  return !components.empty() || static_cast<bool>(divergence_fn);
}

double VectorField::divergence(const std::vector<double>& x) const {
  if (!components.empty()) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
      s += poly_derivative(components[i], i).eval(x);
    return s;
  }
  if (!divergence_fn) throw PreconditionError("field has no divergence");
  return divergence_fn(x);
}

VectorField field_from_catalog(const std::string& name, int dim) {
  VectorField u;
  u.dim = dim;
  u.name = name;
  auto unit_power = [dim](int axis, unsigned k) {
    std::vector<unsigned> pw(dim, 0);
    pw[axis] = k;
    return pw;
  };
  if (name == "linear") {
    for (int i = 0; i < dim; ++i)
      u.components.push_back(
          make_polynomial(dim, {{Rat(1), unit_power(i, 1)}}));
  } else if (name == "quadratic") {
    for (int i = 0; i < dim; ++i)
      u.components.push_back(
          make_polynomial(dim, {{Rat(1), unit_power(i, 2)}}));
  } else if (name == "rotational") {
    if (dim < 2)
      throw PreconditionError("rotational field needs dimension >= 2");
    u.components.push_back(make_polynomial(dim, {{Rat(-1), unit_power(1, 1)}}));
    u.components.push_back(make_polynomial(dim, {{Rat(1), unit_power(0, 1)}}));
    for (int i = 2; i < dim; ++i)
      u.components.push_back(make_polynomial(dim, {}));
  } else if (name == "singular-sin") {
    u.fn = [](const std::vector<double>& x, int comp) {
      return osc_profile(x[comp]);
    };
    u.divergence_fn = [dim](const std::vector<double>& x) {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += osc_profile_deriv(x[i]);
      return s;
    };
  } else {
    throw SchemaError("unknown vector field catalog name: " + name);
  }
  return u;
}

VectorField field_from_polynomials(std::vector<Polynomial> components) {
  if (components.empty())
    throw PreconditionError("vector field needs components");
  int dim = static_cast<int>(components.size());
  for (const auto& c : components)
    if (c.dim != dim)
      throw PreconditionError("component dimension mismatch");
  VectorField u;
  u.dim = dim;
  u.name = "polynomial";
  u.components = std::move(components);
  return u;
}

ScalarField divergence_field(const VectorField& u) {
  if (u.is_polynomial()) {
    std::vector<Monomial> terms;
    for (int i = 0; i < u.dim; ++i) {
      Polynomial d = poly_derivative(u.components[i], i);
      terms.insert(terms.end(), d.terms.begin(), d.terms.end());
    }
    return scalar_from_polynomial(make_polynomial(u.dim, std::move(terms)));
  }
  if (!u.divergence_fn)
    throw PreconditionError("field has no declared divergence");
  ScalarField s;
  s.dim = u.dim;
  s.name = u.name + "-divergence";
  s.fn = u.divergence_fn;
  return s;
}

// ============================ 1D functions =============================

double osc_profile(double t) {
  if (t == 0.0) return 0.0;
  return t * t * std::sin(1.0 / (t * t));
}

double osc_profile_deriv(double t) {
  if (t == 0.0) return 0.0;
  double inv2 = 1.0 / (t * t);
  return 2.0 * t * std::sin(inv2) - (2.0 / t) * std::cos(inv2);
}

double cantor_function(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double y = 0.0, scale = 0.5;
  for (int it = 0; it < 60; ++it) {
    if (x <= 1.0 / 3.0) {
      x *= 3.0;
    } else if (x >= 2.0 / 3.0) {
      y += scale;
      x = 3.0 * x - 2.0;
    } else {
      return y + scale;  // landed in a removed middle third
    }
    scale *= 0.5;
  }
  return y;
}

Function1D function1d_from_catalog(const std::string& name) {
  Function1D f;
  f.name = name;
  if (name == "identity") {
    f.fn = [](double x) { return x; };
  } else if (name == "zero") {
    f.fn = [](double) { return 0.0; };
  } else if (name == "square") {
    f.fn = [](double x) { return x * x; };
  } else if (name == "x2sin") {
    f.fn = [](double x) { return osc_profile(x); };
  } else if (name == "x2sin-derivative") {
    f.fn = [](double x) { return osc_profile_deriv(x); };
  } else if (name == "cantor") {
    f.fn = [](double x) { return cantor_function(x); };
  } else if (name == "arctan") {
    f.fn = [](double x) { return std::atan(x); };
  } else if (name == "sin") {
    f.fn = [](double x) { return std::sin(x); };
  } else {
    throw SchemaError("unknown 1D function catalog name: " + name);
  }
  return f;
}

Function1D function1d_from_polynomial(const Polynomial& p) {
  if (p.dim != 1)
    throw PreconditionError("1D function needs a univariate polynomial");
  Function1D f;
  f.name = "polynomial";
  f.fn = [p](double x) { return p.eval({x}); };
  return f;
}

}  // namespace gaugekit
