#include "gaugekit/io.hpp"

#include <fstream>
#include <sstream>

namespace gaugekit {

namespace {

const Json& require(const Json& j, const char* key, const char* ctx) {
  if (!j.is_object() || !j.contains(key))
    throw PreconditionError(std::string(ctx) + ": missing field '" + key +
                            "'");
  return j.at(key);
}

int require_int(const Json& j, const char* key, const char* ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_number_integer())
    throw PreconditionError(std::string(ctx) + ": field '" + key +
                            "' must be an integer");
  return v.get<int>();
}

double require_number(const Json& j, const char* key, const char* ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_number())
    throw PreconditionError(std::string(ctx) + ": field '" + key +
                            "' must be a number");
  return v.get<double>();
}

std::string require_string(const Json& j, const char* key, const char* ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_string())
    throw PreconditionError(std::string(ctx) + ": field '" + key +
                            "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Json rat_to_json(const Rat& r) { return rat_str(r); }

Rat rat_from_json(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return rat_parse(j.get<std::string>());
    } catch (const std::exception& e) {
      throw PreconditionError("field '" + field + "': " + e.what());
    }
  }
  throw PreconditionError("field '" + field +
                          "' must be a \"p/q\" string or an integer");
}

Json point_to_json(const RatPoint& p) {
  Json out = Json::array();
  for (const Rat& c : p) out.push_back(rat_to_json(c));
  return out;
}

RatPoint point_from_json(const Json& j, const std::string& field) {
  if (!j.is_array())
    throw PreconditionError("field '" + field + "' must be an array");
  RatPoint p;
  for (const Json& c : j) p.push_back(rat_from_json(c, field));
  return p;
}

Json figure_to_json(const Figure& f) {
  Json cubes = Json::array();
  for (const DyadicCube& c : f.cubes)
    cubes.push_back(Json{{"index", c.index}, {"level", c.level}});
  return Json{{"cubes", std::move(cubes)}, {"dim", f.dim}};
}

Figure figure_from_json(const Json& j) {
  const int dim = require_int(j, "dim", "figure");
  const Json& cubes = require(j, "cubes", "figure");
  if (!cubes.is_array())
    throw PreconditionError("figure: field 'cubes' must be an array");
  std::vector<DyadicCube> out;
  for (const Json& c : cubes) {
    const int level = require_int(c, "level", "figure.cubes");
    const Json& idx = require(c, "index", "figure.cubes");
    if (!idx.is_array())
      throw PreconditionError("figure.cubes: field 'index' must be an array");
    std::vector<std::int64_t> index;
    for (const Json& v : idx) {
      if (!v.is_number_integer())
        throw PreconditionError(
            "figure.cubes: field 'index' must hold integers");
      index.push_back(v.get<std::int64_t>());
    }
    if (static_cast<int>(index.size()) != dim)
      throw PreconditionError("figure.cubes: field 'index' has wrong arity");
    out.push_back(make_cube(level, std::move(index)));
  }
  return make_figure(dim, std::move(out));
}

Json bvset_to_json(const BVSet1D& s) {
  Json intervals = Json::array();
  for (const auto& [a, b] : s.intervals)
    intervals.push_back(Json::array({rat_to_json(a), rat_to_json(b)}));
  return Json{{"intervals", std::move(intervals)}};
}

BVSet1D bvset_from_json(const Json& j) {
  const Json& intervals = require(j, "intervals", "bvset");
  if (!intervals.is_array())
    throw PreconditionError("bvset: field 'intervals' must be an array");
  std::vector<std::pair<Rat, Rat>> out;
  for (const Json& iv : intervals) {
    if (!iv.is_array() || iv.size() != 2)
      throw PreconditionError("bvset: field 'intervals' must hold pairs");
    out.emplace_back(rat_from_json(iv[0], "intervals"),
                     rat_from_json(iv[1], "intervals"));
  }
  return make_bvset(std::move(out));
}

Json polynomial_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const Monomial& m : p.terms)
    terms.push_back(
        Json{{"coef", rat_to_json(m.coef)}, {"powers", m.powers}});
  return Json{{"dim", p.dim}, {"terms", std::move(terms)}};
}

Polynomial polynomial_from_json(const Json& j) {
  const int dim = require_int(j, "dim", "polynomial");
  const Json& terms = require(j, "terms", "polynomial");
  if (!terms.is_array())
    throw PreconditionError("polynomial: field 'terms' must be an array");
  std::vector<Monomial> out;
  for (const Json& t : terms) {
    Monomial m;
    m.coef = rat_from_json(require(t, "coef", "polynomial.terms"), "coef");
    const Json& powers = require(t, "powers", "polynomial.terms");
    if (!powers.is_array())
      throw PreconditionError(
          "polynomial.terms: field 'powers' must be an array");
    for (const Json& p2 : powers) m.powers.push_back(p2.get<unsigned>());
    out.push_back(std::move(m));
  }
  return make_polynomial(dim, std::move(out));
}

ScalarField scalar_field_from_json(const Json& j) {
  if (j.contains("polynomial"))
    return scalar_from_polynomial(polynomial_from_json(j.at("polynomial")));
  return scalar_from_catalog(require_string(j, "catalog", "scalar"),
                             require_int(j, "dim", "scalar"));
}

VectorField vector_field_from_json(const Json& j) {
  if (j.contains("components")) {
    const Json& comps = j.at("components");
    if (!comps.is_array())
      throw PreconditionError("vector: field 'components' must be an array");
    std::vector<Polynomial> out;
    for (const Json& c : comps) out.push_back(polynomial_from_json(c));
    return field_from_polynomials(std::move(out));
  }
  return field_from_catalog(require_string(j, "catalog", "vector"),
                            require_int(j, "dim", "vector"));
}

Function1D function1d_from_json(const Json& j) {
  return function1d_from_catalog(require_string(j, "catalog", "function1d"));
}

Json charge_to_json(const ChargePtr& c) {
  if (!c) throw PreconditionError("charge: null");
  switch (c->kind) {
    case ChargeKind::Flux: {
      Json field = c->field.is_polynomial()
                       ? Json{{"components", Json::array()}}
                       : Json{{"catalog", c->field.name}, {"dim", c->dim}};
      if (c->field.is_polynomial()) {
        for (const Polynomial& p : c->field.components)
          field["components"].push_back(polynomial_to_json(p));
      }
      return Json{{"field", std::move(field)},
                  {"kind", "flux"},
                  {"order", c->quad_order}};
    }
    case ChargeKind::Density: {
      if (c->density.name == "one")
        return Json{{"dim", c->dim}, {"kind", "lebesgue"}};
      Json field =
          c->density.is_polynomial()
              ? Json{{"polynomial", polynomial_to_json(*c->density.poly)}}
              : Json{{"catalog", c->density.name}, {"dim", c->dim}};
      return Json{{"field", std::move(field)},
                  {"kind", "density"},
                  {"order", c->quad_order}};
    }
    case ChargeKind::FunctionDiff:
      return Json{{"function", Json{{"catalog", c->f1.name}}},
                  {"kind", "function"}};
    case ChargeKind::SegmentMeasure:
      return Json{{"axis", c->segment.axis},
                  {"base", point_to_json(c->segment.base)},
                  {"dim", c->dim},
                  {"kind", "segment-measure"},
                  {"length", rat_to_json(c->segment.length)}};
    case ChargeKind::Restricted:
      return Json{{"base", charge_to_json(c->base)},
                  {"kind", "restricted"},
                  {"window", figure_to_json(c->window)}};
    case ChargeKind::Combination: {
      Json parts = Json::array();
      for (const auto& [w, part] : c->parts)
        parts.push_back(Json::array({w, charge_to_json(part)}));
      return Json{{"kind", "combination"}, {"parts", std::move(parts)}};
    }
  }
  throw PreconditionError("charge: unknown kind");
}

ChargePtr charge_from_json(const Json& j) {
  const std::string kind = require_string(j, "kind", "charge");
  if (kind == "flux")
    return make_flux_charge(vector_field_from_json(require(j, "field",
                                                           "charge")),
                            j.value("order", 7));
  if (kind == "density")
    return make_density_charge(scalar_field_from_json(require(j, "field",
                                                              "charge")),
                               j.value("order", 7));
  if (kind == "lebesgue")
    return make_lebesgue_charge(require_int(j, "dim", "charge"));
  if (kind == "function")
    return make_function_charge(
        function1d_from_json(require(j, "function", "charge")));
  if (kind == "segment-measure") {
    SegmentDescriptor seg;
    seg.base = point_from_json(require(j, "base", "charge"), "base");
    seg.axis = require_int(j, "axis", "charge");
    seg.length = rat_from_json(require(j, "length", "charge"), "length");
    return make_segment_measure_charge(std::move(seg),
                                      require_int(j, "dim", "charge"));
  }
  if (kind == "restricted")
    return restrict_charge(charge_from_json(require(j, "base", "charge")),
                           figure_from_json(require(j, "window", "charge")));
  if (kind == "combination") {
    const Json& parts = require(j, "parts", "charge");
    if (!parts.is_array())
      throw PreconditionError("charge: field 'parts' must be an array");
    std::vector<std::pair<double, ChargePtr>> out;
    for (const Json& p : parts) {
      if (!p.is_array() || p.size() != 2)
        throw PreconditionError(
            "charge: field 'parts' must hold [weight, charge] pairs");
      out.emplace_back(p[0].get<double>(), charge_from_json(p[1]));
    }
    return combine_charges(std::move(out));
  }
  throw PreconditionError("charge: unknown kind '" + kind + "'");
}

Gauge gauge_from_json(const Json& j) {
  const std::string kind = require_string(j, "kind", "gauge");
  if (kind == "constant")
    return make_constant_gauge(require_int(j, "dim", "gauge"),
                               require_number(j, "delta", "gauge"));
  if (kind == "distance") {
    ZeroSet zs;
    if (j.contains("points"))
      for (const Json& p : j.at("points"))
        zs.points.push_back(point_from_json(p, "points"));
    if (j.contains("planes"))
      for (const Json& p : j.at("planes")) {
        if (!p.is_array() || p.size() != 2)
          throw PreconditionError(
              "gauge: field 'planes' must hold [axis, offset] pairs");
        zs.planes.emplace_back(p[0].get<int>(),
                               rat_from_json(p[1], "planes"));
      }
    return make_distance_gauge(require_int(j, "dim", "gauge"),
                               require_number(j, "cap", "gauge"),
                               std::move(zs));
  }
  if (kind == "boundary-distance")
    return make_boundary_distance_gauge(
        figure_from_json(require(j, "figure", "gauge")),
        require_number(j, "cap", "gauge"));
  if (kind == "osc-profile")
    return make_osc_profile_gauge(require_number(j, "eps", "gauge"));
  if (kind == "scaled")
    return make_scaled_gauge(gauge_from_json(require(j, "base", "gauge")),
                             require_number(j, "factor", "gauge"));
  if (kind == "min")
    return make_min_gauge(gauge_from_json(require(j, "a", "gauge")),
                          gauge_from_json(require(j, "b", "gauge")));
  throw PreconditionError("gauge: unknown kind '" + kind + "'");
}

Integrand integrand_from_json(const Json& j) {
  if (j.contains("constant"))
    return integrand_constant(require_int(j, "dim", "integrand"),
                              require_number(j, "constant", "integrand"));
  if (j.contains("scalar"))
    return integrand_from_scalar(scalar_field_from_json(j.at("scalar")));
  throw PreconditionError("integrand: need field 'constant' or 'scalar'");
}

std::string notion_name(IntegralNotion n) {
  switch (n) {
    case IntegralNotion::PackingR: return "packing-r";
    case IntegralNotion::PackingRStar: return "packing-r-star";
    case IntegralNotion::PfefferR: return "pfeffer-r";
    case IntegralNotion::PfefferRIntrinsic: return "pfeffer-r-intrinsic";
    case IntegralNotion::RStar: return "r-star";
    case IntegralNotion::HK: return "hk";
    case IntegralNotion::HKS: return "hks";
    case IntegralNotion::MCalpha: return "mc-alpha";
  }
  throw PreconditionError("notion: unknown value");
}

IntegralNotion notion_from_name(const std::string& name) {
  if (name == "packing-r") return IntegralNotion::PackingR;
  if (name == "packing-r-star") return IntegralNotion::PackingRStar;
  if (name == "pfeffer-r") return IntegralNotion::PfefferR;
  if (name == "pfeffer-r-intrinsic") return IntegralNotion::PfefferRIntrinsic;
  if (name == "r-star") return IntegralNotion::RStar;
  if (name == "hk") return IntegralNotion::HK;
  if (name == "hks") return IntegralNotion::HKS;
  if (name == "mc-alpha") return IntegralNotion::MCalpha;
  throw PreconditionError("notion: unknown name '" + name + "'");
}

IntegralClaim claim_from_json(const Json& j) {
  IntegralClaim claim;
  claim.notion = notion_from_name(require_string(j, "notion", "claim"));
  claim.f = integrand_from_json(require(j, "f", "claim"));
  claim.F = charge_from_json(require(j, "F", "claim"));
  claim.G = charge_from_json(require(j, "G", "claim"));
  claim.domain = figure_from_json(require(j, "domain", "claim"));
  if (j.contains("tau")) claim.tau = rat_from_json(j.at("tau"), "tau");
  if (j.contains("eps"))
    for (const Json& e : j.at("eps"))
      claim.eps_schedule.push_back(rat_from_json(e, "eps"));
  if (j.contains("alpha")) claim.alpha = j.at("alpha").get<double>();
  return claim;
}

Json ball_to_json(const Ball& b) {
  return Json{{"center", point_to_json(b.center)},
              {"radius", rat_to_json(b.radius)}};
}

Json tagged_interval_to_json(const TaggedInterval& iv) {
  return Json{{"a", rat_to_json(iv.a)},
              {"b", rat_to_json(iv.b)},
              {"tag", rat_to_json(iv.tag)}};
}

Json tagged_figure_to_json(const TaggedFigure& tf) {
  return Json{{"piece", figure_to_json(tf.piece)},
              {"tag", point_to_json(tf.tag)}};
}

Json harness_report_to_json(const HarnessReport& r) {
  Json trials = Json::array();
  for (const TrialRecord& t : r.trials)
    trials.push_back(Json{{"pieces", t.pieces}, {"sum", t.sum}});
  Json packing = Json::array();
  for (const Ball& b : r.witness_packing) packing.push_back(ball_to_json(b));
  Json partition = Json::array();
  for (const TaggedFigure& tf : r.witness_partition)
    partition.push_back(tagged_figure_to_json(tf));
  return Json{{"eps", rat_to_json(r.eps_reported)},
              {"note", r.note},
              {"pieces_rejected", r.pieces_rejected},
              {"pieces_sampled", r.pieces_sampled},
              {"refuted", r.refuted},
              {"trials", std::move(trials)},
              {"witness_packing", std::move(packing)},
              {"witness_partition", std::move(partition)},
              {"witness_sum", r.witness_sum},
              {"worst_sum", r.worst_sum}};
}

Json hk_report_to_json(const HKReport& r) {
  Json witness = Json::array();
  for (const TaggedInterval& iv : r.witness)
    witness.push_back(tagged_interval_to_json(iv));
  return Json{{"eps", rat_to_json(r.eps_reported)},
              {"intervals_streamed", r.intervals_streamed},
              {"note", r.note},
              {"refuted", r.refuted},
              {"trial_sums", r.trial_sums},
              {"witness", std::move(witness)},
              {"witness_complete", r.witness_complete},
              {"witness_sum", r.witness_sum},
              {"worst_sum", r.worst_sum}};
}

Json hk_integral_to_json(const HKIntegralResult& r) {
  Json trace = Json::array();
  for (const SingularStage& s : r.trace)
    trace.push_back(Json{
        {"shell", s.shell}, {"total", s.total}, {"width", s.width}});
  return Json{{"converged", r.converged},
              {"error_estimate", r.error_estimate},
              {"evals", r.evals},
              {"trace", std::move(trace)},
              {"value", r.value}};
}

Json mc_report_to_json(const MCReport& r) {
  Json points = Json::array();
  for (const MCPointTrace& p : r.points)
    points.push_back(Json{
        {"level_max", p.level_max}, {"tail", p.tail}, {"x", p.x}});
  return Json{{"note", r.note},
              {"points", std::move(points)},
              {"refuted", r.refuted},
              {"threshold", r.threshold},
              {"worst_tail", r.worst_tail},
              {"worst_x", r.worst_x}};
}

Json gauss_green_to_json(const GaussGreenResult& r) {
  return Json{{"abs_error", r.abs_error},
              {"flux", r.flux},
              {"rel_error", r.rel_error},
              {"volume_integral", r.volume_integral}};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(path + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw PreconditionError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::ostringstream out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ",";
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") != std::string::npos) {
      out << '"';
      for (char c : f) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    } else {
      out << f;
    }
  }
  return out.str();
}

}  // namespace gaugekit
