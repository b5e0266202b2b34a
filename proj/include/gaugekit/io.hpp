#pragma once

// JSON serialization of the geometry, field, charge, gauge, and claim
// descriptors, plus the report types.  Canonical form: object keys
// sorted, rationals as "p/q" strings, doubles as shortest round-trip
// decimals, so identical inputs produce byte-identical files.
//
// Descriptor schemas (parse direction):
//   rational     "p/q" string, or a plain integer
//   point        [rational, ...]
//   figure       {"dim": n, "cubes": [{"level": k, "index": [i, ...]}]}
//   bvset        {"intervals": [[rational, rational], ...]}
//   polynomial   {"dim": n, "terms": [{"coef": rational, "powers": [p, ...]}]}
//   scalar       {"catalog": name, "dim": n} | {"polynomial": polynomial}
//   vector       {"catalog": name, "dim": n} | {"components": [polynomial, ...]}
//   function1d   {"catalog": name}
//   integrand    {"constant": v, "dim": n} | {"scalar": scalar}
//   charge       {"kind": "flux" | "density", "field": ..., "order"?: q}
//                {"kind": "lebesgue", "dim": n}
//                {"kind": "function", "function": function1d}
//                {"kind": "segment-measure", "dim": n, "base": point,
//                 "axis": a, "length": rational}
//                {"kind": "restricted", "base": charge, "window": figure}
//                {"kind": "combination", "parts": [[weight, charge], ...]}
//   gauge        {"kind": "constant", "dim": n, "delta": d}
//                {"kind": "distance", "dim": n, "cap": c, "points"?: [point],
//                 "planes"?: [[axis, rational], ...]}
//                {"kind": "boundary-distance", "figure": figure, "cap": c}
//                {"kind": "osc-profile", "eps": e}
//                {"kind": "scaled", "base": gauge, "factor": f}
//                {"kind": "min", "a": gauge, "b": gauge}
//   claim        {"notion": name, "f": integrand, "F": charge, "G": charge,
//                 "domain": figure, "tau"?: rational, "eps"?: [rational],
//                 "alpha"?: a}
//     notions: "packing-r", "packing-r-star", "pfeffer-r",
//              "pfeffer-r-intrinsic", "r-star", "hk", "hks", "mc-alpha"
//
// Parsers throw PreconditionError naming the offending field.  Gauges
// and claims hold closures, so only descriptor-built ones serialize
// back; reports serialize one way only.

#include <string>

#include <json.hpp>

#include "gaugekit/charges.hpp"
#include "gaugekit/harness.hpp"
#include "gaugekit/hk1d.hpp"

namespace gaugekit {

using Json = nlohmann::json;

Json rat_to_json(const Rat& r);
Rat rat_from_json(const Json& j, const std::string& field);

Json point_to_json(const RatPoint& p);
RatPoint point_from_json(const Json& j, const std::string& field);

Json figure_to_json(const Figure& f);
Figure figure_from_json(const Json& j);

Json bvset_to_json(const BVSet1D& s);
BVSet1D bvset_from_json(const Json& j);

Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j);

ScalarField scalar_field_from_json(const Json& j);
VectorField vector_field_from_json(const Json& j);
Function1D function1d_from_json(const Json& j);

Json charge_to_json(const ChargePtr& c);
ChargePtr charge_from_json(const Json& j);

Gauge gauge_from_json(const Json& j);

Integrand integrand_from_json(const Json& j);

std::string notion_name(IntegralNotion n);
IntegralNotion notion_from_name(const std::string& name);

IntegralClaim claim_from_json(const Json& j);

Json ball_to_json(const Ball& b);
Json tagged_interval_to_json(const TaggedInterval& iv);
Json tagged_figure_to_json(const TaggedFigure& tf);

Json harness_report_to_json(const HarnessReport& r);
Json hk_report_to_json(const HKReport& r);
Json hk_integral_to_json(const HKIntegralResult& r);
Json mc_report_to_json(const MCReport& r);
Json gauss_green_to_json(const GaussGreenResult& r);

// Throws PreconditionError with the path and parser message on failure.
Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// RFC 4180 quoting; joins with commas, no trailing newline.
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace gaugekit
