#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <string>

#include "gaugekit/io.hpp"

using namespace gaugekit;

namespace {

Figure unit_square() { return make_figure(2, {make_cube(0, {0, 0})}); }

std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("rationals and points survive the json round trip") {
  CHECK(rat_to_json(Rat(-3, 8)) == "-3/8");
  CHECK(rat_from_json(Json("7/2"), "x") == Rat(7, 2));
  CHECK(rat_from_json(Json(5), "x") == Rat(5));
  CHECK_THROWS_AS(rat_from_json(Json(1.5), "x"), PreconditionError);

  RatPoint p{Rat(1, 2), Rat(-4)};
  CHECK(point_from_json(point_to_json(p), "p") == p);
}

TEST_CASE("figures and bv sets round trip exactly") {
  Figure f = make_figure(2, {make_cube(1, {0, 0}), make_cube(1, {1, 0}),
                             make_cube(2, {0, 2})});
  CHECK(figure_from_json(figure_to_json(f)) == f);
  CHECK(figure_to_json(f).dump() == figure_to_json(f).dump());

  BVSet1D s = make_bvset({{Rat(0), Rat(1, 3)}, {Rat(1, 2), Rat(2)}});
  CHECK(bvset_from_json(bvset_to_json(s)) == s);

  CHECK(thrown_message([] {
          figure_from_json(Json{{"dim", 2}});
        }).find("'cubes'") != std::string::npos);
  CHECK_THROWS_AS(
      figure_from_json(Json{
          {"dim", 2},
          {"cubes", Json::array({Json{{"level", 0}, {"index", {1}}}})}}),
      PreconditionError);
}

TEST_CASE("field descriptors build the catalog objects") {
  Polynomial p = make_polynomial(
      2, {{Rat(3, 2), {2, 0}}, {Rat(-1), {0, 1}}});
  Json pj = polynomial_to_json(p);
  Polynomial back = polynomial_from_json(pj);
  CHECK(polynomial_to_json(back).dump() == pj.dump());
  CHECK(back.eval({2.0, 5.0}) == p.eval({2.0, 5.0}));

  ScalarField s = scalar_field_from_json(
      Json{{"catalog", "coordinate-sum"}, {"dim", 3}});
  CHECK(s.eval({1.0, 2.0, 3.0}) == 6.0);

  VectorField u = vector_field_from_json(
      Json{{"catalog", "linear"}, {"dim", 2}});
  CHECK(u.eval({3.0, 4.0}, 1) == 4.0);

  Function1D g = function1d_from_json(Json{{"catalog", "square"}});
  CHECK(g.fn(3.0) == 9.0);

  CHECK_THROWS_AS(scalar_field_from_json(Json{{"dim", 1}}),
                  PreconditionError);
}

TEST_CASE("charge descriptors round trip through their json form") {
  Json descriptors = Json::array({
      Json{{"kind", "lebesgue"}, {"dim", 2}},
      Json{{"kind", "density"},
           {"field", Json{{"catalog", "coordinate-sum"}, {"dim", 2}}}},
      Json{{"kind", "flux"},
           {"field", Json{{"catalog", "linear"}, {"dim", 2}}}},
      Json{{"kind", "function"},
           {"function", Json{{"catalog", "cantor"}}}},
      Json{{"kind", "segment-measure"},
           {"dim", 2},
           {"base", Json::array({"0", "0"})},
           {"axis", 0},
           {"length", "1/2"}},
      Json{{"kind", "restricted"},
           {"base", Json{{"kind", "lebesgue"}, {"dim", 2}}},
           {"window", figure_to_json(unit_square())}},
  });
  for (const Json& d : descriptors) {
    ChargePtr c = charge_from_json(d);
    Json once = charge_to_json(c);
    Json twice = charge_to_json(charge_from_json(once));
    CHECK(once.dump() == twice.dump());
  }

  ChargePtr combo = charge_from_json(Json{
      {"kind", "combination"},
      {"parts",
       Json::array({Json::array({2.0, Json{{"kind", "lebesgue"}, {"dim", 2}}}),
                    Json::array({-1.0,
                                 Json{{"kind", "lebesgue"}, {"dim", 2}}})})}});
  CHECK(charge_eval(combo, unit_square()) == doctest::Approx(1.0));

  CHECK(thrown_message([] {
          charge_from_json(Json{{"kind", "banana"}});
        }).find("banana") != std::string::npos);
}

TEST_CASE("gauge descriptors build working gauges") {
  Gauge c = gauge_from_json(Json{{"kind", "constant"}, {"dim", 1},
                                 {"delta", 0.25}});
  CHECK(c.at(Rat(1, 3)) == 0.25);

  Gauge scaled = gauge_from_json(Json{
      {"kind", "scaled"},
      {"base", Json{{"kind", "constant"}, {"dim", 1}, {"delta", 0.25}}},
      {"factor", 0.5}});
  CHECK(scaled.at(Rat(0)) == 0.125);

  Gauge dist = gauge_from_json(Json{{"kind", "distance"},
                                    {"dim", 1},
                                    {"cap", 1.0},
                                    {"points", Json::array({Json::array(
                                        {"1/2"})})}});
  CHECK(dist.at(Rat(1, 2)) == 0.0);
  CHECK(dist.at(Rat(3, 4)) == 0.25);

  Gauge osc = gauge_from_json(Json{{"kind", "osc-profile"}, {"eps", 0.01}});
  Gauge direct = make_osc_profile_gauge(0.01);
  CHECK(osc.at(Rat(1, 4)) == direct.at(Rat(1, 4)));

  CHECK(thrown_message([] {
          gauge_from_json(Json{{"kind", "constant"}, {"dim", 1}});
        }).find("'delta'") != std::string::npos);
}

TEST_CASE("claim files parse with defaults and name bad fields") {
  Json j{{"notion", "packing-r-star"},
         {"f", Json{{"constant", 1.0}, {"dim", 2}}},
         {"F", Json{{"kind", "lebesgue"}, {"dim", 2}}},
         {"G", Json{{"kind", "lebesgue"}, {"dim", 2}}},
         {"domain", figure_to_json(unit_square())}};
  IntegralClaim claim = claim_from_json(j);
  CHECK(claim.notion == IntegralNotion::PackingRStar);
  CHECK(claim.tau == Rat(1));
  CHECK(claim.eps_schedule.empty());
  CHECK(claim.alpha == 1.0);
  CHECK(claim.domain == unit_square());

  j["tau"] = "1/2";
  j["eps"] = Json::array({"1/2", "1/10"});
  j["alpha"] = 2.0;
  claim = claim_from_json(j);
  CHECK(claim.tau == Rat(1, 2));
  REQUIRE(claim.eps_schedule.size() == 2);
  CHECK(claim.eps_schedule[1] == Rat(1, 10));
  CHECK(claim.alpha == 2.0);

  for (IntegralNotion n :
       {IntegralNotion::PackingR, IntegralNotion::PfefferRIntrinsic,
        IntegralNotion::MCalpha})
    CHECK(notion_from_name(notion_name(n)) == n);

  j["notion"] = "no-such-notion";
  CHECK(thrown_message([&] { claim_from_json(j); }).find("no-such-notion") !=
        std::string::npos);
  j.erase("notion");
  CHECK(thrown_message([&] { claim_from_json(j); }).find("'notion'") !=
        std::string::npos);
}

TEST_CASE("reports serialize canonically and to parseable json") {
  HarnessReport hr;
  hr.refuted = true;
  hr.eps_reported = Rat(1, 100);
  hr.worst_sum = 0.25;
  hr.trials.push_back({0.25, 3});
  hr.witness_packing.push_back({RatPoint{Rat(1, 2), Rat(1, 2)}, Rat(1, 8)});
  Json j = harness_report_to_json(hr);
  CHECK(j["refuted"] == true);
  CHECK(j["eps"] == "1/100");
  CHECK(j["trials"][0]["pieces"] == 3);
  CHECK(Json::parse(j.dump(2)) == j);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(std::is_sorted(keys.begin(), keys.end()));

  HKReport hk;
  hk.eps_reported = Rat(1, 10);
  hk.witness.push_back({Rat(0), Rat(1, 2), Rat(1, 4)});
  Json hj = hk_report_to_json(hk);
  CHECK(hj["witness"][0]["tag"] == "1/4");

  MCReport mc;
  mc.points.push_back({0.5, {0.1, 0.05}, 0.05});
  CHECK(mc_report_to_json(mc)["points"][0]["level_max"].size() == 2);

  GaussGreenResult gg{1.0, 1.0, 0.0, 0.0};
  CHECK(gauss_green_to_json(gg)["flux"] == 1.0);

  HKIntegralResult hi;
  hi.trace.push_back({0.5, 0.1, 0.6});
  CHECK(hk_integral_to_json(hi)["trace"][0]["width"] == 0.5);
}

TEST_CASE("json files write and load back identically") {
  Json j{{"figure", figure_to_json(unit_square())}, {"seed", 7}};
  const std::string path = "/tmp/gaugekit_io_test.json";
  write_json_file(path, j);
  CHECK(load_json_file(path) == j);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_json_file("/tmp/gaugekit_io_missing.json"),
                  PreconditionError);

  CHECK(csv_row({"a", "b,c", "d\"e"}) == "a,\"b,c\",\"d\"\"e\"");
  CHECK(csv_row({"plain", "text"}) == "plain,text");
}
