#include <doctest.h>

#include <set>

#include "flexverif/casestudy.hpp"
#include "flexverif/model_lang.hpp"
#include "flexverif/pctl.hpp"

using namespace flexverif;
using casestudy::HomecareParams;

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(casestudy::validate_params({}));

  HomecareParams no_battery;
  no_battery.battery_capacity = 0;
  CHECK_THROWS_AS(casestudy::validate_params(no_battery), InvalidParams);

  HomecareParams tiny;
  tiny.grid_w = 1;
  tiny.grid_h = 1;
  tiny.robot_init = {0, 0};
  tiny.human_init = {0, 0};  // forced by a 1x1 grid
  tiny.charger = {0, 0};
  CHECK_THROWS_AS(casestudy::validate_params(tiny), InvalidParams);

  HomecareParams greedy;
  greedy.human_move_prob = 0.3;  // 4 * 0.3 > 1
  CHECK_THROWS_AS(casestudy::validate_params(greedy), InvalidParams);
}

TEST_CASE("risk table anchors") {
  CHECK(casestudy::risk(3) == 4);    // below 5
  CHECK(casestudy::risk(5) == 13);   // above 10
  CHECK(casestudy::risk(6) == 25);   // scale maximum
  CHECK(casestudy::risk(1) == 1);
  for (int v = 1; v <= 6; ++v) {
    CHECK(casestudy::risk(v) >= 1);
    CHECK(casestudy::risk(v) <= 25);
    if (v > 1) CHECK(casestudy::risk(v) > casestudy::risk(v - 1));
  }
  CHECK_THROWS_AS(casestudy::risk(0), OutOfRange);
  CHECK_THROWS_AS(casestudy::risk(7), OutOfRange);
  // user tables may override as long as they cover the requested limit
  CHECK(casestudy::risk(2, {2, 3}) == 3);
  CHECK_THROWS_AS(casestudy::risk(3, {2, 3}), OutOfRange);
}

TEST_CASE("generated model round-trips and validates") {
  std::string text = casestudy::generate_model();
  model::ModelAst ast = model::parse(text);
  CHECK(ast.modules.size() == 5);
  std::set<std::string> names;
  for (const auto& m : ast.modules) names.insert(m.name);
  CHECK(names ==
        std::set<std::string>{"robot", "human", "battery", "service",
                              "scheduler"});

  std::string printed = model::print(ast);
  CHECK(model::print(model::parse(printed)) == printed);

  Mdp mdp = model::elaborate(ast);
  CHECK(validate(mdp).ok());
  CHECK(mdp.num_states > 0);
  CHECK(mdp.prop_index("service") >= 0);
}

TEST_CASE("robot and human never share a cell") {
  Mdp mdp = casestudy::build_model();
  int rx = -1, ry = -1, hx = -1, hy = -1;
  for (size_t i = 0; i < mdp.state_var_names.size(); ++i) {
    if (mdp.state_var_names[i] == "rx") rx = static_cast<int>(i);
    if (mdp.state_var_names[i] == "ry") ry = static_cast<int>(i);
    if (mdp.state_var_names[i] == "hx") hx = static_cast<int>(i);
    if (mdp.state_var_names[i] == "hy") hy = static_cast<int>(i);
  }
  REQUIRE(rx >= 0);
  REQUIRE(hy >= 0);
  for (int s = 0; s < mdp.num_states; ++s) {
    const auto& vals = mdp.state_values[s];
    bool collide = vals[rx] == vals[hx] && vals[ry] == vals[hy];
    CHECK_FALSE(collide);
  }
}

TEST_CASE("action attributes cover every robot action") {
  Mdp mdp = casestudy::build_model();
  const auto& speed = mdp.action_attrs.at("speed");
  const auto& cost = mdp.action_attrs.at("cost");
  REQUIRE(speed.size() == mdp.actions.size());
  for (size_t a = 0; a < mdp.actions.size(); ++a) {
    const std::string& name = mdp.actions[a];
    if (name.rfind("go_", 0) == 0) {
      int k = name[5] - '0';
      CHECK(speed[a] == k);
      CHECK(cost[a] == k);  // default energy cost is 1 per cell
    } else {
      CHECK(speed[a] == 0.0);
    }
  }
}

TEST_CASE("default study shape") {
  StudyConfig cfg = casestudy::default_study();
  CHECK(cfg.lattice.size() == 540);  // 10 * 6 * 9
  int varied = 0;
  for (const auto& d : cfg.lattice.dimensions)
    varied += static_cast<int>(d.values.size());
  CHECK(varied == 25);  // 10 + 6 + 9
  CHECK(cfg.query == "Pmax=? [ !\"service\" U \"service\" ]");
  CHECK(cfg.rho == 0.9);
  CHECK(cfg.tnorm.kind == TNormKind::Min);
  CHECK(cfg.lattice.dimensions[0].kind == DimensionKind::Horizon);
  CHECK(cfg.lattice.dimensions[1].feature ==
        std::vector<double>{1, 2, 4, 8, 13, 25});
  CHECK(cfg.lattice.dimensions[2].values ==
        std::vector<double>{1, 2, 3, 4, 5, 10, 15, 20, 25});
}

TEST_CASE("named shapes") {
  CHECK(casestudy::named_shape("sigmoid")(7.5) == doctest::Approx(0.5));
  CHECK(casestudy::named_shape("very_fast")(1.0) == 1.0);
  CHECK(casestudy::named_shape("very_fast")(7.0) == 0.0);
  CHECK(casestudy::named_shape("medium")(6.0) == 1.0);
  CHECK(casestudy::named_shape("energy")(3.0) == 1.0);
  CHECK(casestudy::named_shape("energy")(8.0) == 0.0);
  CHECK_THROWS_AS(casestudy::named_shape("nope"), ConfigError);
}

TEST_CASE("a smaller instance stays serviceable") {
  HomecareParams p;
  p.grid_w = 3;
  p.grid_h = 3;
  p.human_init = {2, 2};
  p.max_speed = 2;
  p.battery_capacity = 8;
  Mdp mdp = casestudy::build_model(p);
  CHECK(validate(mdp).ok());
  double reachable_service =
      check_query(mdp, "Pmax=? [ !\"service\" U \"service\" ]")
          .at_initial(mdp);
  CHECK(reachable_service == doctest::Approx(1.0));
}
