#include "flexverif/casestudy.hpp"

#include <fmt/format.h>

#include <numeric>

#include "flexverif/model_lang.hpp"

namespace flexverif::casestudy {

namespace {

struct Direction {
  const char* name;
  int dx, dy;
};

constexpr Direction kDirections[] = {
    {"n", 0, 1}, {"s", 0, -1}, {"e", 1, 0}, {"w", -1, 0}};

bool in_grid(const HomecareParams& p, Cell c) {
  return c.x >= 0 && c.x < p.grid_w && c.y >= 0 && c.y < p.grid_h;
}

std::string move_label(const Direction& d, int k) {
  return fmt::format("go_{}_{}", d.name, k);
}

// Target coordinate expression for a robot move, e.g. "ry+3".
std::string target_expr(const Direction& d, int k, bool x_axis) {
  if (x_axis) {
    if (d.dx == 0) return "rx";
    return fmt::format("rx{}{}", d.dx > 0 ? "+" : "-", k);
  }
  if (d.dy == 0) return "ry";
  return fmt::format("ry{}{}", d.dy > 0 ? "+" : "-", k);
}

}  // namespace

void validate_params(const HomecareParams& p) {
  auto reject = [](const std::string& why) { throw InvalidParams(why); };
  if (p.grid_w < 1 || p.grid_h < 1) reject("grid must be at least 1x1");
  if (!in_grid(p, p.charger)) reject("charger outside the grid");
  if (!in_grid(p, p.robot_init)) reject("robot_init outside the grid");
  if (!in_grid(p, p.human_init)) reject("human_init outside the grid");
  if (p.robot_init == p.human_init)
    reject("robot_init and human_init must be distinct cells");
  if (p.max_speed < 1) reject("max_speed must be at least 1");
  if (p.energy_cost_per_cell < 0) reject("negative energy cost");
  if (p.battery_capacity < p.max_speed * p.energy_cost_per_cell)
    reject(fmt::format(
        "battery capacity {} below the cost {} of one full-speed move",
        p.battery_capacity, p.max_speed * p.energy_cost_per_cell));
  if (p.human_move_prob < 0.0 || 4.0 * p.human_move_prob > 1.0)
    reject("human_move_prob must satisfy 0 <= 4*p <= 1");
  if (p.service_distance < 1) reject("service_distance must be at least 1");
}

std::string generate_model(const HomecareParams& p) {
  validate_params(p);
  std::string out;
  auto emit = [&](std::string line) { out += line; };

  emit("mdp\n\n");
  emit("// home-care grid world\n");
  emit(fmt::format("const int gw = {};\n", p.grid_w));
  emit(fmt::format("const int gh = {};\n", p.grid_h));
  emit(fmt::format("const int cx = {};\n", p.charger.x));
  emit(fmt::format("const int cy = {};\n", p.charger.y));
  emit(fmt::format("const int B = {};\n", p.battery_capacity));
  emit(fmt::format("const int ms = {};\n", p.max_speed));
  emit(fmt::format("const int ec = {};\n", p.energy_cost_per_cell));
  emit(fmt::format("const int sd = {};\n", p.service_distance));
  emit(fmt::format("const double hmp = {};\n", p.human_move_prob));

  // Robot: one action per direction and speed; moves that leave the grid or
  // land on the human are disabled.
  emit("\nmodule robot\n");
  emit(fmt::format("  rx : [0..gw-1] init {};\n", p.robot_init.x));
  emit(fmt::format("  ry : [0..gh-1] init {};\n", p.robot_init.y));
  for (const auto& d : kDirections) {
    for (int k = 1; k <= p.max_speed; ++k) {
      std::string tx = target_expr(d, k, true);
      std::string ty = target_expr(d, k, false);
      std::string bound = d.dx > 0   ? fmt::format("{} <= gw-1", tx)
                          : d.dx < 0 ? fmt::format("{} >= 0", tx)
                          : d.dy > 0 ? fmt::format("{} <= gh-1", ty)
                                     : fmt::format("{} >= 0", ty);
      std::string update = d.dx != 0 ? fmt::format("(rx'={})", tx)
                                     : fmt::format("(ry'={})", ty);
      emit(fmt::format("  [{}] {} & !({}=hx & {}=hy) -> {};\n",
                       move_label(d, k), bound, tx, ty, update));
    }
  }
  emit("endmodule\n");

  // Human: uniform moves with wall- and robot-blocked directions folding
  // into stay. Exactly one command is enabled per state (the robot blocks
  // at most one direction).
  emit("\nmodule human\n");
  emit(fmt::format("  hx : [0..gw-1] init {};\n", p.human_init.x));
  emit(fmt::format("  hy : [0..gh-1] init {};\n", p.human_init.y));
  const std::string blocked[4] = {
      "hy+1 <= gh-1 & hx = rx & hy+1 = ry",  // n target is the robot cell
      "hy-1 >= 0 & hx = rx & hy-1 = ry",     // s
      "hx+1 <= gw-1 & hx+1 = rx & hy = ry",  // e
      "hx-1 >= 0 & hx-1 = rx & hy = ry",     // w
  };
  const std::string step[4] = {
      "(hy'=min(hy+1,gh-1))",
      "(hy'=max(hy-1,0))",
      "(hx'=min(hx+1,gw-1))",
      "(hx'=max(hx-1,0))",
  };
  for (int blocked_dir = -1; blocked_dir < 4; ++blocked_dir) {
    std::string guard;
    if (blocked_dir < 0) {
      for (int i = 0; i < 4; ++i)
        guard += fmt::format("{}!({})", i ? " & " : "", blocked[i]);
    } else {
      guard = blocked[blocked_dir];
    }
    std::string branches;
    int moving = 0;
    for (int i = 0; i < 4; ++i) {
      if (i == blocked_dir) continue;
      branches += fmt::format("{}hmp:{}", moving ? " + " : "", step[i]);
      ++moving;
    }
    branches += fmt::format(" + (1 - {}*hmp):true", moving);
    emit(fmt::format("  [env] {} -> {};\n", guard, branches));
  }
  emit("endmodule\n");

  // Battery: a move needs its full cost; landing on the charger refills.
  emit("\nmodule battery\n");
  emit("  b : [0..B] init B;\n");
  for (const auto& d : kDirections) {
    for (int k = 1; k <= p.max_speed; ++k) {
      std::string tx = target_expr(d, k, true);
      std::string ty = target_expr(d, k, false);
      std::string landing = fmt::format("{} = cx & {} = cy", tx, ty);
      emit(fmt::format("  [{}] b >= {}*ec & {} -> (b'=B);\n",
                       move_label(d, k), k, landing));
      emit(fmt::format("  [{}] b >= {}*ec & !({}) -> (b'=b-{}*ec);\n",
                       move_label(d, k), k, landing, k));
    }
  }
  emit("endmodule\n");

  // Servicing task: attending means staying put; always available, so no
  // specification can deadlock the robot.
  emit("\nmodule service\n");
  emit("  [stay] true -> true;\n");
  emit("endmodule\n");

  // Scheduler: robot micro-turn, then human micro-turn.
  emit("\nmodule scheduler\n");
  emit("  turn : [0..1] init 0;\n");
  for (const auto& d : kDirections)
    for (int k = 1; k <= p.max_speed; ++k)
      emit(fmt::format("  [{}] turn = 0 -> (turn'=1);\n", move_label(d, k)));
  emit("  [stay] turn = 0 -> (turn'=1);\n");
  emit("  [env] turn = 1 -> (turn'=0);\n");
  emit("endmodule\n");

  emit("\nlabel \"service\" = max(rx-hx, hx-rx) + max(ry-hy, hy-ry) <= sd;\n");
  return out;
}

std::vector<double> default_risk_table() { return {1, 2, 4, 8, 13, 25}; }

double risk(int speed_limit, const std::vector<double>& table) {
  const std::vector<double>& t =
      table.empty() ? default_risk_table() : table;
  if (speed_limit < 1 || speed_limit > static_cast<int>(t.size()))
    throw OutOfRange(fmt::format("speed limit {} outside [1..{}]", speed_limit,
                                 t.size()));
  return t[speed_limit - 1];
}

std::map<std::string, std::map<std::string, double>> action_attributes(
    const HomecareParams& p) {
  std::map<std::string, std::map<std::string, double>> attrs;
  auto& speed = attrs["speed"];
  auto& cost = attrs["cost"];
  for (const auto& d : kDirections) {
    for (int k = 1; k <= p.max_speed; ++k) {
      speed[move_label(d, k)] = k;
      cost[move_label(d, k)] = static_cast<double>(k) * p.energy_cost_per_cell;
    }
  }
  speed["stay"] = 0.0;
  cost["stay"] = 0.0;
  speed["env"] = 0.0;
  cost["env"] = 0.0;
  return attrs;
}

Mdp build_model(const HomecareParams& p) {
  Mdp mdp = model::elaborate(model::parse(generate_model(p)));
  attach_action_attributes(mdp, action_attributes(p));
  return mdp;
}

StudyConfig default_study(const HomecareParams& p) {
  validate_params(p);
  StudyConfig cfg;
  cfg.model = "casestudy";
  cfg.model_builder = [p] { return build_model(p); };
  cfg.action_attrs = {};  // attributes come from the builder
  cfg.query = "Pmax=? [ !\"service\" U \"service\" ]";
  cfg.rho = 0.9;
  cfg.tnorm = TNorm{TNormKind::Min};
  cfg.mode = SearchMode::Exhaustive;

  DesignDimension t;
  t.name = "t";
  t.kind = DimensionKind::Horizon;
  for (int g = 1; g <= 10; ++g) t.values.push_back(g);
  t.constraint = "2 * $v";  // one round = robot + human micro-steps

  DesignDimension v;
  v.name = "v";
  v.kind = DimensionKind::ActionGuard;
  for (int d = 1; d <= p.max_speed; ++d) v.values.push_back(d);
  v.constraint = "speed <= $v";
  for (int d = 1; d <= p.max_speed; ++d) v.feature.push_back(risk(d));

  DesignDimension e;
  e.name = "e";
  e.kind = DimensionKind::StateGuard;
  e.values = {1, 2, 3, 4, 5, 10, 15, 20, 25};
  e.constraint = "(speed = 0) | (b - cost >= B - $v)";

  cfg.lattice.dimensions = {t, v, e};

  cfg.requirements.push_back({"chi1", named_shape("sigmoid"), "v"});
  cfg.requirements.push_back({"chi2", named_shape("very_fast"), "t"});
  cfg.requirements.push_back({"chi3", named_shape("energy"), "e"});
  return cfg;
}

MembershipFn named_shape(const std::string& name) {
  if (name == "sigmoid") return MembershipFn::sigmoid(7.5, 1.0);
  if (name == "linear") return MembershipFn::linear_ramp(5, 15);
  if (name == "very_fast") return MembershipFn::linear_ramp(1, 7);
  if (name == "fast") return MembershipFn::linear_ramp(3, 9);
  if (name == "medium") return MembershipFn::linear_ramp(6, 10);
  if (name == "energy") return MembershipFn::linear_ramp(3, 8);
  throw ConfigError(fmt::format("unknown membership shape '{}'", name));
}

}  // namespace flexverif::casestudy
