#include "flexverif/study_config.hpp"

#include <fmt/format.h>

#include <filesystem>

namespace flexverif {

namespace {

TNorm parse_tnorm(const std::string& s) {
  if (s == "min") return {TNormKind::Min};
  if (s == "product") return {TNormKind::Product};
  if (s == "lukasiewicz") return {TNormKind::Lukasiewicz};
  throw ConfigError(fmt::format("unknown tnorm '{}'", s));
}

SearchMode parse_mode(const std::string& s) {
  if (s == "exhaustive") return SearchMode::Exhaustive;
  if (s == "frontier") return SearchMode::Frontier;
  throw ConfigError(fmt::format("unknown mode '{}'", s));
}

StartSpec parse_start(const std::string& s) {
  if (s == "initial") return {StartSpec::Kind::Initial, ""};
  constexpr std::string_view prefix = "min-label:";
  if (s.rfind(prefix, 0) == 0)
    return {StartSpec::Kind::MinOverLabel, s.substr(prefix.size())};
  throw ConfigError(
      fmt::format("start must be 'initial' or 'min-label:<name>', got '{}'",
                  s));
}

DimensionKind parse_kind(const std::string& s) {
  if (s == "action_guard") return DimensionKind::ActionGuard;
  if (s == "state_guard") return DimensionKind::StateGuard;
  if (s == "horizon") return DimensionKind::Horizon;
  throw ConfigError(fmt::format("unknown dimension kind '{}'", s));
}

MembershipFn parse_shape(const toml::Table& t) {
  std::string shape = t.get_string("shape");
  if (shape == "sigmoid")
    return MembershipFn::sigmoid(t.get_number("center"),
                                 t.get_number("slope"));
  if (shape == "linear_ramp")
    return MembershipFn::linear_ramp(t.get_number("full"),
                                     t.get_number("zero"));
  if (shape == "constant") return MembershipFn::constant(t.get_number("value"));
  if (shape == "piecewise") {
    const toml::Value& v = t.get("points");
    if (!v.is_array()) throw ConfigError("'points' must be an array of pairs");
    std::vector<std::pair<double, double>> pts;
    for (const auto& item : v.as_array()) {
      if (!item.is_array() || item.as_array().size() != 2 ||
          !item.as_array()[0].is_number() || !item.as_array()[1].is_number())
        throw ConfigError("'points' entries must be [x, mu] pairs");
      pts.emplace_back(item.as_array()[0].as_number(),
                       item.as_array()[1].as_number());
    }
    return MembershipFn::piecewise_linear(std::move(pts));
  }
  // Catalog names from the case study ("very_fast", "medium", ...).
  return casestudy::named_shape(shape);
}

casestudy::HomecareParams params_from_table(const toml::Table& t) {
  casestudy::HomecareParams p;
  auto get_int = [&](const char* key, int fallback) {
    auto v = t.opt_number(key);
    return v ? static_cast<int>(*v) : fallback;
  };
  p.grid_w = get_int("grid_w", p.grid_w);
  p.grid_h = get_int("grid_h", p.grid_h);
  p.charger = {get_int("charger_x", p.charger.x),
               get_int("charger_y", p.charger.y)};
  p.robot_init = {get_int("robot_x", p.robot_init.x),
                  get_int("robot_y", p.robot_init.y)};
  p.human_init = {get_int("human_x", p.human_init.x),
                  get_int("human_y", p.human_init.y)};
  p.battery_capacity = get_int("battery", p.battery_capacity);
  p.max_speed = get_int("max_speed", p.max_speed);
  p.human_move_prob = t.opt_number("human_move_prob").value_or(
      p.human_move_prob);
  p.service_distance = get_int("service_distance", p.service_distance);
  p.energy_cost_per_cell = get_int("energy_cost", p.energy_cost_per_cell);
  return p;
}

}  // namespace

StudyConfig study_config_from_toml(const toml::Table& table,
                                   const std::string& base_dir) {
  StudyConfig cfg;
  cfg.model = table.get_string("model");
  cfg.query = table.get_string("query");
  cfg.rho = table.get_number("rho");
  if (auto s = table.opt_string("mode")) cfg.mode = parse_mode(*s);
  if (auto s = table.opt_string("start")) cfg.start = parse_start(*s);
  if (auto s = table.opt_string("tnorm")) cfg.tnorm = parse_tnorm(*s);
  if (auto b = table.opt_bool("compute_lower")) cfg.compute_lower = *b;
  if (auto v = table.opt_number("tolerance")) cfg.tolerance = *v;
  if (auto v = table.opt_number("threads"))
    cfg.threads = static_cast<int>(*v);
  if (auto s = table.opt_string("deadlock")) {
    if (*s == "error")
      cfg.deadlock_mode = DeadlockMode::Error;
    else if (*s == "stutter")
      cfg.deadlock_mode = DeadlockMode::Stutter;
    else
      throw ConfigError(fmt::format("unknown deadlock mode '{}'", *s));
  }
  if (auto s = table.opt_string("mu_mode")) {
    if (*s == "strict")
      cfg.mu_mode = MuMode::Strict;
    else if (*s == "reachable")
      cfg.mu_mode = MuMode::Reachable;
    else
      throw ConfigError(fmt::format("unknown mu_mode '{}'", *s));
  }

  auto dims = table.table_arrays.find("dimension");
  if (dims == table.table_arrays.end() || dims->second.empty())
    throw ConfigError("at least one [[dimension]] is required");
  for (const auto& dt : dims->second) {
    DesignDimension d;
    d.name = dt.get_string("name");
    d.kind = parse_kind(dt.get_string("kind"));
    d.values = dt.get_number_array("values");
    if (d.values.empty())
      throw ConfigError(
          fmt::format("dimension '{}' has no values", d.name));
    for (size_t i = 1; i < d.values.size(); ++i)
      if (!(d.values[i - 1] < d.values[i]))
        throw ConfigError(fmt::format(
            "dimension '{}' values must be strictly increasing", d.name));
    if (dt.has("feature")) {
      d.feature = dt.get_number_array("feature");
      if (d.feature.size() != d.values.size())
        throw ConfigError(fmt::format(
            "dimension '{}': feature array must parallel values", d.name));
    }
    if (auto c = dt.opt_string("constraint")) d.constraint = *c;
    if (d.kind != DimensionKind::Horizon && d.constraint.empty())
      throw ConfigError(fmt::format(
          "guard dimension '{}' needs a constraint template", d.name));
    cfg.lattice.dimensions.push_back(std::move(d));
  }

  auto reqs = table.table_arrays.find("requirement");
  if (reqs == table.table_arrays.end() || reqs->second.empty())
    throw ConfigError("at least one [[requirement]] is required");
  for (const auto& rt : reqs->second) {
    VagueRequirement req;
    req.name = rt.get_string("name");
    req.feature_source = rt.get_string("dimension");
    req.fn = parse_shape(rt);
    cfg.requirements.push_back(std::move(req));
  }

  auto attrs = table.tables.find("action_attrs");
  if (attrs != table.tables.end()) {
    for (const auto& [attr, sub] : attrs->second.tables) {
      for (const auto& [label, value] : sub.entries) {
        if (!value.is_number())
          throw ConfigError(fmt::format(
              "action attribute '{}.{}' must be a number", attr, label));
        cfg.action_attrs[attr][label] = value.as_number();
      }
    }
  }

  if (cfg.model == "casestudy") {
    casestudy::HomecareParams p;
    auto cs = table.tables.find("casestudy");
    if (cs != table.tables.end()) p = params_from_table(cs->second);
    cfg.model_builder = [p] { return casestudy::build_model(p); };
  } else if (!base_dir.empty()) {
    std::filesystem::path mp(cfg.model);
    if (mp.is_relative())
      cfg.model = (std::filesystem::path(base_dir) / mp).string();
  }
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  toml::Table table = toml::parse_file(path);
  std::string dir = std::filesystem::path(path).parent_path().string();
  return study_config_from_toml(table, dir);
}

std::string default_study_toml(const casestudy::HomecareParams& params,
                               const std::string& model_ref) {
  casestudy::validate_params(params);
  StudyConfig cfg = casestudy::default_study(params);

  std::string out;
  out += "# flexverif study configuration\n";
  out += fmt::format("model = \"{}\"\n", model_ref);
  out += "query = 'Pmax=? [ !\"service\" U \"service\" ]'\n";
  out += fmt::format("rho = {}\n", cfg.rho);
  out += "mode = \"exhaustive\"\n";
  out += "start = \"initial\"\n";
  out += "tnorm = \"min\"\n";
  out += "deadlock = \"error\"\n";
  out += fmt::format("tolerance = {}\n", cfg.tolerance);
  out += "compute_lower = false\n";
  out += "mu_mode = \"strict\"\n";

  auto numbers = [](const std::vector<double>& vs) {
    std::string s = "[";
    for (size_t i = 0; i < vs.size(); ++i) {
      if (i) s += ", ";
      if (vs[i] == static_cast<long long>(vs[i]))
        s += fmt::format("{}", static_cast<long long>(vs[i]));
      else
        s += fmt::format("{}", vs[i]);
    }
    return s + "]";
  };

  for (const auto& d : cfg.lattice.dimensions) {
    out += "\n[[dimension]]\n";
    out += fmt::format("name = \"{}\"\n", d.name);
    const char* kind = d.kind == DimensionKind::Horizon      ? "horizon"
                       : d.kind == DimensionKind::StateGuard ? "state_guard"
                                                             : "action_guard";
    out += fmt::format("kind = \"{}\"\n", kind);
    out += fmt::format("values = {}\n", numbers(d.values));
    if (!d.feature.empty())
      out += fmt::format("feature = {}\n", numbers(d.feature));
    if (!d.constraint.empty())
      out += fmt::format("constraint = \"{}\"\n", d.constraint);
  }

  for (const auto& r : cfg.requirements) {
    out += "\n[[requirement]]\n";
    out += fmt::format("name = \"{}\"\n", r.name);
    out += fmt::format("dimension = \"{}\"\n", r.feature_source);
    switch (r.fn.shape()) {
      case MembershipFn::Shape::Sigmoid:
        out += "shape = \"sigmoid\"\n";
        out += fmt::format("center = {}\n", r.fn.params()[0]);
        out += fmt::format("slope = {}\n", r.fn.params()[1]);
        break;
      case MembershipFn::Shape::LinearRamp:
        out += "shape = \"linear_ramp\"\n";
        out += fmt::format("full = {}\n", r.fn.params()[0]);
        out += fmt::format("zero = {}\n", r.fn.params()[1]);
        break;
      case MembershipFn::Shape::Constant:
        out += "shape = \"constant\"\n";
        out += fmt::format("value = {}\n", r.fn.params()[0]);
        break;
      case MembershipFn::Shape::PiecewiseLinear: {
        out += "shape = \"piecewise\"\npoints = [";
        const auto& pts = r.fn.points();
        for (size_t i = 0; i < pts.size(); ++i) {
          if (i) out += ", ";
          out += fmt::format("[{}, {}]", pts[i].first, pts[i].second);
        }
        out += "]\n";
        break;
      }
    }
  }

  if (model_ref == "casestudy") {
    out += "\n[casestudy]\n";
    out += fmt::format("grid_w = {}\n", params.grid_w);
    out += fmt::format("grid_h = {}\n", params.grid_h);
    out += fmt::format("charger_x = {}\ncharger_y = {}\n", params.charger.x,
                       params.charger.y);
    out += fmt::format("robot_x = {}\nrobot_y = {}\n", params.robot_init.x,
                       params.robot_init.y);
    out += fmt::format("human_x = {}\nhuman_y = {}\n", params.human_init.x,
                       params.human_init.y);
    out += fmt::format("battery = {}\n", params.battery_capacity);
    out += fmt::format("max_speed = {}\n", params.max_speed);
    out += fmt::format("human_move_prob = {}\n", params.human_move_prob);
    out += fmt::format("service_distance = {}\n", params.service_distance);
    out += fmt::format("energy_cost = {}\n", params.energy_cost_per_cell);
  }

  for (const auto& [attr, by_label] : casestudy::action_attributes(params)) {
    out += fmt::format("\n[action_attrs.{}]\n", attr);
    for (const auto& [label, value] : by_label) {
      if (value == static_cast<long long>(value))
        out += fmt::format("{} = {}\n", label, static_cast<long long>(value));
      else
        out += fmt::format("{} = {}\n", label, value);
    }
  }
  return out;
}

}  // namespace flexverif
