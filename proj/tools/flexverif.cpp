#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "flexverif/casestudy.hpp"
#include "flexverif/explorer.hpp"
#include "flexverif/model_lang.hpp"
#include "flexverif/pctl.hpp"
#include "flexverif/study_config.hpp"

namespace fv = flexverif;

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kInputError = 2;
constexpr int kNumericError = 3;

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fv::Error("cannot write file: " + path);
  out << contents;
}

struct ExploreArgs {
  std::string config_path;
  std::string csv_path, dot_path;
  std::optional<double> rho;
  std::optional<std::string> mode, tnorm, start;
  std::optional<double> tolerance;
  std::optional<int> threads;
  bool require_nonempty = false;
};

void apply_overrides(fv::StudyConfig& cfg, const ExploreArgs& args) {
  // Precedence: flag > config value > default.
  if (args.rho) cfg.rho = *args.rho;
  if (args.tolerance) cfg.tolerance = *args.tolerance;
  if (args.threads) cfg.threads = *args.threads;
  if (args.mode) {
    if (*args.mode == "exhaustive")
      cfg.mode = fv::SearchMode::Exhaustive;
    else if (*args.mode == "frontier")
      cfg.mode = fv::SearchMode::Frontier;
    else
      throw fv::ConfigError("unknown --mode " + *args.mode);
  }
  if (args.tnorm) {
    if (*args.tnorm == "min")
      cfg.tnorm = {fv::TNormKind::Min};
    else if (*args.tnorm == "product")
      cfg.tnorm = {fv::TNormKind::Product};
    else if (*args.tnorm == "lukasiewicz")
      cfg.tnorm = {fv::TNormKind::Lukasiewicz};
    else
      throw fv::ConfigError("unknown --tnorm " + *args.tnorm);
  }
  if (args.start) {
    if (*args.start == "initial") {
      cfg.start = {fv::StartSpec::Kind::Initial, ""};
    } else if (args.start->rfind("min-label:", 0) == 0) {
      cfg.start = {fv::StartSpec::Kind::MinOverLabel, args.start->substr(10)};
    } else {
      throw fv::ConfigError("--start must be initial or min-label:<name>");
    }
  }
}

int run_explore(const ExploreArgs& args) {
  fv::StudyConfig cfg = fv::load_study_config(args.config_path);
  apply_overrides(cfg, args);

  fv::Study study(cfg);
  for (const auto& w : study.warnings())
    std::cerr << "warning: " << w << "\n";

  std::vector<fv::EvalRecord> records;
  fv::ExplorationResult result;
  if (cfg.mode == fv::SearchMode::Exhaustive) {
    records = study.evaluate_all();
    result = fv::optimal_specs(records, cfg.rho);
    result.model_checks = study.model_checks();
  } else {
    result = study.run_frontier();
    // Reports cover only the points the frontier search evaluated.
    records = study.evaluated_records();
  }
  std::cout << fmt::format("points: {}\n", cfg.lattice.size());
  std::cout << fmt::format("model checks: {}\n", result.model_checks);
  std::cout << fmt::format("|W|: {}\n", result.w.size());
  if (result.mu_star) {
    std::cout << fmt::format("mu*: {}\n", *result.mu_star);
    std::string points;
    for (const auto& p : result.argmax)
      points += (points.empty() ? "" : " ") + fv::point_id(p);
    std::cout << fmt::format("argmax: {}\n", points);
  } else {
    std::cout << "W is empty: no specification meets the threshold\n";
  }

  if (!args.csv_path.empty())
    write_file(args.csv_path, fv::report(records, result.w, result.argmax,
                                         fv::ReportFormat::Csv, cfg.lattice));
  if (!args.dot_path.empty())
    write_file(args.dot_path, fv::report(records, result.w, result.argmax,
                                         fv::ReportFormat::Dot, cfg.lattice));

  if (args.require_nonempty && result.w.empty()) return kPropertyFailure;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"design-time verification of probabilistic and vague "
               "requirements over specification families"};
  app.require_subcommand(1);

  // validate
  std::string validate_path;
  auto* validate_cmd =
      app.add_subcommand("validate", "parse, elaborate and validate a model");
  validate_cmd->add_option("model", validate_path, ".mdp file")->required();

  // check
  std::string check_path, check_query;
  double check_tolerance = 1e-8;
  bool check_all_states = false;
  auto* check_cmd =
      app.add_subcommand("check", "evaluate a PCTL until query on a model");
  check_cmd->add_option("model", check_path, ".mdp file")->required();
  check_cmd->add_option("--query", check_query, "e.g. 'Pmax=? [ !\"a\" U \"b\" ]'")
      ->required();
  check_cmd->add_option("--tolerance", check_tolerance,
                        "value-iteration stopping tolerance");
  check_cmd->add_flag("--all-states", check_all_states,
                      "print one value per state");

  // explore
  ExploreArgs explore_args;
  auto* explore_cmd = app.add_subcommand(
      "explore", "evaluate a specification family against PR and VRs");
  explore_cmd->add_option("--config", explore_args.config_path,
                          "study TOML file")
      ->required();
  explore_cmd->add_option("--csv", explore_args.csv_path, "CSV output path");
  explore_cmd->add_option("--dot", explore_args.dot_path, "DOT output path");
  double rho_flag;
  auto* rho_opt = explore_cmd->add_option("--rho", rho_flag,
                                          "probability threshold override");
  std::string mode_flag, tnorm_flag, start_flag;
  auto* mode_opt =
      explore_cmd->add_option("--mode", mode_flag, "exhaustive|frontier");
  auto* tnorm_opt =
      explore_cmd->add_option("--tnorm", tnorm_flag, "min|product|lukasiewicz");
  auto* start_opt = explore_cmd->add_option("--start", start_flag,
                                            "initial|min-label:<name>");
  double tol_flag;
  auto* tol_opt =
      explore_cmd->add_option("--tolerance", tol_flag, "solver tolerance");
  int threads_flag;
  auto* threads_opt =
      explore_cmd->add_option("--threads", threads_flag, "worker threads");
  explore_cmd->add_flag("--require-nonempty", explore_args.require_nonempty,
                        "exit 1 when W is empty");

  // lattice
  std::string lattice_config, lattice_dot;
  auto* lattice_cmd = app.add_subcommand(
      "lattice", "emit the Hasse-diagram DOT skeleton of a study's family");
  lattice_cmd->add_option("--config", lattice_config, "study TOML file")
      ->required();
  lattice_cmd->add_option("--dot", lattice_dot,
                          "output path (stdout if omitted)");

  // casestudy
  auto* cs_cmd = app.add_subcommand("casestudy", "home-care case study");
  auto* emit_cmd =
      cs_cmd->add_subcommand("emit", "write the model and/or study config");
  std::string cs_out, cs_config;
  emit_cmd->add_option("--out", cs_out, "model output path");
  emit_cmd->add_option("--config", cs_config, "study config output path");
  fv::casestudy::HomecareParams params;
  emit_cmd->add_option("--grid-w", params.grid_w, "grid width");
  emit_cmd->add_option("--grid-h", params.grid_h, "grid height");
  emit_cmd->add_option("--battery", params.battery_capacity, "battery units");
  emit_cmd->add_option("--max-speed", params.max_speed, "cells per move");
  emit_cmd->add_option("--charger-x", params.charger.x, "charger x");
  emit_cmd->add_option("--charger-y", params.charger.y, "charger y");
  emit_cmd->add_option("--robot-x", params.robot_init.x, "robot start x");
  emit_cmd->add_option("--robot-y", params.robot_init.y, "robot start y");
  emit_cmd->add_option("--human-x", params.human_init.x, "human start x");
  emit_cmd->add_option("--human-y", params.human_init.y, "human start y");
  emit_cmd->add_option("--human-move-prob", params.human_move_prob,
                       "per-direction move probability");
  emit_cmd->add_option("--service-distance", params.service_distance,
                       "Manhattan service distance");
  emit_cmd->add_option("--energy-cost", params.energy_cost_per_cell,
                       "energy per cell moved");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      fv::Mdp mdp = fv::model::load_model_file(validate_path);
      fv::ValidationReport report = fv::validate(mdp);
      std::cout << fmt::format("states: {}\nactions: {}\n", mdp.num_states,
                               mdp.actions.size());
      std::cout << report.to_string(mdp);
      return report.ok() ? kOk : kPropertyFailure;
    }

    if (*check_cmd) {
      fv::Mdp mdp = fv::model::load_model_file(check_path);
      fv::Formula f = fv::parse_query(check_query);
      fv::SolveOptions opts;
      opts.tolerance = check_tolerance;
      fv::ProbVector v = fv::solve_until(mdp, f, opts);
      if (check_all_states) {
        for (int s = 0; s < mdp.num_states; ++s)
          std::cout << fmt::format("{} {}\n", mdp.state_name(s), v.values[s]);
      } else {
        std::cout << fmt::format("{}\n", v.at_initial(mdp));
      }
      return kOk;
    }

    if (*explore_cmd) {
      if (*rho_opt) explore_args.rho = rho_flag;
      if (*mode_opt) explore_args.mode = mode_flag;
      if (*tnorm_opt) explore_args.tnorm = tnorm_flag;
      if (*start_opt) explore_args.start = start_flag;
      if (*tol_opt) explore_args.tolerance = tol_flag;
      if (*threads_opt) explore_args.threads = threads_flag;
      return run_explore(explore_args);
    }

    if (*lattice_cmd) {
      fv::StudyConfig cfg = fv::load_study_config(lattice_config);
      std::string dot = fv::to_dot(cfg.lattice, {});
      if (lattice_dot.empty())
        std::cout << dot;
      else
        write_file(lattice_dot, dot);
      return kOk;
    }

    if (*cs_cmd) {
      if (!*emit_cmd) {
        std::cerr << "usage: flexverif casestudy emit [--out model.mdp] "
                     "[--config study.toml]\n";
        return kInputError;
      }
      std::string model_text = fv::casestudy::generate_model(params);
      if (cs_out.empty() && cs_config.empty()) {
        std::cout << model_text;
        return kOk;
      }
      if (!cs_out.empty()) write_file(cs_out, model_text);
      if (!cs_config.empty()) {
        std::string model_ref = cs_out.empty() ? "casestudy" : cs_out;
        write_file(cs_config, fv::default_study_toml(params, model_ref));
      }
      return kOk;
    }
  } catch (const fv::NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const fv::DeadlockAfterRestriction& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPropertyFailure;
  } catch (const fv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
