#pragma once

#include <map>
#include <string>
#include <vector>

#include "flexverif/explorer.hpp"
#include "flexverif/mdp.hpp"

namespace flexverif::casestudy {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

/// Home-care grid world: a robot services a randomly moving human on a
/// rectangular grid with a recharging cell. One scheduler round is a robot
/// micro-turn followed by a human micro-turn.
struct HomecareParams {
  int grid_w = 5;
  int grid_h = 5;
  Cell charger{0, 0};
  Cell robot_init{0, 0};
  Cell human_init{4, 4};
  int battery_capacity = 25;
  int max_speed = 6;
  double human_move_prob = 0.2;  // per direction; remainder stays
  int service_distance = 1;      // Manhattan
  int energy_cost_per_cell = 1;
};

/// Throws InvalidParams.
void validate_params(const HomecareParams& p);

/// Emits the model text: modules robot, human, battery, service and
/// scheduler. Robot actions go_<dir>_<speed> move 1..max_speed cells in one
/// direction (moves leaving the grid or landing on the human are disabled,
/// battery must cover the cost, landing on the charger refills it); stay is
/// always available; the human moves uniformly per direction with blocked
/// moves folding into stay. Time limits are applied as bounded-until
/// horizons, not model state.
std::string generate_model(const HomecareParams& p = {});

/// Collision-risk points for a speed limit; the default table satisfies
/// risk(3) < 5 and risk(5) > 10 on the 1..25 scale. Throws OutOfRange.
double risk(int speed_limit, const std::vector<double>& table = {});
std::vector<double> default_risk_table();

/// Per-action speed and energy-cost attributes, keyed by action label.
std::map<std::string, std::map<std::string, double>> action_attributes(
    const HomecareParams& p = {});

/// generate + parse + elaborate + attribute attachment.
Mdp build_model(const HomecareParams& p = {});

/// The 10 x 6 x 9 design family: servicing-time bound t (horizon, one round
/// = two micro-steps), speed limit v (action guard, risk feature), battery
/// drain allowance e (state guard); requirements Sigmoid-over-risk,
/// Very-Fast-over-t and the energy ramp; min t-norm, rho = 0.9.
StudyConfig default_study(const HomecareParams& p = {});

/// Membership catalog: "sigmoid", "linear", "very_fast", "fast", "medium",
/// "energy". Throws ConfigError for unknown names.
MembershipFn named_shape(const std::string& name);

}  // namespace flexverif::casestudy
