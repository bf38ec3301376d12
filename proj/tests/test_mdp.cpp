#include <doctest.h>

#include <random>
#include <set>
#include <tuple>

#include "flexverif/mdp.hpp"
#include "support/oracles.hpp"

using namespace flexverif;

namespace {

Mdp self_loop_mdp() {
  Mdp mdp;
  mdp.num_states = 1;
  mdp.initial = 0;
  mdp.actions = {"loop"};
  mdp.transitions = {{{0, Distribution{{{0, 1.0}}}}}};
  mdp.labeling = {{}};
  return mdp;
}

// s0 -> s1 -> s2 deterministic chain, plus a disconnected s3.
Mdp chain_mdp() {
  Mdp mdp;
  mdp.num_states = 4;
  mdp.initial = 0;
  mdp.actions = {"step"};
  mdp.transitions.resize(4);
  mdp.transitions[0] = {{0, Distribution{{{1, 1.0}}}}};
  mdp.transitions[1] = {{0, Distribution{{{2, 1.0}}}}};
  mdp.transitions[2] = {{0, Distribution{{{2, 1.0}}}}};
  mdp.transitions[3] = {{0, Distribution{{{3, 1.0}}}}};
  mdp.labeling.resize(4);
  return mdp;
}

}  // namespace

TEST_CASE("validate: identity case") {
  CHECK(validate(self_loop_mdp()).ok());
}

TEST_CASE("validate: bad distribution sum") {
  Mdp mdp;
  mdp.num_states = 3;
  mdp.initial = 0;
  mdp.actions = {"u"};
  mdp.transitions.resize(3);
  mdp.transitions[0] = {{0, Distribution{{{1, 0.5}, {2, 0.4}}}}};
  mdp.transitions[1] = {{0, Distribution{{{1, 1.0}}}}};
  mdp.transitions[2] = {{0, Distribution{{{2, 1.0}}}}};
  mdp.labeling.resize(3);
  ValidationReport report = validate(mdp);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations)
    if (v.detail.find("sums to 0.9") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validate: deadlock names the state") {
  Mdp mdp;
  mdp.num_states = 2;
  mdp.initial = 0;
  mdp.actions = {"u"};
  mdp.transitions.resize(2);
  mdp.transitions[0] = {{0, Distribution{{{1, 1.0}}}}};
  mdp.labeling.resize(2);
  ValidationReport report = validate(mdp);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].state == 1);
  CHECK(report.violations[0].invariant.find("deadlock") != std::string::npos);
}

TEST_CASE("reachable") {
  CHECK(reachable(self_loop_mdp()) == std::vector<int>{0});
  CHECK(reachable(chain_mdp()) == std::vector<int>{0, 1, 2});
}

TEST_CASE("restrict: identity predicate keeps everything") {
  Mdp mdp = chain_mdp();
  Mdp r = restrict(mdp, SpecPredicate::always());
  CHECK(r.restricted);
  CHECK(r.num_states == 3);  // trimmed to the reachable part
  CHECK(r.original_state == std::vector<int>{0, 1, 2});
  CHECK(reachable(r).size() == reachable(mdp).size());
  // identical transition structure on the reachable part
  for (int s = 0; s < 3; ++s) {
    REQUIRE(r.transitions[s].size() == 1);
    CHECK(r.transitions[s][0].second.entries ==
          mdp.transitions[s][0].second.entries);
  }
}

TEST_CASE("restrict: dropping one pair keeps the rest") {
  Mdp mdp = self_loop_mdp();
  mdp.num_states = 2;
  mdp.transitions.push_back({{0, Distribution{{{0, 1.0}}}}});
  mdp.transitions[0] = {{0, Distribution{{{0, 0.5}, {1, 0.5}}}}};
  mdp.labeling.resize(2);
  // two (state, action) pairs; forbid exactly (1, loop)
  Mdp r = restrict(mdp,
                   SpecPredicate::from_function([](const Mdp&, int s, int a) {
                     return !(s == 1 && a == 0);
                   }),
                   DeadlockMode::Stutter);
  REQUIRE(r.num_states == 2);
  CHECK(r.transitions[0].size() == 1);
  CHECK(r.transitions[0][0].first == 0);
  // state 1 lost its only action and got a stutter loop
  REQUIRE(r.transitions[1].size() == 1);
  CHECK(r.transitions[1][0].first == r.stutter_action);
  CHECK(r.transitions[1][0].second.entries ==
        std::vector<std::pair<int, double>>{{1, 1.0}});
  CHECK(validate(r).ok());
}

TEST_CASE("restrict: deadlock mode error lists the state") {
  Mdp mdp = chain_mdp();
  auto forbid_s1 = SpecPredicate::from_function(
      [](const Mdp&, int s, int) { return s != 1; });
  try {
    restrict(mdp, forbid_s1, DeadlockMode::Error);
    FAIL("expected DeadlockAfterRestriction");
  } catch (const DeadlockAfterRestriction& e) {
    CHECK(e.states() == std::vector<int>{1});
  }
  Mdp r = restrict(mdp, forbid_s1, DeadlockMode::Stutter);
  CHECK(validate(r).ok());
}

TEST_CASE("restrict: constraint predicates read metadata") {
  Mdp mdp = chain_mdp();
  mdp.state_var_names = {"x"};
  mdp.state_values = {{0}, {1}, {2}, {3}};
  mdp.constants["limit"] = Value::integer(1);
  mdp.action_attrs["speed"] = {1.0};
  Mdp r = restrict(
      mdp,
      SpecPredicate::from_constraints({parse_expression("x <= limit"),
                                       parse_expression("speed <= 2")}),
      DeadlockMode::Stutter);
  // x=2 loses its loop but stays reachable via s1
  CHECK(r.num_states == 3);
  CHECK(r.transitions[2][0].first == r.stutter_action);
  // unknown names surface as EvalError
  CHECK_THROWS_AS(
      restrict(mdp, SpecPredicate::from_constraints(
                        {parse_expression("nosuch > 0")})),
      EvalError);
}

TEST_CASE("restrict is antitone on random models") {
  std::mt19937_64 rng(4242);
  for (int it = 0; it < 200; ++it) {
    Mdp mdp = fvtest::random_mdp(rng);
    auto [weaker, stronger] = fvtest::random_monotone_predicate_pair(rng, mdp);
    Mdp rw = restrict(mdp, weaker, DeadlockMode::Stutter);
    Mdp rs = restrict(mdp, stronger, DeadlockMode::Stutter);

    // transition set of the stronger restriction, mapped to original ids
    std::set<std::tuple<int, int>> weak_pairs, strong_pairs;
    for (int s = 0; s < rw.num_states; ++s)
      for (const auto& [a, d] : rw.transitions[s])
        if (a != rw.stutter_action)
          weak_pairs.insert({rw.original_state[s], a});
    for (int s = 0; s < rs.num_states; ++s)
      for (const auto& [a, d] : rs.transitions[s])
        if (a != rs.stutter_action)
          strong_pairs.insert({rs.original_state[s], a});
    for (const auto& pair : strong_pairs) CHECK(weak_pairs.count(pair) == 1);

    // reachable sets shrink under restriction
    std::set<int> original_reach;
    for (int s : reachable(mdp)) original_reach.insert(s);
    for (int s = 0; s < rw.num_states; ++s)
      CHECK(original_reach.count(rw.original_state[s]) == 1);
  }
}
