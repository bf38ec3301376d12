#include <doctest.h>

#include <random>
#include <set>

#include "flexverif/casestudy.hpp"
#include "flexverif/explorer.hpp"
#include "flexverif/study_config.hpp"
#include "support/oracles.hpp"

using namespace flexverif;

namespace {

// Tiny 3-state model: s0 --go--> {s1: 0.7, s2: 0.3}, s0 --risky--> {s2: 1.0},
// s1, s2 absorbing, s2 labelled "goal". A config with one two-value
// action-guard dimension: strong setting forbids "risky".
const char* kToyModel =
    "mdp\n"
    "module m\n"
    "  x : [0..2] init 0;\n"
    "  [go] x=0 -> 0.7:(x'=1) + 0.3:(x'=2);\n"
    "  [risky] x=0 -> (x'=2);\n"
    "  [] x>0 -> true;\n"
    "endmodule\n"
    "label \"goal\" = x=2;\n";

StudyConfig toy_config() {
  StudyConfig cfg;
  cfg.model = "toy";
  cfg.model_builder = [] {
    Mdp mdp = model::elaborate(model::parse(kToyModel));
    attach_action_attributes(mdp, {{"danger", {{"risky", 1.0}}}});
    return mdp;
  };
  cfg.query = "Pmax=? [ true U \"goal\" ]";
  cfg.rho = 0.5;
  DesignDimension d;
  d.name = "d";
  d.kind = DimensionKind::ActionGuard;
  d.values = {0, 1};
  d.constraint = "danger <= $v";
  cfg.lattice.dimensions = {d};
  cfg.requirements.push_back({"r", MembershipFn::piecewise_linear(
                                       {{0.0, 1.0}, {1.0, 0.25}}),
                              "d"});
  return cfg;
}

}  // namespace

TEST_CASE("two-point study matches hand-computed restrictions") {
  std::vector<EvalRecord> records = evaluate_all(toy_config());
  REQUIRE(records.size() == 2);
  // strong point: only "go" -> Pmax = 0.3; weak point adds "risky" -> 1.0
  CHECK(records[0].point.indices == std::vector<int>{0});
  CHECK(records[0].p_upper == doctest::Approx(0.3));
  CHECK(records[0].mu == doctest::Approx(1.0));
  CHECK_FALSE(records[0].in_w);
  CHECK(records[1].p_upper == doctest::Approx(1.0));
  CHECK(records[1].mu == doctest::Approx(0.25));
  CHECK(records[1].in_w);

  ExplorationResult res = optimal_specs(records, 0.5);
  REQUIRE(res.w.size() == 1);
  CHECK(res.w[0].indices == std::vector<int>{1});
  CHECK(res.argmax == res.w);
  CHECK(*res.mu_star == doctest::Approx(0.25));
}

TEST_CASE("degenerate one-point lattice equals a direct check") {
  StudyConfig cfg = toy_config();
  cfg.lattice.dimensions[0].values = {1};
  std::vector<EvalRecord> records = evaluate_all(cfg);
  REQUIRE(records.size() == 1);
  Mdp mdp = cfg.model_builder();
  CHECK(records[0].p_upper ==
        doctest::Approx(check_query(mdp, cfg.query).at_initial(mdp)));
}

TEST_CASE("synthetic 2x2 example") {
  // p_upper = [0.2 0.95; 0.9 1.0], mu = [0.9 0.5; 0.6 0.1], rho = 0.9
  std::vector<EvalRecord> records;
  double p[2][2] = {{0.2, 0.95}, {0.9, 1.0}};
  double mu[2][2] = {{0.9, 0.5}, {0.6, 0.1}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EvalRecord rec;
      rec.point = SpecPoint{{i, j}};
      rec.p_upper = p[i][j];
      rec.mu_each = {mu[i][j]};
      rec.mu = mu[i][j];
      rec.in_w = rec.p_upper >= 0.9;
      records.push_back(rec);
    }
  ExplorationResult res = optimal_specs(records, 0.9);
  REQUIRE(res.w.size() == 3);
  CHECK(res.w[0].indices == std::vector<int>{0, 1});
  CHECK(res.w[1].indices == std::vector<int>{1, 0});
  CHECK(res.w[2].indices == std::vector<int>{1, 1});
  REQUIRE(res.argmax.size() == 1);
  CHECK(res.argmax[0].indices == std::vector<int>{1, 0});
  CHECK(*res.mu_star == doctest::Approx(0.6));

  SUBCASE("rho = 0 admits everything") {
    ExplorationResult all = optimal_specs(records, 0.0);
    CHECK(all.w.size() == 4);
    CHECK(all.argmax.size() == 1);
    CHECK(*all.mu_star == doctest::Approx(0.9));
  }
  SUBCASE("unreachable rho empties W") {
    for (auto& rec : records) rec.p_upper = std::min(rec.p_upper, 0.99);
    ExplorationResult none = optimal_specs(records, 1.0);
    CHECK(none.w.empty());
    CHECK(none.argmax.empty());
    CHECK_FALSE(none.mu_star.has_value());
  }

  SUBCASE("frontier over the synthetic table matches") {
    SpecLattice lattice;
    for (int d = 0; d < 2; ++d) {
      DesignDimension dim;
      dim.name = "d" + std::to_string(d);
      dim.kind = DimensionKind::ActionGuard;
      dim.values = {1, 2};
      dim.constraint = "true";
      lattice.dimensions.push_back(dim);
    }
    auto p_fn = [&](const SpecPoint& q) {
      return p[q.indices[0]][q.indices[1]];
    };
    FrontierResult fr = find_w_frontier(lattice, p_fn, 0.9);
    std::vector<SpecPoint> w = up_closure(lattice, fr.minimal_w);
    CHECK(w == res.w);
  }
}

TEST_CASE("csv report: golden two-by-two") {
  std::vector<EvalRecord> records;
  EvalRecord a;
  a.point = SpecPoint{{0, 0}};
  a.p_upper = 0.25;
  a.mu_each = {1.0, 0.5};
  a.mu = 0.5;
  a.in_w = false;
  EvalRecord b;
  b.point = SpecPoint{{0, 1}};
  b.p_upper = 1.0;
  b.p_lower = 0.125;
  b.mu_each = {0.5, 0.25};
  b.mu = 0.25;
  b.in_w = true;
  records = {a, b};
  SpecLattice lattice;  // only used for DOT
  std::string csv = report(records, {b.point}, {b.point}, ReportFormat::Csv,
                           lattice);
  CHECK(csv ==
        "point,p_upper,p_lower,mu_1,mu_2,mu,in_w,is_argmax\n"
        "f_1_1,0.25,,1,0.5,0.5,false,false\n"
        "f_1_2,1,0.125,0.5,0.25,0.25,true,true\n");
}

TEST_CASE("frontier equals exhaustive on random synthetic lattices") {
  std::mt19937_64 rng(8675309);
  for (int it = 0; it < 25; ++it) {
    fvtest::SyntheticStudy study = fvtest::random_synthetic_study(rng);
    double rho = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    std::vector<EvalRecord> records;
    for (const auto& p : study.lattice.all_points()) {
      EvalRecord rec;
      rec.point = p;
      rec.p_upper = study.p_table.at(p.indices);
      rec.mu = study.mu_table.at(p.indices);
      rec.mu_each = {rec.mu};
      rec.in_w = rec.p_upper >= rho;
      records.push_back(rec);
    }
    ExplorationResult exhaustive = optimal_specs(records, rho);

    long checks = 0;
    auto p_fn = [&](const SpecPoint& p) {
      ++checks;
      return study.p_table.at(p.indices);
    };
    FrontierResult fr = find_w_frontier(study.lattice, p_fn, rho);
    std::vector<SpecPoint> w = up_closure(study.lattice, fr.minimal_w);
    CHECK(w == exhaustive.w);
    CHECK(fr.evaluations <= static_cast<long>(records.size()));

    // membership maximization over W from the synthetic table
    if (!exhaustive.w.empty()) {
      double best = -1.0;
      for (const auto& p : w) best = std::max(best, study.mu_table.at(p.indices));
      CHECK(best == doctest::Approx(*exhaustive.mu_star));
    }
  }
}

TEST_CASE("W is upward closed toward weakness") {
  StudyConfig cfg = toy_config();
  std::vector<EvalRecord> records = evaluate_all(cfg);
  std::set<std::vector<int>> w_set;
  for (const auto& rec : records)
    if (rec.in_w) w_set.insert(rec.point.indices);
  for (const auto& rec : records) {
    if (!rec.in_w) continue;
    for (const auto& other : records)
      if (weaker_eq(other.point, rec.point))
        CHECK(w_set.count(other.point.indices) == 1);
  }
}

TEST_CASE("evaluate_all is deterministic and concurrency independent") {
  StudyConfig cfg = casestudy::default_study();
  // shrink the lattice so this stays fast: drop to 3 x 2 x 2
  cfg.lattice.dimensions[0].values = {1, 2, 3};
  cfg.lattice.dimensions[1].values = {1, 2};
  cfg.lattice.dimensions[1].feature = {1, 2};
  cfg.lattice.dimensions[2].values = {5, 25};

  cfg.threads = 1;
  std::vector<EvalRecord> sequential = evaluate_all(cfg);
  cfg.threads = 4;
  std::vector<EvalRecord> parallel = evaluate_all(cfg);
  REQUIRE(sequential.size() == parallel.size());

  ExplorationResult res_seq = optimal_specs(sequential, cfg.rho);
  ExplorationResult res_par = optimal_specs(parallel, cfg.rho);
  std::string csv_seq = report(sequential, res_seq.w, res_seq.argmax,
                               ReportFormat::Csv, cfg.lattice);
  std::string csv_par = report(parallel, res_par.w, res_par.argmax,
                               ReportFormat::Csv, cfg.lattice);
  CHECK(csv_seq == csv_par);

  // two identical sequential runs produce byte-identical CSV
  cfg.threads = 1;
  std::vector<EvalRecord> again = evaluate_all(cfg);
  ExplorationResult res_again = optimal_specs(again, cfg.rho);
  CHECK(report(again, res_again.w, res_again.argmax, ReportFormat::Csv,
               cfg.lattice) == csv_seq);
}

TEST_CASE("start semantics: min over a label") {
  StudyConfig cfg = toy_config();
  cfg.query = "Pmax=? [ true U \"goal\" ]";
  cfg.start = {StartSpec::Kind::MinOverLabel, "anywhere"};
  cfg.model_builder = [] {
    Mdp mdp = model::elaborate(model::parse(kToyModel));
    attach_action_attributes(mdp, {{"danger", {{"risky", 1.0}}}});
    mdp.props.push_back("anywhere");
    int prop = mdp.prop_index("anywhere");
    for (auto& labels : mdp.labeling) labels.push_back(prop);
    return mdp;
  };
  std::vector<EvalRecord> records = evaluate_all(cfg);
  // s1 cannot reach the goal, so the minimum over all states is 0
  CHECK(records[0].p_upper == 0.0);
  CHECK(records[1].p_upper == 0.0);

  cfg.start = {StartSpec::Kind::MinOverLabel, "nosuch"};
  CHECK_THROWS_AS(evaluate_all(cfg), Error);
}

TEST_CASE("lower probabilities when requested") {
  StudyConfig cfg = toy_config();
  cfg.compute_lower = true;
  std::vector<EvalRecord> records = evaluate_all(cfg);
  // strong point has a single policy: lower = upper = 0.3
  REQUIRE(records[0].p_lower.has_value());
  CHECK(*records[0].p_lower == doctest::Approx(0.3));
  // weak point: the worst policy is "go" (0.3), best is "risky" (1.0)
  CHECK(*records[1].p_lower == doctest::Approx(0.3));
  CHECK(records[1].p_upper == doctest::Approx(1.0));
}
