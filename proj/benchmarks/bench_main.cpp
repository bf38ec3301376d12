#include <benchmark/benchmark.h>

#include "flexverif/casestudy.hpp"
#include "flexverif/explorer.hpp"
#include "flexverif/model_lang.hpp"
#include "flexverif/pctl.hpp"

using namespace flexverif;

namespace {

const Mdp& homecare() {
  static Mdp mdp = casestudy::build_model();
  return mdp;
}

void Elaborate(benchmark::State& state) {
  std::string text = casestudy::generate_model();
  model::ModelAst ast = model::parse(text);
  for (auto _ : state) {
    Mdp mdp = model::elaborate(ast);
    benchmark::DoNotOptimize(mdp.num_states);
  }
}
BENCHMARK(Elaborate);

void Restrict(benchmark::State& state) {
  const Mdp& mdp = homecare();
  StudyConfig cfg = casestudy::default_study();
  SpecPoint mid{{4, 2, 4}};
  Materialized m = materialize(mid, cfg.lattice);
  for (auto _ : state) {
    Mdp restricted = restrict(mdp, m.predicate);
    benchmark::DoNotOptimize(restricted.num_states);
  }
}
BENCHMARK(Restrict);

void SolveUnbounded(benchmark::State& state) {
  const Mdp& mdp = homecare();
  Formula f = parse_query("Pmax=? [ !\"service\" U \"service\" ]");
  for (auto _ : state) {
    ProbVector v = solve_until(mdp, f);
    benchmark::DoNotOptimize(v.values[0]);
  }
}
BENCHMARK(SolveUnbounded);

void SolveBounded(benchmark::State& state) {
  const Mdp& mdp = homecare();
  Formula f = parse_query("Pmax=? [ !\"service\" U \"service\" ]");
  f.bound = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ProbVector v = solve_until(mdp, f);
    benchmark::DoNotOptimize(v.values[0]);
  }
}
BENCHMARK(SolveBounded)->Arg(4)->Arg(12)->Arg(20);

void EvaluatePoint(benchmark::State& state) {
  StudyConfig cfg = casestudy::default_study();
  Study study(cfg);
  auto points = cfg.lattice.all_points();
  size_t i = 0;
  for (auto _ : state) {
    // fresh points until the family is exhausted, then memoized lookups
    EvalRecord rec = study.evaluate_point(points[i++ % points.size()]);
    benchmark::DoNotOptimize(rec.p_upper);
  }
}
BENCHMARK(EvaluatePoint);

}  // namespace

BENCHMARK_MAIN();
