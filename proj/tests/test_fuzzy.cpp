#include <doctest.h>

#include <cmath>
#include <random>

#include "flexverif/casestudy.hpp"
#include "flexverif/fuzzy.hpp"

using namespace flexverif;

TEST_CASE("membership shapes") {
  MembershipFn sig = MembershipFn::sigmoid(7.5, 1.0);
  CHECK(sig(7.5) == doctest::Approx(0.5));
  CHECK(sig(9.5) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))));
  CHECK(sig(9.5) == doctest::Approx(0.119203).epsilon(1e-5));

  MembershipFn ramp = MembershipFn::linear_ramp(5, 15);
  CHECK(ramp(10.0) == doctest::Approx(0.5));
  CHECK(ramp(4.0) == 1.0);
  CHECK(ramp(15.0) == 0.0);
  CHECK(ramp(100.0) == 0.0);

  MembershipFn pw = MembershipFn::piecewise_linear({{0, 1.0}, {2, 0.5}, {4, 0.0}});
  CHECK(pw(-1) == 1.0);  // clamped
  CHECK(pw(1) == doctest::Approx(0.75));
  CHECK(pw(3) == doctest::Approx(0.25));
  CHECK(pw(9) == 0.0);

  CHECK(MembershipFn::constant(0.4)(123.0) == 0.4);

  CHECK_THROWS_AS(MembershipFn::sigmoid(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(MembershipFn::linear_ramp(5, 5), ConfigError);
  CHECK_THROWS_AS(MembershipFn::constant(1.5), ConfigError);
}

TEST_CASE("membership output stays in range") {
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> wide(-1e6, 1e6);
  MembershipFn fns[] = {
      MembershipFn::sigmoid(7.5, 1.0), MembershipFn::sigmoid(0.0, 25.0),
      MembershipFn::linear_ramp(1, 7),
      MembershipFn::piecewise_linear({{-5, 0.2}, {0, 1.0}, {5, 0.7}}),
      MembershipFn::constant(1.0)};
  for (int it = 0; it < 5000; ++it) {
    double x = wide(rng);
    for (const auto& fn : fns) {
      double mu = fn(x);
      CHECK(mu >= 0.0);
      CHECK(mu <= 1.0);
    }
  }
  // extreme inputs must not overflow the sigmoid
  CHECK(fns[0](1e308) == 0.0);
  CHECK(fns[0](-1e308) == 1.0);
}

TEST_CASE("t-norm conjunction") {
  CHECK(conjoin(std::vector<double>{0.3, 0.8}, {TNormKind::Min}) ==
        doctest::Approx(0.3));
  CHECK(conjoin(std::vector<double>{0.3, 0.8}, {TNormKind::Product}) ==
        doctest::Approx(0.24));
  CHECK(conjoin(std::vector<double>{0.3, 0.8}, {TNormKind::Lukasiewicz}) ==
        doctest::Approx(0.1));
  CHECK(conjoin(std::vector<double>{0.7}, {TNormKind::Min}) == 0.7);
  CHECK_THROWS_AS(conjoin(std::vector<double>{}, {TNormKind::Min}), EmptyInput);
}

TEST_CASE("t-norm axioms") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (TNormKind kind :
       {TNormKind::Min, TNormKind::Product, TNormKind::Lukasiewicz}) {
    TNorm t{kind};
    for (int it = 0; it < 2000; ++it) {
      double a = unit(rng), b = unit(rng), c = unit(rng);
      CHECK(std::abs(t.apply(a, b) - t.apply(b, a)) <= 1e-12);
      CHECK(std::abs(t.apply(a, t.apply(b, c)) - t.apply(t.apply(a, b), c)) <=
            1e-12);
      CHECK(t.apply(a, 1.0) == doctest::Approx(a).epsilon(1e-12));
      if (b <= c) CHECK(t.apply(a, b) <= t.apply(a, c) + 1e-12);
    }
  }
}

TEST_CASE("strict membership of a specification") {
  StudyConfig cfg = casestudy::default_study();
  const SpecLattice& lattice = cfg.lattice;

  SUBCASE("constant shape gives 1 everywhere") {
    VagueRequirement req{"always", MembershipFn::constant(1.0), "v"};
    for (const auto& p : lattice.all_points())
      CHECK(mu_spec(req, p, lattice) == 1.0);
  }

  SUBCASE("sigmoid over risk at velocity index with risk 13") {
    VagueRequirement req{"chi1", MembershipFn::sigmoid(7.5, 1.0), "v"};
    SpecPoint p = lattice.strongest();
    p.indices[1] = 4;  // delta = 5, risk = 13
    double expected = 1.0 / (1.0 + std::exp(5.5));
    CHECK(mu_spec(req, p, lattice) == doctest::Approx(expected));
    CHECK(mu_spec(req, p, lattice) == doctest::Approx(0.004070).epsilon(1e-4));
  }

  SUBCASE("unknown dimension and attr sources are rejected") {
    VagueRequirement bad{"x", MembershipFn::constant(1.0), "nosuch"};
    CHECK_THROWS_AS(mu_spec(bad, lattice.strongest(), lattice), ConfigError);
    VagueRequirement attr{"x", MembershipFn::constant(1.0), "attr:speed"};
    CHECK_THROWS_AS(mu_spec(attr, lattice.strongest(), lattice), ConfigError);
    CHECK_THROWS_AS(
        mu_spec(attr, lattice.strongest(), lattice, MuMode::Reachable, nullptr),
        MissingMdp);
  }
}

TEST_CASE("weakening never raises membership") {
  std::mt19937_64 rng(14142);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    SpecLattice lattice;
    DesignDimension dim;
    dim.name = "d";
    dim.kind = DimensionKind::ActionGuard;
    dim.constraint = "true";
    int len = std::uniform_int_distribution<int>(2, 9)(rng);
    double v = 0.0;
    for (int i = 0; i < len; ++i) {
      v += unit(rng) * 3.0;
      dim.values.push_back(v);
      dim.feature.push_back(v * (unit(rng) < 0.5 ? 1.0 : 2.0));
    }
    lattice.dimensions.push_back(dim);

    MembershipFn fn =
        it % 3 == 0   ? MembershipFn::sigmoid(unit(rng) * 10.0, 0.5)
        : it % 3 == 1 ? MembershipFn::linear_ramp(1.0, 1.0 + unit(rng) * 20.0)
                      : MembershipFn::piecewise_linear(
                            {{0.0, 1.0}, {5.0, unit(rng)}, {10.0, unit(rng)}});
    VagueRequirement req{"r", fn, "d"};
    double prev = 2.0;
    for (int i = 0; i < len; ++i) {
      double mu = mu_spec(req, SpecPoint{{i}}, lattice);
      CHECK(mu <= prev + 1e-12);
      prev = mu;
    }
  }
}

TEST_CASE("strict and reachable modes agree on the case study") {
  StudyConfig cfg = casestudy::default_study();
  Mdp mdp = casestudy::build_model();
  const SpecLattice& lattice = cfg.lattice;
  VagueRequirement chi1{"chi1", MembershipFn::sigmoid(7.5, 1.0), "v"};

  for (int vi : {0, 2, 5}) {
    SpecPoint p = lattice.weakest();
    p.indices[1] = vi;
    Materialized m = materialize(p, lattice);
    Mdp restricted = restrict(mdp, m.predicate);
    double strict = mu_spec(chi1, p, lattice, MuMode::Strict);
    double reach = mu_spec(chi1, p, lattice, MuMode::Reachable, &restricted);
    // the fastest permitted speed is reachable from the initial cell
    CHECK(strict == doctest::Approx(reach));
  }
}

TEST_CASE("normalization checks") {
  VagueRequirement ramp{"r", MembershipFn::linear_ramp(5, 15), "d"};
  std::vector<double> domain;
  for (int i = 1; i <= 25; ++i) domain.push_back(i);
  CHECK(check_normalized(ramp, domain));

  VagueRequirement sig{"s", MembershipFn::sigmoid(7.5, 1.0), "d"};
  CHECK_FALSE(check_normalized(sig, domain));  // 0.9985 < 1 - 1e-9

  VagueRequirement low{"c", MembershipFn::constant(0.4), "d"};
  CHECK_FALSE(check_normalized(low, domain));
}
