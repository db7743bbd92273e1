#include <cmath>

#include "doctest.h"
#include "dyngame/paper_games.hpp"

using namespace dyngame;

TEST_CASE("every default fixture passes") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    FixtureReport rep = run_fixture(build_example(name));
    for (const auto& r : rep.results) {
      CAPTURE(r.name);
      CAPTURE(r.detail);
      CHECK(r.pass);
    }
    CHECK(rep.pass());
  }
}

TEST_CASE("a tampered equilibrium fails with a reported gap") {
  Example ex = build_example("example3:c=0.2,alpha1=0.4,alpha2=0.4");
  FixtureReport rep = run_fixture(ex);
  CHECK_FALSE(rep.pass());
  bool gap_reported = false;
  for (const auto& r : rep.results)
    if (!r.pass && r.delta > 0) gap_reported = true;
  CHECK(gap_reported);
  BneReport b = verify_bne(ex.game, ex.hs, ex.strategies.at("bne"));
  CHECK_FALSE(b.is_bne);
  CHECK(b.max_gap() > 1e-3);
}

TEST_CASE("example 3 parameter range") {
  for (double c : {0.0, -0.1, 1.0 / 3, 0.5}) {
    CAPTURE(c);
    try {
      example3_game(c);
      FAIL("accepted c outside (0, 1/3)");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BadParameter);
    }
  }
  CHECK_NOTHROW(example3_game(0.33));
  CHECK_THROWS_AS(build_example("example3:c=0.4"), Error);
  CHECK_THROWS_AS(build_example("no_such_game"), Error);
}

TEST_CASE("example 3 closed forms") {
  const double c = 0.15;
  GameSpec g = example3_game(c);
  Histories hs = enumerate_histories(g);
  for (double a1 : {0.0, 0.3, 1.0})
    for (double a2 : {0.0, 0.6, 1.0})
      for (double b1 : {0.0, 0.5, 1.0})
        for (double b2 : {0.2, 1.0}) {
          auto J = compute_payoffs(g, hs, example3_profile(g, hs, a1, a2, b1, b2));
          CHECK(J[0] == doctest::Approx(example3_J(c, a1, a2, b1, b2)).epsilon(1e-12));
          CHECK(J[1] == doctest::Approx(-J[0]).epsilon(1e-12));
        }
  // J* is the value after Bob's best reply
  for (double a1 : {0.1, 0.5, 0.9})
    for (double a2 : {0.0, 0.4}) {
      Profile p = example3_profile(g, hs, a1, a2, 0.5, 0.5);
      p[1] = best_response_value(g, hs, p, 1).strategy;
      CHECK(compute_payoffs(g, hs, p)[0] == doctest::Approx(example3_J_star(c, a1, a2)).epsilon(1e-12));
    }
}

TEST_CASE("structural checks on the seeded families") {
  RandomSizes s;
  s.seed = 4;
  CHECK(state_observable(maskin_tirole_game(s)));
  CHECK(previous_state_revealed(nayyar_game(s)));
  CHECK(common_belief_strategy_free(nayyar_game(s), s));
  CHECK(local_noises_independent(ouyang_game(s), s));
  CHECK_FALSE(state_observable(example3_game(0.2)));
  CHECK_FALSE(state_observable(example2_game()));
}

TEST_CASE("seeded constructors are deterministic and respect sizes") {
  RandomSizes s;
  s.seed = 9;
  s.horizon = 3;
  s.actions = 3;
  GameSpec a = maskin_tirole_game(s), b = maskin_tirole_game(s);
  CHECK(a.rewards == b.rewards);
  CHECK(a.horizon == 3);
  CHECK(a.num_actions(0, 0) == 3);
  s.seed = 10;
  CHECK(maskin_tirole_game(s).rewards != a.rewards);
}

TEST_CASE("repeated games") {
  StageGame pd = stage_game("pd");
  GameSpec g = repeated_game(pd, 2);
  Histories hs = enumerate_histories(g);
  CHECK(hs.count(0, 1) == 4);
  CHECK_THROWS_AS(stage_game("chess"), Error);
}
