#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dyngame/decision.hpp"
#include "dyngame/equilibrium.hpp"
#include "dyngame/paper_games.hpp"
#include "oracles.hpp"

using namespace dyngame;

namespace {

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<Compression> identity_profile(const GameSpec& g, const Histories& hs) {
  std::vector<Compression> K;
  for (int i = 0; i < g.num_players(); ++i) K.push_back(identity_compression(g, hs, i));
  return K;
}

}  // namespace

TEST_CASE("best response value dominates random deviations and matches pure enumeration") {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    oracle::RandomGameOptions o;
    o.public_actions = false;  // keeps pure-strategy enumeration small
    GameSpec g = oracle::random_game(seed, o);
    Histories hs = enumerate_histories(g);
    Profile p = oracle::random_profile(g, hs, seed * 31);
    for (int i = 0; i < 2; ++i) {
      auto br = best_response_value(g, hs, p, i);
      CHECK(br.value == doctest::Approx(oracle::pure_best_response(g, hs, p, i)).epsilon(1e-12));
      Profile q = p;
      q[i] = br.strategy;
      CHECK(compute_payoffs(g, hs, q)[i] == doctest::Approx(br.value).epsilon(1e-12));
      for (int k = 0; k < 100; ++k) {
        Profile d = p;
        d[i] = oracle::random_profile(g, hs, rng())[i];
        CHECK(compute_payoffs(g, hs, d)[i] <= br.value + 1e-12);
      }
    }
  }
}

TEST_CASE("example 3: alpha* is Alice's best reply to beta*, alpha = (0.5, 0.5) is not an equilibrium") {
  const double c = 0.2;
  GameSpec g = example3_game(c);
  Histories hs = enumerate_histories(g);
  Profile star = example3_profile(g, hs, 1.0 / 3, 1.0 / 3, 1.0 / 3 + c, 1.0 / 3 - c);
  auto br = best_response_value(g, hs, star, 0);
  CHECK(br.value == doctest::Approx(c / 2 + 2.0 / 3).epsilon(1e-12));
  auto rep = verify_bne(g, hs, star);
  CHECK(rep.is_bne);
  CHECK(rep.max_gap() <= 1e-12);

  Profile half = example3_profile(g, hs, 0.5, 0.5, 0.5, 0.5);
  half[1] = best_response_value(g, hs, half, 1).strategy;
  auto r2 = verify_bne(g, hs, half);
  CHECK(r2.gaps[0] > 1e-3);
  CHECK_FALSE(r2.is_bne);
}

TEST_CASE("example 1: E2 is a BNE and an SE") {
  Example ex = build_example("example1");
  const Profile& e2 = ex.strategies.at("E2");
  auto b = verify_bne(ex.game, ex.hs, e2);
  CHECK(b.is_bne);
  CHECK(linf(b.payoffs, {1, 0}) <= 1e-12);
  CHECK(verify_se_canonical(ex.game, ex.hs, e2).se);
}

TEST_CASE("example 1: Bob's epsilon best reply can put 1 - eps on +1") {
  Example ex = build_example("example1");
  const double eps = 0.01;
  Profile alice = uniform_profile(ex.game, ex.hs);
  alice[0].table[0][0] = {0.3, 0.7};
  auto tb = best_response_dp_eps(ex.game, ex.hs, 1, alice, ex.K[1], eps);
  const auto& q = tb.Q[1][0];
  const auto& am = tb.argmax[1][0];
  CHECK(std::find(am.begin(), am.end(), 1) != am.end());
  Dist v = eps_vertex(2, {1}, eps);
  CHECK(v[1] == doctest::Approx(1 - eps));
  CHECK(v[0] * q[0] + v[1] * q[1] == doctest::Approx(tb.V[1][0]).epsilon(1e-12));
}

TEST_CASE("epsilon at its maximum forces the uniform reply") {
  Example ex = build_example("example3:c=0.1");
  auto tb = best_response_dp_eps(ex.game, ex.hs, 1, ex.strategies.at("bne"), ex.K[1], 0.5);
  for (const auto& row : tb.selection[1])
    for (double x : row) CHECK(x == doctest::Approx(0.5));
}

TEST_CASE("identity K: epsilon tables equal the history decision problem") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GameSpec g = oracle::random_game(seed);
    Histories hs = enumerate_histories(g);
    Profile p = oracle::random_profile(g, hs, seed, 0.05);
    for (int i = 0; i < 2; ++i) {
      auto id = identity_compression(g, hs, i);
      DecisionProblem dp = build_decision_problem(g, hs, p, i);
      for (double eps : {0.0, 0.01, 0.2}) {
        auto a = best_response_dp_eps(g, hs, i, p, id, eps);
        auto b = eps_backward_induction(dp.mdp, eps);
        for (int t = 0; t < g.horizon; ++t)
          for (int h = 0; h < hs.count(i, t); ++h)
            if (dp.mdp.is_active(t, h))
              for (int u = 0; u < g.num_actions(t, i); ++u) CHECK(std::abs(a.Q[t][h][u] - b.Q[t][h][u]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("solver output is a BNE on fixture games with argmax containment at every point") {
  for (const std::string& f : {"example1", "example3:c=0.2", "repeated:stage=pd,T=2", "maskin_tirole:seed=1"}) {
    CAPTURE(f);
    Example ex = build_example(f);
    auto r = solve_k_based_se(ex.game, ex.hs, ex.K);
    CHECK(r.solve.bne.max_gap() <= 1e-6);
    CHECK(r.solve.bne.is_bne);
    for (double c : r.containment_residual) CHECK(c <= 1e-9);
  }
}

TEST_CASE("one-player game: the solver returns the greedy optimum") {
  oracle::RandomGameOptions o;
  o.players = 1;
  o.horizon = 3;
  GameSpec g = oracle::random_game(12, o);
  Histories hs = enumerate_histories(g);
  auto K = identity_profile(g, hs);
  auto r = solve_k_based_bne(g, hs, K);
  DecisionProblem dp = build_decision_problem(g, hs, uniform_profile(g, hs), 0);
  auto bi = backward_induction(dp.mdp);
  CHECK(r.bne.payoffs[0] == doctest::Approx(bi.value).epsilon(1e-9));
  for (int t = 0; t < g.horizon; ++t)
    for (int h = 0; h < hs.count(0, t); ++h) {
      int best = static_cast<int>(std::max_element(r.profile[0].table[t][h].begin(), r.profile[0].table[t][h].end()) -
                                  r.profile[0].table[t][h].begin());
      const auto& gr = bi.tables.greedy[t][h];
      CHECK(std::find(gr.begin(), gr.end(), best) != gr.end());
    }
}

TEST_CASE("a strictly dominated on-path action is not confirmed as SE") {
  Example ex = build_example("example1");
  Profile p = ex.strategies.at("E1");
  p[0].table[0][0] = {1, 0};  // Alice plays 0 against Bob's constant +1
  auto rep = verify_se_canonical(ex.game, ex.hs, p);
  CHECK_FALSE(rep.se);
  CHECK(rep.verdict == "inconclusive");
  REQUIRE_FALSE(rep.violations.empty());
  CHECK(rep.violations.front().player == 0);
  CHECK(rep.violations.front().action == "0");
}

TEST_CASE("usi_replace") {
  SUBCASE("identity keeps the strategy on reachable histories") {
    GameSpec g = oracle::random_game(5);
    Histories hs = enumerate_histories(g);
    Profile p = oracle::random_profile(g, hs, 6, 0.05);
    auto id = identity_compression(g, hs, 0);
    auto rho = usi_replace(g, hs, 0, id, p[0]);
    for (int t = 0; t < g.horizon; ++t)
      for (int h = 0; h < hs.count(0, t); ++h)
        for (int u = 0; u < g.num_actions(t, 0); ++u) CHECK(rho.table[t][h][u] == doctest::Approx(p[0].table[t][h][u]));
  }
  SUBCASE("example 2: Alice's stage-2 mix averages over her private state") {
    GameSpec g = example2_game();
    Histories hs = enumerate_histories(g);
    auto K = example2_alice_compression(g, hs);
    Strategy ga = uniform_strategy(g, hs, 0);
    for (int h = 0; h < hs.count(0, 1); ++h) {
      std::string lab = hs.label(g, 0, 1, h);
      if (lab.find("U=-1") == std::string::npos) continue;
      ga.table[1][h] = lab.rfind("xA=-1", 0) == 0 ? Dist{2.0 / 3, 1.0 / 3, 0} : Dist{0, 1.0 / 3, 2.0 / 3};
    }
    auto rho = usi_replace(g, hs, 0, K, ga);
    auto psi = compress_histories(g, hs, 0, K);
    int seen = 0;
    for (int h = 0; h < hs.count(0, 1); ++h) {
      if (hs.label(g, 0, 1, h).find("U=-1") == std::string::npos) continue;
      ++seen;
      for (double x : rho.table[1][psi[1][h]]) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
    CHECK(seen == 2);
  }
  SUBCASE("Ouyang: payoffs are preserved for every player") {
    for (int seed = 1; seed <= 3; ++seed) {
      Example ex = build_example("ouyang:seed=" + std::to_string(seed));
      for (int k = 0; k < 4; ++k) {
        Profile p = oracle::random_profile(ex.game, ex.hs, 1000 * seed + k, 0.02);
        for (int i = 0; i < 2; ++i) {
          auto rho = usi_replace(ex.game, ex.hs, i, ex.K[i], p[i]);
          Profile q = p;
          q[i] = lift(rho, compress_histories(ex.game, ex.hs, i, ex.K[i]));
          CHECK(linf(compute_payoffs(ex.game, ex.hs, p), compute_payoffs(ex.game, ex.hs, q)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("transfer of a BNE under USI keeps payoffs") {
  Example ex = build_example("ouyang:seed=1,signals=1,sequential=1");
  auto id = identity_profile(ex.game, ex.hs);
  auto sol = solve_k_based_bne(ex.game, ex.hs, id);
  REQUIRE(sol.bne.is_bne);
  auto tr = transfer_bne_via_usi(ex.game, ex.hs, ex.K, sol.profile);
  CHECK(tr.ok);
  CHECK(tr.bne.is_bne);
  CHECK(tr.payoff_distance <= 1e-6);

  auto same = transfer_bne_via_usi(ex.game, ex.hs, id, sol.profile);
  CHECK(linf(same.bne.payoffs, sol.bne.payoffs) <= 1e-9);
}

TEST_CASE("enumeration") {
  SUBCASE("matching pennies has the single payoff (0, 0)") {
    Example ex = build_example("repeated:stage=mp,T=1");
    auto r = enumerate_bne_small(ex.game, ex.hs);
    REQUIRE(r.payoff_set.size() == 1);
    CHECK(linf(r.payoff_set[0], {0, 0}) <= 1e-9);
  }
  SUBCASE("every enumerated profile passes verify_bne") {
    Example ex = build_example("example1");
    auto r = enumerate_bne_small(ex.game, ex.hs);
    for (const auto& e : r.equilibria) CHECK(verify_bne(ex.game, ex.hs, e.profile).is_bne);
  }
  SUBCASE("too many parameters are refused") {
    Example ex = build_example("repeated:stage=pd,T=3");
    EnumerateOptions o;
    o.max_parameters = 2;
    CHECK_THROWS_AS(enumerate_bne_small(ex.game, ex.hs, o), Error);
  }
  // sup-norm between points
  CHECK(hausdorff({{0, 0}, {1, 1}}, {{0, 0.5}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hausdorff({{0, 0}}, {{0.25, -0.5}}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("wPBE") {
  GameSpec g = example2_game();
  Histories hs = enumerate_histories(g);
  Assessment a = example2_assessment(g, hs);
  auto ok = check_wpbe(g, hs, a);
  CHECK(ok.wpbe);
  CHECK(ok.payoffs[0] == doctest::Approx(1.0).epsilon(1e-12));

  // a wrong on-path posterior for Alice
  Assessment bad = a;
  for (auto& row : bad.belief[0][1])
    if (row.size() >= 2) {
      row[0].p += 0.1;
      row[1].p -= 0.1;
      break;
    }
  auto r = check_wpbe(g, hs, bad);
  CHECK_FALSE(r.bayes_ok);
  CHECK_FALSE(r.wpbe);
}

TEST_CASE("belief-based check") {
  const double c = 0.1;
  GameSpec g = example3_game(c);
  Histories hs = enumerate_histories(g);
  InfoSplit split = example3_split(g, hs);
  auto r = check_belief_based(g, hs, example3_profile(g, hs, 1.0 / 3, 1.0 / 3, 1.0 / 3 + c, 1.0 / 3 - c), split);
  CHECK_FALSE(r.belief_based);
  CHECK(r.player == 1);
  CHECK(r.t == 2);
  auto eq = example3_profile(g, hs, 1.0 / 3, 1.0 / 3, 0.4, 0.4);
  CHECK(check_belief_based(g, hs, eq, split).belief_based);
  CHECK_FALSE(verify_bne(g, hs, eq).is_bne);
  // beliefs separate the common histories here, so anything is belief-based
  auto sep = example3_profile(g, hs, 0.2, 0.7, 0.9, 0.1);
  CHECK(check_belief_based(g, hs, sep, split).belief_based);
}
