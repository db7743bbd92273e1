#include <cmath>
#include <map>

#include "doctest.h"
#include "dyngame/game.hpp"
#include "dyngame/paper_games.hpp"
#include "oracles.hpp"

using namespace dyngame;

namespace {

bool has_violation(const GameSpec& g, ErrorKind k) {
  for (const auto& v : find_violations(g))
    if (v.kind == k) return true;
  return false;
}

}  // namespace

TEST_CASE("validate rejects a kernel row summing to 0.9") {
  GameSpec g = example3_game(0.2);
  g.kernel[0][0][0][0].p = 0.9;
  CHECK(has_violation(g, ErrorKind::NonStochasticKernel));
  CHECK_THROWS_AS(validate_game(g), ValidationFailure);
}

TEST_CASE("validate rejects an increment that records the wrong action") {
  GameSpec g = oracle::random_game(3);
  // increment 0 of player 0 at stage 0 now claims action 1 was taken
  g.recall[0][0][0] = 1 - g.recall[0][0][0];
  CHECK(has_violation(g, ErrorKind::PerfectRecallViolation));
}

TEST_CASE("validate rejects out-of-range rewards") {
  GameSpec g = example1_game();
  g.rewards[0][0][1][0] = 5;
  CHECK(has_violation(g, ErrorKind::RewardOutOfRange));
}

TEST_CASE("compute_payoffs matches a tree walk on random games") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    oracle::RandomGameOptions o;
    o.horizon = 2 + static_cast<int>(seed % 2);
    o.public_actions = seed % 3 != 0;
    GameSpec g = oracle::random_game(seed, o);
    Histories hs = enumerate_histories(g);
    Profile p = oracle::random_profile(g, hs, seed + 100);
    auto J = compute_payoffs(g, hs, p);
    auto ref = oracle::tree_payoffs(g, hs, p);
    for (int i = 0; i < g.num_players(); ++i) {
      CHECK(J[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      CHECK(std::abs(J[i]) <= g.horizon * g.reward_bound + 1e-12);
    }
  }
}

TEST_CASE("forward_distribution stages are normalized and marginally consistent") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    oracle::RandomGameOptions o;
    o.horizon = 3;
    GameSpec g = oracle::random_game(seed, o);
    Histories hs = enumerate_histories(g);
    Profile p = oracle::random_profile(g, hs, seed, 0.01);
    auto D = forward_distribution(g, hs, p);
    for (int t = 0; t <= g.horizon; ++t) {
      double tot = 0;
      for (double q : D.stage[t].p) tot += q;
      CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Pr(h_t^i) equals the mass of its children at t+1 for every player
    for (int t = 0; t < g.horizon; ++t)
      for (int i = 0; i < g.num_players(); ++i) {
        std::vector<double> now(hs.count(i, t)), next(hs.count(i, t));
        const auto& a = D.stage[t];
        for (std::size_t e = 0; e < a.size(); ++e) now[a.key(e)[1 + i]] += a.p[e];
        const auto& b = D.stage[t + 1];
        for (std::size_t e = 0; e < b.size(); ++e) next[hs.player[i].parent[t + 1][b.key(e)[1 + i]]] += b.p[e];
        for (int h = 0; h < hs.count(i, t); ++h) CHECK(now[h] == doctest::Approx(next[h]).epsilon(1e-12));
      }
    double sum = 0;
    for (int t = 0; t < g.horizon; ++t) sum += D.stage_reward[t][0];
    CHECK(sum == doctest::Approx(D.payoff[0]).epsilon(1e-12));
  }
}

TEST_CASE("compress_trajectory commutes with truncation") {
  Example ex = build_example("ouyang:seed=2");
  const GameSpec& g = ex.game;
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& tree = ex.hs.player[i];
    for (int h = 0; h < tree.count[g.horizon - 1]; ++h) {
      std::vector<int> inc;
      int cur = h;
      for (int t = g.horizon - 1; t > 0; --t) {
        inc.insert(inc.begin(), tree.last[t][cur]);
        cur = tree.parent[t][cur];
      }
      const int h1 = tree.last[0][cur];
      auto full = compress_trajectory(g, i, ex.K[i], h1, inc);
      for (std::size_t m = 0; m <= inc.size(); ++m) {
        std::vector<int> prefix(inc.begin(), inc.begin() + static_cast<long>(m));
        auto part = compress_trajectory(g, i, ex.K[i], h1, prefix);
        REQUIRE(part.size() == m + 1);
        CHECK(std::equal(part.begin(), part.end(), full.begin()));
      }
    }
  }
}

TEST_CASE("monte carlo agrees with exact payoffs on example 3") {
  const double c = 0.2;
  GameSpec g = example3_game(c);
  Histories hs = enumerate_histories(g);
  Profile p = example3_profile(g, hs, 1.0 / 3, 1.0 / 3, 1.0 / 3 + c, 1.0 / 3 - c);
  auto exact = compute_payoffs(g, hs, p);
  auto mc = monte_carlo_payoff(g, hs, p, 1'000'000, 42);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(mc.mean[i] - exact[i]) <= 3 * mc.stderr_[i]);
  CHECK(exact[0] == doctest::Approx(c / 2 + 2.0 / 3).epsilon(1e-12));
}

TEST_CASE("example 1: Bob's history given his constant compression follows Alice's first move") {
  Example ex = build_example("example1");
  const GameSpec& g = ex.game;
  for (double q : {0.0, 0.25, 0.7, 1.0}) {
    Profile p = uniform_profile(g, ex.hs);
    p[0].table[0][0] = {1 - q, q};
    auto tab = conditional_table(g, ex.hs, p, 1, {{VarKind::History, 1}}, {{VarKind::Compressed, 1}}, ex.K);
    REQUIRE(tab.rows.size() == 1);
    std::map<std::string, double> got;
    for (auto& [v, pr] : tab.rows[0].target) got[ex.hs.label(g, 1, 1, static_cast<int>(v[0]))] = pr;
    CHECK(got["-/U=0"] == doctest::Approx(1 - q));
    CHECK(got["-/U=1"] == doctest::Approx(q));
  }
}

TEST_CASE("example 3: Bob's stage-2 beliefs coincide under alpha*") {
  GameSpec g = example3_game(0.1);
  Histories hs = enumerate_histories(g);
  Profile p = example3_profile(g, hs, 1.0 / 3, 1.0 / 3, 0.5, 0.5);
  auto tab = conditional_table(g, hs, p, 1, {{VarKind::State, 0}}, {{VarKind::History, 1}});
  REQUIRE(tab.rows.size() == 2);
  for (const auto& row : tab.rows) {
    double plus = 0;
    for (auto& [v, pr] : row.target)
      if (g.states[1][v[0]] == "x=+1") plus = pr;
    // alpha_1 / (alpha_1 + 1 - alpha_2) at (1/3, 1/3)
    CHECK(plus == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
}

TEST_CASE("conditional_table marks zero-probability conditions inadmissible") {
  GameSpec g = example1_game();
  Histories hs = enumerate_histories(g);
  Profile p = uniform_profile(g, hs);
  p[0].table[0][0] = {1, 0};
  auto tab = conditional_table(g, hs, p, 1, {{VarKind::Action, 1}}, {{VarKind::History, 1}});
  int admissible = 0;
  for (const auto& r : tab.rows) admissible += r.admissible;
  CHECK(admissible == 1);
}

TEST_CASE("history labels round-trip through find") {
  GameSpec g = oracle::random_game(9);
  Histories hs = enumerate_histories(g);
  for (int i = 0; i < g.num_players(); ++i)
    for (int t = 0; t <= g.horizon; ++t)
      for (int h = 0; h < hs.count(i, t); ++h) CHECK(hs.find(g, i, t, hs.label(g, i, t, h)) == h);
  CHECK(hs.find(g, 0, 1, "nope") == -1);
}

TEST_CASE("tremble mixes toward uniform") {
  GameSpec g = example1_game();
  Histories hs = enumerate_histories(g);
  Profile p = uniform_profile(g, hs);
  p[0].table[0][0] = {1, 0};
  Profile q = tremble(p, 0.2);
  CHECK(q[0].table[0][0][0] == doctest::Approx(0.9));
  CHECK(q[0].table[0][0][1] == doctest::Approx(0.1));
  Strategy bad = p[0];
  bad.table[0][0] = {0.5, 0.6};
  CHECK_THROWS_AS(check_strategy(g, hs, 0, bad), ValidationFailure);
}
