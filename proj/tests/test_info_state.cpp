#include <map>

#include "doctest.h"
#include "dyngame/info_state.hpp"
#include "dyngame/paper_games.hpp"
#include "oracles.hpp"

using namespace dyngame;

namespace {

Compression constant_k(const GameSpec& g, int i) {
  Compression c;
  c.labels.assign(g.horizon, {"-"});
  c.init.assign(g.initial_info[i].size(), 0);
  c.update.resize(g.horizon);
  for (int t = 1; t < g.horizon; ++t) c.update[t].assign(g.num_increments(t - 1, i), 0);
  return c;
}

// K_t = latest increment (H_1 at the first stage)
Compression last_increment_k(const GameSpec& g, int i) {
  Compression c;
  c.labels.resize(g.horizon);
  c.labels[0] = g.initial_info[i];
  for (int h = 0; h < static_cast<int>(g.initial_info[i].size()); ++h) c.init.push_back(h);
  c.update.resize(g.horizon);
  for (int t = 1; t < g.horizon; ++t) {
    c.labels[t] = g.increments[t - 1][i];
    const int nz = g.num_increments(t - 1, i);
    for (int k = 0; k < c.count(t - 1); ++k)
      for (int z = 0; z < nz; ++z) c.update[t].push_back(z);
  }
  return c;
}

std::vector<Compression> identity_profile(const GameSpec& g, const Histories& hs) {
  std::vector<Compression> K;
  for (int i = 0; i < g.num_players(); ++i) K.push_back(identity_compression(g, hs, i));
  return K;
}

void check_rows_normalized(const std::vector<WitnessRow>& rows) {
  std::map<std::pair<int, int>, double> tot;
  for (const auto& r : rows) tot[{r.t, r.k}] += r.p;
  for (auto& [key, s] : tot) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

}  // namespace

TEST_CASE("example 1: MSI holds, USI fails for Bob with a reproducible counterexample") {
  Example ex = build_example("example1");
  SamplerConfig cfg;
  CHECK(check_msi(ex.game, ex.hs, ex.K, cfg).verdict == Verdict::Holds);
  auto a = check_usi(ex.game, ex.hs, 1, ex.K[1], cfg);
  auto b = check_usi(ex.game, ex.hs, 1, ex.K[1], cfg);
  REQUIRE(a.verdict == Verdict::Fails);
  REQUIRE(a.counterexample);
  REQUIRE(b.counterexample);
  CHECK(a.counterexample->test == b.counterexample->test);
  CHECK(a.counterexample->t == b.counterexample->t);
  CHECK(a.counterexample->lhs == b.counterexample->lhs);
  CHECK(a.counterexample->rhs == b.counterexample->rhs);
  CHECK(a.counterexample->seed == cfg.seed);
}

TEST_CASE("identity compression is an information state and USI") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GameSpec g = oracle::random_game(seed);
    Histories hs = enumerate_histories(g);
    auto K = identity_profile(g, hs);
    Profile others = oracle::random_profile(g, hs, seed);
    for (int i = 0; i < g.num_players(); ++i) {
      auto w = check_information_state(g, hs, i, others, K[i], {0, 1});
      CHECK(w.verdict == Verdict::Holds);
      auto u = check_usi(g, hs, i, K[i]);
      CHECK(u.verdict == Verdict::Holds);
      check_rows_normalized(u.F);
    }
    CHECK(check_msi(g, hs, K).verdict == Verdict::Holds);
    CHECK(check_msi_lemma1(g, hs, K).verdict == Verdict::Holds);
  }
}

TEST_CASE("USI for every player implies MSI, and the sufficient Phi condition implies MSI") {
  int usi_cases = 0, lemma_cases = 0;
  auto examine = [&](const GameSpec& g, const Histories& hs, const std::vector<Compression>& K) {
    SamplerConfig cfg;
    cfg.samples = 6;
    bool all_usi = true;
    for (int i = 0; i < g.num_players() && all_usi; ++i) all_usi = check_usi(g, hs, i, K[i], cfg).verdict == Verdict::Holds;
    const Verdict msi = check_msi(g, hs, K, cfg).verdict;
    if (all_usi) {
      ++usi_cases;
      CHECK(msi == Verdict::Holds);
    }
    if (check_msi_lemma1(g, hs, K, cfg).verdict == Verdict::Holds) {
      ++lemma_cases;
      CHECK(msi == Verdict::Holds);
    }
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oracle::RandomGameOptions o;
    o.public_actions = seed % 2 == 0;
    o.signals = 1 + static_cast<int>(seed % 2);
    GameSpec g = oracle::random_game(seed, o);
    Histories hs = enumerate_histories(g);
    examine(g, hs, identity_profile(g, hs));
    std::vector<Compression> last, none;
    for (int i = 0; i < g.num_players(); ++i) {
      last.push_back(last_increment_k(g, i));
      none.push_back(constant_k(g, i));
    }
    examine(g, hs, last);
    examine(g, hs, none);
  }
  for (const std::string& f : {"ouyang:seed=1", "maskin_tirole:seed=2", "nayyar:seed=1", "repeated:stage=mp,T=2"}) {
    Example ex = build_example(f);
    examine(ex.game, ex.hs, ex.K);
  }
  CHECK(usi_cases >= 20);
  CHECK(lemma_cases >= 20);
}

TEST_CASE("repeated game: a history-dependent opponent breaks the last-action state") {
  Example ex = build_example("repeated:stage=pd,T=3");
  const GameSpec& g = ex.game;
  Profile others = oracle::random_profile(g, ex.hs, 77, 0.05);
  auto w = check_information_state(g, ex.hs, 0, others, ex.K[0], {0});
  CHECK(w.verdict == Verdict::Fails);
  REQUIRE(w.counterexample);
  CHECK(w.counterexample->lhs != doctest::Approx(w.counterexample->rhs));
  // restricted to K-based opponents the same compression is mutually sufficient
  CHECK(check_msi(g, ex.hs, ex.K).verdict == Verdict::Holds);
  CHECK(check_usi(g, ex.hs, 0, ex.K[0]).verdict == Verdict::Fails);
  auto id = identity_compression(g, ex.hs, 0);
  CHECK(check_information_state(g, ex.hs, 0, others, id, {0}).verdict == Verdict::Holds);
}

TEST_CASE("structured families") {
  SamplerConfig cfg;
  SUBCASE("Maskin-Tirole: current state is mutually sufficient with a point-mass Phi") {
    Example ex = build_example("maskin_tirole:seed=3");
    CHECK(check_msi(ex.game, ex.hs, ex.K, cfg).verdict == Verdict::Holds);
    auto r = check_msi_lemma1(ex.game, ex.hs, ex.K, cfg);
    CHECK(r.verdict == Verdict::Holds);
    for (const auto& w : r.players)
      for (const auto& row : w.phi) CHECK((row.p == doctest::Approx(0.0) || row.p == doctest::Approx(1.0)));
  }
  SUBCASE("Nayyar: the sufficient Phi condition holds") {
    Example ex = build_example("nayyar:seed=2");
    CHECK(check_msi_lemma1(ex.game, ex.hs, ex.K, cfg).verdict == Verdict::Holds);
  }
  SUBCASE("Ouyang: USI holds with normalized factors") {
    Example ex = build_example("ouyang:seed=4");
    for (int i = 0; i < 2; ++i) {
      auto w = check_usi(ex.game, ex.hs, i, ex.K[i], cfg);
      CHECK(w.verdict == Verdict::Holds);
      check_rows_normalized(w.F);
    }
  }
}

TEST_CASE("sampler configuration is validated") {
  GameSpec g = example1_game();
  SamplerConfig cfg;
  cfg.samples = 1;
  CHECK_THROWS_AS(check_sampler(cfg, g), Error);
  cfg.samples = 20;
  cfg.mix_floor = 0.6;
  CHECK_THROWS_AS(check_sampler(cfg, g), Error);
  cfg.mix_floor = 0.05;
  CHECK_NOTHROW(check_sampler(cfg, g));
}
