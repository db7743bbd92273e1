// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dyngame/decision.hpp"
#include "dyngame/equilibrium.hpp"
#include "dyngame/info_state.hpp"
#include "dyngame/mdp.hpp"
#include "dyngame/paper_games.hpp"
#include "oracles.hpp"

using namespace dyngame;

namespace {

const std::vector<double> kGrid = {0.05, 0.1, 0.2, 0.3};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double profile_distance(const Profile& a, const Profile& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t t = 0; t < a[i].table.size(); ++t)
      for (std::size_t h = 0; h < a[i].table[t].size(); ++h) d = std::max(d, linf(a[i].table[t][h], b[i].table[t][h]));
  return d;
}

std::vector<Compression> identity_profile(const GameSpec& g, const Histories& hs) {
  std::vector<Compression> K;
  for (int i = 0; i < g.num_players(); ++i) K.push_back(identity_compression(g, hs, i));
  return K;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& why) {
    if (!ok) {
      if (!pass) detail << "; ";
      pass = false;
      detail << why;
    }
  }
};

// ---------------------------------------------------------------- criteria

void ac1(Check& o) {
  double worst_d = 0, worst_time = 0;
  for (double c : kGrid) {
    GameSpec g = example3_game(c);
    Histories hs = enumerate_histories(g);
    auto t0 = Clock::now();
    EnumerateResult r = enumerate_bne_small(g, hs);
    double secs = seconds_since(t0);
    worst_time = std::max(worst_time, secs);
    o.require(r.equilibria.size() == 1, "c=" + fmt(c) + ": " + std::to_string(r.equilibria.size()) + " equilibria");
    if (r.equilibria.empty()) continue;
    double d = profile_distance(r.equilibria[0].profile,
                                example3_profile(g, hs, 1.0 / 3, 1.0 / 3, 1.0 / 3 + c, 1.0 / 3 - c));
    worst_d = std::max(worst_d, d);
    o.require(d <= 1e-6, "c=" + fmt(c) + ": distance to (alpha*, beta*) " + fmt(d));
    o.require(secs < 1.0, "c=" + fmt(c) + ": " + fmt(secs) + " s");
  }
  if (o.pass) o.detail << "unique equilibrium at every c, max distance " << fmt(worst_d) << ", slowest " << fmt(worst_time) << " s";
}

void ac2(Check& o) {
  // extreme points of the pieces of J* and their published values
  struct Point {
    double a1, a2;
    std::function<double(double)> value;
  };
  const std::vector<Point> pts = {
      {0, 0, [](double c) { return c / 2; }},
      {0.5, 0, [](double c) { return c / 4 + 0.5; }},
      {0, 0.5, [](double c) { return 3 * c / 4 + 0.5; }},
      {1, 0, [](double) { return 0.5; }},
      {0, 1, [](double c) { return c + 0.5; }},
      {1.0 / 3, 1.0 / 3, [](double c) { return c / 2 + 2.0 / 3; }},
      {1, 1, [](double c) { return c / 2; }},
  };
  double worst = 0;
  for (double c : kGrid) {
    GameSpec g = example3_game(c);
    Histories hs = enumerate_histories(g);
    auto J = compute_payoffs(g, hs, example3_profile(g, hs, 1.0 / 3, 1.0 / 3, 1.0 / 3 + c, 1.0 / 3 - c));
    double d = std::abs(J[0] - (c / 2 + 2.0 / 3));
    worst = std::max(worst, d);
    o.require(d <= 1e-9, "c=" + fmt(c) + ": value off by " + fmt(d));
    for (const auto& p : pts) {
      // J*(alpha) = Alice's payoff after Bob's exact best reply (zero-sum)
      Profile prof = example3_profile(g, hs, p.a1, p.a2, 0.5, 0.5);
      prof[1] = best_response_value(g, hs, prof, 1).strategy;
      double v = compute_payoffs(g, hs, prof)[0];
      double e = std::max(std::abs(v - p.value(c)), std::abs(example3_J_star(c, p.a1, p.a2) - p.value(c)));
      worst = std::max(worst, e);
      o.require(e <= 1e-9, "c=" + fmt(c) + ": J*(" + fmt(p.a1) + "," + fmt(p.a2) + ") off by " + fmt(e));
    }
  }
  if (o.pass) o.detail << "value and 7 extreme points at 4 values of c, max error " << fmt(worst);
}

void ac3(Check& o) {
  int checked = 0;
  double belief_value = 0;
  for (double c : kGrid) {
    Example ex = build_example("example3", {{"c", std::to_string(c)}});
    std::vector<std::pair<std::string, Profile>> found;
    SolveResult s = solve_k_based_bne(ex.game, ex.hs, ex.K);
    if (s.bne.is_bne) found.push_back({"damped solver", s.profile});
    for (const auto& e : enumerate_bne_small(ex.game, ex.hs).equilibria) found.push_back({"enumeration", e.profile});
    o.require(!found.empty(), "c=" + fmt(c) + ": no BNE returned");
    for (const auto& [who, p] : found) {
      ++checked;
      BeliefBasedReport r = check_belief_based(ex.game, ex.hs, p, *ex.split);
      o.require(!r.belief_based, "c=" + fmt(c) + ", " + who + ": profile reported belief-based");
      // Bob's beliefs after U=-1 and U=+1 coincide while his actions differ
      auto tab = conditional_table(ex.game, ex.hs, p, 1, {{VarKind::State, 0}}, {{VarKind::History, 1}});
      std::vector<double> b;
      for (const auto& row : tab.rows) {
        double plus = 0;
        for (const auto& [v, pr] : row.target)
          if (ex.game.states[1][v[0]] == "x=+1") plus = pr;
        b.push_back(plus);
      }
      o.require(b.size() == 2 && std::abs(b[0] - b[1]) <= 1e-6, "c=" + fmt(c) + ": beliefs differ");
      if (!b.empty()) belief_value = b[0];
      double beta_gap = std::abs(p[1].table[1][0][0] - p[1].table[1][1][0]);
      o.require(beta_gap > 1e-6, "c=" + fmt(c) + ": beta_1 = beta_2");
    }
  }
  if (o.pass)
    o.detail << checked << " equilibria, none belief-based; b2(-) = b2(+) = " << fmt(belief_value)
             << " with beta_1 != beta_2";
}

void ac4(Check& o) {
  Example ex = build_example("example1");
  SamplerConfig cfg;
  o.require(check_msi(ex.game, ex.hs, ex.K, cfg).verdict == Verdict::Holds, "MSI not confirmed");
  auto a = check_usi(ex.game, ex.hs, 1, ex.K[1], cfg);
  auto b = check_usi(ex.game, ex.hs, 1, ex.K[1], cfg);
  o.require(a.verdict == Verdict::Fails && a.counterexample.has_value(), "USI(B) did not fail with a counterexample");
  if (a.counterexample && b.counterexample)
    o.require(a.counterexample->lhs == b.counterexample->lhs && a.counterexample->rhs == b.counterexample->rhs &&
                  a.counterexample->t == b.counterexample->t && a.counterexample->test == b.counterexample->test,
              "counterexample not reproducible");
  SolveResult s = solve_k_based_bne(ex.game, ex.hs, ex.K);
  double ds = linf(s.bne.payoffs, {2, -1});
  o.require(s.bne.is_bne && ds <= 1e-6, "solver payoffs off by " + fmt(ds));
  EnumerateResult r = enumerate_bne_small(ex.game, ex.hs);
  double de = 0;
  for (const std::vector<double>& want : {std::vector<double>{2, -1}, std::vector<double>{1, 0}}) {
    double best = INFINITY;
    for (const auto& p : r.payoff_set) best = std::min(best, linf(p, want));
    de = std::max(de, best);
  }
  o.require(de <= 1e-6, "enumeration misses (2,-1) or (1,0) by " + fmt(de));
  if (o.pass && a.counterexample)
    o.detail << "MSI holds; USI(B) fails (" << a.counterexample->test << " test, t=" << a.counterexample->t
             << "); solver (" << fmt(s.bne.payoffs[0]) << "," << fmt(s.bne.payoffs[1]) << "); "
             << r.payoff_set.size() << " enumerated payoff vectors";
}

void ac5(Check& o) {
  double slowest = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    RandomSizes s;
    s.seed = static_cast<std::uint64_t>(seed);
    auto t0 = Clock::now();
    GameSpec g = ouyang_game(s);
    Histories hs = enumerate_histories(g);
    SamplerConfig cfg;
    cfg.samples = 20;
    cfg.mix_floor = 0.05;
    for (int i = 0; i < 2; ++i) {
      auto w = check_usi(g, hs, i, ouyang_compression(g, hs, i), cfg);
      o.require(w.verdict == Verdict::Holds, "seed " + std::to_string(seed) + ": USI " + to_string(w.verdict) +
                                                 " for player " + std::to_string(i));
    }
    double secs = seconds_since(t0);
    slowest = std::max(slowest, secs);
    o.require(secs < 10, "seed " + std::to_string(seed) + ": " + fmt(secs) + " s");
  }
  if (o.pass) o.detail << "10 instances, USI holds for both players, slowest " << fmt(slowest) << " s";
}

void ac6(Check& o) {
  double worst = 0;
  std::size_t total = 0;
  for (int seed = 1; seed <= 5; ++seed) {
    // one decision stage per player keeps full-strategy enumeration tractable
    Example ex = build_example("ouyang:seed=" + std::to_string(seed) + ",signals=1,sequential=1");
    EnumerateResult r = enumerate_bne_small(ex.game, ex.hs);
    std::vector<std::vector<double>> moved;
    for (const auto& eq : r.equilibria) {
      TransferResult t = transfer_bne_via_usi(ex.game, ex.hs, ex.K, eq.profile);
      o.require(t.ok && t.bne.is_bne, "seed " + std::to_string(seed) + ": transfer failed");
      moved.push_back(t.bne.payoffs);
    }
    o.require(!r.payoff_set.empty(), "seed " + std::to_string(seed) + ": no equilibria");
    double d = hausdorff(r.payoff_set, moved);
    worst = std::max(worst, d);
    total += r.equilibria.size();
    o.require(d <= 1e-4, "seed " + std::to_string(seed) + ": Hausdorff " + fmt(d));
  }
  if (o.pass) o.detail << "5 instances, " << total << " equilibria transferred, max Hausdorff " << fmt(worst);
}

void ac7(Check& o) {
  double worst = 0;
  int passed = 0;
  for (int seed = 1; seed <= 50; ++seed) {
    auto d = oracle::duplicated_mdp(static_cast<std::uint64_t>(seed), 2 + seed % 3, 2 + seed % 2, 2 + seed % 2);
    auto rho = associate_strategy(d.m, d.psi, d.g);
    auto lifted = lift(d.psi, rho);
    auto a = compressed_occupancy(d.m, d.psi, d.g);
    auto b = compressed_occupancy(d.m, d.psi, lifted);
    double e = std::abs(oracle::tree_value(d.m, d.g) - oracle::tree_value(d.m, lifted));
    for (std::size_t t = 0; t < a.size(); ++t) e = std::max(e, linf(a[t], b[t]));
    worst = std::max(worst, e);
    if (e <= 1e-9) ++passed;
  }
  o.require(passed == 50, std::to_string(passed) + "/50 triples within 1e-9");
  if (o.pass) o.detail << "50/50 triples, max deviation " << fmt(worst);
}

void ac8(Check& o) {
  GameSpec g = example2_game();
  Histories hs = enumerate_histories(g);
  Assessment a = example2_assessment(g, hs);
  WpbeReport w = check_wpbe(g, hs, a);
  o.require(w.wpbe, "assessment rejected");
  double alice = compute_payoffs(g, hs, a.profile)[0];
  o.require(std::abs(alice - 1) <= 1e-9, "assessment gives Alice " + fmt(alice));
  WpbeSearchResult s = example2_kbased_wpbe_search(0.02);
  o.require(s.best_alice_payoff <= 1e-9, "K-based search found Alice payoff " + fmt(s.best_alice_payoff));
  if (o.pass)
    o.detail << "assessment is a wPBE with Alice payoff " << fmt(alice) << "; grid search over " << s.alice_points
             << " K-based profiles, " << s.confirmed << " confirmed, best Alice payoff " << fmt(s.best_alice_payoff);
}

void ac9(Check& o) {
  const EpsSchedule sch = EpsSchedule::standard();
  o.require(sch.eps.size() == 13, "default schedule has " + std::to_string(sch.eps.size()) + " points");
  double worst = 0;
  std::vector<std::string> cases = {"example1"};
  for (double c : kGrid) cases.push_back("example3:c=" + std::to_string(c));
  for (const auto& name : cases) {
    Example ex = build_example(name);
    SeSolveResult r = solve_k_based_se(ex.game, ex.hs, ex.K, sch);
    SeReport se = verify_se_canonical(ex.game, ex.hs, r.solve.profile, sch);
    o.require(se.se, name + ": " + se.verdict);
    o.require(r.containment_residual.size() == sch.eps.size(), name + ": missing schedule points");
    for (std::size_t k = 0; k < r.containment_residual.size(); ++k) {
      worst = std::max(worst, r.containment_residual[k]);
      o.require(r.containment_residual[k] <= 1e-9,
                name + ": containment " + fmt(r.containment_residual[k]) + " at eps=" + fmt(sch.eps[k]));
    }
  }
  if (o.pass) o.detail << cases.size() << " solver outputs accepted as SE; max containment residual " << fmt(worst);
}

void ac10(Check& o) {
  double worst_z = 0;
  for (int k = 0; k < 50; ++k) {
    oracle::RandomGameOptions opt;
    opt.horizon = 2 + k % 2;
    opt.public_actions = k % 3 != 0;
    GameSpec g = oracle::random_game(static_cast<std::uint64_t>(500 + k), opt);
    Histories hs = enumerate_histories(g);
    Profile p = oracle::random_profile(g, hs, static_cast<std::uint64_t>(900 + k));
    auto exact = compute_payoffs(g, hs, p);
    auto mc = monte_carlo_payoff(g, hs, p, 100000, static_cast<std::uint64_t>(k + 1));
    for (int i = 0; i < g.num_players(); ++i) {
      double diff = std::abs(mc.mean[i] - exact[i]);
      double z = mc.stderr_[i] > 0 ? diff / mc.stderr_[i] : (diff <= 1e-12 ? 0 : INFINITY);
      worst_z = std::max(worst_z, z);
      o.require(z <= 4, "pair " + std::to_string(k) + ": " + fmt(z) + " standard errors");
    }
  }
  double worst_q = 0;
  for (int k = 0; k < 20; ++k) {
    oracle::RandomGameOptions opt;
    opt.horizon = 2 + k % 2;
    opt.public_actions = k % 2 == 0;
    GameSpec g = oracle::random_game(static_cast<std::uint64_t>(700 + k), opt);
    Histories hs = enumerate_histories(g);
    Profile p = oracle::random_profile(g, hs, static_cast<std::uint64_t>(800 + k), 0.02);
    for (int i = 0; i < g.num_players(); ++i) {
      DecisionProblem dp = build_decision_problem(g, hs, p, i);
      DPResult full = backward_induction(dp.mdp);
      for (double eps : {0.0, 0.05}) {
        BRTables a = best_response_dp_eps(g, hs, i, p, identity_compression(g, hs, i), eps);
        BRTables b = eps_backward_induction(dp.mdp, eps);
        for (int t = 0; t < g.horizon; ++t)
          for (int h = 0; h < hs.count(i, t); ++h) {
            if (!dp.mdp.is_active(t, h)) continue;
            const auto& ref = eps == 0.0 ? full.tables.Q[t][h] : b.Q[t][h];
            worst_q = std::max(worst_q, linf(a.Q[t][h], ref));
          }
      }
    }
  }
  o.require(worst_q <= 1e-9, "Q tables differ by " + fmt(worst_q));
  if (o.pass)
    o.detail << "50 pairs within " << fmt(worst_z) << " standard errors; 20 games, max Q difference " << fmt(worst_q);
}

}  // namespace

int main() {
  const std::vector<std::function<void(Check&)>> criteria = {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10};
  int failures = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    Check o;
    auto t0 = Clock::now();
    try {
      criteria[n](o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("AC%zu %s: %s [%.2f s]\n", n + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
