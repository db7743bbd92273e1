#include "dyngame/paper_games.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dyngame/info_state.hpp"
#include "util.hpp"

namespace dyngame {

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Reference: return "reference";
    case Origin::Elementary: return "elementary";
    case Origin::Oracle: return "oracle";
  }
  return "?";
}

bool FixtureReport::pass() const {
  return std::all_of(results.begin(), results.end(), [](const ExpectationResult& r) { return r.pass; });
}

namespace {

std::string sgn(int v) { return v > 0 ? "+1" : "-1"; }

// Interns increment labels per (stage, player) in discovery order.
struct ZTable {
  std::vector<std::string> labels;
  std::vector<int> own;
  std::map<std::string, int> id;
  int get(const std::string& label, int own_action) {
    auto [it, fresh] = id.try_emplace(label, static_cast<int>(labels.size()));
    if (fresh) {
      labels.push_back(label);
      own.push_back(own_action);
    }
    return it->second;
  }
};

class Builder {
 public:
  Builder(std::vector<std::string> players, int T) {
    g.players = std::move(players);
    g.horizon = T;
    const int n = g.num_players();
    g.states.resize(T + 1);
    g.initial_info.resize(n);
    g.actions.assign(T, std::vector<std::vector<std::string>>(n));
    z.assign(T, std::vector<ZTable>(n));
  }

  GameSpec g;
  std::vector<std::vector<ZTable>> z;

  int zid(int t, int i, const std::string& label, int own) { return z[t][i].get(label, own); }

  // f(t, x, u, outcomes, rewards) fills one kernel row and its rewards.
  template <class F>
  GameSpec finish(F&& f) {
    const int n = g.num_players();
    const int T = g.horizon;
    g.kernel.resize(T);
    g.rewards.resize(T);
    for (int t = 0; t < T; ++t) {
      const int nx = static_cast<int>(g.states[t].size());
      const int nu = g.num_joint_actions(t);
      g.kernel[t].assign(nx, std::vector<std::vector<Outcome>>(nu));
      g.rewards[t].assign(nx, std::vector<std::vector<double>>(nu, std::vector<double>(n, 0.0)));
      for (int x = 0; x < nx; ++x)
        for (int ju = 0; ju < nu; ++ju) f(t, x, g.decode_joint(t, ju), g.kernel[t][x][ju], g.rewards[t][x][ju]);
    }
    g.increments.assign(T, std::vector<std::vector<std::string>>(n));
    g.recall.assign(T, std::vector<std::vector<int>>(n));
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        g.increments[t][i] = z[t][i].labels;
        g.recall[t][i] = z[t][i].own;
      }
    return validate_game(g);
  }
};

// Compression from label maps: init(H_1 label) and update(t, K_{t-1} label, Z_{t-1} label).
Compression compression_from(const GameSpec& g, int i, const std::function<std::string(const std::string&)>& init,
                             const std::function<std::string(int, const std::string&, const std::string&)>& update) {
  Compression c;
  const int T = g.horizon;
  c.labels.resize(T);
  c.update.resize(T);
  std::map<std::string, int> ids;
  auto intern = [&](int t, const std::string& lab) {
    auto [it, fresh] = ids.try_emplace(lab, c.count(t));
    if (fresh) c.labels[t].push_back(lab);
    return it->second;
  };
  for (const auto& h1 : g.initial_info[i]) c.init.push_back(intern(0, init(h1)));
  for (int t = 1; t < T; ++t) {
    ids.clear();
    const int nz = g.num_increments(t - 1, i);
    for (int k = 0; k < c.count(t - 1); ++k)
      for (int zz = 0; zz < nz; ++zz) c.update[t].push_back(intern(t, update(t, c.labels[t - 1][k], g.increments[t - 1][i][zz])));
  }
  return c;
}

Compression constant_compression(const GameSpec& g, int i) {
  return compression_from(g, i, [](const std::string&) { return std::string("-"); },
                          [](int, const std::string&, const std::string&) { return std::string("-"); });
}

// Value of "key=" inside a ';'- or ','-separated label.
std::string field(const std::string& label, const std::string& key) {
  std::size_t pos = 0;
  while (pos <= label.size()) {
    std::size_t end = label.find_first_of(";", pos);
    if (end == std::string::npos) end = label.size();
    std::string part = label.substr(pos, end - pos);
    if (part.rfind(key + "=", 0) == 0) return part.substr(key.size() + 1);
    pos = end + 1;
  }
  return "";
}

std::vector<double> random_row(int m, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(m);
  double tot = 0;
  for (double& x : w) tot += (x = 0.05 + e(rng));
  for (double& x : w) x /= tot;
  return w;
}

double random_reward(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return u(rng);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? sep : "") + parts[k];
  return s;
}

double get_d(const Params& p, const std::string& k, double def) {
  auto it = p.find(k);
  if (it == p.end()) return def;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(k);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::BadParameter, "parameter " + k + " is not a number: " + it->second);
  }
}

int get_i(const Params& p, const std::string& k, int def) {
  double v = get_d(p, k, def);
  if (v != std::floor(v)) throw Error(ErrorKind::BadParameter, "parameter " + k + " must be an integer");
  return static_cast<int>(v);
}

std::string get_s(const Params& p, const std::string& k, const std::string& def) {
  auto it = p.find(k);
  return it == p.end() ? def : it->second;
}

// ---- expectation helpers

ExpectationResult result(const Expectation& e, bool pass, double delta, const std::string& detail) {
  return {e.name, e.origin, pass, delta, e.tol, detail};
}

Expectation expect_close(std::string name, Origin o, double tol,
                         std::function<std::pair<double, double>(const Example&)> f) {
  Expectation e{std::move(name), o, tol, {}};
  e.run = [e, f](const Example& ex) {
    auto [actual, expected] = f(ex);
    double d = std::abs(actual - expected);
    return result(e, d <= e.tol, d,
                  "actual " + detail::fmt_double(actual) + ", expected " + detail::fmt_double(expected));
  };
  return e;
}

Expectation expect_true(std::string name, Origin o, std::function<std::pair<bool, std::string>(const Example&)> f,
                        double tol = 0) {
  Expectation e{std::move(name), o, tol, {}};
  e.run = [e, f](const Example& ex) {
    auto [ok, detail] = f(ex);
    return result(e, ok, ok ? 0.0 : 1.0, detail);
  };
  return e;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

std::string vec_str(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + detail::fmt_double(v[k]);
  return s + ")";
}

Expectation expect_msi(Verdict want, Origin o) {
  return expect_true(std::string("MSI ") + (want == Verdict::Holds ? "holds" : "fails"), o, [want](const Example& ex) {
    MsiResult r = check_msi(ex.game, ex.hs, ex.K);
    std::string d = r.label;
    if (r.counterexample) d += " (" + r.counterexample->test + " at stage " + std::to_string(r.counterexample->t) + ")";
    return std::make_pair(r.verdict == want, d);
  });
}

Expectation expect_usi(int i, Verdict want, Origin o, const std::string& who) {
  return expect_true("USI " + std::string(want == Verdict::Holds ? "holds" : "fails") + " for " + who, o,
                     [i, want](const Example& ex) {
                       InfoStateWitness w = check_usi(ex.game, ex.hs, i, ex.K[i]);
                       std::string d = w.label;
                       if (w.counterexample)
                         d += " (" + w.counterexample->test + " at stage " + std::to_string(w.counterexample->t) + ")";
                       return std::make_pair(w.verdict == want, d);
                     });
}

Expectation expect_solver_bne(Origin o) {
  Expectation e{"K-based solver returns a BNE", o, 1e-6, {}};
  e.run = [e](const Example& ex) {
    SolveResult r = solve_k_based_bne(ex.game, ex.hs, ex.K);
    double gap = r.bne.max_gap();
    return result(e, r.converged && gap <= e.tol, gap,
                  "max gap " + detail::fmt_double(gap) + ", payoffs " + vec_str(r.bne.payoffs) + ", limit " +
                      r.limit_method);
  };
  return e;
}

}  // namespace

int RandomSizes::action_count(int t, int i) const {
  if (!per_stage_actions.empty()) return per_stage_actions.at(t).at(i);
  return actions;
}

// ---------------------------------------------------------------- example 1

GameSpec example1_game() {
  Builder b({"A", "B"}, 2);
  auto& g = b.g;
  g.states = {{"-"}, {"-"}, {"-"}};
  g.initial_info = {{"-"}, {"-"}};
  g.actions[0] = {{"0", "1"}, {"-"}};
  g.actions[1] = {{"-"}, {"-1", "+1"}};
  g.initial = {{0, {0, 0}, 1.0}};
  return b.finish([&](int t, int, const std::vector<int>& u, std::vector<Outcome>& out, std::vector<double>& r) {
    if (t == 0) {
      std::string lab = "U=" + std::to_string(u[0]);
      out.push_back({0, {b.zid(0, 0, lab, u[0]), b.zid(0, 1, lab, 0)}, 1.0});
      r = {double(u[0]), -double(u[0])};
    } else {
      std::string lab = "V=" + sgn(u[1] ? 1 : -1);
      out.push_back({0, {b.zid(1, 0, lab, 0), b.zid(1, 1, lab, u[1])}, 1.0});
      r = {u[1] ? 1.0 : -1.0, 0.0};
    }
  });
}

// ---------------------------------------------------------------- example 2

GameSpec example2_game() {
  Builder b({"A", "B"}, 2);
  auto& g = b.g;
  for (int a : {-1, 1})
    for (int c : {-1, 1}) g.states[0].push_back("xA=" + sgn(a) + ";xB=" + sgn(c));
  g.states[1] = {"x=-1", "x=+1"};
  g.states[2] = {"-"};
  g.initial_info = {{"xA=-1", "xA=+1"}, {"xB=-1", "xB=+1"}};
  g.actions[0] = {{"-"}, {"-1", "+1"}};
  g.actions[1] = {{"-1", "0", "+1"}, {"-1", "0", "+1"}};
  for (int s = 0; s < 4; ++s) g.initial.push_back({s, {s / 2, s % 2}, 0.25});
  return b.finish([&](int t, int x, const std::vector<int>& u, std::vector<Outcome>& out, std::vector<double>& r) {
    if (t == 0) {
      std::string lab = "U=" + sgn(u[1] ? 1 : -1);
      out.push_back({x % 2, {b.zid(0, 0, lab, 0), b.zid(0, 1, lab, u[1])}, 1.0});
      r = {u[1] == 0 ? -1.0 : 0.0, u[1] == 0 ? 0.2 : 0.0};
    } else {
      const int ua = u[0] - 1, ub = u[1] - 1, x2 = x ? 1 : -1;
      std::string lab = "UA=" + g.actions[1][0][u[0]] + ";UB=" + g.actions[1][1][u[1]];
      out.push_back({0, {b.zid(1, 0, lab, u[0]), b.zid(1, 1, lab, u[1])}, 1.0});
      r = {(ua == x2 || ua == 0) ? 1.0 : 0.0, ua == ub ? -1.0 : 0.0};
    }
  });
}

Compression example2_alice_compression(const GameSpec& g, const Histories&) {
  return compression_from(
      g, 0, [](const std::string& h1) { return h1; },
      [](int, const std::string&, const std::string& z) { return z; });
}

Assessment example2_assessment(const GameSpec& g, const Histories& hs) {
  const int T = g.horizon;
  Assessment a;
  a.profile = uniform_profile(g, hs);
  // Bob: +1 at stage 1, -1 at stage 2
  for (auto& d : a.profile[1].table[0]) d = {0, 1};
  for (auto& d : a.profile[1].table[1]) d = {1, 0, 0};
  for (int h = 0; h < hs.count(0, 1); ++h) {
    std::string lab = hs.label(g, 0, 1, h);  // "xA=../U=.."
    bool plus = lab.find("U=+1") != std::string::npos;
    bool xa_plus = lab.find("xA=+1") != std::string::npos;
    a.profile[0].table[1][h] = plus ? Dist{0, 1, 0} : (xa_plus ? Dist{0, 1.0 / 3, 2.0 / 3} : Dist{2.0 / 3, 1.0 / 3, 0});
  }
  a.belief.assign(2, std::vector<std::vector<std::vector<BeliefEntry>>>(T));
  auto hid = [&](int i, int t, const std::string& lab) {
    int h = hs.find(g, i, t, lab);
    if (h < 0) throw Error(ErrorKind::DomainMiss, "no history " + lab);
    return h;
  };
  auto xa = [](int s) { return s ? std::string("xA=+1") : std::string("xA=-1"); };
  auto xb = [](int s) { return s ? std::string("xB=+1") : std::string("xB=-1"); };
  for (int i = 0; i < 2; ++i)
    for (int t = 0; t < T; ++t) a.belief[i][t].resize(hs.count(i, t));
  // stage 1: prior over the other type
  for (int s = 0; s < 4; ++s) {
    int A = s / 2, B = s % 2;
    std::vector<int> key{s, hid(0, 0, xa(A)), hid(1, 0, xb(B))};
    a.belief[0][0][key[1]].push_back({key, 0.5});
    a.belief[1][0][key[2]].push_back({key, 0.5});
  }
  for (int A = 0; A < 2; ++A)
    for (int u = 0; u < 2; ++u) {
      std::string ul = u ? "U=+1" : "U=-1";
      int ha = hid(0, 1, xa(A) + "/" + ul);
      for (int B = 0; B < 2; ++B) {
        int hb = hid(1, 1, xb(B) + "/" + ul);
        std::vector<int> key{B, ha, hb};
        // Alice: uniform after +1, point mass X2 = x_A after -1
        double pa = u ? 0.5 : (B == A ? 1.0 : 0.0);
        if (pa > 0) a.belief[0][1][ha].push_back({key, pa});
        a.belief[1][1][hb].push_back({key, 0.5});
      }
    }
  return a;
}

WpbeSearchResult example2_kbased_wpbe_search(double resolution) {
  if (!(resolution > 0 && resolution <= 1)) throw Error(ErrorKind::BadParameter, "resolution must lie in (0, 1]");
  const int N = static_cast<int>(std::lround(1.0 / resolution));
  if (std::abs(N * resolution - 1.0) > 1e-9) throw Error(ErrorKind::BadParameter, "1/resolution must be an integer");
  GameSpec g = example2_game();
  Histories hs = enumerate_histories(g);
  WpbeSearchResult res;
  res.resolution = resolution;

  // Alice's stage-2 reward ra[a][x2]; Bob's stage-1 and stage-2 rewards
  double ra[3][2], rb2[3][3], rb1[2];
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 2; ++x) ra[a][x] = g.rewards[1][x][g.encode_joint(1, {a, 0})][0];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) rb2[a][b] = g.rewards[1][0][g.encode_joint(1, {a, b})][1];
  for (int u = 0; u < 2; ++u) rb1[u] = g.rewards[0][0][g.encode_joint(0, {0, u})][1];

  std::vector<std::array<double, 3>> simplex;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; i + j <= N; ++j) simplex.push_back({double(i) / N, double(j) / N, double(N - i - j) / N});

  const double tol = 1e-9;
  // rational at belief pi = Pr(X_2 = +1)
  auto rational_at = [&](const std::array<double, 3>& d, double pi) {
    double q[3], best = -1e300;
    for (int a = 0; a < 3; ++a) best = std::max(best, q[a] = (1 - pi) * ra[a][0] + pi * ra[a][1]);
    for (int a = 0; a < 3; ++a)
      if (d[a] > 0 && q[a] < best - tol) return false;
    return true;
  };
  // candidate beliefs: endpoints and pairwise crossings
  std::vector<double> crit{0.0, 1.0};
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      double da = ra[a][1] - ra[a][0], db = ra[b][1] - ra[b][0];
      if (std::abs(da - db) > 1e-15) {
        double pi = (ra[b][0] - ra[a][0]) / (da - db);
        if (pi > 0 && pi < 1) crit.push_back(pi);
      }
    }
  std::vector<double> witness(simplex.size(), -1);
  for (std::size_t s = 0; s < simplex.size(); ++s)
    for (double pi : crit)
      if (rational_at(simplex[s], pi)) {
        witness[s] = pi;
        break;
      }

  res.alice_points = simplex.size() * simplex.size();
  const int hb_count = hs.count(1, 1);
  for (std::size_t sa = 0; sa < simplex.size(); ++sa) {
    if (witness[sa] < 0) continue;
    for (std::size_t sb = 0; sb < simplex.size(); ++sb) {
      if (witness[sb] < 0) continue;
      ++res.rationalizable;
      const std::array<double, 3>* d[2] = {&simplex[sa], &simplex[sb]};  // after U=-1, U=+1
      // Bob's stage-2 best reply and stage-1 values
      int reply[2];
      double qb[2];
      for (int u = 0; u < 2; ++u) {
        double best = -1e300;
        for (int b = 0; b < 3; ++b) {
          double v = 0;
          for (int a = 0; a < 3; ++a) v += (*d[u])[a] * rb2[a][b];
          if (v > best + tol) {
            best = v;
            reply[u] = b;
          }
        }
        qb[u] = rb1[u] + best;
      }
      const double top = std::max(qb[0], qb[1]);
      const bool br[2] = {qb[0] >= top - tol, qb[1] >= top - tol};
      std::vector<double> grid;
      if (br[0] && br[1])
        for (int k = 0; k <= N; ++k) grid.push_back(double(k) / N);
      else
        grid.push_back(br[1] ? 1.0 : 0.0);
      for (double pm : grid)
        for (double pp : grid) {
          // pm, pp: Pr(U_1 = +1 | x_B = -1, +1)
          double on[2] = {0.5 * (1 - pm) + 0.5 * (1 - pp), 0.5 * pm + 0.5 * pp};
          double post[2] = {on[0] > 0 ? 0.5 * (1 - pp) / on[0] : -1, on[1] > 0 ? 0.5 * pp / on[1] : -1};
          bool ok = true;
          for (int u = 0; u < 2 && ok; ++u)
            if (on[u] > 0 && !rational_at(*d[u], post[u])) ok = false;
          if (!ok) continue;
          ++res.candidates;
          Assessment as;
          as.profile = uniform_profile(g, hs);
          for (int h = 0; h < hs.count(0, 1); ++h) {
            bool plus = hs.label(g, 0, 1, h).find("U=+1") != std::string::npos;
            const auto& dd = *d[plus ? 1 : 0];
            as.profile[0].table[1][h] = {dd[0], dd[1], dd[2]};
          }
          for (int h = 0; h < hs.count(1, 0); ++h) {
            bool xplus = hs.label(g, 1, 0, h) == "xB=+1";
            double p = xplus ? pp : pm;
            as.profile[1].table[0][h] = {1 - p, p};
          }
          for (int h = 0; h < hb_count; ++h) {
            bool plus = hs.label(g, 1, 1, h).find("U=+1") != std::string::npos;
            Dist r(3, 0.0);
            r[reply[plus ? 1 : 0]] = 1;
            as.profile[1].table[1][h] = r;
          }
          // beliefs: Bayes where reached, the rationalizing belief elsewhere
          as.belief = bayes_beliefs(g, hs, as.profile);
          for (int h = 0; h < hs.count(0, 1); ++h) {
            if (!as.belief[0][1][h].empty()) continue;
            std::string lab = hs.label(g, 0, 1, h);
            bool plus = lab.find("U=+1") != std::string::npos;
            double pi = witness[plus ? sb : sa];
            std::string ul = plus ? "U=+1" : "U=-1";
            for (int B = 0; B < 2; ++B) {
              double p = B ? pi : 1 - pi;
              if (p <= 0) continue;
              int hb = hs.find(g, 1, 1, std::string(B ? "xB=+1" : "xB=-1") + "/" + ul);
              as.belief[0][1][h].push_back({{B, h, hb}, p});
            }
          }
          for (int h = 0; h < hb_count; ++h) {
            if (!as.belief[1][1][h].empty()) continue;
            std::string lab = hs.label(g, 1, 1, h);
            int B = lab.rfind("xB=+1", 0) == 0 ? 1 : 0;
            std::string ul = lab.substr(lab.find('/') + 1);
            for (int A = 0; A < 2; ++A)
              as.belief[1][1][h].push_back(
                  {{B, hs.find(g, 0, 1, std::string(A ? "xA=+1" : "xA=-1") + "/" + ul), h}, 0.5});
          }
          WpbeReport rep = check_wpbe(g, hs, as);
          if (!rep.wpbe) continue;
          ++res.confirmed;
          if (rep.payoffs[0] > res.best_alice_payoff) {
            res.best_alice_payoff = rep.payoffs[0];
            res.best = as;
          }
        }
    }
  }
  return res;
}

// ---------------------------------------------------------------- example 3

GameSpec example3_game(double c) {
  if (!(c > 0 && c < 1.0 / 3)) throw Error(ErrorKind::BadParameter, "example3 needs c in (0, 1/3)");
  Builder b({"A", "B"}, 2);
  auto& g = b.g;
  g.reward_bound = 2;
  g.states = {{"x=-1", "x=+1"}, {"x=-1", "x=+1"}, {"-"}};
  g.initial_info = {{"x=-1", "x=+1"}, {"-"}};
  g.actions[0] = {{"-1", "+1"}, {"-"}};
  g.actions[1] = {{"-"}, {"U", "D"}};
  g.initial = {{0, {0, 0}, 0.5}, {1, {1, 0}, 0.5}};
  return b.finish([&](int t, int x, const std::vector<int>& u, std::vector<Outcome>& out, std::vector<double>& r) {
    if (t == 0) {
      const int u1 = u[0] ? 1 : -1, x1 = x ? 1 : -1, x2 = x1 * u1;
      std::string ul = "U=" + sgn(u1);
      out.push_back({x2 > 0 ? 1 : 0, {b.zid(0, 0, ul + ";X=" + sgn(x2), u[0]), b.zid(0, 1, ul, 0)}, 1.0});
      double ra = u1 > 0 ? c : 0.0;
      r = {ra, -ra};
    } else {
      std::string lab = "V=" + g.actions[1][1][u[1]];
      out.push_back({0, {b.zid(1, 0, lab, 0), b.zid(1, 1, lab, u[1])}, 1.0});
      double ra = (x == 1 && u[1] == 0) ? 2.0 : (x == 0 && u[1] == 1) ? 1.0 : 0.0;
      r = {ra, -ra};
    }
  });
}

Profile example3_profile(const GameSpec& g, const Histories& hs, double a1, double a2, double b1, double b2) {
  Profile p = uniform_profile(g, hs);
  for (int h = 0; h < hs.count(0, 0); ++h) {
    bool plus = hs.label(g, 0, 0, h) == "x=+1";
    p[0].table[0][h] = plus ? Dist{1 - a2, a2} : Dist{a1, 1 - a1};
  }
  for (int h = 0; h < hs.count(1, 1); ++h) {
    bool plus = hs.label(g, 1, 1, h).find("U=+1") != std::string::npos;
    double up = plus ? b2 : b1;
    p[1].table[1][h] = {up, 1 - up};
  }
  return p;
}

double example3_J(double c, double a1, double a2, double b1, double b2) {
  return 0.5 * c * (1 - a1 + a2) + 0.5 * (2 - a1 - a2) + 0.5 * (2 * a1 + a2 - 1) * b1 + 0.5 * (2 * a2 + a1 - 1) * b2;
}

double example3_J_star(double c, double a1, double a2) {
  double k1 = 2 * a1 + a2 - 1, k2 = 2 * a2 + a1 - 1;
  return example3_J(c, a1, a2, k1 < 0 ? 1.0 : 0.0, k2 < 0 ? 1.0 : 0.0);
}

InfoSplit example3_split(const GameSpec& g, const Histories& hs) {
  InfoSplit s;
  const int n = g.num_players(), T = g.horizon;
  s.common.assign(n, std::vector<std::vector<int>>(T));
  s.priv.assign(n, std::vector<std::vector<int>>(T));
  s.common_labels.resize(T);
  s.private_labels.assign(n, std::vector<std::vector<std::string>>(T));
  for (int t = 0; t < T; ++t) {
    std::map<std::string, int> cid;
    std::vector<std::map<std::string, int>> pid(n);
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < hs.count(i, t); ++h) {
        std::string lab = hs.label(g, i, t, h), common = "-", priv = "-";
        if (t == 0) {
          priv = lab;
        } else {
          std::string z = lab.substr(lab.rfind('/') + 1);  // "U=..;X=.." or "U=.."
          common = z.substr(0, z.find(';'));
          if (z.find(';') != std::string::npos) priv = z.substr(z.find(';') + 1);
        }
        auto [ci, cf] = cid.try_emplace(common, static_cast<int>(s.common_labels[t].size()));
        if (cf) s.common_labels[t].push_back(common);
        auto [pi, pf] = pid[i].try_emplace(priv, static_cast<int>(s.private_labels[i][t].size()));
        if (pf) s.private_labels[i][t].push_back(priv);
        s.common[i][t].push_back(ci->second);
        s.priv[i][t].push_back(pi->second);
      }
  }
  return s;
}

// ---------------------------------------------------------------- repeated games

StageGame stage_game(const std::string& name) {
  StageGame s;
  if (name == "pd") {
    s.actions0 = s.actions1 = {"C", "D"};
    s.payoff = {{{0.75, 0.0}, {1.0, 0.25}}, {{0.75, 1.0}, {0.0, 0.25}}};
  } else if (name == "mp") {
    s.actions0 = s.actions1 = {"H", "T"};
    s.payoff = {{{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}}};
  } else if (name == "coord") {
    s.actions0 = s.actions1 = {"L", "R"};
    s.payoff = {{{1, 0}, {0, 1}}, {{1, 0}, {0, 1}}};
  } else {
    throw Error(ErrorKind::BadParameter, "unknown stage game " + name + " (pd, mp, coord)");
  }
  return s;
}

GameSpec repeated_game(const StageGame& s, int T) {
  if (T < 1) throw Error(ErrorKind::BadParameter, "horizon must be positive");
  Builder b({"P1", "P2"}, T);
  auto& g = b.g;
  for (int t = 0; t <= T; ++t) g.states[t] = {"-"};
  g.initial_info = {{"-"}, {"-"}};
  for (int t = 0; t < T; ++t) g.actions[t] = {s.actions0, s.actions1};
  g.initial = {{0, {0, 0}, 1.0}};
  double bound = 0;
  for (const auto& m : s.payoff)
    for (const auto& row : m)
      for (double v : row) bound = std::max(bound, std::abs(v));
  g.reward_bound = std::max(1.0, bound);
  return b.finish([&](int t, int, const std::vector<int>& u, std::vector<Outcome>& out, std::vector<double>& r) {
    std::string lab = s.actions0[u[0]] + "," + s.actions1[u[1]];
    out.push_back({0, {b.zid(t, 0, lab, u[0]), b.zid(t, 1, lab, u[1])}, 1.0});
    r = {s.payoff[0][u[0]][u[1]], s.payoff[1][u[0]][u[1]]};
  });
}

Compression last_action_compression(const GameSpec& g, const Histories&, int i) {
  return compression_from(
      g, i, [](const std::string&) { return std::string("-"); },
      [](int, const std::string&, const std::string& z) { return z; });
}

// ---------------------------------------------------------------- seeded families

namespace {

std::vector<std::string> numbered(const std::string& prefix, int m) {
  std::vector<std::string> v;
  for (int k = 0; k < m; ++k) v.push_back(prefix + std::to_string(k));
  return v;
}

void check_sizes(const RandomSizes& s) {
  if (s.players < 1 || s.horizon < 1 || s.states < 1 || s.actions < 1 || s.signals < 1)
    throw Error(ErrorKind::BadParameter, "sizes must be positive");
  if (!s.per_stage_actions.empty()) {
    if (static_cast<int>(s.per_stage_actions.size()) != s.horizon)
      throw Error(ErrorKind::BadParameter, "per-stage action counts need one row per stage");
    for (const auto& row : s.per_stage_actions)
      if (static_cast<int>(row.size()) != s.players || *std::min_element(row.begin(), row.end()) < 1)
        throw Error(ErrorKind::BadParameter, "per-stage action counts need one positive entry per player");
  }
}

// mixed-radix helpers
std::vector<int> digits(int code, int base, int len) {
  std::vector<int> d(len);
  for (int k = len - 1; k >= 0; --k) {
    d[k] = code % base;
    code /= base;
  }
  return d;
}

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

std::string digits_label(const std::vector<int>& d) {
  std::vector<std::string> p;
  for (int v : d) p.push_back(std::to_string(v));
  return join(p, ",");
}

}  // namespace

GameSpec maskin_tirole_game(const RandomSizes& s) {
  check_sizes(s);
  std::mt19937_64 rng(s.seed);
  Builder b(numbered("P", s.players), s.horizon);
  auto& g = b.g;
  const int n = s.players, T = s.horizon;
  for (int t = 0; t < T; ++t) g.states[t] = numbered("s", s.states);
  g.states[T] = {"-"};
  for (int i = 0; i < n; ++i) g.initial_info[i] = g.states[0];
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) g.actions[t][i] = numbered("a", s.action_count(t, i));
  auto nu = random_row(s.states, rng);
  for (int x = 0; x < s.states; ++x) g.initial.push_back({x, std::vector<int>(n, x), nu[x]});
  return b.finish([&](int t, int, const std::vector<int>& u, std::vector<Outcome>& out, std::vector<double>& r) {
    std::vector<std::string> ul;
    for (int i = 0; i < n; ++i) ul.push_back(g.actions[t][i][u[i]]);
    const bool last = t == T - 1;
    auto P = last ? std::vector<double>{1.0} : random_row(s.states, rng);
    for (int x2 = 0; x2 < static_cast<int>(P.size()); ++x2) {
      std::string lab = "x=" + g.states[t + 1][x2] + ";u=" + join(ul, ",");
      std::vector<int> z(n);
      for (int i = 0; i < n; ++i) z[i] = b.zid(t, i, lab, u[i]);
      out.push_back({x2, z, P[x2]});
    }
    for (int i = 0; i < n; ++i) r[i] = random_reward(rng);
  });
}

Compression current_state_compression(const GameSpec& g, const Histories&, int i) {
  return compression_from(
      g, i, [](const std::string& h1) { return h1; },
      [](int, const std::string&, const std::string& z) { return field(z, "x"); });
}

GameSpec nayyar_game(const RandomSizes& s) {
  check_sizes(s);
  std::mt19937_64 rng(s.seed);
  const int n = s.players, T = s.horizon, X = s.states, L = s.signals;
  const int NL = ipow(L, n);
  Builder b(numbered("P", n), T);
  auto& g = b.g;
  // state (x, l^1..l^n) with id x * L^n + code(l)
  auto state_label = [&](int id) { return "x=" + std::to_string(id / NL) + ";l=" + digits_label(digits(id % NL, L, n)); };
  for (int t = 0; t < T; ++t)
    for (int id = 0; id < X * NL; ++id) g.states[t].push_back(state_label(id));
  g.states[T] = {"-"};
  for (int i = 0; i < n; ++i)
    for (int x = 0; x < X; ++x)
      for (int l = 0; l < L; ++l) g.initial_info[i].push_back("x=" + std::to_string(x) + ";l=" + std::to_string(l));
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) g.actions[t][i] = numbered("a", s.action_count(t, i));
  // signal laws Q_t^i(l | x), fixed per stage and independent of actions
  std::vector<std::vector<std::vector<std::vector<double>>>> Q(T, std::vector<std::vector<std::vector<double>>>(n));
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i)
      for (int x = 0; x < X; ++x) Q[t][i].push_back(random_row(L, rng));
  auto nu = random_row(X, rng);
  for (int id = 0; id < X * NL; ++id) {
    const int x = id / NL;
    auto l = digits(id % NL, L, n);
    double p = nu[x];
    std::vector<int> info(n);
    for (int i = 0; i < n; ++i) {
      p *= Q[0][i][x][l[i]];
      info[i] = x * L + l[i];
    }
    g.initial.push_back({id, info, p});
  }
  return b.finish([&](int t, int id, const std::vector<int>& u, std::vector<Outcome>& out, std::vector<double>& r) {
    std::vector<std::string> ul;
    for (int i = 0; i < n; ++i) ul.push_back(g.actions[t][i][u[i]]);
    const std::string L_now = digits_label(digits(id % NL, L, n));
    const bool last = t == T - 1;
    if (last) {
      std::string lab = "u=" + join(ul, ",") + ";L=" + L_now;
      std::vector<int> z(n);
      for (int i = 0; i < n; ++i) z[i] = b.zid(t, i, lab, u[i]);
      out.push_back({0, z, 1.0});
    } else {
      auto P = random_row(X, rng);
      for (int x2 = 0; x2 < X; ++x2)
        for (int code = 0; code < NL; ++code) {
          auto l2 = digits(code, L, n);
          double p = P[x2];
          for (int i = 0; i < n; ++i) p *= Q[t + 1][i][x2][l2[i]];
          std::vector<int> z(n);
          for (int i = 0; i < n; ++i)
            z[i] = b.zid(t, i,
                         "u=" + join(ul, ",") + ";L=" + L_now + ";x=" + std::to_string(x2) + ";l=" + std::to_string(l2[i]),
                         u[i]);
          out.push_back({x2 * NL + code, z, p});
        }
    }
    for (int i = 0; i < n; ++i) r[i] = random_reward(rng);
  });
}

Compression nayyar_compression(const GameSpec& g, const Histories&, int i) {
  // Pi_t is the point mass on x_t times the fixed signal law, so it is
  // labelled by x_t.
  auto k = [](const std::string& x, const std::string& l) { return "pi(x=" + x + ");l=" + l; };
  return compression_from(
      g, i, [&](const std::string& h1) { return k(field(h1, "x"), field(h1, "l")); },
      [&](int, const std::string&, const std::string& z) { return k(field(z, "x"), field(z, "l")); });
}

GameSpec ouyang_game(const RandomSizes& s) {
  check_sizes(s);
  std::mt19937_64 rng(s.seed);
  const int n = s.players, T = s.horizon, X = s.states, Y = s.signals;
  const int NX = ipow(X, n);
  Builder b(numbered("P", n), T);
  auto& g = b.g;
  for (int t = 0; t < T; ++t)
    for (int id = 0; id < NX; ++id) g.states[t].push_back("x=" + digits_label(digits(id, X, n)));
  g.states[T] = {"-"};
  for (int i = 0; i < n; ++i) g.initial_info[i] = numbered("x=", X);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) {
      int m = s.action_count(t, i);
      g.actions[t][i] = m == 1 ? std::vector<std::string>{"-"} : numbered("a", m);
    }
  // local initial laws
  std::vector<std::vector<double>> nu;
  for (int i = 0; i < n; ++i) nu.push_back(random_row(X, rng));
  for (int id = 0; id < NX; ++id) {
    auto x = digits(id, X, n);
    double p = 1;
    for (int i = 0; i < n; ++i) p *= nu[i][x[i]];
    g.initial.push_back({id, x, p});
  }
  // local kernels f_t^i: (x^i, u) -> (x'^i, y^i), drawn once per (t, i, x^i, u)
  std::map<std::vector<int>, std::vector<double>> local;
  auto local_row = [&](int t, int i, int xi, int ju) -> const std::vector<double>& {
    auto key = std::vector<int>{t, i, xi, ju};
    auto it = local.find(key);
    if (it == local.end()) it = local.emplace(key, random_row(X * Y, rng)).first;
    return it->second;
  };
  // fix the draw order so it does not depend on the caller's iteration
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i)
      for (int xi = 0; xi < X; ++xi)
        for (int ju = 0; ju < g.num_joint_actions(t); ++ju) local_row(t, i, xi, ju);
  std::vector<std::vector<std::vector<double>>> rew(T);
  for (int t = 0; t < T; ++t)
    for (int id = 0; id < NX; ++id)
      for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
        std::vector<double> r(n);
        for (double& v : r) v = random_reward(rng);
        rew[t].push_back(r);
      }
  return b.finish([&](int t, int id, const std::vector<int>& u, std::vector<Outcome>& out, std::vector<double>& r) {
    const int ju = g.encode_joint(t, u);
    auto x = digits(id, X, n);
    std::vector<std::string> ul;
    for (int i = 0; i < n; ++i) ul.push_back(g.actions[t][i][u[i]]);
    const bool last = t == T - 1;
    // joint over (x'^i, y^i) for every player
    const int per = X * Y;
    const int total = ipow(per, n);
    std::map<std::pair<int, std::vector<int>>, double> acc;
    for (int code = 0; code < total; ++code) {
      auto c = digits(code, per, n);
      double p = 1;
      std::vector<int> x2(n), y(n);
      for (int i = 0; i < n; ++i) {
        p *= local_row(t, i, x[i], ju)[c[i]];
        x2[i] = c[i] / Y;
        y[i] = c[i] % Y;
      }
      std::string pub = "y=" + digits_label(y) + ";u=" + join(ul, ",");
      std::vector<int> z(n);
      int next = 0;
      if (last) {
        for (int i = 0; i < n; ++i) z[i] = b.zid(t, i, pub, u[i]);
      } else {
        for (int i = 0; i < n; ++i) {
          z[i] = b.zid(t, i, pub + ";x=" + std::to_string(x2[i]), u[i]);
          next = next * X + x2[i];
        }
      }
      acc[{next, z}] += p;
    }
    for (const auto& [k, p] : acc) out.push_back({k.first, k.second, p});
    r = rew[t][id * g.num_joint_actions(t) + ju];
  });
}

Compression ouyang_compression(const GameSpec& g, const Histories&, int i) {
  // label "[y;u]...x=<local state>": public record, then the local state
  return compression_from(
      g, i, [](const std::string& h1) { return h1; },
      [](int, const std::string& k, const std::string& z) {
        std::string pub = k.substr(0, k.rfind("x="));
        return pub + "[" + field(z, "y") + ";" + field(z, "u") + "]x=" + field(z, "x");
      });
}

// ---------------------------------------------------------------- structural checks

namespace {

// part(x) recoverable from every player's history at every stage.
bool observable_by(const GameSpec& g, const std::function<int(int)>& part) {
  Histories hs = enumerate_histories(g);
  JointDistribution jd = forward_distribution(g, hs, uniform_profile(g, hs));
  for (int t = 0; t < g.horizon; ++t)
    for (int i = 0; i < g.num_players(); ++i) {
      std::vector<int> seen(hs.count(i, t), -1);
      const JointTable& tab = jd.stage[t];
      for (std::size_t e = 0; e < tab.size(); ++e) {
        int& s = seen[tab.key(e)[i + 1]];
        const int v = part(tab.key(e)[0]);
        if (s >= 0 && s != v) return false;
        s = v;
      }
    }
  return true;
}

}  // namespace

bool state_observable(const GameSpec& g) {
  return observable_by(g, [](int x) { return x; });
}

bool previous_state_revealed(const GameSpec& g) {
  Histories hs = enumerate_histories(g);
  JointDistribution jd = forward_distribution(g, hs, uniform_profile(g, hs));
  const int n = g.num_players();
  for (int t = 0; t + 1 < g.horizon; ++t) {
    const JointTable& tab = jd.stage[t];
    std::vector<std::vector<int>> seen(n);
    for (int i = 0; i < n; ++i) seen[i].assign(hs.count(i, t + 1), -1);
    for (std::size_t e = 0; e < tab.size(); ++e) {
      const int* k = tab.key(e);
      for (int ju = 0; ju < g.num_joint_actions(t); ++ju)
        for (const auto& o : g.kernel[t][k[0]][ju])
          for (int i = 0; i < n; ++i) {
            int& s = seen[i][hs.child(g, i, t, k[i + 1], o.z[i])];
            if (s >= 0 && s != k[0]) return false;
            s = k[0];
          }
    }
  }
  return true;
}

bool common_belief_strategy_free(const GameSpec& g, const RandomSizes& s) {
  const int n = s.players, X = s.states, L = s.signals, NL = ipow(L, n);
  // the conditional law of l_{t+1} given x_{t+1} must not depend on (x_t, l_t, u_t)
  for (int t = 0; t + 1 < g.horizon; ++t) {
    std::vector<std::vector<double>> ref(X);
    for (int id = 0; id < static_cast<int>(g.states[t].size()); ++id)
      for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
        std::vector<std::vector<double>> cond(X, std::vector<double>(NL, 0.0));
        std::vector<double> px(X, 0.0);
        for (const auto& o : g.kernel[t][id][ju]) {
          cond[o.next_state / NL][o.next_state % NL] += o.p;
          px[o.next_state / NL] += o.p;
        }
        for (int x = 0; x < X; ++x) {
          if (px[x] <= 0) continue;
          for (double& v : cond[x]) v /= px[x];
          if (ref[x].empty()) ref[x] = cond[x];
          for (int c = 0; c < NL; ++c)
            if (std::abs(ref[x][c] - cond[x][c]) > 1e-12) return false;
        }
      }
  }
  return observable_by(g, [NL](int id) { return id / NL; }) && previous_state_revealed(g);
}

bool local_noises_independent(const GameSpec& g, const RandomSizes& s) {
  const int n = s.players, X = s.states;
  // initial law factorizes
  {
    std::vector<std::vector<double>> m(n, std::vector<double>(X, 0.0));
    std::vector<double> joint(ipow(X, n), 0.0);
    for (const auto& e : g.initial) {
      joint[e.state] += e.p;
      auto x = digits(e.state, X, n);
      for (int i = 0; i < n; ++i) m[i][x[i]] += e.p;
    }
    for (int id = 0; id < static_cast<int>(joint.size()); ++id) {
      auto x = digits(id, X, n);
      double p = 1;
      for (int i = 0; i < n; ++i) p *= m[i][x[i]];
      if (std::abs(p - joint[id]) > 1e-12) return false;
    }
  }
  // P(x', y | x, u) = prod_i P^i(x'^i, y^i | x^i, u); y is read from the public part of the increment
  auto noise = [](const std::string& z) {
    std::vector<int> y;
    std::stringstream ss(field(z, "y"));
    std::string d;
    while (std::getline(ss, d, ',')) y.push_back(std::stoi(d));
    return y;
  };
  for (int t = 0; t + 1 < g.horizon; ++t)
    for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
      std::map<std::pair<int, int>, std::map<std::pair<int, int>, double>> local_ref;  // (i, x^i) -> law of (x'^i, y^i)
      for (int id = 0; id < static_cast<int>(g.states[t].size()); ++id) {
        auto x = digits(id, X, n);
        std::vector<std::map<std::pair<int, int>, double>> marg(n);
        std::map<std::vector<int>, double> joint;
        for (const auto& o : g.kernel[t][id][ju]) {
          auto x2 = digits(o.next_state, X, n);
          auto y = noise(g.increments[t][0][o.z[0]]);
          if (static_cast<int>(y.size()) != n) return false;
          std::vector<int> key;
          for (int i = 0; i < n; ++i) {
            marg[i][{x2[i], y[i]}] += o.p;
            key.push_back(x2[i]);
            key.push_back(y[i]);
          }
          joint[key] += o.p;
        }
        for (const auto& [key, p] : joint) {
          double q = 1;
          for (int i = 0; i < n; ++i) q *= marg[i][{key[2 * i], key[2 * i + 1]}];
          if (std::abs(p - q) > 1e-12) return false;
        }
        for (int i = 0; i < n; ++i) {
          auto [it, fresh] = local_ref.try_emplace({i, x[i]}, marg[i]);
          if (fresh) continue;
          for (const auto& [k, p] : marg[i]) {
            auto f = it->second.find(k);
            if (f == it->second.end() || std::abs(f->second - p) > 1e-12) return false;
          }
        }
      }
    }
  return true;
}

// ---------------------------------------------------------------- fixtures

namespace {

void add_identity(Example& ex) {
  for (int i = 0; i < ex.game.num_players(); ++i) ex.K.push_back(identity_compression(ex.game, ex.hs, i));
}

Example make_example1() {
  Example ex;
  ex.game = example1_game();
  ex.hs = enumerate_histories(ex.game);
  ex.K = {identity_compression(ex.game, ex.hs, 0), constant_compression(ex.game, 1)};
  const auto& g = ex.game;
  const auto& hs = ex.hs;
  // E1: Alice 1, Bob +1 always. E2: Alice 0, Bob +1 after 0 and -1 after 1.
  Profile e1 = uniform_profile(g, hs), e2 = e1;
  e1[0].table[0][0] = {0, 1};
  e2[0].table[0][0] = {1, 0};
  for (int h = 0; h < hs.count(1, 1); ++h) {
    e1[1].table[1][h] = {0, 1};
    bool after0 = hs.label(g, 1, 1, h) == "-/U=0";
    e2[1].table[1][h] = after0 ? Dist{0, 1} : Dist{1, 0};
  }
  ex.strategies["E1"] = e1;
  ex.strategies["E2"] = e2;
  ex.expectations.push_back(expect_msi(Verdict::Holds, Origin::Reference));
  ex.expectations.push_back(expect_usi(0, Verdict::Holds, Origin::Elementary, "A"));
  ex.expectations.push_back(expect_usi(1, Verdict::Fails, Origin::Reference, "B"));
  for (std::string name : {"E1", "E2"})
    ex.expectations.push_back(expect_true(name + " is a BNE", Origin::Reference, [name](const Example& e) {
      BneReport r = verify_bne(e.game, e.hs, e.strategies.at(name));
      return std::make_pair(r.is_bne, "payoffs " + vec_str(r.payoffs) + ", max gap " + detail::fmt_double(r.max_gap()));
    }));
  {
    Expectation e{"K-based BNE payoffs (2,-1)", Origin::Reference, 1e-6, {}};
    e.run = [e](const Example& x) {
      SolveResult r = solve_k_based_bne(x.game, x.hs, x.K);
      double d = linf(r.bne.payoffs, {2, -1});
      return result(e, r.bne.is_bne && d <= e.tol, d, "payoffs " + vec_str(r.bne.payoffs));
    };
    ex.expectations.push_back(e);
  }
  {
    Expectation e{"enumerated payoff set contains (2,-1) and (1,0)", Origin::Reference, 1e-6, {}};
    e.run = [e](const Example& x) {
      EnumerateResult r = enumerate_bne_small(x.game, x.hs);
      double d = 0;
      for (const std::vector<double>& want : {std::vector<double>{2, -1}, std::vector<double>{1, 0}}) {
        double best = INFINITY;
        for (const auto& p : r.payoff_set) best = std::min(best, linf(p, want));
        d = std::max(d, best);
      }
      return result(e, d <= e.tol, d, std::to_string(r.payoff_set.size()) + " payoff vectors");
    };
    ex.expectations.push_back(e);
  }
  return ex;
}

Example make_example2(double resolution) {
  Example ex;
  ex.game = example2_game();
  ex.hs = enumerate_histories(ex.game);
  ex.K = {example2_alice_compression(ex.game, ex.hs), identity_compression(ex.game, ex.hs, 1)};
  ex.assessment = example2_assessment(ex.game, ex.hs);
  ex.strategies["g"] = ex.assessment->profile;
  ex.expectations.push_back(expect_true("assessment is a wPBE", Origin::Reference, [](const Example& e) {
    WpbeReport r = check_wpbe(e.game, e.hs, *e.assessment);
    return std::make_pair(r.wpbe, r.issues.empty() ? std::string("no issues") : r.issues.front());
  }));
  {
    Expectation e{"assessment payoffs (1,0)", Origin::Oracle, 1e-9, {}};
    e.run = [e](const Example& x) {
      auto p = compute_payoffs(x.game, x.hs, x.assessment->profile);
      double d = linf(p, {1, 0});
      return result(e, d <= e.tol, d, "payoffs " + vec_str(p));
    };
    ex.expectations.push_back(e);
  }
  ex.expectations.push_back(expect_true("wrong on-path posterior fails Bayes", Origin::Elementary, [](const Example& e) {
    Assessment a = *e.assessment;
    // after U=+1 Alice's posterior is uniform; replace it by a point mass
    for (int h = 0; h < e.hs.count(0, 1); ++h)
      if (e.hs.label(e.game, 0, 1, h).find("U=+1") != std::string::npos) {
        auto& row = a.belief[0][1][h];
        row.resize(1);
        row[0].p = 1.0;
      }
    WpbeReport r = check_wpbe(e.game, e.hs, a);
    return std::make_pair(!r.bayes_ok, r.bayes_ok ? std::string("accepted") : r.issues.front());
  }));
  ex.expectations.push_back(expect_usi(0, Verdict::Holds, Origin::Reference, "A"));
  ex.expectations.push_back(expect_usi(1, Verdict::Holds, Origin::Reference, "B"));
  {
    Expectation e{"USI transfer of the wPBE strategy is a K-based BNE with payoffs (1,0)", Origin::Reference, 1e-6, {}};
    e.run = [e](const Example& x) {
      TransferResult r = transfer_bne_via_usi(x.game, x.hs, x.K, x.assessment->profile);
      double d = linf(r.bne.payoffs, {1, 0});
      return result(e, r.ok && d <= e.tol, d,
                    "payoffs " + vec_str(r.bne.payoffs) + ", max gap " + detail::fmt_double(r.bne.max_gap()));
    };
    ex.expectations.push_back(e);
  }
  {
    Expectation e{"K-based wPBE grid search: Alice payoff <= 0", Origin::Reference, 1e-9, {}};
    e.run = [e, resolution](const Example&) {
      WpbeSearchResult r = example2_kbased_wpbe_search(resolution);
      double over = std::max(0.0, r.best_alice_payoff);
      return result(e, r.confirmed > 0 && over <= e.tol, over,
                    "best Alice payoff " + detail::fmt_double(r.best_alice_payoff) + " over " +
                        std::to_string(r.confirmed) + " confirmed candidates");
    };
    ex.expectations.push_back(e);
  }
  return ex;
}

Example make_example3(const Params& p) {
  const double c = get_d(p, "c", 0.2);
  const double ea1 = get_d(p, "alpha1", 1.0 / 3), ea2 = get_d(p, "alpha2", 1.0 / 3);
  const double eb1 = 1.0 / 3 + c, eb2 = 1.0 / 3 - c;
  Example ex;
  ex.game = example3_game(c);
  ex.hs = enumerate_histories(ex.game);
  add_identity(ex);
  ex.split = example3_split(ex.game, ex.hs);
  ex.strategies["bne"] = example3_profile(ex.game, ex.hs, ea1, ea2, eb1, eb2);
  ex.strategies["equal-beta"] = example3_profile(ex.game, ex.hs, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3);
  {
    Expectation e{"unique BNE (alpha*, beta*) by enumeration", Origin::Reference, 1e-6, {}};
    e.run = [e, ea1, ea2, eb1, eb2](const Example& x) {
      EnumerateResult r = enumerate_bne_small(x.game, x.hs);
      if (r.equilibria.size() != 1)
        return result(e, false, 1.0, std::to_string(r.equilibria.size()) + " equilibria");
      Profile want = example3_profile(x.game, x.hs, ea1, ea2, eb1, eb2);
      const Profile& got = r.equilibria[0].profile;
      double d = 0;
      for (int i = 0; i < 2; ++i)
        for (std::size_t t = 0; t < got[i].table.size(); ++t)
          for (std::size_t h = 0; h < got[i].table[t].size(); ++h)
            d = std::max(d, linf(got[i].table[t][h], want[i].table[t][h]));
      return result(e, d <= e.tol, d, "max deviation from the expected profile " + detail::fmt_double(d));
    };
    ex.expectations.push_back(e);
  }
  ex.expectations.push_back(expect_true("expected profile passes verify_bne", Origin::Oracle, [](const Example& x) {
    BneReport r = verify_bne(x.game, x.hs, x.strategies.at("bne"));
    return std::make_pair(r.is_bne, "max gap " + detail::fmt_double(r.max_gap()));
  }));
  ex.expectations.push_back(expect_close("Alice value c/2 + 2/3", Origin::Reference, 1e-9, [c](const Example& x) {
    return std::make_pair(compute_payoffs(x.game, x.hs, x.strategies.at("bne"))[0], c / 2 + 2.0 / 3);
  }));
  {
    Expectation e{"J* at the seven extreme points", Origin::Reference, 1e-9, {}};
    e.run = [e, c](const Example& x) {
      const double pts[7][3] = {{0, 0, c / 2},         {0.5, 0, c / 4 + 0.5}, {0, 0.5, 3 * c / 4 + 0.5},
                                {1, 0, 0.5},           {0, 1, c + 0.5},       {1.0 / 3, 1.0 / 3, c / 2 + 2.0 / 3},
                                {1, 1, c / 2}};
      double d = 0;
      for (const auto& q : pts) {
        Profile p = example3_profile(x.game, x.hs, q[0], q[1], 0.5, 0.5);
        // Bob's best response value is -J*(alpha) in the zero-sum game
        double jstar = -best_response_value(x.game, x.hs, p, 1).value;
        d = std::max(d, std::abs(jstar - q[2]));
      }
      return result(e, d <= e.tol, d, "max deviation " + detail::fmt_double(d));
    };
    ex.expectations.push_back(e);
  }
  ex.expectations.push_back(expect_true("BNE is not belief-based", Origin::Reference, [](const Example& x) {
    BeliefBasedReport r = check_belief_based(x.game, x.hs, x.strategies.at("bne"), *x.split);
    return std::make_pair(!r.belief_based, r.belief_based ? std::string("belief-based")
                                                          : "stage " + std::to_string(r.t) + ": " + r.common_a +
                                                                " vs " + r.common_b + ", gap " +
                                                                detail::fmt_double(r.action_gap));
  }));
  ex.expectations.push_back(
      expect_true("equal-beta profile is belief-based but not a BNE", Origin::Oracle, [](const Example& x) {
        const Profile& p = x.strategies.at("equal-beta");
        BeliefBasedReport r = check_belief_based(x.game, x.hs, p, *x.split);
        BneReport b = verify_bne(x.game, x.hs, p);
        return std::make_pair(r.belief_based && !b.is_bne, "max gap " + detail::fmt_double(b.max_gap()));
      }));
  {
    Expectation e{"K-based solver reaches (alpha*, beta*)", Origin::Reference, 1e-6, {}};
    e.run = [e, c](const Example& x) {
      SolveResult r = solve_k_based_bne(x.game, x.hs, x.K);
      double d = linf(r.bne.payoffs, {c / 2 + 2.0 / 3, -(c / 2 + 2.0 / 3)});
      return result(e, r.bne.is_bne && d <= e.tol, d,
                    "payoffs " + vec_str(r.bne.payoffs) + ", max gap " + detail::fmt_double(r.bne.max_gap()));
    };
    ex.expectations.push_back(e);
  }
  ex.expectations.push_back(expect_true("solver output passes the canonical SE check", Origin::Oracle, [](const Example& x) {
    SeSolveResult r = solve_k_based_se(x.game, x.hs, x.K);
    double worst = 0;
    for (double v : r.containment_residual) worst = std::max(worst, v);
    return std::make_pair(r.se.se && worst <= 1e-9,
                          r.se.verdict + ", containment residual " + detail::fmt_double(worst));
  }));
  return ex;
}

Example make_repeated(const Params& p) {
  const std::string stage = get_s(p, "stage", "pd");
  const int T = get_i(p, "T", 3);
  Example ex;
  ex.game = repeated_game(stage_game(stage), T);
  ex.hs = enumerate_histories(ex.game);
  for (int i = 0; i < 2; ++i) ex.K.push_back(last_action_compression(ex.game, ex.hs, i));
  ex.expectations.push_back(expect_msi(Verdict::Holds, Origin::Reference));
  if (T >= 3) ex.expectations.push_back(expect_usi(0, Verdict::Fails, Origin::Reference, "P1"));
  ex.expectations.push_back(expect_solver_bne(Origin::Reference));
  if (stage == "mp" && T == 1) {
    Expectation e{"unique mixed equilibrium with payoffs (0,0)", Origin::Elementary, 1e-9, {}};
    e.run = [e](const Example& x) {
      EnumerateResult r = enumerate_bne_small(x.game, x.hs);
      double d = r.equilibria.size() == 1 ? linf(r.equilibria[0].payoffs, {0, 0}) : 1.0;
      return result(e, d <= e.tol, d, std::to_string(r.equilibria.size()) + " equilibria");
    };
    ex.expectations.push_back(e);
  }
  return ex;
}

RandomSizes sizes_from(const Params& p) {
  RandomSizes s;
  s.players = get_i(p, "players", 2);
  s.horizon = get_i(p, "T", 2);
  s.states = get_i(p, "states", 2);
  s.actions = get_i(p, "actions", 2);
  s.signals = get_i(p, "signals", 2);
  s.seed = static_cast<std::uint64_t>(get_i(p, "seed", 1));
  if (get_i(p, "sequential", 0)) {
    // player k acts only at stage k (stages beyond the players act for nobody)
    s.per_stage_actions.assign(s.horizon, std::vector<int>(s.players, 1));
    for (int t = 0; t < s.horizon && t < s.players; ++t) s.per_stage_actions[t][t] = s.actions;
  }
  return s;
}

Example make_maskin_tirole(const Params& p) {
  Example ex;
  RandomSizes s = sizes_from(p);
  ex.game = maskin_tirole_game(s);
  ex.hs = enumerate_histories(ex.game);
  for (int i = 0; i < s.players; ++i) ex.K.push_back(current_state_compression(ex.game, ex.hs, i));
  ex.expectations.push_back(expect_true("state observable", Origin::Elementary, [](const Example& x) {
    return std::make_pair(state_observable(x.game), std::string());
  }));
  ex.expectations.push_back(expect_msi(Verdict::Holds, Origin::Reference));
  if (s.horizon >= 2) ex.expectations.push_back(expect_usi(0, Verdict::Fails, Origin::Reference, "P0"));
  ex.expectations.push_back(expect_solver_bne(Origin::Reference));
  return ex;
}

Example make_nayyar(const Params& p) {
  Example ex;
  RandomSizes s = sizes_from(p);
  ex.game = nayyar_game(s);
  ex.hs = enumerate_histories(ex.game);
  for (int i = 0; i < s.players; ++i) ex.K.push_back(nayyar_compression(ex.game, ex.hs, i));
  ex.expectations.push_back(expect_true("common-information beliefs are strategy-free", Origin::Elementary,
                                        [s](const Example& x) {
                                          return std::make_pair(common_belief_strategy_free(x.game, s), std::string());
                                        }));
  ex.expectations.push_back(expect_msi(Verdict::Holds, Origin::Reference));
  ex.expectations.push_back(expect_solver_bne(Origin::Reference));
  return ex;
}

Example make_ouyang(const Params& p) {
  Example ex;
  RandomSizes s = sizes_from(p);
  ex.game = ouyang_game(s);
  ex.hs = enumerate_histories(ex.game);
  for (int i = 0; i < s.players; ++i) ex.K.push_back(ouyang_compression(ex.game, ex.hs, i));
  ex.expectations.push_back(expect_true("local noises independent", Origin::Elementary, [s](const Example& x) {
    return std::make_pair(local_noises_independent(x.game, s), std::string());
  }));
  for (int i = 0; i < s.players; ++i)
    ex.expectations.push_back(expect_usi(i, Verdict::Holds, Origin::Reference, ex.game.players[i]));
  ex.expectations.push_back(expect_msi(Verdict::Holds, Origin::Oracle));
  if (!s.per_stage_actions.empty() && s.players == 2) {
    Expectation e{"enumerated BNE payoffs reachable by USI transfer", Origin::Reference, 1e-4, {}};
    e.run = [e](const Example& x) {
      EnumerateResult r = enumerate_bne_small(x.game, x.hs);
      std::vector<std::vector<double>> moved;
      bool all_ok = true;
      for (const auto& eq : r.equilibria) {
        TransferOptions opt;
        opt.check_usi_first = false;  // checked by the USI expectations
        TransferResult t = transfer_bne_via_usi(x.game, x.hs, x.K, eq.profile, opt);
        all_ok = all_ok && t.ok;
        moved.push_back(t.bne.payoffs);
      }
      double d = hausdorff(r.payoff_set, moved);
      return result(e, all_ok && d <= e.tol, d,
                    std::to_string(r.equilibria.size()) + " equilibria, " + std::to_string(r.payoff_set.size()) +
                        " payoff vectors");
    };
    ex.expectations.push_back(e);
  }
  return ex;
}

}  // namespace

Example build_example(const std::string& name, const Params& params) {
  Example ex;
  if (name == "example1")
    ex = make_example1();
  else if (name == "example2")
    ex = make_example2(get_d(params, "resolution", 0.02));
  else if (name == "example3")
    ex = make_example3(params);
  else if (name == "repeated")
    ex = make_repeated(params);
  else if (name == "maskin_tirole")
    ex = make_maskin_tirole(params);
  else if (name == "nayyar")
    ex = make_nayyar(params);
  else if (name == "ouyang")
    ex = make_ouyang(params);
  else
    throw Error(ErrorKind::BadParameter, "unknown example " + name);
  ex.name = name;
  ex.params = params;
  return ex;
}

Example build_example(const std::string& spec) {
  std::string name = spec.substr(0, spec.find(':'));
  Params p;
  if (spec.find(':') != std::string::npos) {
    std::stringstream ss(spec.substr(spec.find(':') + 1));
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      if (kv.empty()) continue;
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::BadParameter, "parameter without value: " + kv);
      p[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return build_example(name, p);
}

std::vector<std::string> fixture_names() {
  return {"example1",
          "example2",
          "example3:c=0.2",
          "repeated:stage=pd,T=3",
          "repeated:stage=mp,T=1",
          "maskin_tirole:seed=1",
          "nayyar:seed=1",
          "ouyang:seed=1",
          "ouyang:seed=1,signals=1,sequential=1"};
}

FixtureReport run_fixture(const Example& ex) {
  FixtureReport rep;
  rep.name = ex.name;
  for (const auto& [k, v] : ex.params) rep.name += (rep.name.find(':') == std::string::npos ? ":" : ",") + k + "=" + v;
  for (const auto& e : ex.expectations) {
    try {
      rep.results.push_back(e.run(ex));
    } catch (const std::exception& err) {
      rep.results.push_back({e.name, e.origin, false, INFINITY, e.tol, std::string("error: ") + err.what()});
    }
  }
  return rep;
}

}  // namespace dyngame
