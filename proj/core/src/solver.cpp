#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "dyngame/equilibrium.hpp"
#include "util.hpp"

namespace dyngame {

EpsSchedule EpsSchedule::geometric(double a, double r, int n) {
  if (!(a > 0) || !(r > 0 && r < 1) || n < 0)
    throw Error(ErrorKind::BadParameter, "geometric schedule needs a > 0, 0 < r < 1, n >= 0");
  EpsSchedule s;
  for (int k = 0; k <= n; ++k) s.eps.push_back(a * std::pow(r, k));
  return s;
}

void EpsSchedule::validate(const GameSpec& g) const {
  if (eps.empty()) throw Error(ErrorKind::BadParameter, "empty eps schedule");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0)) throw Error(ErrorKind::BadParameter, "eps must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw Error(ErrorKind::BadParameter, "eps schedule must decrease");
  }
  int widest = 1;
  for (int t = 0; t < g.horizon; ++t)
    for (int i = 0; i < g.num_players(); ++i) widest = std::max(widest, g.num_actions(t, i));
  if (eps.front() * widest > 1.0 + 1e-15)
    throw Error(ErrorKind::BadParameter, "eps_0 * max|U| exceeds 1");
  if (!(damping > 0 && damping <= 1)) throw Error(ErrorKind::BadParameter, "damping must lie in (0, 1]");
}

namespace {

using KProfile = std::vector<KStrategy>;

struct Ctx {
  const GameSpec& g;
  const Histories& hs;
  const std::vector<Compression>& K;
  std::vector<CompressedIndex> psi;
  std::vector<InfoStateMap> maps;
  int n = 0;
};

Profile lift_all(const Ctx& c, const KProfile& rho) {
  Profile p(c.n);
  for (int i = 0; i < c.n; ++i) p[i] = lift(rho[i], c.psi[i]);
  return p;
}

MDP reduced_for(const Ctx& c, int i, const Profile& lifted) {
  DecisionProblem dp = build_decision_problem(c.g, c.hs, lifted, i);
  Reduction red = reduce_by_info_state(dp.mdp, c.maps[i], 1e-9);
  if (!red.valid) {
    const auto& ce = *red.counterexample;
    throw Error(ErrorKind::NotMSIWitness,
                "K of player " + c.g.players[i] + " is not an information state at stage " + std::to_string(ce.t + 1) +
                    " (" + ce.condition + " differs between " + c.hs.label(c.g, i, ce.t, ce.x) + " and " +
                    c.hs.label(c.g, i, ce.t, ce.x2) + ")");
  }
  return std::move(red.reduced);
}

struct Eval {
  std::vector<MDP> red;
  std::vector<BRTables> br;
  double residual = 0.0;
};

double residual_of(const MDP& m, const BRTables& b, const KStrategy& rho) {
  double res = 0;
  for (int t = 0; t < m.horizon; ++t)
    for (int k = 0; k < m.states[t]; ++k) {
      if (!m.is_active(t, k)) continue;
      const auto& q = b.Q[t][k];
      double v = 0;
      for (std::size_t a = 0; a < q.size(); ++a) v += rho.table[t][k][a] * q[a];
      res = std::max(res, b.V[t][k] - v);
    }
  return res;
}

Eval evaluate(const Ctx& c, const KProfile& rho, double eps) {
  Profile lifted = lift_all(c, rho);
  Eval ev;
  ev.red.resize(c.n);
  ev.br.resize(c.n);
  detail::parallel_for(c.n, [&](int i) {
    ev.red[i] = reduced_for(c, i, lifted);
    ev.br[i] = eps_backward_induction(ev.red[i], eps);
  });
  for (int i = 0; i < c.n; ++i) ev.residual = std::max(ev.residual, residual_of(ev.red[i], ev.br[i], rho[i]));
  return ev;
}

void mix_into(KProfile& rho, const std::vector<BRTables>& br, double lambda) {
  for (std::size_t i = 0; i < rho.size(); ++i)
    for (std::size_t t = 0; t < rho[i].table.size(); ++t)
      for (std::size_t k = 0; k < rho[i].table[t].size(); ++k) {
        Dist& d = rho[i].table[t][k];
        const Dist& s = br[i].selection[t][k];
        for (std::size_t a = 0; a < d.size(); ++a) d[a] = (1 - lambda) * d[a] + lambda * s[a];
      }
}

// Floor every row at eps so the iterate lies in the constrained simplex.
void project(KProfile& rho, double eps) {
  for (auto& s : rho)
    for (auto& row : s.table)
      for (auto& d : row) {
        double m = static_cast<double>(d.size());
        double spare = 1.0 - m * eps;
        double tot = 0;
        for (double& x : d) {
          x = std::max(0.0, x - eps);
          tot += x;
        }
        for (double& x : d) x = eps + (tot > 0 ? spare * x / tot : spare / m);
      }
}

// ---- Newton on the indifference system

struct Point {
  int player, t, k, na;
};

struct Newton {
  const Ctx& c;
  double eps;
  std::vector<Point> points;
  std::vector<std::vector<int>> support;  // per point, sorted
  KProfile base;

  int unknowns() const {
    int u = 0;
    for (const auto& s : support) u += static_cast<int>(s.size()) - 1;
    return u;
  }

  KProfile assemble(const Eigen::VectorXd& th) const {
    KProfile rho = base;
    int pos = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto& pt = points[p];
      Dist& d = rho[pt.player].table[pt.t][pt.k];
      std::fill(d.begin(), d.end(), eps);
      const auto& S = support[p];
      double rest = 1.0 - eps * static_cast<double>(pt.na - static_cast<int>(S.size()));
      for (std::size_t j = 0; j + 1 < S.size(); ++j) {
        d[S[j]] = th[pos++];
        rest -= d[S[j]];
      }
      d[S.back()] = rest;
    }
    return rho;
  }

  Eigen::VectorXd extract(const KProfile& rho) const {
    Eigen::VectorXd th(unknowns());
    int pos = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto& pt = points[p];
      const auto& S = support[p];
      for (std::size_t j = 0; j + 1 < S.size(); ++j) th[pos++] = rho[pt.player].table[pt.t][pt.k][S[j]];
    }
    return th;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& th) const {
    KProfile rho = assemble(th);
    Profile lifted = lift_all(c, rho);
    std::vector<ValueTables> vt(c.n);
    detail::parallel_for(c.n, [&](int i) {
      MDP m = reduced_for(c, i, lifted);
      vt[i] = evaluate_tables(m, rho[i].table);
    });
    Eigen::VectorXd F(unknowns());
    int pos = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto& pt = points[p];
      const auto& S = support[p];
      const auto& q = vt[pt.player].Q[pt.t][pt.k];
      for (std::size_t j = 0; j + 1 < S.size(); ++j) F[pos++] = q[S[j]] - q[S.back()];
    }
    return F;
  }

  // Returns true when the system is solved to 1e-12 inside the simplex.
  bool solve(KProfile& out) const {
    const int m = unknowns();
    Eigen::VectorXd th = extract(base);
    if (m == 0) {
      out = assemble(th);
      return true;
    }
    Eigen::VectorXd F = residual(th);
    for (int it = 0; it < 60; ++it) {
      double nf = F.cwiseAbs().maxCoeff();
      if (nf < 1e-12) break;
      Eigen::MatrixXd J(m, m);
      for (int j = 0; j < m; ++j) {
        const double h = 1e-7;
        Eigen::VectorXd tp = th;
        tp[j] += h;
        J.col(j) = (residual(tp) - F) / h;
      }
      Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
      if (!step.allFinite()) return false;
      double lam = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls, lam *= 0.5) {
        Eigen::VectorXd tn = th + lam * step;
        Eigen::VectorXd Fn = residual(tn);
        if (Fn.cwiseAbs().maxCoeff() < nf) {
          th = tn;
          F = Fn;
          moved = true;
          break;
        }
      }
      if (!moved) return false;
    }
    if (F.cwiseAbs().maxCoeff() >= 1e-12) return false;
    KProfile rho = assemble(th);
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto& pt = points[p];
      for (int a : support[p]) {
        double& x = rho[pt.player].table[pt.t][pt.k][a];
        if (x < eps - 1e-12) return false;
        x = std::max(x, eps);
      }
    }
    out = std::move(rho);
    return true;
  }
};

std::vector<Point> decision_points(const Ctx& c, const Eval& ev) {
  std::vector<Point> pts;
  for (int i = 0; i < c.n; ++i) {
    const MDP& m = ev.red[i];
    for (int t = 0; t < m.horizon; ++t)
      if (m.actions[t] > 1)
        for (int k = 0; k < m.states[t]; ++k)
          if (m.is_active(t, k)) pts.push_back({i, t, k, m.actions[t]});
  }
  return pts;
}

// Support guess: actions well above the floor, else the argmax.
std::vector<std::vector<int>> threshold_support(const std::vector<Point>& pts, const KProfile& rho, double eps) {
  std::vector<std::vector<int>> S;
  for (const auto& pt : pts) {
    const Dist& d = rho[pt.player].table[pt.t][pt.k];
    std::vector<int> s;
    for (int a = 0; a < pt.na; ++a)
      if (d[a] > eps + 5e-3) s.push_back(a);
    if (s.empty()) s.push_back(static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin()));
    S.push_back(std::move(s));
  }
  return S;
}

// Newton start: keep the relative weights of rho on the support.
KProfile seed_for(const KProfile& rho, const std::vector<Point>& pts, const std::vector<std::vector<int>>& S,
                  double eps) {
  KProfile out = rho;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto& pt = pts[p];
    Dist& d = out[pt.player].table[pt.t][pt.k];
    double spare = 1.0 - eps * pt.na;
    double tot = 0;
    std::vector<double> w(pt.na, 0.0);
    for (int a : S[p]) tot += (w[a] = std::max(0.0, d[a] - eps) + 1e-3);
    for (int a = 0; a < pt.na; ++a) d[a] = eps + spare * w[a] / tot;
  }
  return out;
}

struct Attempt {
  KProfile rho;
  double residual = 1e300;
};

bool try_newton(const Ctx& c, double eps, const std::vector<Point>& pts, const KProfile& from,
                const std::vector<std::vector<int>>& S, double tol, Attempt& best) {
  Newton nw{c, eps, pts, S, seed_for(from, pts, S, eps)};
  KProfile sol;
  bool ok = false;
  try {
    ok = nw.solve(sol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotMSIWitness) throw;
    return false;
  }
  if (!ok) return false;
  double r = evaluate(c, sol, eps).residual;
  if (r < best.residual) best = {sol, r};
  return r <= tol;
}

bool enumerate_supports(const Ctx& c, double eps, const std::vector<Point>& pts, const KProfile& from, double tol,
                        Attempt& best) {
  double combos = 1;
  for (const auto& pt : pts) combos *= std::pow(2.0, pt.na) - 1;
  if (combos > 4096) return false;
  std::vector<int> mask(pts.size(), 1);
  std::vector<std::vector<int>> S(pts.size());
  while (true) {
    for (std::size_t p = 0; p < pts.size(); ++p) {
      S[p].clear();
      for (int a = 0; a < pts[p].na; ++a)
        if (mask[p] >> a & 1) S[p].push_back(a);
    }
    if (try_newton(c, eps, pts, from, S, tol, best)) return true;
    std::size_t p = 0;
    while (p < pts.size() && ++mask[p] == (1 << pts[p].na)) mask[p++] = 1;
    if (p == pts.size()) return false;
  }
}

KProfile richardson(const KProfile& a, const KProfile& b, double ra) {
  // a at eps_{N-1}, b at eps_N = ra * eps_{N-1}
  KProfile out = b;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t t = 0; t < out[i].table.size(); ++t)
      for (std::size_t k = 0; k < out[i].table[t].size(); ++k)
        for (std::size_t u = 0; u < out[i].table[t][k].size(); ++u)
          out[i].table[t][k][u] = (b[i].table[t][k][u] - ra * a[i].table[t][k][u]) / (1 - ra);
  return out;
}

KProfile debias(const KProfile& b, double eps) {
  KProfile out = b;
  for (auto& s : out)
    for (auto& row : s.table)
      for (auto& d : row) {
        double m = static_cast<double>(d.size());
        for (double& x : d) x = (x - eps) / (1 - m * eps);
      }
  return out;
}

void clean(KProfile& rho) {
  for (auto& s : rho)
    for (auto& row : s.table)
      for (auto& d : row) {
        double tot = 0;
        for (double& x : d) {
          if (x < 1e-9) x = 0;
          tot += x;
        }
        if (tot <= 0)
          std::fill(d.begin(), d.end(), 1.0 / static_cast<double>(d.size()));
        else
          for (double& x : d) x /= tot;
      }
}

}  // namespace

SolveResult solve_k_based_bne(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                              const EpsSchedule& sch, double bne_tol) {
  sch.validate(g);
  if (static_cast<int>(K.size()) != g.num_players())
    throw Error(ErrorKind::BadParameter, "one compression per player is required");
  Ctx c{g, hs, K, {}, {}, g.num_players()};
  for (int i = 0; i < c.n; ++i) {
    c.psi.push_back(compress_histories(g, hs, i, K[i]));
    c.maps.push_back(info_state_map(g, hs, i, K[i]));
  }
  SolveResult res;
  res.converged = true;
  KProfile rho(c.n);
  for (int i = 0; i < c.n; ++i) rho[i] = uniform_kstrategy(g, K[i], i);

  for (double eps : sch.eps) {
    project(rho, eps);
    EpsPoint pt;
    pt.eps = eps;
    Eval ev = evaluate(c, rho, eps);
    Attempt best{rho, ev.residual};
    std::string method = "damped";
    int it = 0;
    while (ev.residual > sch.tol && it < sch.max_iter) {
      mix_into(rho, ev.br, sch.damping);
      ev = evaluate(c, rho, eps);
      ++it;
      if (ev.residual < best.residual) best = {rho, ev.residual};
    }
    bool done = ev.residual <= sch.tol;
    const auto pts = decision_points(c, ev);
    if (!done) {
      method = "newton";
      done = try_newton(c, eps, pts, rho, threshold_support(pts, rho, eps), sch.tol, best);
      if (!done) {
        std::vector<std::vector<int>> full;
        for (const auto& p : pts) {
          std::vector<int> s(p.na);
          std::iota(s.begin(), s.end(), 0);
          full.push_back(std::move(s));
        }
        done = try_newton(c, eps, pts, rho, full, sch.tol, best);
      }
    }
    if (!done) {
      method = "averaging";
      KProfile avg = best.rho;
      for (int k = 0; k < sch.averaging_iter && !done; ++k) {
        Eval e = evaluate(c, avg, eps);
        if (e.residual < best.residual) best = {avg, e.residual};
        if (e.residual <= sch.tol) {
          done = true;
          break;
        }
        mix_into(avg, e.br, 1.0 / (k + 2.0));
        ++it;
      }
      if (!done) {
        method = "averaging+newton";
        done = try_newton(c, eps, pts, avg, threshold_support(pts, avg, eps), sch.tol, best);
      }
      if (!done) {
        method = "support enumeration";
        done = enumerate_supports(c, eps, pts, avg, sch.tol, best);
      }
    }
    rho = best.rho;
    Eval fin = evaluate(c, rho, eps);
    pt.iterations = it;
    pt.residual = fin.residual;
    pt.method = done ? method : "failed";
    pt.profile = rho;
    pt.br = std::move(fin.br);
    if (!done) res.converged = false;
    res.worst_residual = std::max(res.worst_residual, pt.residual);
    res.trace.push_back(std::move(pt));
  }

  // limit candidates
  std::vector<std::pair<std::string, KProfile>> cands;
  const auto& last = res.trace.back();
  if (res.trace.size() >= 2) {
    const auto& prev = res.trace[res.trace.size() - 2];
    cands.push_back({"richardson", richardson(prev.profile, last.profile, last.eps / prev.eps)});
  }
  cands.push_back({"debiased", debias(last.profile, last.eps)});
  cands.push_back({"last point", last.profile});
  bool have = false;
  for (auto& [name, kp] : cands) {
    clean(kp);
    Profile lifted = lift_all(c, kp);
    BneReport rep = verify_bne(g, hs, lifted, bne_tol);
    if (!have || (rep.is_bne && !res.bne.is_bne) ||
        (rep.is_bne == res.bne.is_bne && rep.max_gap() < res.bne.max_gap() - 1e-15)) {
      res.kprofile = kp;
      res.profile = std::move(lifted);
      res.bne = std::move(rep);
      res.limit_method = name;
      have = true;
    }
    if (res.bne.is_bne) break;
  }
  return res;
}

}  // namespace dyngame
