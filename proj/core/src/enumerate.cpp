#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "dyngame/equilibrium.hpp"
#include "util.hpp"

namespace dyngame {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Sequence form of one player. Sequence 0 is the empty sequence; every
// decision point (stage, history with more than one action) adds one
// sequence per action.
struct SeqForm {
  int n_seq = 1;
  std::vector<int> parent;               // [infoset] -> sequence
  std::vector<std::vector<int>> seqs;    // [infoset] -> sequence per action
  std::vector<int> info_t, info_h;
  std::vector<std::vector<int>> hist_seq;   // [t][h]
  std::vector<std::vector<int>> infoset_of; // [t][h], -1 when |U| = 1
  int params = 0;

  int rows() const { return 1 + static_cast<int>(parent.size()); }
  int after(int t, int h, int a) const {
    if (hist_seq.empty()) return 0;
    int I = infoset_of[t][h];
    return I >= 0 ? seqs[I][a] : hist_seq[t][h];
  }
  // Constraint matrix E with E x = e.
  MatrixXd constraints() const {
    MatrixXd E = MatrixXd::Zero(rows(), n_seq);
    E(0, 0) = 1;
    for (std::size_t I = 0; I < parent.size(); ++I) {
      E(I + 1, parent[I]) = -1;
      for (int s : seqs[I]) E(I + 1, s) = 1;
    }
    return E;
  }
};

SeqForm build_seq(const GameSpec& g, const Histories& hs, int i) {
  SeqForm f;
  const int T = g.horizon;
  f.hist_seq.resize(T + 1);
  f.infoset_of.resize(T);
  for (int t = 0; t <= T; ++t) {
    f.hist_seq[t].resize(hs.count(i, t));
    for (int h = 0; h < hs.count(i, t); ++h)
      f.hist_seq[t][h] =
          t == 0 ? 0 : f.after(t - 1, hs.player[i].parent[t][h], hs.previous_action(g, i, t, h));
    if (t == T) break;
    const int na = g.num_actions(t, i);
    f.infoset_of[t].assign(hs.count(i, t), -1);
    if (na <= 1) continue;
    for (int h = 0; h < hs.count(i, t); ++h) {
      f.infoset_of[t][h] = static_cast<int>(f.parent.size());
      f.parent.push_back(f.hist_seq[t][h]);
      f.info_t.push_back(t);
      f.info_h.push_back(h);
      std::vector<int> s(na);
      for (int a = 0; a < na; ++a) s[a] = f.n_seq++;
      f.seqs.push_back(std::move(s));
      f.params += na - 1;
    }
  }
  return f;
}

// Consistent supports: the empty sequence plus a nonempty action subset at
// every decision point reached by the support.
std::vector<std::vector<int>> supports(const SeqForm& f, std::size_t cap) {
  std::vector<std::vector<int>> out;
  std::vector<char> in(f.n_seq, 0);
  in[0] = 1;
  std::function<void(std::size_t)> rec = [&](std::size_t I) {
    if (I == f.parent.size()) {
      std::vector<int> s;
      for (int k = 0; k < f.n_seq; ++k)
        if (in[k]) s.push_back(k);
      out.push_back(std::move(s));
      if (out.size() > cap) throw Error(ErrorKind::TooLargeForEnumeration, "too many support pairs");
      return;
    }
    if (!in[f.parent[I]]) {
      rec(I + 1);
      return;
    }
    const auto& sq = f.seqs[I];
    const int m = static_cast<int>(sq.size());
    for (int mask = 1; mask < (1 << m); ++mask) {
      for (int a = 0; a < m; ++a) in[sq[a]] = mask >> a & 1;
      rec(I + 1);
    }
    for (int a = 0; a < m; ++a) in[sq[a]] = 0;
  };
  rec(0);
  return out;
}

double binom(int n, int k) {
  double r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Vertices of {z : Aeq z = beq, G z >= h}.
std::vector<VectorXd> vertices(const MatrixXd& Aeq, const VectorXd& beq, const MatrixXd& G, const VectorXd& h,
                               std::size_t max_subsets) {
  const int nv = static_cast<int>(G.cols());
  VectorXd z0 = VectorXd::Zero(nv);
  MatrixXd N = MatrixXd::Identity(nv, nv);
  if (Aeq.rows() > 0) {
    Eigen::FullPivLU<MatrixXd> lu(Aeq);
    lu.setThreshold(1e-10);
    z0 = lu.solve(beq);
    if ((Aeq * z0 - beq).cwiseAbs().maxCoeff() > 1e-9) return {};
    if (lu.rank() == nv)
      N.resize(nv, 0);
    else
      N = lu.kernel();
  }
  const int d = static_cast<int>(N.cols());
  const int m = static_cast<int>(G.rows());
  std::vector<VectorXd> out;
  auto feasible = [&](const VectorXd& z) {
    return m == 0 || (G * z - h).minCoeff() >= -1e-9;
  };
  if (d == 0) {
    if (feasible(z0)) out.push_back(z0);
    return out;
  }
  if (d > m) return out;  // a pointed polyhedron needs d tight rows
  if (binom(m, d) > static_cast<double>(max_subsets))
    throw Error(ErrorKind::TooLargeForEnumeration, "vertex enumeration exceeds the subset cap");
  const MatrixXd Gw = G * N;
  const VectorXd hw = h - G * z0;
  std::vector<int> idx(d);
  for (int j = 0; j < d; ++j) idx[j] = j;
  while (true) {
    MatrixXd S(d, d);
    VectorXd b(d);
    for (int j = 0; j < d; ++j) {
      S.row(j) = Gw.row(idx[j]);
      b[j] = hw[idx[j]];
    }
    Eigen::FullPivLU<MatrixXd> lu(S);
    lu.setThreshold(1e-10);
    if (lu.rank() == d) {
      VectorXd z = z0 + N * lu.solve(b);
      if (feasible(z)) {
        bool dup = false;
        for (const auto& v : out)
          if ((v - z).cwiseAbs().maxCoeff() < 1e-9) dup = true;
        if (!dup) out.push_back(z);
      }
    }
    int j = d - 1;
    while (j >= 0 && idx[j] == m - d + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int l = j + 1; l < d; ++l) idx[l] = idx[l - 1] + 1;
  }
  return out;
}

// Best-response polytope of the player owning `own` (support S_own) against
// the opponent's support S_opp, where M holds the opponent's payoffs
// indexed [own seq][opp seq] and Fopp is the opponent's constraint matrix.
std::vector<VectorXd> side(const MatrixXd& Eown, const std::vector<int>& S_own, const MatrixXd& Fopp,
                           const MatrixXd& M, const std::vector<int>& S_opp, std::size_t max_subsets) {
  const int ns = static_cast<int>(S_own.size());
  const int nq = static_cast<int>(Fopp.rows());
  const int nopp = static_cast<int>(Fopp.cols());
  const int nv = ns + nq;
  std::vector<char> opp_in(nopp, 0);
  for (int s : S_opp) opp_in[s] = 1;
  std::vector<VectorXd> eq_rows, ineq_rows;
  std::vector<double> eq_rhs, ineq_rhs;
  for (int r = 0; r < Eown.rows(); ++r) {
    VectorXd row = VectorXd::Zero(nv);
    bool any = false;
    for (int j = 0; j < ns; ++j)
      if ((row[j] = Eown(r, S_own[j])) != 0) any = true;
    const double rhs = r == 0 ? 1.0 : 0.0;
    if (!any) {
      if (rhs != 0) return {};
      continue;
    }
    eq_rows.push_back(row);
    eq_rhs.push_back(rhs);
  }
  for (int tau = 0; tau < nopp; ++tau) {
    VectorXd row = VectorXd::Zero(nv);
    for (int j = 0; j < ns; ++j) row[j] = -M(S_own[j], tau);
    for (int J = 0; J < nq; ++J) row[ns + J] = Fopp(J, tau);
    if (opp_in[tau]) {
      eq_rows.push_back(row);
      eq_rhs.push_back(0);
    } else {
      ineq_rows.push_back(row);
      ineq_rhs.push_back(0);
    }
  }
  for (int j = 0; j < ns; ++j) {
    VectorXd row = VectorXd::Zero(nv);
    row[j] = 1;
    ineq_rows.push_back(row);
    ineq_rhs.push_back(0);
  }
  MatrixXd Aeq(eq_rows.size(), nv), G(ineq_rows.size(), nv);
  VectorXd beq(eq_rows.size()), h(ineq_rows.size());
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    Aeq.row(r) = eq_rows[r];
    beq[r] = eq_rhs[r];
  }
  for (std::size_t r = 0; r < ineq_rows.size(); ++r) {
    G.row(r) = ineq_rows[r];
    h[r] = ineq_rhs[r];
  }
  std::vector<VectorXd> out;
  for (const auto& z : vertices(Aeq, beq, G, h, max_subsets)) out.push_back(z.head(ns));
  return out;
}

VectorXd expand(const VectorXd& part, const std::vector<int>& S, int n) {
  VectorXd x = VectorXd::Zero(n);
  for (std::size_t j = 0; j < S.size(); ++j) x[S[j]] = std::max(0.0, part[j]);
  return x;
}

Strategy behavioral(const GameSpec& g, const Histories& hs, int i, const SeqForm& f, const VectorXd& x) {
  Strategy s;
  s.table.resize(g.horizon);
  for (int t = 0; t < g.horizon; ++t) {
    const int na = g.num_actions(t, i);
    s.table[t].assign(hs.count(i, t), Dist(na, 1.0 / na));
    for (int h = 0; h < hs.count(i, t); ++h) {
      const int I = f.infoset_of[t][h];
      if (I < 0) continue;
      const double den = x[f.parent[I]];
      if (den <= 1e-12) continue;
      double tot = 0;
      for (int a = 0; a < na; ++a) tot += (s.table[t][h][a] = std::max(0.0, x[f.seqs[I][a]] / den));
      for (double& p : s.table[t][h]) p /= tot;
    }
  }
  return s;
}

}  // namespace

double hausdorff(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return INFINITY;
  auto dist = [](const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::abs(p[i] - q[i]));
    return d;
  };
  auto one_way = [&](const auto& P, const auto& Q) {
    double worst = 0;
    for (const auto& p : P) {
      double best = INFINITY;
      for (const auto& q : Q) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

EnumerateResult enumerate_bne_small(const GameSpec& g, const Histories& hs, const EnumerateOptions& opt) {
  const int n = g.num_players();
  if (n > 2) throw Error(ErrorKind::TooLargeForEnumeration, "enumeration supports at most two players");
  std::vector<SeqForm> sf(2);
  for (int i = 0; i < n; ++i) sf[i] = build_seq(g, hs, i);
  EnumerateResult res;
  for (int i = 0; i < n; ++i) {
    res.parameters.push_back(sf[i].params);
    if (sf[i].params > opt.max_parameters)
      throw Error(ErrorKind::TooLargeForEnumeration, "player " + g.players[i] + " has " +
                                                         std::to_string(sf[i].params) + " strategy parameters");
  }

  // payoff matrices over sequence pairs, chance weights only
  MatrixXd A = MatrixXd::Zero(sf[0].n_seq, sf[1].n_seq), B = A;
  JointTable cur = initial_joint(g, hs);
  std::vector<int> nk(n + 1);
  for (int t = 0; t < g.horizon; ++t) {
    JointTable nxt;
    nxt.width = n + 1;
    detail::KeyIndex idx(nxt.width);
    for (std::size_t e = 0; e < cur.size(); ++e) {
      const int* k = cur.key(e);
      for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
        auto u = g.decode_joint(t, ju);
        const int s0 = sf[0].after(t, k[1], u[0]);
        const int s1 = n > 1 ? sf[1].after(t, k[2], u[1]) : 0;
        const auto& r = g.rewards[t][k[0]][ju];
        A(s0, s1) += cur.p[e] * r[0];
        if (n > 1) B(s0, s1) += cur.p[e] * r[1];
        for (const auto& o : g.kernel[t][k[0]][ju]) {
          if (o.p <= 0) continue;
          nk[0] = o.next_state;
          for (int i = 0; i < n; ++i) nk[i + 1] = hs.child(g, i, t, k[i + 1], o.z[i]);
          std::size_t s = idx.insert(nk.data());
          if (s >= nxt.p.size()) nxt.p.push_back(0);
          nxt.p[s] += cur.p[e] * o.p;
        }
      }
    }
    nxt.keys = std::move(idx.keys());
    cur = std::move(nxt);
  }

  const MatrixXd E = sf[0].constraints(), F = sf[1].constraints();
  auto S0 = supports(sf[0], opt.max_support_pairs);
  auto S1 = supports(sf[1], opt.max_support_pairs);
  if (static_cast<double>(S0.size()) * static_cast<double>(S1.size()) > static_cast<double>(opt.max_support_pairs))
    throw Error(ErrorKind::TooLargeForEnumeration, "too many support pairs");
  res.support_pairs = S0.size() * S1.size();

  // Each support pair is independent; collect per pair, merge in order.
  const int np = static_cast<int>(res.support_pairs);
  std::vector<std::vector<std::pair<VectorXd, VectorXd>>> found(np);
  const MatrixXd At = A.transpose();
  detail::parallel_for(np, [&](int pi) {
    const auto& sx = S0[pi / S1.size()];
    const auto& sy = S1[pi % S1.size()];
    auto xs = side(E, sx, F, B, sy, opt.max_vertex_subsets);
    if (xs.empty()) return;
    auto ys = side(F, sy, E, At, sx, opt.max_vertex_subsets);
    for (const auto& xp : xs)
      for (const auto& yp : ys)
        found[pi].push_back({expand(xp, sx, sf[0].n_seq), expand(yp, sy, sf[1].n_seq)});
  });

  std::vector<std::pair<VectorXd, VectorXd>> uniq;
  for (const auto& list : found)
    for (const auto& [x, y] : list) {
      bool dup = false;
      for (const auto& [x2, y2] : uniq)
        if ((x - x2).cwiseAbs().maxCoeff() < opt.dedup_tol && (y - y2).cwiseAbs().maxCoeff() < opt.dedup_tol) {
          dup = true;
          break;
        }
      if (!dup) uniq.push_back({x, y});
    }
  for (const auto& [x, y] : uniq) {
    EnumeratedEquilibrium eq;
    eq.profile.push_back(behavioral(g, hs, 0, sf[0], x));
    if (n > 1) eq.profile.push_back(behavioral(g, hs, 1, sf[1], y));
    eq.payoffs.push_back(x.dot(A * y));
    if (n > 1) eq.payoffs.push_back(x.dot(B * y));
    eq.realization.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    if (n > 1) eq.realization.push_back(std::vector<double>(y.data(), y.data() + y.size()));
    bool seen = false;
    for (const auto& p : res.payoff_set) {
      double d = 0;
      for (std::size_t j = 0; j < p.size(); ++j) d = std::max(d, std::abs(p[j] - eq.payoffs[j]));
      if (d < opt.dedup_tol) seen = true;
    }
    if (!seen) res.payoff_set.push_back(eq.payoffs);
    res.equilibria.push_back(std::move(eq));
  }
  return res;
}

}  // namespace dyngame
