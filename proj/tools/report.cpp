#include "report.hpp"

#include <cstdio>

namespace dyngame::report {

std::string digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json counterexample(const Counterexample& c) {
  Json j;
  j["test"] = c.test;
  j["player"] = c.player;
  j["t"] = c.t;
  j["k"] = c.k;
  j["first"] = c.first;
  if (!c.second.empty()) j["second"] = c.second;
  if (!c.action.empty()) j["action"] = c.action;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["sample"] = c.sample;
  if (c.sample2 >= 0) j["sample2"] = c.sample2;
  j["seed"] = c.seed;
  return j;
}

Json profile(const GameSpec& g, const Histories& hs, const Profile& p) {
  Json out = Json::object();
  for (int i = 0; i < g.num_players(); ++i) {
    Json pl = Json::object();
    for (int t = 0; t < g.horizon; ++t) {
      if (g.num_actions(t, i) == 1) continue;
      Json st = Json::object();
      for (int h = 0; h < hs.count(i, t); ++h) st[hs.label(g, i, t, h)] = p[i].table[t][h];
      pl["t=" + std::to_string(t + 1)] = st;
    }
    out[g.players[i]] = pl;
  }
  return out;
}

Json kprofile(const GameSpec& g, const std::vector<Compression>& K, const std::vector<KStrategy>& p) {
  Json out = Json::object();
  for (int i = 0; i < g.num_players(); ++i) {
    Json pl = Json::object();
    for (int t = 0; t < g.horizon; ++t) {
      if (g.num_actions(t, i) == 1) continue;
      Json st = Json::object();
      for (int k = 0; k < K[i].count(t); ++k) st[K[i].labels[t][k]] = p[i].table[t][k];
      pl["t=" + std::to_string(t + 1)] = st;
    }
    out[g.players[i]] = pl;
  }
  return out;
}

Json bne(const BneReport& r) {
  Json j;
  j["is_bne"] = r.is_bne;
  j["payoffs"] = r.payoffs;
  j["best_response"] = r.best_response;
  j["gaps"] = r.gaps;
  j["max_gap"] = r.max_gap();
  j["tol"] = r.tol;
  return j;
}

Json schedule(const EpsSchedule& s) {
  Json j;
  j["eps"] = s.eps;
  j["max_iter"] = s.max_iter;
  j["averaging_iter"] = s.averaging_iter;
  j["damping"] = s.damping;
  j["tol"] = s.tol;
  return j;
}

Json trace(const std::vector<EpsPoint>& t) {
  Json out = Json::array();
  for (const auto& p : t) {
    Json j;
    j["eps"] = p.eps;
    j["iterations"] = p.iterations;
    j["residual"] = p.residual;
    j["method"] = p.method;
    out.push_back(j);
  }
  return out;
}

Json se(const SeReport& r) {
  Json j;
  j["se"] = r.se;
  j["verdict"] = r.verdict;
  j["margin"] = r.margin;
  j["max_gap"] = r.max_gap;
  Json v = Json::array();
  for (const auto& x : r.violations) {
    Json e;
    e["player"] = x.player;
    e["t"] = x.t;
    e["history"] = x.history;
    e["action"] = x.action;
    e["gap"] = x.gap;
    e["eps"] = x.eps;
    e["n"] = x.n;
    v.push_back(e);
  }
  j["violations"] = v;
  return j;
}

Json witness(const InfoStateWitness& w) {
  Json j;
  j["verdict"] = to_string(w.verdict);
  j["label"] = w.label;
  j["player"] = w.player;
  j["samples_checked"] = w.samples_checked;
  if (w.counterexample) j["counterexample"] = counterexample(*w.counterexample);
  auto rows = [](const std::vector<WitnessRow>& r) {
    Json a = Json::array();
    for (const auto& x : r) a.push_back({{"t", x.t + 1}, {"k", x.k}, {"value", x.value}, {"p", x.p}});
    return a;
  };
  if (!w.F.empty()) j["F"] = rows(w.F);
  if (!w.phi.empty()) j["phi"] = rows(w.phi);
  return j;
}

Json msi(const MsiResult& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["label"] = r.label;
  if (r.counterexample) j["counterexample"] = counterexample(*r.counterexample);
  Json pl = Json::array();
  for (const auto& w : r.players) {
    Json x;
    x["player"] = w.player;
    x["verdict"] = to_string(w.verdict);
    x["samples_checked"] = w.samples_checked;
    if (w.counterexample) x["counterexample"] = counterexample(*w.counterexample);
    pl.push_back(x);
  }
  j["players"] = pl;
  return j;
}

Json fixture(const FixtureReport& r) {
  Json j;
  j["name"] = r.name;
  j["pass"] = r.pass();
  Json a = Json::array();
  for (const auto& e : r.results) {
    Json x;
    x["name"] = e.name;
    x["origin"] = to_string(e.origin);
    x["pass"] = e.pass;
    x["delta"] = e.delta;
    x["tol"] = e.tol;
    x["detail"] = e.detail;
    a.push_back(x);
  }
  j["expectations"] = a;
  return j;
}

Json violations(const std::vector<Violation>& v) {
  Json a = Json::array();
  for (const auto& x : v) {
    Json e;
    e["kind"] = to_string(x.kind);
    if (x.t >= 0) e["t"] = x.t;
    e["where"] = x.where;
    e["message"] = x.message;
    a.push_back(e);
  }
  return a;
}

}  // namespace dyngame::report
