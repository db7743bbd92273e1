#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "report.hpp"

namespace dyngame::cli {

namespace {

using report::Json;

struct Options {
  std::string input;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string eps_geom;
  int samples = 20;
  double mix_floor = 0.05;
  bool no_timestamp = false;
  std::string player;
  bool all = false;
  std::string strategy;
  std::string belief;
  std::string export_dir;
  std::vector<std::string> names;
  bool se = false;
};

struct Loaded {
  GameDocument doc;
  std::string digest;
};

struct Outcome {
  int code = kHolds;
  Json result = Json::object();
};

Loaded load(const std::string& input) {
  Loaded l;
  if (input.rfind("builtin:", 0) == 0) {
    Example ex = build_example(input.substr(8));
    l.doc = document_from_example(ex);
    l.digest = report::digest(serialize_gamespec(l.doc));
    return l;
  }
  std::ifstream in(input, std::ios::binary);
  if (!in) throw Error(ErrorKind::BadParameter, "cannot read " + input);
  std::ostringstream ss;
  ss << in.rdbuf();
  l.doc = parse_gamespec(ss.str());
  l.digest = report::digest(ss.str());
  return l;
}

EpsSchedule schedule_of(const Options& o) {
  if (o.eps_geom.empty()) return EpsSchedule::standard();
  std::vector<double> v;
  std::stringstream ss(o.eps_geom);
  std::string part;
  while (std::getline(ss, part, ',')) v.push_back(parse_number(part));
  if (v.size() != 3 || v[2] != std::floor(v[2]) || v[2] < 0)
    throw Error(ErrorKind::BadParameter, "--eps-geom expects a,r,n with integer n >= 0");
  return EpsSchedule::geometric(v[0], v[1], static_cast<int>(v[2]));
}

SamplerConfig sampler_of(const Options& o) {
  SamplerConfig c;
  c.samples = o.samples;
  c.mix_floor = o.mix_floor;
  c.seed = o.seed;
  c.tol = o.tol.value_or(1e-9);
  return c;
}

std::vector<int> players_of(const Options& o, const GameSpec& g) {
  std::vector<int> out;
  if (o.player.empty() || o.all) {
    for (int i = 0; i < g.num_players(); ++i) out.push_back(i);
    return out;
  }
  int i = g.player_index(o.player);
  if (i < 0) throw Error(ErrorKind::BadParameter, "unknown player " + o.player);
  return {i};
}

std::string strategy_of(const Options& o, const GameDocument& d) {
  if (!o.strategy.empty()) return o.strategy;
  auto names = d.strategy_names();
  if (names.empty()) throw Error(ErrorKind::BadParameter, "document declares no strategy; pass --strategy");
  return names.front();
}

int verdict_code(Verdict v) { return v == Verdict::Holds ? kHolds : v == Verdict::Fails ? kFails : kInconclusive; }

// ---------------------------------------------------------------- subcommands

Outcome cmd_validate(const Options&, const Loaded& l) {
  const auto& g = l.doc.game;
  Outcome r;
  r.result["players"] = g.players;
  r.result["horizon"] = g.horizon;
  std::vector<int> states, hist_total;
  for (const auto& s : g.states) states.push_back(static_cast<int>(s.size()));
  r.result["state_counts"] = states;
  Json hist = Json::object();
  for (int i = 0; i < g.num_players(); ++i) {
    std::vector<int> c;
    for (int t = 0; t < g.horizon; ++t) c.push_back(l.doc.hs.count(i, t));
    hist[g.players[i]] = c;
  }
  r.result["history_counts"] = hist;
  r.result["reward_bound"] = g.reward_bound;
  std::vector<std::string> comp;
  for (int i = 0; i < g.num_players(); ++i)
    if (i < static_cast<int>(l.doc.compressions.size()) && l.doc.compressions[i]) comp.push_back(g.players[i]);
  r.result["compressions"] = comp;
  r.result["strategies"] = l.doc.strategy_names();
  r.result["has_split"] = l.doc.split.has_value();
  std::vector<std::string> bel;
  for (const auto& b : l.doc.beliefs) bel.push_back(b.name);
  r.result["beliefs"] = bel;
  return r;
}

Outcome cmd_check_msi(const Options& o, const Loaded& l) {
  SamplerConfig cfg = sampler_of(o);
  MsiResult m = check_msi(l.doc.game, l.doc.hs, l.doc.compression_profile(), cfg);
  Outcome r;
  r.result = report::msi(m);
  r.code = verdict_code(m.verdict);
  return r;
}

Outcome cmd_check_usi(const Options& o, const Loaded& l) {
  SamplerConfig cfg = sampler_of(o);
  auto K = l.doc.compression_profile();
  Outcome r;
  Json per = Json::array();
  Verdict overall = Verdict::Holds;
  for (int i : players_of(o, l.doc.game)) {
    InfoStateWitness w = check_usi(l.doc.game, l.doc.hs, i, K[i], cfg);
    Json j = report::witness(w);
    j["player"] = l.doc.game.players[i];
    per.push_back(j);
    if (w.verdict == Verdict::Fails)
      overall = Verdict::Fails;
    else if (w.verdict == Verdict::Inconclusive && overall == Verdict::Holds)
      overall = Verdict::Inconclusive;
  }
  r.result["players"] = per;
  r.code = verdict_code(overall);
  return r;
}

Outcome cmd_solve_bne(const Options& o, const Loaded& l) {
  const auto& g = l.doc.game;
  auto K = l.doc.compression_profile();
  EpsSchedule s = schedule_of(o);
  SolveResult res = solve_k_based_bne(g, l.doc.hs, K, s, o.tol.value_or(1e-6));
  Outcome r;
  r.result["schedule"] = report::schedule(s);
  r.result["converged"] = res.converged;
  r.result["worst_residual"] = res.worst_residual;
  r.result["limit_method"] = res.limit_method;
  r.result["bne"] = report::bne(res.bne);
  r.result["payoffs"] = res.bne.payoffs;
  r.result["kprofile"] = report::kprofile(g, K, res.kprofile);
  r.result["trace"] = report::trace(res.trace);
  r.code = res.converged && res.bne.is_bne ? kHolds : kInconclusive;
  return r;
}

Outcome cmd_verify_bne(const Options& o, const Loaded& l) {
  std::string name = strategy_of(o, l.doc);
  BneReport b = verify_bne(l.doc.game, l.doc.hs, l.doc.profile(name), o.tol.value_or(1e-6));
  Outcome r;
  r.result["strategy"] = name;
  r.result["bne"] = report::bne(b);
  r.result["payoffs"] = b.payoffs;
  r.code = b.is_bne ? kHolds : kFails;
  return r;
}

Outcome cmd_solve_se(const Options& o, const Loaded& l) {
  const auto& g = l.doc.game;
  auto K = l.doc.compression_profile();
  EpsSchedule s = schedule_of(o);
  SeSolveResult res = solve_k_based_se(g, l.doc.hs, K, s, o.tol.value_or(1e-6));
  Outcome r;
  r.result["schedule"] = report::schedule(s);
  r.result["converged"] = res.solve.converged;
  r.result["bne"] = report::bne(res.solve.bne);
  r.result["payoffs"] = res.solve.bne.payoffs;
  r.result["kprofile"] = report::kprofile(g, K, res.solve.kprofile);
  r.result["containment_residual"] = res.containment_residual;
  r.result["se"] = report::se(res.se);
  r.result["trace"] = report::trace(res.solve.trace);
  r.code = res.se.se && res.solve.bne.is_bne ? kHolds : kInconclusive;
  return r;
}

Outcome cmd_verify_se(const Options& o, const Loaded& l) {
  std::string name = strategy_of(o, l.doc);
  Profile p = l.doc.profile(name);
  EpsSchedule s = schedule_of(o);
  SeReport se = verify_se_canonical(l.doc.game, l.doc.hs, p, s);
  BneReport b = verify_bne(l.doc.game, l.doc.hs, p, o.tol.value_or(1e-6));
  Outcome r;
  r.result["strategy"] = name;
  r.result["schedule"] = report::schedule(s);
  r.result["se"] = report::se(se);
  r.result["bne"] = report::bne(b);
  // not even a BNE rules SE out; otherwise a failed trembling check is inconclusive
  r.code = se.se ? kHolds : (b.is_bne ? kInconclusive : kFails);
  return r;
}

Outcome cmd_transfer_usi(const Options& o, const Loaded& l) {
  const auto& g = l.doc.game;
  std::string name = strategy_of(o, l.doc);
  auto K = l.doc.compression_profile();
  TransferOptions opt;
  opt.sampler = sampler_of(o);
  opt.tol = o.tol.value_or(1e-6);
  Outcome r;
  r.result["strategy"] = name;
  try {
    if (o.se) {
      EpsSchedule s = schedule_of(o);
      SeTransferResult t = transfer_se_via_usi(g, l.doc.hs, K, l.doc.profile(name), s, opt);
      r.result["mode"] = "se";
      r.result["input_payoffs"] = t.input_payoffs;
      r.result["payoffs"] = t.payoffs;
      r.result["payoff_distance"] = t.payoff_distance;
      r.result["kprofile"] = report::kprofile(g, K, t.kprofile);
      r.result["se"] = report::se(t.se);
      r.code = t.ok ? kHolds : kFails;
    } else {
      TransferResult t = transfer_bne_via_usi(g, l.doc.hs, K, l.doc.profile(name), opt);
      r.result["mode"] = "bne";
      r.result["input_payoffs"] = t.input_payoffs;
      r.result["payoffs"] = t.bne.payoffs;
      r.result["payoff_distance"] = t.payoff_distance;
      r.result["kprofile"] = report::kprofile(g, K, t.kprofile);
      r.result["bne"] = report::bne(t.bne);
      r.code = t.ok ? kHolds : kFails;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotUSIWitness) throw;
    r.result["not_usi"] = e.what();
    r.code = kFails;
  }
  return r;
}

Outcome cmd_enumerate(const Options&, const Loaded& l) {
  EnumerateResult e = enumerate_bne_small(l.doc.game, l.doc.hs);
  Outcome r;
  r.result["parameters"] = e.parameters;
  r.result["support_pairs"] = e.support_pairs;
  r.result["payoff_set"] = e.payoff_set;
  Json eq = Json::array();
  for (const auto& x : e.equilibria) {
    Json j;
    j["payoffs"] = x.payoffs;
    j["profile"] = report::profile(l.doc.game, l.doc.hs, x.profile);
    eq.push_back(j);
  }
  r.result["equilibria"] = eq;
  r.result["count"] = e.equilibria.size();
  return r;
}

Outcome cmd_check_wpbe(const Options& o, const Loaded& l) {
  Assessment a = l.doc.assessment(o.belief);
  WpbeReport w = check_wpbe(l.doc.game, l.doc.hs, a, o.tol.value_or(1e-9));
  Outcome r;
  r.result["wpbe"] = w.wpbe;
  r.result["bayes_ok"] = w.bayes_ok;
  r.result["rational_ok"] = w.rational_ok;
  r.result["issues"] = w.issues;
  r.result["payoffs"] = w.payoffs;
  r.code = w.wpbe ? kHolds : kFails;
  return r;
}

Outcome cmd_belief_based(const Options& o, const Loaded& l) {
  if (!l.doc.split) throw Error(ErrorKind::BadParameter, "document has no [split] section");
  std::string name = strategy_of(o, l.doc);
  BeliefBasedReport b = check_belief_based(l.doc.game, l.doc.hs, l.doc.profile(name), *l.doc.split, o.tol.value_or(1e-9));
  Outcome r;
  r.result["strategy"] = name;
  r.result["belief_based"] = b.belief_based;
  if (!b.belief_based) {
    r.result["player"] = l.doc.game.players[b.player];
    r.result["t"] = b.t;
    r.result["common"] = {b.common_a, b.common_b};
    r.result["private"] = b.private_label;
    r.result["action_gap"] = b.action_gap;
  }
  Json beliefs = Json::array();
  for (std::size_t t = 0; t < b.beliefs.size(); ++t)
    for (std::size_t c = 0; c < b.beliefs[t].size(); ++c) {
      if (b.beliefs[t][c].empty()) continue;
      Json row;
      row["t"] = t + 1;
      row["common"] = l.doc.split->common_labels[t][c];
      Json law = Json::object();
      for (const auto& [lab, p] : b.beliefs[t][c]) law[lab] = p;
      row["belief"] = law;
      beliefs.push_back(row);
    }
  r.result["beliefs"] = beliefs;
  r.code = b.belief_based ? kHolds : kFails;
  return r;
}

std::string stem_of(const std::string& spec, const std::vector<std::string>& all) {
  const std::string base = spec.substr(0, spec.find(':'));
  int same = 0;
  for (const auto& s : all) same += s.substr(0, s.find(':')) == base;
  if (same <= 1) return base;
  std::string s = spec;
  for (char& c : s)
    if (c == ':' || c == ',' || c == '=') c = '_';
  return s;
}

Outcome cmd_fixtures(const Options& o) {
  std::vector<std::string> names = o.names;
  if (o.all || names.empty()) names = fixture_names();
  Outcome r;
  Json list = Json::array();
  bool pass = true;
  std::vector<std::string> written;
  for (const auto& spec : names) {
    Example ex = build_example(spec);
    if (!o.export_dir.empty()) {
      std::filesystem::create_directories(o.export_dir);
      auto path = std::filesystem::path(o.export_dir) / (stem_of(spec, names) + ".game");
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Error(ErrorKind::BadParameter, "cannot write " + path.string());
      f << "# " << spec << "\n" << serialize_gamespec(document_from_example(ex));
      written.push_back(path.string());
      continue;
    }
    FixtureReport fr = run_fixture(ex);
    pass = pass && fr.pass();
    list.push_back(report::fixture(fr));
  }
  if (!o.export_dir.empty()) {
    r.result["exported"] = written;
    return r;
  }
  r.result["fixtures"] = list;
  r.code = pass ? kHolds : kFails;
  return r;
}

const char* verdict_name(int code) {
  switch (code) {
    case kHolds: return "holds";
    case kFails: return "fails";
    case kInconclusive: return "inconclusive";
    default: return "error";
  }
}

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

Json error_json(const std::exception& e) {
  Json j;
  j["message"] = e.what();
  if (auto* err = dynamic_cast<const Error*>(&e)) j["kind"] = to_string(err->kind());
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    j["line"] = pe->line();
    j["column"] = pe->column();
  }
  if (auto* vf = dynamic_cast<const ValidationFailure*>(&e)) j["violations"] = report::violations(vf->violations());
  return j;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Options o;
  CLI::App app{"Exact analysis of finite dynamic games with asymmetric information", "dyngame"};
  app.require_subcommand(1, 1);

  struct Spec {
    const char* name;
    const char* help;
    bool input;
  };
  const std::vector<Spec> specs = {
      {"validate", "parse and validate a game document", true},
      {"check-msi", "check mutually sufficient information for the declared compressions", true},
      {"check-usi", "check unilaterally sufficient information", true},
      {"solve-bne", "compute a K-based Bayes-Nash equilibrium", true},
      {"verify-bne", "verify that a declared strategy profile is a BNE", true},
      {"solve-se", "compute a K-based sequential equilibrium", true},
      {"verify-se", "check a declared profile against canonical trembles", true},
      {"transfer-usi", "replace a BNE (or SE) by a K-based one under USI", true},
      {"enumerate-bne", "enumerate all BNE of a small two-player game", true},
      {"check-wpbe", "check a declared assessment for weak perfect Bayesian equilibrium", true},
      {"check-belief-based", "check whether a profile depends only on common-information beliefs", true},
      {"fixtures", "run the built-in example fixtures", false},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& s : specs) {
    CLI::App* c = app.add_subcommand(s.name, s.help);
    subs[s.name] = c;
    if (s.input) c->add_option("input", o.input, "game document, or builtin:<example spec>")->required();
    c->add_option("--seed", o.seed, "sampler seed");
    c->add_option("--tol", o.tol, "acceptance tolerance");
    c->add_option("--eps-geom", o.eps_geom, "trembling schedule a,r,n (eps_k = a r^k, k = 0..n)");
    c->add_option("--samples", o.samples, "sampled profiles per check (M)");
    c->add_option("--mix-floor", o.mix_floor, "minimum action probability in sampled profiles");
    c->add_flag("--no-timestamp", o.no_timestamp, "omit timestamp and wall time from the report");
  }
  subs["check-usi"]->add_option("--player", o.player, "player name (default: every player)");
  subs["check-usi"]->add_flag("--all", o.all, "check every player");
  for (const char* n : {"verify-bne", "verify-se", "transfer-usi", "check-belief-based"})
    subs[n]->add_option("--strategy", o.strategy, "strategy name in the document");
  subs["transfer-usi"]->add_flag("--se", o.se, "transfer a sequential equilibrium along its trembles");
  subs["check-wpbe"]->add_option("--belief", o.belief, "belief system name in the document");
  subs["fixtures"]->add_flag("--all", o.all, "run every default fixture");
  subs["fixtures"]->add_option("names", o.names, "fixture specs such as example3:c=0.1");
  subs["fixtures"]->add_option("--export", o.export_dir, "write the fixtures as game documents into DIR");

  Json rep;
  rep["schema"] = report::kSchema;
  std::string command;
  int code = kInputError;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    command = app.get_subcommands().front()->get_name();
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    rep["command"] = args.empty() ? "" : args.front();
    rep["verdict"] = "error";
    rep["exit_code"] = kInputError;
    rep["error"] = {{"kind", "SyntaxError"}, {"message", e.what()}};
    out << rep.dump(2) << "\n";
    err << "dyngame: " << e.what() << "\n";
    return kInputError;
  }

  rep["command"] = command;
  Json params;
  params["seed"] = o.seed;
  if (o.tol) params["tol"] = *o.tol;
  params["samples"] = o.samples;
  params["mix_floor"] = o.mix_floor;
  if (!o.eps_geom.empty()) params["eps_geom"] = o.eps_geom;
  if (!o.player.empty()) params["player"] = o.player;
  if (!o.strategy.empty()) params["strategy"] = o.strategy;
  if (!o.belief.empty()) params["belief"] = o.belief;
  rep["parameters"] = params;
  Outcome res;
  try {
    if (command == "fixtures") {
      res = cmd_fixtures(o);
    } else {
      Loaded l = load(o.input);
      rep["input"] = {{"source", o.input}, {"digest", l.digest}};
      static const std::map<std::string, Outcome (*)(const Options&, const Loaded&)> table = {
          {"validate", cmd_validate},         {"check-msi", cmd_check_msi},         {"check-usi", cmd_check_usi},
          {"solve-bne", cmd_solve_bne},       {"verify-bne", cmd_verify_bne},       {"solve-se", cmd_solve_se},
          {"verify-se", cmd_verify_se},       {"transfer-usi", cmd_transfer_usi},   {"enumerate-bne", cmd_enumerate},
          {"check-wpbe", cmd_check_wpbe},     {"check-belief-based", cmd_belief_based},
      };
      res = table.at(command)(o, l);
    }
    code = res.code;
    rep["result"] = res.result;
  } catch (const Error& e) {
    code = e.kind() == ErrorKind::NoConvergence ? kInconclusive : kInputError;
    rep["error"] = error_json(e);
    err << "dyngame: " << e.what() << "\n";
  } catch (const std::exception& e) {
    code = kInputError;
    rep["error"] = error_json(e);
    err << "dyngame: " << e.what() << "\n";
  }
  rep["verdict"] = verdict_name(code);
  rep["exit_code"] = code;
  if (!o.no_timestamp) {
    rep["timestamp"] = iso_now();
    rep["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  out << rep.dump(2) << "\n";
  return code;
}

}  // namespace dyngame::cli
