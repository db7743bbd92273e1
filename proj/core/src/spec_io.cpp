#include "dyngame/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "dyngame/paper_games.hpp"

namespace dyngame {

// ---------------------------------------------------------------- numbers

namespace {

bool parse_decimal(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

double parse_number(const std::string& text) {
  auto slash = text.find('/');
  double v = 0;
  if (slash == std::string::npos) {
    if (!parse_decimal(text, v)) throw Error(ErrorKind::BadParameter, "not a number: " + text);
    return v;
  }
  double p = 0, q = 0;
  if (!parse_decimal(text.substr(0, slash), p) || !parse_decimal(text.substr(slash + 1), q))
    throw Error(ErrorKind::BadParameter, "not a fraction: " + text);
  if (q == 0) throw Error(ErrorKind::BadParameter, "zero denominator: " + text);
  return p / q;
}

std::string format_number(double v) {
  if (v == 0) return "0";
  char buf[40];
  if (v == std::rint(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) == v) return buf;
  for (long long den = 2; den <= 1000; ++den) {
    double num = std::rint(v * static_cast<double>(den));
    if (std::abs(num) > 1e15 || num / static_cast<double>(den) != v) continue;
    if (std::gcd(static_cast<long long>(std::abs(num)), den) != 1) continue;
    std::snprintf(buf, sizeof buf, "%.0f/%lld", num, den);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- document helpers

std::vector<std::string> GameDocument::strategy_names() const {
  std::vector<std::string> out;
  for (const auto& s : strategies)
    if (std::find(out.begin(), out.end(), s.name) == out.end()) out.push_back(s.name);
  return out;
}

Profile GameDocument::profile(const std::string& name) const {
  Profile p = uniform_profile(game, hs);
  bool found = false;
  for (const auto& s : strategies)
    if (s.name == name) {
      p[s.player] = s.strategy;
      found = true;
    }
  if (!found) throw Error(ErrorKind::BadParameter, "no strategy named " + name);
  return p;
}

Assessment GameDocument::assessment(const std::string& belief_name) const {
  for (const auto& b : beliefs)
    if (belief_name.empty() || b.name == belief_name) return {profile(b.strategy), b.belief};
  throw Error(ErrorKind::BadParameter,
              belief_name.empty() ? std::string("document has no belief system") : "no belief system named " + belief_name);
}

std::vector<Compression> GameDocument::compression_profile() const {
  std::vector<Compression> out;
  for (int i = 0; i < game.num_players(); ++i) {
    if (i < static_cast<int>(compressions.size()) && compressions[i])
      out.push_back(*compressions[i]);
    else
      out.push_back(identity_compression(game, hs, i));
  }
  return out;
}

// ---------------------------------------------------------------- lexer

namespace {

struct Tok {
  std::string s;
  int col = 0;
};

struct Line {
  int no = 0;
  std::vector<Tok> toks;
};

struct Section {
  std::string name;
  std::map<std::string, std::string> attrs;
  int line = 0;
  std::vector<Line> lines;
};

[[noreturn]] void fail(ErrorKind k, int line, int col, const std::string& msg) { throw ParseError(k, line, col, msg); }

std::vector<Tok> tokenize(const std::string& s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  auto is_sep = [&](std::size_t k) {
    return s[k] == ':' || s[k] == '|' || (s[k] == '-' && k + 1 < s.size() && s[k + 1] == '>');
  };
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    const int col = static_cast<int>(i) + 1;
    if (s[i] == ':' || s[i] == '|') {
      out.push_back({std::string(1, s[i]), col});
      ++i;
      continue;
    }
    if (s[i] == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({"->", col});
      i += 2;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && !is_sep(j)) ++j;
    out.push_back({s.substr(i, j - i), col});
    i = j;
  }
  return out;
}

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> out;
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    ++no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '[') {
      auto close = line.find(']', first);
      if (close == std::string::npos) fail(ErrorKind::SyntaxError, no, static_cast<int>(first) + 1, "unterminated section header");
      if (line.find_first_not_of(" \t", close + 1) != std::string::npos)
        fail(ErrorKind::SyntaxError, no, static_cast<int>(close) + 2, "text after section header");
      Section sec;
      sec.line = no;
      std::istringstream hs(line.substr(first + 1, close - first - 1));
      std::string word;
      hs >> sec.name;
      if (sec.name.empty()) fail(ErrorKind::SyntaxError, no, static_cast<int>(first) + 1, "empty section header");
      while (hs >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos || eq == 0)
          fail(ErrorKind::SyntaxError, no, static_cast<int>(first) + 2, "section attribute must be key=value: " + word);
        sec.attrs[word.substr(0, eq)] = word.substr(eq + 1);
      }
      out.push_back(std::move(sec));
      continue;
    }
    if (out.empty()) fail(ErrorKind::SyntaxError, no, static_cast<int>(first) + 1, "content before the first section");
    out.back().lines.push_back({no, tokenize(line)});
  }
  return out;
}

class Cursor {
 public:
  explicit Cursor(const Line& l) : l_(l) {}
  bool done() const { return pos_ >= l_.toks.size(); }
  const Tok& peek() const { return l_.toks[pos_]; }
  int line() const { return l_.no; }
  int col() const { return done() ? (l_.toks.empty() ? 1 : l_.toks.back().col + static_cast<int>(l_.toks.back().s.size())) : peek().col; }
  const Tok& next(const std::string& what) {
    if (done()) fail(ErrorKind::SyntaxError, l_.no, col(), "expected " + what);
    const Tok& t = l_.toks[pos_++];
    if (t.s == ":" || t.s == "|" || t.s == "->") fail(ErrorKind::SyntaxError, l_.no, t.col, "expected " + what + ", found '" + t.s + "'");
    return t;
  }
  void expect(const std::string& sep) {
    if (done() || peek().s != sep) fail(ErrorKind::SyntaxError, l_.no, col(), "expected '" + sep + "'");
    ++pos_;
  }
  // Tokens up to the next separator or end of line.
  std::vector<Tok> words() {
    std::vector<Tok> out;
    while (!done() && peek().s != ":" && peek().s != "|" && peek().s != "->") out.push_back(l_.toks[pos_++]);
    return out;
  }
  void end() {
    if (!done()) fail(ErrorKind::SyntaxError, l_.no, col(), "unexpected '" + peek().s + "'");
  }
  double number() {
    const Tok& t = next("a number");
    try {
      return parse_number(t.s);
    } catch (const Error& e) {
      fail(ErrorKind::SyntaxError, l_.no, t.col, e.what());
    }
  }
  // "t=N" with 1 <= N <= hi, returned 0-based.
  int stage(int hi) {
    const Tok& t = next("t=<stage>");
    if (t.s.rfind("t=", 0) != 0) fail(ErrorKind::SyntaxError, l_.no, t.col, "expected t=<stage>, found " + t.s);
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(t.s.substr(2), &used);
      if (used != t.s.size() - 2) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail(ErrorKind::SyntaxError, l_.no, t.col, "bad stage " + t.s);
    }
    if (v < 1 || v > hi) fail(ErrorKind::SemanticError, l_.no, t.col, "stage out of range 1.." + std::to_string(hi) + ": " + t.s);
    return v - 1;
  }

 private:
  const Line& l_;
  std::size_t pos_ = 0;
};

int lookup(const std::vector<std::string>& space, const Tok& t, int line, const std::string& what) {
  auto it = std::find(space.begin(), space.end(), t.s);
  if (it == space.end()) fail(ErrorKind::SemanticError, line, t.col, "unknown " + what + " '" + t.s + "'");
  return static_cast<int>(it - space.begin());
}

int player_of(const GameSpec& g, const Tok& t, int line) {
  int i = g.player_index(t.s);
  if (i < 0) fail(ErrorKind::SemanticError, line, t.col, "unknown player '" + t.s + "'");
  return i;
}

int section_stage(const Section& s, int hi) {
  auto it = s.attrs.find("t");
  if (it == s.attrs.end()) fail(ErrorKind::SyntaxError, s.line, 1, "[" + s.name + "] needs t=<stage>");
  int v = 0;
  try {
    v = std::stoi(it->second);
  } catch (const std::exception&) {
    fail(ErrorKind::SyntaxError, s.line, 1, "bad stage " + it->second);
  }
  if (v < 1 || v > hi) fail(ErrorKind::SemanticError, s.line, 1, "stage out of range: " + it->second);
  return v - 1;
}

std::string attr(const Section& s, const std::string& key) {
  auto it = s.attrs.find(key);
  if (it == s.attrs.end() || it->second.empty()) fail(ErrorKind::SyntaxError, s.line, 1, "[" + s.name + "] needs " + key + "=...");
  return it->second;
}

std::vector<std::string> labels_of(const std::vector<Tok>& toks, int line, bool allow_slash = false) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : toks) {
    if (!allow_slash && t.s.find('/') != std::string::npos) fail(ErrorKind::SyntaxError, line, t.col, "labels may not contain '/'");
    if (!seen.insert(t.s).second) fail(ErrorKind::SemanticError, line, t.col, "duplicate label '" + t.s + "'");
    out.push_back(t.s);
  }
  return out;
}

int history(const GameSpec& g, const Histories& hs, int i, int t, const Tok& tok, int line) {
  int h = hs.find(g, i, t, tok.s);
  if (h < 0)
    fail(ErrorKind::SemanticError, line, tok.col,
         "'" + tok.s + "' is not a possible stage-" + std::to_string(t + 1) + " history of " + g.players[i]);
  return h;
}

// ---------------------------------------------------------------- game sections

GameSpec build_game(const std::vector<Section>& secs) {
  GameSpec g;
  const Section* players = nullptr;
  const Section* horizon = nullptr;
  const Section* spaces = nullptr;
  const Section* initial = nullptr;
  const Section* rewards = nullptr;
  std::vector<const Section*> kernels;
  static const std::set<std::string> known{"players", "horizon", "spaces", "initial", "kernel", "rewards",
                                           "compression", "strategy", "split", "belief"};
  for (const auto& s : secs) {
    if (!known.count(s.name)) fail(ErrorKind::SyntaxError, s.line, 1, "unknown section [" + s.name + "]");
    auto once = [&](const Section*& slot) {
      if (slot) fail(ErrorKind::SemanticError, s.line, 1, "duplicate section [" + s.name + "]");
      slot = &s;
    };
    if (s.name == "players") once(players);
    if (s.name == "horizon") once(horizon);
    if (s.name == "spaces") once(spaces);
    if (s.name == "initial") once(initial);
    if (s.name == "rewards") once(rewards);
    if (s.name == "kernel") kernels.push_back(&s);
  }
  if (!players) fail(ErrorKind::SemanticError, 1, 1, "missing [players]");
  if (!horizon) fail(ErrorKind::SemanticError, 1, 1, "missing [horizon]");
  if (!spaces) fail(ErrorKind::SemanticError, 1, 1, "missing [spaces]");
  if (!initial) fail(ErrorKind::SemanticError, 1, 1, "missing [initial]");

  for (const auto& l : players->lines) {
    Cursor c(l);
    for (const auto& t : c.words()) g.players.push_back(t.s);
    c.end();
  }
  if (g.players.empty()) fail(ErrorKind::SemanticError, players->line, 1, "no players");
  labels_of([&] {
    std::vector<Tok> all;
    for (const auto& l : players->lines) all.insert(all.end(), l.toks.begin(), l.toks.end());
    return all;
  }(), players->line);
  {
    if (horizon->lines.size() != 1) fail(ErrorKind::SyntaxError, horizon->line, 1, "[horizon] holds one integer");
    Cursor c(horizon->lines[0]);
    double v = c.number();
    c.end();
    if (v < 1 || v != std::floor(v) || v > 1000)
      fail(ErrorKind::SemanticError, horizon->lines[0].no, 1, "horizon must be a positive integer");
    g.horizon = static_cast<int>(v);
  }
  const int n = g.num_players(), T = g.horizon;

  // spaces
  g.states.assign(T + 1, {});
  g.initial_info.assign(n, {});
  g.actions.assign(T, std::vector<std::vector<std::string>>(n));
  g.increments.assign(T, std::vector<std::vector<std::string>>(n));
  g.recall.assign(T, std::vector<std::vector<int>>(n));
  std::vector<std::vector<std::vector<Tok>>> recall_toks(T, std::vector<std::vector<Tok>>(n));
  std::vector<std::vector<int>> recall_line(T, std::vector<int>(n, 0));
  std::set<std::string> seen;
  for (const auto& l : spaces->lines) {
    Cursor c(l);
    const Tok& kind = c.next("state, info, action, increment or recall");
    std::string key = kind.s;
    int t = -1, i = -1;
    if (key == "state") {
      t = c.stage(T + 1);
    } else if (key == "info") {
      i = player_of(g, c.next("a player"), l.no);
    } else if (key == "action" || key == "increment" || key == "recall") {
      t = c.stage(T);
      i = player_of(g, c.next("a player"), l.no);
    } else {
      fail(ErrorKind::SyntaxError, l.no, kind.col, "unknown space '" + key + "'");
    }
    if (!seen.insert(key + "/" + std::to_string(t) + "/" + std::to_string(i)).second)
      fail(ErrorKind::SemanticError, l.no, kind.col, "space declared twice");
    c.expect(":");
    auto toks = c.words();
    c.end();
    if (key == "recall") {
      recall_toks[t][i] = toks;
      recall_line[t][i] = l.no;
      continue;
    }
    auto labs = labels_of(toks, l.no);
    if (key == "state") g.states[t] = labs;
    if (key == "info") g.initial_info[i] = labs;
    if (key == "action") g.actions[t][i] = labs;
    if (key == "increment") g.increments[t][i] = labs;
  }
  for (int t = 0; t <= T; ++t)
    if (g.states[t].empty()) fail(ErrorKind::SemanticError, spaces->line, 1, "missing state space t=" + std::to_string(t + 1));
  for (int i = 0; i < n; ++i) {
    if (g.initial_info[i].empty()) fail(ErrorKind::SemanticError, spaces->line, 1, "missing info space for " + g.players[i]);
    for (int t = 0; t < T; ++t) {
      const std::string where = " t=" + std::to_string(t + 1) + " " + g.players[i];
      if (g.actions[t][i].empty()) fail(ErrorKind::SemanticError, spaces->line, 1, "missing action space" + where);
      if (g.increments[t][i].empty()) fail(ErrorKind::SemanticError, spaces->line, 1, "missing increment space" + where);
      if (recall_toks[t][i].size() != g.increments[t][i].size())
        fail(ErrorKind::SemanticError, recall_line[t][i] ? recall_line[t][i] : spaces->line, 1,
             "recall" + where + " needs one action per increment");
      for (const auto& tok : recall_toks[t][i]) g.recall[t][i].push_back(lookup(g.actions[t][i], tok, recall_line[t][i], "action"));
    }
  }

  // initial law
  for (const auto& l : initial->lines) {
    Cursor c(l);
    int x = lookup(g.states[0], c.next("a state"), l.no, "state");
    c.expect("|");
    auto hs = c.words();
    if (static_cast<int>(hs.size()) != n)
      fail(ErrorKind::SemanticError, l.no, c.col(), "expected " + std::to_string(n) + " initial information labels");
    InitialEntry e;
    e.state = x;
    for (int i = 0; i < n; ++i) e.info.push_back(lookup(g.initial_info[i], hs[i], l.no, "information label"));
    c.expect(":");
    e.p = c.number();
    c.end();
    g.initial.push_back(e);
  }

  // kernel
  g.kernel.resize(T);
  g.rewards.resize(T);
  for (int t = 0; t < T; ++t) {
    g.kernel[t].assign(g.states[t].size(), std::vector<std::vector<Outcome>>(g.num_joint_actions(t)));
    g.rewards[t].assign(g.states[t].size(),
                        std::vector<std::vector<double>>(g.num_joint_actions(t), std::vector<double>(n, 0.0)));
  }
  std::vector<int> kernel_line(T, 0);
  for (const Section* s : kernels) {
    const int t = section_stage(*s, T);
    if (kernel_line[t]) fail(ErrorKind::SemanticError, s->line, 1, "duplicate [kernel t=" + std::to_string(t + 1) + "]");
    kernel_line[t] = s->line;
    for (const auto& l : s->lines) {
      Cursor c(l);
      int x = lookup(g.states[t], c.next("a state"), l.no, "state");
      c.expect("|");
      auto us = c.words();
      if (static_cast<int>(us.size()) != n) fail(ErrorKind::SemanticError, l.no, c.col(), "expected " + std::to_string(n) + " actions");
      std::vector<int> u(n);
      for (int i = 0; i < n; ++i) u[i] = lookup(g.actions[t][i], us[i], l.no, "action");
      c.expect("->");
      Outcome o;
      o.next_state = lookup(g.states[t + 1], c.next("a next state"), l.no, "state");
      c.expect("|");
      auto zs = c.words();
      if (static_cast<int>(zs.size()) != n) fail(ErrorKind::SemanticError, l.no, c.col(), "expected " + std::to_string(n) + " increments");
      for (int i = 0; i < n; ++i) o.z.push_back(lookup(g.increments[t][i], zs[i], l.no, "increment"));
      c.expect(":");
      o.p = c.number();
      c.end();
      g.kernel[t][x][g.encode_joint(t, u)].push_back(o);
    }
  }
  for (int t = 0; t < T; ++t)
    for (int x = 0; x < static_cast<int>(g.states[t].size()); ++x)
      for (int ju = 0; ju < g.num_joint_actions(t); ++ju)
        if (g.kernel[t][x][ju].empty()) {
          auto u = g.decode_joint(t, ju);
          std::string ul;
          for (int i = 0; i < n; ++i) ul += (i ? " " : "") + g.actions[t][i][u[i]];
          fail(ErrorKind::SemanticError, kernel_line[t] ? kernel_line[t] : 1, 1,
               "missing kernel row at t=" + std::to_string(t + 1) + ", x=" + g.states[t][x] + ", u=(" + ul + ")");
        }

  // rewards
  if (rewards) {
    std::set<std::pair<int, std::pair<int, int>>> given;
    for (const auto& l : rewards->lines) {
      Cursor c(l);
      if (!c.done() && c.peek().s == "bound") {
        c.next("bound");
        c.expect(":");
        g.reward_bound = c.number();
        c.end();
        continue;
      }
      const int t = c.stage(T);
      int x = lookup(g.states[t], c.next("a state"), l.no, "state");
      c.expect("|");
      auto us = c.words();
      if (static_cast<int>(us.size()) != n) fail(ErrorKind::SemanticError, l.no, c.col(), "expected " + std::to_string(n) + " actions");
      std::vector<int> u(n);
      for (int i = 0; i < n; ++i) u[i] = lookup(g.actions[t][i], us[i], l.no, "action");
      const int ju = g.encode_joint(t, u);
      if (!given.insert({t, {x, ju}}).second) fail(ErrorKind::SemanticError, l.no, 1, "reward row given twice");
      c.expect(":");
      for (int i = 0; i < n; ++i) g.rewards[t][x][ju][i] = c.number();
      c.end();
    }
  }
  return validate_game(g);
}

// ---------------------------------------------------------------- annotation sections

Compression build_compression(const GameSpec& g, int i, const Section& s) {
  const int T = g.horizon;
  Compression k;
  k.labels.resize(T);
  k.init.assign(g.initial_info[i].size(), -1);
  k.update.resize(T);
  std::vector<char> have(T, 0);
  std::vector<std::pair<const Line*, int>> updates;
  for (const auto& l : s.lines) {
    Cursor c(l);
    if (c.done()) continue;
    const std::string head = c.peek().s;
    if (head == "labels") {
      c.next("labels");
      int t = c.stage(T);
      if (have[t]) fail(ErrorKind::SemanticError, l.no, 1, "labels declared twice");
      c.expect(":");
      k.labels[t] = labels_of(c.words(), l.no, true);
      c.end();
      have[t] = 1;
    } else if (head == "init") {
      updates.push_back({&l, -1});
    } else {
      updates.push_back({&l, 0});
    }
  }
  for (int t = 0; t < T; ++t) {
    if (!have[t] || k.labels[t].empty())
      fail(ErrorKind::SemanticError, s.line, 1, "compression of " + g.players[i] + " lacks labels t=" + std::to_string(t + 1));
    if (t > 0) k.update[t].assign(static_cast<std::size_t>(k.count(t - 1)) * g.num_increments(t - 1, i), -1);
  }
  for (const auto& [lp, kind] : updates) {
    Cursor c(*lp);
    if (kind < 0) {
      c.next("init");
      int h1 = lookup(g.initial_info[i], c.next("an information label"), lp->no, "information label");
      c.expect("->");
      k.init[h1] = lookup(k.labels[0], c.next("a K label"), lp->no, "K label");
    } else {
      int t = c.stage(T);
      if (t == 0) fail(ErrorKind::SemanticError, lp->no, 1, "updates start at t=2");
      int kp = lookup(k.labels[t - 1], c.next("a K label"), lp->no, "K label");
      c.expect("|");
      int z = lookup(g.increments[t - 1][i], c.next("an increment"), lp->no, "increment");
      c.expect("->");
      k.update[t][static_cast<std::size_t>(kp) * g.num_increments(t - 1, i) + z] =
          lookup(k.labels[t], c.next("a K label"), lp->no, "K label");
    }
    c.end();
  }
  return k;
}

Strategy build_strategy(const GameSpec& g, const Histories& hs, int i, const Section& s) {
  Strategy st = uniform_strategy(g, hs, i);
  std::set<std::pair<int, int>> given;
  for (const auto& l : s.lines) {
    Cursor c(l);
    int t = c.stage(g.horizon);
    int h = history(g, hs, i, t, c.next("a history"), l.no);
    if (!given.insert({t, h}).second) fail(ErrorKind::SemanticError, l.no, 1, "row given twice");
    c.expect(":");
    Dist d;
    while (!c.done()) d.push_back(c.number());
    if (static_cast<int>(d.size()) != g.num_actions(t, i))
      fail(ErrorKind::SemanticError, l.no, 1, "expected " + std::to_string(g.num_actions(t, i)) + " probabilities");
    st.table[t][h] = d;
  }
  try {
    check_strategy(g, hs, i, st, 1e-9);
  } catch (const Error& e) {
    fail(ErrorKind::ValidationError, s.line, 1, std::string("strategy ") + attr(s, "name") + ": " + e.what());
  }
  return st;
}

InfoSplit build_split(const GameSpec& g, const Histories& hs, const Section& s) {
  const int n = g.num_players(), T = g.horizon;
  InfoSplit sp;
  sp.common.assign(n, std::vector<std::vector<int>>(T));
  sp.priv.assign(n, std::vector<std::vector<int>>(T));
  sp.common_labels.resize(T);
  sp.private_labels.assign(n, std::vector<std::vector<std::string>>(T));
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < T; ++t) {
      sp.common[i][t].assign(hs.count(i, t), -1);
      sp.priv[i][t].assign(hs.count(i, t), -1);
    }
  auto intern = [](std::vector<std::string>& v, const std::string& s) {
    auto it = std::find(v.begin(), v.end(), s);
    if (it != v.end()) return static_cast<int>(it - v.begin());
    v.push_back(s);
    return static_cast<int>(v.size()) - 1;
  };
  for (const auto& l : s.lines) {
    Cursor c(l);
    int t = c.stage(T);
    int i = player_of(g, c.next("a player"), l.no);
    int h = history(g, hs, i, t, c.next("a history"), l.no);
    if (sp.common[i][t][h] >= 0) fail(ErrorKind::SemanticError, l.no, 1, "history split twice");
    c.expect("->");
    sp.common[i][t][h] = intern(sp.common_labels[t], c.next("a common label").s);
    c.expect("|");
    sp.priv[i][t][h] = intern(sp.private_labels[i][t], c.next("a private label").s);
    c.end();
  }
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < T; ++t)
      for (int h = 0; h < hs.count(i, t); ++h)
        if (sp.common[i][t][h] < 0)
          fail(ErrorKind::SemanticError, s.line, 1,
               "split misses history " + hs.label(g, i, t, h) + " of " + g.players[i] + " at t=" + std::to_string(t + 1));
  return sp;
}

NamedBelief build_belief(const GameSpec& g, const Histories& hs, const Section& s) {
  const int n = g.num_players(), T = g.horizon;
  NamedBelief b;
  b.name = attr(s, "name");
  b.strategy = attr(s, "strategy");
  b.belief.assign(n, std::vector<std::vector<std::vector<BeliefEntry>>>(T));
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < T; ++t) b.belief[i][t].resize(hs.count(i, t));
  for (const auto& l : s.lines) {
    Cursor c(l);
    int t = c.stage(T);
    int i = player_of(g, c.next("a player"), l.no);
    int h = history(g, hs, i, t, c.next("a history"), l.no);
    c.expect("->");
    BeliefEntry e;
    e.key.push_back(lookup(g.states[t], c.next("a state"), l.no, "state"));
    c.expect("|");
    auto hs_toks = c.words();
    if (static_cast<int>(hs_toks.size()) != n) fail(ErrorKind::SemanticError, l.no, c.col(), "expected " + std::to_string(n) + " histories");
    for (int j = 0; j < n; ++j) e.key.push_back(history(g, hs, j, t, hs_toks[j], l.no));
    c.expect(":");
    e.p = c.number();
    c.end();
    b.belief[i][t][h].push_back(e);
  }
  return b;
}

}  // namespace

GameDocument parse_gamespec(const std::string& text) {
  auto secs = split_sections(text);
  GameDocument doc;
  doc.game = build_game(secs);
  doc.hs = enumerate_histories(doc.game);
  const auto& g = doc.game;
  doc.compressions.assign(g.num_players(), std::nullopt);
  bool have_split = false;
  for (const auto& s : secs) {
    if (s.name == "compression") {
      auto who = s.attrs.find("i");
      if (who == s.attrs.end()) fail(ErrorKind::SyntaxError, s.line, 1, "[compression] needs i=<player>");
      int i = g.player_index(who->second);
      if (i < 0) fail(ErrorKind::SemanticError, s.line, 1, "unknown player '" + who->second + "'");
      if (doc.compressions[i]) fail(ErrorKind::SemanticError, s.line, 1, "duplicate compression for " + who->second);
      doc.compressions[i] = build_compression(g, i, s);
    } else if (s.name == "strategy") {
      NamedStrategy ns;
      ns.name = attr(s, "name");
      std::string who = attr(s, "player");
      ns.player = g.player_index(who);
      if (ns.player < 0) fail(ErrorKind::SemanticError, s.line, 1, "unknown player '" + who + "'");
      for (const auto& o : doc.strategies)
        if (o.name == ns.name && o.player == ns.player)
          fail(ErrorKind::SemanticError, s.line, 1, "duplicate strategy " + ns.name + " for " + who);
      ns.strategy = build_strategy(g, doc.hs, ns.player, s);
      doc.strategies.push_back(std::move(ns));
    } else if (s.name == "split") {
      if (have_split) fail(ErrorKind::SemanticError, s.line, 1, "duplicate [split]");
      have_split = true;
      doc.split = build_split(g, doc.hs, s);
    }
  }
  for (const auto& s : secs)
    if (s.name == "belief") {
      NamedBelief b = build_belief(g, doc.hs, s);
      auto names = doc.strategy_names();
      if (std::find(names.begin(), names.end(), b.strategy) == names.end())
        fail(ErrorKind::SemanticError, s.line, 1, "belief refers to unknown strategy " + b.strategy);
      doc.beliefs.push_back(std::move(b));
    }
  return doc;
}

GameDocument load_gamespec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::BadParameter, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_gamespec(ss.str());
}

// ---------------------------------------------------------------- serializer

namespace {

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + v[k];
  return s;
}

}  // namespace

std::string serialize_gamespec(const GameDocument& doc) {
  const GameSpec& g = doc.game;
  const Histories& hs = doc.hs;
  const int n = g.num_players(), T = g.horizon;
  std::ostringstream o;
  o << "[players]\n" << joined(g.players) << "\n\n[horizon]\n" << T << "\n\n[spaces]\n";
  for (int t = 0; t <= T; ++t) o << "state t=" << t + 1 << " : " << joined(g.states[t]) << "\n";
  for (int i = 0; i < n; ++i) o << "info " << g.players[i] << " : " << joined(g.initial_info[i]) << "\n";
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) {
      const std::string at = " t=" + std::to_string(t + 1) + " " + g.players[i] + " : ";
      o << "action" << at << joined(g.actions[t][i]) << "\n";
      o << "increment" << at << joined(g.increments[t][i]) << "\n";
      std::vector<std::string> rec;
      for (int a : g.recall[t][i]) rec.push_back(g.actions[t][i][a]);
      o << "recall" << at << joined(rec) << "\n";
    }
  o << "\n[initial]\n";
  for (const auto& e : g.initial) {
    std::vector<std::string> h;
    for (int i = 0; i < n; ++i) h.push_back(g.initial_info[i][e.info[i]]);
    o << g.states[0][e.state] << " | " << joined(h) << " : " << format_number(e.p) << "\n";
  }
  auto action_labels = [&](int t, int ju) {
    auto u = g.decode_joint(t, ju);
    std::vector<std::string> s;
    for (int i = 0; i < n; ++i) s.push_back(g.actions[t][i][u[i]]);
    return joined(s);
  };
  for (int t = 0; t < T; ++t) {
    o << "\n[kernel t=" << t + 1 << "]\n";
    for (std::size_t x = 0; x < g.states[t].size(); ++x)
      for (int ju = 0; ju < g.num_joint_actions(t); ++ju)
        for (const auto& out : g.kernel[t][x][ju]) {
          std::vector<std::string> z;
          for (int i = 0; i < n; ++i) z.push_back(g.increments[t][i][out.z[i]]);
          o << g.states[t][x] << " | " << action_labels(t, ju) << " -> " << g.states[t + 1][out.next_state] << " | "
            << joined(z) << " : " << format_number(out.p) << "\n";
        }
  }
  o << "\n[rewards]\nbound : " << format_number(g.reward_bound) << "\n";
  for (int t = 0; t < T; ++t)
    for (std::size_t x = 0; x < g.states[t].size(); ++x)
      for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
        const auto& r = g.rewards[t][x][ju];
        if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0; })) continue;
        std::vector<std::string> rs;
        for (double v : r) rs.push_back(format_number(v));
        o << "t=" << t + 1 << " " << g.states[t][x] << " | " << action_labels(t, ju) << " : " << joined(rs) << "\n";
      }
  for (int i = 0; i < n && i < static_cast<int>(doc.compressions.size()); ++i) {
    if (!doc.compressions[i]) continue;
    const Compression& k = *doc.compressions[i];
    o << "\n[compression i=" << g.players[i] << "]\n";
    for (int t = 0; t < T; ++t) o << "labels t=" << t + 1 << " : " << joined(k.labels[t]) << "\n";
    for (std::size_t h = 0; h < k.init.size(); ++h)
      if (k.init[h] >= 0) o << "init " << g.initial_info[i][h] << " -> " << k.labels[0][k.init[h]] << "\n";
    for (int t = 1; t < T; ++t) {
      const int nz = g.num_increments(t - 1, i);
      for (std::size_t e = 0; e < k.update[t].size(); ++e)
        if (k.update[t][e] >= 0)
          o << "t=" << t + 1 << " " << k.labels[t - 1][e / nz] << " | " << g.increments[t - 1][i][e % nz] << " -> "
            << k.labels[t][k.update[t][e]] << "\n";
    }
  }
  for (const auto& s : doc.strategies) {
    o << "\n[strategy name=" << s.name << " player=" << g.players[s.player] << "]\n";
    for (int t = 0; t < T; ++t) {
      if (g.num_actions(t, s.player) == 1) continue;
      for (int h = 0; h < hs.count(s.player, t); ++h) {
        std::vector<std::string> ps;
        for (double p : s.strategy.table[t][h]) ps.push_back(format_number(p));
        o << "t=" << t + 1 << " " << hs.label(g, s.player, t, h) << " : " << joined(ps) << "\n";
      }
    }
  }
  if (doc.split) {
    const InfoSplit& sp = *doc.split;
    o << "\n[split]\n";
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i)
        for (int h = 0; h < hs.count(i, t); ++h)
          o << "t=" << t + 1 << " " << g.players[i] << " " << hs.label(g, i, t, h) << " -> "
            << sp.common_labels[t][sp.common[i][t][h]] << " | " << sp.private_labels[i][t][sp.priv[i][t][h]] << "\n";
  }
  for (const auto& b : doc.beliefs) {
    o << "\n[belief name=" << b.name << " strategy=" << b.strategy << "]\n";
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < T; ++t)
        for (int h = 0; h < hs.count(i, t); ++h)
          for (const auto& e : b.belief[i][t][h]) {
            std::vector<std::string> hl;
            for (int j = 0; j < n; ++j) hl.push_back(hs.label(g, j, t, e.key[j + 1]));
            o << "t=" << t + 1 << " " << g.players[i] << " " << hs.label(g, i, t, h) << " -> " << g.states[t][e.key[0]]
              << " | " << joined(hl) << " : " << format_number(e.p) << "\n";
          }
  }
  return o.str();
}

GameDocument document_from_example(const Example& ex) {
  GameDocument doc;
  doc.game = ex.game;
  doc.hs = ex.hs;
  for (const auto& k : ex.K) doc.compressions.push_back(k);
  for (const auto& [name, prof] : ex.strategies)
    for (int i = 0; i < ex.game.num_players(); ++i) doc.strategies.push_back({name, i, prof[i]});
  doc.split = ex.split;
  if (ex.assessment) {
    std::string sname;
    for (const auto& [name, prof] : ex.strategies) {
      bool same = true;
      for (std::size_t i = 0; i < prof.size() && same; ++i) same = prof[i].table == ex.assessment->profile[i].table;
      if (same) {
        sname = name;
        break;
      }
    }
    if (sname.empty()) {
      sname = "assessment";
      for (int i = 0; i < ex.game.num_players(); ++i) doc.strategies.push_back({sname, i, ex.assessment->profile[i]});
    }
    doc.beliefs.push_back({"mu", sname, ex.assessment->belief});
  }
  return doc;
}

// ---------------------------------------------------------------- comparison

namespace {

bool note(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

bool close_maps(const std::map<std::vector<int>, double>& a, const std::map<std::vector<int>, double>& b, double tol) {
  for (const auto& [k, p] : a) {
    auto it = b.find(k);
    if (std::abs(p - (it == b.end() ? 0.0 : it->second)) > tol) return false;
  }
  for (const auto& [k, p] : b)
    if (!a.count(k) && std::abs(p) > tol) return false;
  return true;
}

bool close_dists(const std::vector<std::vector<Dist>>& a, const std::vector<std::vector<Dist>>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].size() != b[t].size()) return false;
    for (std::size_t h = 0; h < a[t].size(); ++h) {
      if (a[t][h].size() != b[t][h].size()) return false;
      for (std::size_t u = 0; u < a[t][h].size(); ++u)
        if (std::abs(a[t][h][u] - b[t][h][u]) > tol) return false;
    }
  }
  return true;
}

}  // namespace

bool structurally_equal(const GameSpec& a, const GameSpec& b, double tol, std::string* why) {
  if (a.players != b.players) return note(why, "players differ");
  if (a.horizon != b.horizon) return note(why, "horizons differ");
  if (a.states != b.states) return note(why, "state spaces differ");
  if (a.initial_info != b.initial_info) return note(why, "initial information spaces differ");
  if (a.actions != b.actions) return note(why, "action spaces differ");
  if (a.increments != b.increments) return note(why, "increment spaces differ");
  if (a.recall != b.recall) return note(why, "recall maps differ");
  if (std::abs(a.reward_bound - b.reward_bound) > tol) return note(why, "reward bounds differ");
  auto init_map = [](const GameSpec& g) {
    std::map<std::vector<int>, double> m;
    for (const auto& e : g.initial) {
      std::vector<int> k{e.state};
      k.insert(k.end(), e.info.begin(), e.info.end());
      m[k] += e.p;
    }
    return m;
  };
  if (!close_maps(init_map(a), init_map(b), tol)) return note(why, "initial laws differ");
  for (int t = 0; t < a.horizon; ++t)
    for (std::size_t x = 0; x < a.states[t].size(); ++x)
      for (int ju = 0; ju < a.num_joint_actions(t); ++ju) {
        std::map<std::vector<int>, double> ma, mb;
        for (const auto& o : a.kernel[t][x][ju]) {
          std::vector<int> k{o.next_state};
          k.insert(k.end(), o.z.begin(), o.z.end());
          ma[k] += o.p;
        }
        for (const auto& o : b.kernel[t][x][ju]) {
          std::vector<int> k{o.next_state};
          k.insert(k.end(), o.z.begin(), o.z.end());
          mb[k] += o.p;
        }
        const std::string cell = " at t=" + std::to_string(t + 1) + ", x=" + a.states[t][x] + ", u=" + std::to_string(ju);
        if (!close_maps(ma, mb, tol)) return note(why, "kernels differ" + cell);
        for (int i = 0; i < a.num_players(); ++i)
          if (std::abs(a.rewards[t][x][ju][i] - b.rewards[t][x][ju][i]) > tol) return note(why, "rewards differ" + cell);
      }
  return true;
}

bool documents_equal(const GameDocument& a, const GameDocument& b, double tol, std::string* why) {
  if (!structurally_equal(a.game, b.game, tol, why)) return false;
  const int n = a.game.num_players();
  for (int i = 0; i < n; ++i) {
    const bool ha = i < static_cast<int>(a.compressions.size()) && a.compressions[i];
    const bool hb = i < static_cast<int>(b.compressions.size()) && b.compressions[i];
    if (ha != hb) return note(why, "compression presence differs for " + a.game.players[i]);
    if (ha && (a.compressions[i]->labels != b.compressions[i]->labels || a.compressions[i]->init != b.compressions[i]->init ||
               a.compressions[i]->update != b.compressions[i]->update))
      return note(why, "compressions differ for " + a.game.players[i]);
  }
  if (a.strategies.size() != b.strategies.size()) return note(why, "strategy counts differ");
  for (const auto& s : a.strategies) {
    auto it = std::find_if(b.strategies.begin(), b.strategies.end(),
                           [&](const NamedStrategy& o) { return o.name == s.name && o.player == s.player; });
    if (it == b.strategies.end()) return note(why, "strategy " + s.name + " missing");
    if (!close_dists(s.strategy.table, it->strategy.table, tol)) return note(why, "strategy " + s.name + " differs");
  }
  if (a.split.has_value() != b.split.has_value()) return note(why, "split presence differs");
  if (a.split) {
    const auto& x = *a.split;
    const auto& y = *b.split;
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < a.game.horizon; ++t)
        for (int h = 0; h < a.hs.count(i, t); ++h)
          if (x.common_labels[t][x.common[i][t][h]] != y.common_labels[t][y.common[i][t][h]] ||
              x.private_labels[i][t][x.priv[i][t][h]] != y.private_labels[i][t][y.priv[i][t][h]])
            return note(why, "splits differ");
  }
  if (a.beliefs.size() != b.beliefs.size()) return note(why, "belief counts differ");
  for (std::size_t k = 0; k < a.beliefs.size(); ++k) {
    const auto& x = a.beliefs[k];
    const auto& y = b.beliefs[k];
    if (x.name != y.name || x.strategy != y.strategy) return note(why, "belief headers differ");
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < a.game.horizon; ++t)
        for (int h = 0; h < a.hs.count(i, t); ++h) {
          std::map<std::vector<int>, double> mx, my;
          for (const auto& e : x.belief[i][t][h]) mx[e.key] += e.p;
          for (const auto& e : y.belief[i][t][h]) my[e.key] += e.p;
          if (!close_maps(mx, my, tol)) return note(why, "belief " + x.name + " differs");
        }
  }
  return true;
}

}  // namespace dyngame
