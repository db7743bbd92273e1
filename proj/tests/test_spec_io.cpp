#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dyngame/paper_games.hpp"
#include "dyngame/spec_io.hpp"

#ifdef DYNGAME_HAVE_CLI
#include "cli.hpp"
#endif

using namespace dyngame;

namespace {

const std::string kGames = std::string(DYNGAME_SOURCE_DIR) + "/games/";

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto p = s.find(from);
  REQUIRE(p != std::string::npos);
  return s.replace(p, from.size(), to);
}

ParseError parse_error(const std::string& text) {
  try {
    parse_gamespec(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("text was accepted");
  return ParseError(ErrorKind::SyntaxError, 0, 0, "");
}

}  // namespace

TEST_CASE("numbers") {
  CHECK(parse_number("1/3") == 1.0 / 3);
  CHECK(parse_number("-2/4") == -0.5);
  CHECK(parse_number("0.25") == 0.25);
  CHECK(format_number(1.0 / 3) == "1/3");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(2) == "2");
  CHECK_THROWS_AS(parse_number("1/0"), Error);
  CHECK_THROWS_AS(parse_number("abc"), Error);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 1000; ++k) {
    double x = u(rng);
    CHECK(parse_number(format_number(x)) == x);
  }
  for (int q = 1; q <= 50; ++q)
    for (int p = 0; p <= q; ++p) {
      double x = static_cast<double>(p) / q;
      CHECK(parse_number(format_number(x)) == x);
    }
}

TEST_CASE("every fixture round-trips through the text format") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    GameDocument doc = document_from_example(build_example(name));
    std::string text = serialize_gamespec(doc);
    GameDocument back = parse_gamespec(text);
    std::string why;
    CHECK_MESSAGE(documents_equal(doc, back, 0.0, &why), why);
    CHECK(serialize_gamespec(back) == text);
  }
}

TEST_CASE("shipped documents match the constructors") {
  std::string why;
  GameDocument d3 = load_gamespec(kGames + "example3.game");
  CHECK_MESSAGE(structurally_equal(d3.game, build_example("example3", {{"c", "0.2"}}).game, 1e-12, &why), why);
  GameDocument d1 = load_gamespec(kGames + "example1.game");
  CHECK(structurally_equal(d1.game, example1_game(), 1e-12, &why));
  CHECK(d1.strategy_names() == std::vector<std::string>{"E1", "E2"});
  CHECK(verify_bne(d1.game, d1.hs, d1.profile("E2")).is_bne);
  GameDocument d2 = load_gamespec(kGames + "example2.game");
  CHECK(structurally_equal(d2.game, example2_game(), 1e-12, &why));
  CHECK(check_wpbe(d2.game, d2.hs, d2.assessment()).wpbe);
  CHECK_FALSE(structurally_equal(d3.game, example3_game(0.1)));
}

TEST_CASE("fractions enter exactly") {
  std::string text = serialize_gamespec(document_from_example(build_example("example1")));
  text = replace_once(text, "t=1 - : 0 1", "t=1 - : 1/3 2/3");
  GameDocument d = parse_gamespec(text);
  CHECK(d.profile("E1")[0].table[0][0][0] == 1.0 / 3);
  CHECK(serialize_gamespec(d).find("1/3 2/3") != std::string::npos);
  CHECK(serialize_gamespec(parse_gamespec(serialize_gamespec(d))) == serialize_gamespec(d));
}

TEST_CASE("diagnostics") {
  const std::string text = serialize_gamespec(document_from_example(build_example("example1")));
  SUBCASE("missing kernel row names the cell") {
    auto e = parse_error(replace_once(text, "- | 1 - -> - | U=1 U=1 : 1\n", ""));
    CHECK(e.kind() == ErrorKind::SemanticError);
    std::string msg = e.what();
    CHECK(msg.find("t=1") != std::string::npos);
    CHECK(msg.find("x=-") != std::string::npos);
    CHECK(msg.find("u=(1") != std::string::npos);
  }
  SUBCASE("syntax errors carry a position") {
    auto e = parse_error(replace_once(text, "[horizon]\n2", "[horizon]\ntwo"));
    CHECK(e.kind() == ErrorKind::SyntaxError);
    CHECK(e.line() == 5);
  }
  SUBCASE("unknown labels are semantic errors") {
    auto e = parse_error(replace_once(text, "- | 0 - -> - | U=0 U=0 : 1", "- | 7 - -> - | U=0 U=0 : 1"));
    CHECK(e.kind() == ErrorKind::SemanticError);
  }
  SUBCASE("leaky kernels fail validation") {
    CHECK_THROWS_AS(parse_gamespec(replace_once(text, "- | 0 - -> - | U=0 U=0 : 1", "- | 0 - -> - | U=0 U=0 : 0.9")),
                    ValidationFailure);
  }
  SUBCASE("unnormalized strategy rows are rejected") {
    CHECK_THROWS_AS(parse_gamespec(replace_once(text, "t=1 - : 0 1", "t=1 - : 0.2 0.2")), Error);
  }
  CHECK_THROWS_AS(load_gamespec(kGames + "missing.game"), Error);
}

#ifdef DYNGAME_HAVE_CLI

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_command(args, out, err);
  return {code, out.str()};
}

}  // namespace

TEST_CASE("command-line exit codes") {
  const std::string ex1 = kGames + "example1.game", ex3 = kGames + "example3.game";
  CHECK(run({"validate", ex1, "--no-timestamp"}).code == cli::kHolds);
  CHECK(run({"check-msi", ex1, "--no-timestamp"}).code == cli::kHolds);
  CHECK(run({"check-usi", ex1, "--player", "B", "--no-timestamp"}).code == cli::kFails);
  CHECK(run({"check-usi", ex1, "--player", "A", "--no-timestamp"}).code == cli::kHolds);
  CHECK(run({"verify-bne", ex1, "--strategy", "E2", "--no-timestamp"}).code == cli::kHolds);
  CHECK(run({"verify-bne", "builtin:example3:c=0.2,alpha1=0.4,alpha2=0.4", "--strategy", "bne"}).code == cli::kFails);
  CHECK(run({"solve-bne", ex3, "--no-timestamp"}).code == cli::kHolds);
  CHECK(run({"check-belief-based", ex3, "--strategy", "bne"}).code == cli::kFails);
  CHECK(run({"check-wpbe", kGames + "example2.game"}).code == cli::kHolds);
  CHECK(run({"validate", kGames + "missing.game"}).code == cli::kInputError);
  CHECK(run({"validate"}).code == cli::kInputError);
  CHECK(run({"frobnicate", ex1}).code == cli::kInputError);
  CHECK(run({"check-usi", ex1, "--player", "Zed"}).code == cli::kInputError);
  CHECK(run({"solve-bne", ex1, "--eps-geom", "0.9,0.5,3"}).code == cli::kInputError);
}

TEST_CASE("reports are byte-reproducible without timestamps") {
  const std::string ex3 = kGames + "example3.game";
  for (std::vector<std::string> args : {std::vector<std::string>{"solve-se", ex3, "--seed", "7", "--no-timestamp"},
                                        std::vector<std::string>{"check-usi", kGames + "example1.game", "--all",
                                                                 "--no-timestamp"}}) {
    Run a = run(args), b = run(args);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"timestamp\"") == std::string::npos);
    CHECK(a.out.find("\"schema\": \"dyngame_report_v1\"") != std::string::npos);
  }
  Run t = run({"validate", ex3});
  CHECK(t.out.find("\"timestamp\"") != std::string::npos);
}

#endif
