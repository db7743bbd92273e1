#pragma once

// JSON encodings of library results, shared by the command-line tool and tests.

#include <json.hpp>

#include "dyngame/equilibrium.hpp"
#include "dyngame/info_state.hpp"
#include "dyngame/paper_games.hpp"
#include "dyngame/spec_io.hpp"

namespace dyngame::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "dyngame_report_v1";

std::string digest(const std::string& bytes);  // fnv1a64 hex

Json counterexample(const Counterexample& c);
Json profile(const GameSpec& g, const Histories& hs, const Profile& p);
Json kprofile(const GameSpec& g, const std::vector<Compression>& K, const std::vector<KStrategy>& p);
Json bne(const BneReport& r);
Json schedule(const EpsSchedule& s);
Json trace(const std::vector<EpsPoint>& t);
Json se(const SeReport& r);
Json witness(const InfoStateWitness& w);
Json msi(const MsiResult& r);
Json fixture(const FixtureReport& r);
Json violations(const std::vector<Violation>& v);

}  // namespace dyngame::report
