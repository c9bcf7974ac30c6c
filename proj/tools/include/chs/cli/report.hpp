#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "chs/asymptotics.hpp"
#include "chs/mountain_pass.hpp"
#include "chs/params.hpp"
#include "chs/sharp_constants.hpp"

namespace chs::cli {

nlohmann::json to_json(const ProblemParams& p);
nlohmann::json to_json(const DerivedExponents& e);
nlohmann::json to_json(const RegimeCase& r);
nlohmann::json to_json(const SharpConstants& c);
nlohmann::json to_json(const ThresholdReport& t);
nlohmann::json to_json(const MountainPassGeometry& g);
nlohmann::json to_json(const MountainPassResult& r);
nlohmann::json to_json(const RateFit& f);
nlohmann::json to_json(const SweepRow& row);
nlohmann::json to_json(const LevelBoundReport& r);

// %.17g, so equal doubles print identical bytes.
std::string format_double(double x);

// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& file, const std::string& contents);

// Indented JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

std::string sweep_csv(const SweepTable& table);
std::string trace_csv(const std::vector<IterationRecord>& trace);
std::string solution_csv(const RadialFunction& u);

}  // namespace chs::cli
