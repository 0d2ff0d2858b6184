#pragma once

#include "archmx/montecarlo.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace archmx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (program name excluded). Reports go to files named by
/// --out; short summaries to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Study configuration from its JSON form. Keys mirror StudyConfig; missing keys keep defaults.
mc::StudyConfig study_from_json(const nlohmann::json& j);

nlohmann::json study_to_json(const mc::StudyConfig& cfg);

}  // namespace archmx::cli
