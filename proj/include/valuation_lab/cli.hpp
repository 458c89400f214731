#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valuation_lab/serialization.hpp"

namespace vlab::cli {

enum class Command { Ingest, Fit, Diagnose, Predict, Ruin, Portfolio, CtSim, Report };

[[nodiscard]] std::optional<Command> parse_command(std::string_view name);
[[nodiscard]] std::string_view to_string(Command c);

struct RunConfig {
    Command command = Command::Report;
    std::string input;  ///< market CSV; required by every command except ctsim
    std::string out_dir = ".";
    std::string rates;  ///< `year,rate` CSV; defaults to shiller_rates.csv beside the input
    Json overrides = Json::object();
    std::uint64_t master_seed = 0;
};

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> files;  ///< written paths, in write order
    std::string error_json;          ///< set when exit_code != 0
};

/// Runs one command. Module errors are caught and reported as JSON with exit code 2 or 3.
[[nodiscard]] RunResult run(const RunConfig& config);

/// Parses --config: inline JSON when it starts with '{', otherwise a file path.
[[nodiscard]] Json load_overrides(const std::string& arg);

}  // namespace vlab::cli
