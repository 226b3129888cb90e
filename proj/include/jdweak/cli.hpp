#pragma once

#include <cstddef>
#include <ostream>
#include <string>

#include <json.hpp>

#include "jdweak/realization.hpp"

namespace jdweak {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitUsage = 2,
    kExitNonConvergence = 3,
    kExitVerifyFailed = 4,
};

struct RunConfig {
    std::string command;
    std::string model = "test5";
    double tol = 0.02;
    std::size_t n = 5;
    std::size_t m = 100;
    double c0 = 1.65;
    std::size_t mch = 10;
    Seeds seeds;
    std::string density = "rhotilde";
    std::string threshold = "split";
    std::size_t max_batches = 40;
    std::size_t max_iterations = 30;
    /// Realizations per N for the fixed-mesh part of `verify`.
    std::size_t verify_m = 200000;
    int workers = 1;

    std::string csv_path;
    std::string json_path;
    std::string path_dump;
    std::string density_dump;
};

/// Throws ParameterError for out-of-range values.
void validate(const RunConfig& config);

/// Canonical form used for hashing: every field that affects results, but
/// not the worker count or output paths.
nlohmann::json canonical_config(const RunConfig& config);
std::string config_hash(const RunConfig& config);

/// Applies keys of a flat JSON object to `config`. Unknown keys throw
/// ParameterError.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

/// Runs one command and returns its exit code; errors are reported on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace jdweak
