#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "jdweak/controller.hpp"
#include "jdweak/experiments.hpp"

namespace jdweak {

inline constexpr int kReportSchemaVersion = 1;

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

nlohmann::json to_json(const AdaptiveRunReport& report);
nlohmann::json to_json(const SimulationSummary& summary);
nlohmann::json to_json(const EfficiencyResult& result);

/// Wraps a payload with schema version, command and config hash.
nlohmann::json report_envelope(const std::string& command, const std::string& config_hash,
                               const nlohmann::json& config, nlohmann::json payload);

/// Per-iteration rows of Algorithm D (Iter, N, M, E_C, E_T, E_TS, E_S, ...).
void write_iterations_csv(std::ostream& out, const AdaptiveRunReport& report, const std::string& config_hash);
/// Per-batch rows of Algorithm S (TOL, M, N_A statistics, max jumps, E_S, E_C, ...).
void write_batches_csv(std::ostream& out, const AdaptiveRunReport& report, const std::string& config_hash);
void write_simulation_csv(std::ostream& out, const SimulationSummary& summary, const std::string& config_hash);
void write_efficiency_csv(std::ostream& out, const EfficiencyResult& result, const std::string& config_hash);

}  // namespace jdweak
