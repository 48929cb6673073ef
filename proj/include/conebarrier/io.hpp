#pragma once

#include "conebarrier/sim.hpp"
#include "conebarrier/validity.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace conebarrier
{

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario configs (JSON, SI units, radians). Unknown keys are rejected.

ScenarioConfig config_from_json(const Json& j);
Json config_to_json(const ScenarioConfig& cfg);

/// Reads one config file; ConfigError on any parse or invariant failure.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Expands directories to their *.json files in lexicographic order.
std::vector<std::filesystem::path> expand_config_paths(const std::vector<std::filesystem::path>& paths);

Json class_k_to_json(const ClassK& k);
ClassK class_k_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Traces

/// Shortest decimal text that parses back to the same double ("nan", "inf", "-inf" otherwise).
std::string format_double(double v);
double parse_double(const std::string& text);

std::vector<std::string> trace_csv_header(const ScenarioConfig& cfg);

/// One row per record; '.' decimals, '\n' line endings, header first.
/// Event flags are inline 0/1 columns on the step where the event fired.
void write_trace_csv(std::ostream& os, const ScenarioTrace& trace);

/// Rebuilds the step records from CSV text written for the same config.
std::vector<StepRecord> read_trace_csv(std::istream& is, const ScenarioConfig& cfg);

Json events_to_json(const ScenarioTrace& trace);
Json summary_to_json(const ScenarioTrace& trace);
Json plot_data_to_json(const ScenarioTrace& trace);

// ---------------------------------------------------------------------------
// Reports

Json validity_report_to_json(const ValidityReport& r);
Json validity_matrix_to_json(const std::vector<ValidityRow>& rows);
std::string validity_matrix_text(const std::vector<ValidityRow>& rows);

Json audit_to_json(const AuditReport& a);
Json beta_audit_to_json(const BetaAudit& b);

}  // namespace conebarrier
