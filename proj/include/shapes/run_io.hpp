#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapes/energy.hpp"
#include "shapes/free_target.hpp"
#include "shapes/verify.hpp"

#include "json.hpp"

namespace shapes {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Writes via a temp file and atomic rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Effective run configuration. Defaults mirror schemas/runconfig.schema.json;
// a unit test keeps the two in sync. Unknown keys are rejected.
struct RunConfig {
    std::string command;  // set from the CLI subcommand
    std::string shape_path;
    std::string out_dir = "out";
    double p = 1.0;
    double lambda = 1.0;

    int dim = 2;
    double spacing = 1.0;
    std::vector<double> origin{0.0, 0.0, 0.0};

    int target_cells = 0;  // 0: infer from the input shape where possible
    double pad_factor = 3.0;
    int recompute_every = 25;

    double t0 = 2.0;
    double alpha = 0.999;
    std::int64_t steps = 2000;
    std::vector<std::uint64_t> seeds{1};
    bool multistart = true;

    std::vector<std::string> checks{"scaling", "microdroplet", "continuity", "additivity",
                                    "nucleation"};
    std::uint64_t verify_seed = 1;
    int trials = 50;

    std::string ansatz_kind = "ball";
    int ansatz_count = 1;
    double ansatz_ratio = 1.0;

    Grid to_grid() const;
    EnergyParams to_energy_params() const;
    SuiteConfig to_suite_config() const;
};

// Parses and validates a config JSON document against the schema table.
// Throws BadInput on unknown keys, wrong types, or out-of-range values.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

// Canonical JSON of the effective config (used for hashing and the record).
nlohmann::json config_to_json(const RunConfig& config);

// Names and defaults of every config key, flattened as "a.b" paths; used to
// keep the published schema file honest.
std::vector<std::pair<std::string, nlohmann::json>> config_schema_entries();

struct RunRecord {
    std::string config_hash;
    std::string tool_version = kToolVersion;
    std::string command;
    std::string started;
    std::string finished;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, content hash

    nlohmann::json to_json() const;
};

// Serialization of results.
nlohmann::json free_target_to_json(const FreeTargetResult& r);
std::string plan_to_csv(const TransportPlan& plan);
nlohmann::json energy_report_to_json(const EnergyReport& r, const EnergyParams& params);
nlohmann::json reports_to_json(const std::vector<PropertyReport>& reports);
std::string trace_to_csv_header();
void append_trace_csv(std::string& out, const std::string& run_label, std::uint64_t seed,
                      const std::vector<TraceRow>& trace);

std::string iso8601_now();

}  // namespace shapes
