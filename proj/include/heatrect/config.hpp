// config.hpp: Run configuration: strict JSON schema, environment overrides, model assembly

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatrect/currents.hpp"
#include "heatrect/model.hpp"
#include "heatrect/oracle.hpp"
#include "heatrect/stability.hpp"

namespace heatrect {

using Json = nlohmann::json;

struct HarmonicConfig {
    int k{1};                 // positive; the k < 0 partner is the conjugate
    std::vector<double> re;   // row-major N x N
    std::vector<double> im;
};

struct ModelConfig {
    std::string type{"two_oscillator"};  // "two_oscillator" or "generic"
    std::optional<double> omega_d{};
    // generic
    std::vector<double> masses;
    std::vector<double> v0;  // row-major N x N
    std::vector<HarmonicConfig> harmonics;
    // two_oscillator
    double omega1{2.0};
    double omega2{1.0};
    double c0{0.2};
    double v1{0.1};
};

struct OracleConfig {
    int modes_per_bath{0};
    double bath_omega_max{0.0};
    double dt{0.04};
    double transient{0.0};
    double window{0.0};
    int samples_per_period{16};
    std::string init{"thermal"};  // "thermal" or "ground"
    bool trajectory{false};       // also write the sampled trajectory
};

struct SolverConfig {
    std::optional<int> floquet_order{};
    std::optional<double> omega_max{};
    double quad_rel_tol{1e-7};
    int max_floquet_order{12};
    double order_tol{1e-6};
    std::string instability_policy{"sentinel"};  // "sentinel" or "error"
    int stability_steps{0};
    double condition_limit{1e10};
    OracleConfig oracle{};
};

struct SweepAxis {
    std::string path;  // dotted config path, e.g. "model.omega_d" or "baths.2.temperature"
    double start{0.0};
    double stop{0.0};
    int count{1};
};

struct SweepConfig {
    std::vector<SweepAxis> axes;
    double derivative_step{0.0};  // 0: 1e-3 of the control value
};

struct OutputConfig {
    std::string directory{"out"};
    std::vector<std::string> formats{"csv", "json"};
    int precision{12};
};

struct RunConfig {
    ModelConfig model;
    std::vector<BathSpec> baths;
    SolverConfig solver;
    SweepConfig sweep;
    OutputConfig output;
};

// Strict parse: unknown keys, wrong types and missing required fields throw ConfigError.
RunConfig parse_config(const Json& doc);
Json to_json(const RunConfig& cfg);

Json read_config_file(const std::string& path);

// HEATRECT_MODEL__OMEGA_D=1.5 sets model.omega_d; "__" separates path components, numeric
// components index arrays. Values are parsed as JSON when possible, else taken as strings.
// Variables whose first component is not a config section are ignored.
void apply_env_overrides(Json& doc, const std::vector<std::pair<std::string, std::string>>& env,
                         const std::string& prefix = "HEATRECT_");
std::vector<std::pair<std::string, std::string>> environment_variables();

// Sets a dotted path inside doc; intermediate objects must exist (arrays must already be long enough).
void set_path(Json& doc, const std::string& path, const Json& value);

// Validates physics through the model constructors (ValidationError on failure).
Model build_model(const RunConfig& cfg);
SolverOptions solver_options(const RunConfig& cfg);
StabilityOptions stability_options(const RunConfig& cfg);
OracleSettings oracle_settings(const RunConfig& cfg);

// FNV-1a 64 over the canonical dump of the physics sections (model, baths, solver, sweep).
std::uint64_t config_hash(const RunConfig& cfg);
std::string hex64(std::uint64_t v);

} // namespace heatrect
