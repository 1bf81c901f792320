#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voltra/evolution.hpp"
#include "voltra/friedrichs.hpp"
#include "voltra/presets.hpp"

namespace voltra {

enum class Command { Analyze, Transform, Evolve, Sweep };

Command command_from_string(const std::string& name);
std::string to_string(Command c);

enum class ReportFormat { Json, Csv };

// t = 0, 1, ..., 20
std::vector<double> default_t_grid();

struct Tolerances {
    double term_tol = 1e-10;
    double residual_target = 1e-8;
    double spr_margin = 0.45;
};

struct PhiSpec {
    enum class Kind { Identity, Power, Exp } kind = Kind::Identity;
    double exponent = 2.0;  // power: phi(x) = x^exponent, needs a >= 0
    double rate = 1.0;      // exp:   phi(x) = e^(rate x), rate > 0
};

struct PresetSpec {
    std::string name;
    std::map<std::string, double> params;
    std::string kernel_csv;  // custom-csv source path
};

struct SweepSpec {
    std::string axis;  // preset parameter to vary
    std::vector<double> values;
    Command command = Command::Analyze;  // what to run per value
};

struct OutputSpec {
    std::string path;  // empty writes to stdout
    ReportFormat format = ReportFormat::Json;
    std::string kernel_csv;  // optional export path for the K matrix
    bool timings = false;    // opt-in: timing figures break byte determinism
};

struct ScenarioConfig {
    PresetSpec preset;
    int grid_n = 512;
    double a = 0.0;
    double b = 1.0;
    PhiSpec phi;
    EntryMode entry_mode = EntryMode::NodeSample;
    bool entry_mode_set = false;  // unset lets the preset pick its mode
    Tolerances tol;
    int terms_cap = 64;
    int gelfand_terms = 30;
    std::vector<double> t_grid = default_t_grid();
    double t_cap = 100.0;
    std::optional<SweepSpec> sweep;
    OutputSpec output;
};

// Strict JSON config: unknown keys and type mismatches are ConfigErrors
// naming the key path; defaults are applied to everything omitted.
ScenarioConfig parse_config(const std::string& text);

// Canonical JSON echo of a config (sorted keys, 12 significant digits);
// parse_config(config_echo(cfg)) reproduces cfg exactly.
std::string config_echo(const ScenarioConfig& cfg);

struct TransformSummary {
    int terms_used = 0;
    std::vector<double> term_norms;
    std::vector<double> ratios;
    double residual = 0.0;
    bool residual_ok = false;
    bool chain_ok = false;
    int chain_checked = 0;
    double spr_K_estimate = 0.0;
    bool inverted = false;
    double inversion_gap = 0.0;
    int neumann_terms = 0;
    bool invertibility_certified = false;
    std::string note;
};

struct ModulusSummary {
    bool evaluated = false;
    bool finite = false;
    double value = 0.0;
    double upper = 0.0;
};

struct ScenarioResult {
    bool has_sweep_value = false;
    double sweep_value = 0.0;
    Certificate certificate;
    ModulusSummary modulus;
    bool has_transform = false;
    TransformSummary transform;
    bool has_stability = false;
    StabilityReport stability;
};

struct RunReport {
    Command command = Command::Analyze;
    ScenarioConfig config;
    std::vector<ScenarioResult> results;
    double elapsed_ms = 0.0;
    std::string tool_version;
};

// analyze: V, W, certificate (and the modulus classifier when the preset
// documents moduli).  transform: adds the Friedrichs iteration, chain and
// residual checks, and the checked inversion.  evolve: adds the stability
// scan, conjugated when the certificate allows a transform.  sweep: repeats
// the configured sub-command across the axis values.
RunReport run_scenario(const ScenarioConfig& cfg, Command command);

std::string emit_report(const RunReport& report, ReportFormat format);

// Structured failure document for scripting: {"error": {...}}.
std::string error_report(const std::exception& error);

// 0: every verdict is similar-by-*; 2: at least one inconclusive verdict.
int exit_code(const RunReport& report);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace voltra
