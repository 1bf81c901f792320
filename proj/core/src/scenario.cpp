#include "voltra/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "voltra/kernel_io.hpp"
#include "voltra/version.hpp"

namespace voltra {

using nlohmann::json;

Command command_from_string(const std::string& name) {
    if (name == "analyze") return Command::Analyze;
    if (name == "transform") return Command::Transform;
    if (name == "evolve") return Command::Evolve;
    if (name == "sweep") return Command::Sweep;
    throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::Analyze: return "analyze";
        case Command::Transform: return "transform";
        case Command::Evolve: return "evolve";
        default: return "sweep";
    }
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config key '" + path + "': " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) known = true;
        if (!known) fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected an integer");
    double x = v.get<double>();
    if (x != std::floor(x) || std::abs(x) > 1e9) fail(path, "expected an integer");
    return int(x);
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
    return v.get<bool>();
}

std::vector<double> as_number_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void parse_preset(const json& v, PresetSpec& preset) {
    if (!v.is_object()) fail("preset", "expected an object");
    expect_keys(v, "preset", {"name", "params", "kernel_csv"});
    if (!v.contains("name")) fail("preset.name", "required");
    preset.name = as_string(v["name"], "preset.name");
    const std::map<std::string, double>* defaults = nullptr;
    try {
        defaults = &preset_default_params(preset.name);
    } catch (const InvalidInputError&) {
        fail("preset.name", "unknown preset '" + preset.name + "'");
    }
    if (v.contains("params")) {
        if (!v["params"].is_object()) fail("preset.params", "expected an object");
        for (const auto& item : v["params"].items()) {
            if (!defaults->count(item.key()))
                fail("preset.params." + item.key(),
                     "preset '" + preset.name + "' has no such parameter");
            preset.params[item.key()] =
                as_number(item.value(), "preset.params." + item.key());
        }
    }
    if (v.contains("kernel_csv"))
        preset.kernel_csv = as_string(v["kernel_csv"], "preset.kernel_csv");
    if (preset.name == "custom-csv" && preset.kernel_csv.empty())
        fail("preset.kernel_csv", "the custom-csv preset needs a kernel file path");
    if (preset.name != "custom-csv" && !preset.kernel_csv.empty())
        fail("preset.kernel_csv", "only meaningful for the custom-csv preset");
}

void parse_phi(const json& v, PhiSpec& phi) {
    if (!v.is_object()) fail("phi", "expected an object");
    expect_keys(v, "phi", {"kind", "exponent", "rate"});
    std::string kind = v.contains("kind") ? as_string(v["kind"], "phi.kind") : "identity";
    if (kind == "identity") {
        phi.kind = PhiSpec::Kind::Identity;
        if (v.contains("exponent") || v.contains("rate"))
            fail("phi", "identity symbol takes no parameters");
    } else if (kind == "power") {
        phi.kind = PhiSpec::Kind::Power;
        if (v.contains("rate")) fail("phi.rate", "not a parameter of the power symbol");
        if (v.contains("exponent")) phi.exponent = as_number(v["exponent"], "phi.exponent");
        if (!(phi.exponent > 0.0)) fail("phi.exponent", "must be positive");
    } else if (kind == "exp") {
        phi.kind = PhiSpec::Kind::Exp;
        if (v.contains("exponent")) fail("phi.exponent", "not a parameter of the exp symbol");
        if (v.contains("rate")) phi.rate = as_number(v["rate"], "phi.rate");
        if (!(phi.rate > 0.0)) fail("phi.rate", "must be positive");
    } else {
        fail("phi.kind", "expected identity, power, or exp");
    }
}

}  // namespace

std::vector<double> default_t_grid() {
    std::vector<double> t(21);
    for (int i = 0; i <= 20; ++i) t[i] = double(i);
    return t;
}

ScenarioConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config top level must be an object");
    expect_keys(doc, "",
                {"preset", "grid_n", "interval", "phi", "entry_mode", "tolerances",
                 "transform", "evolve", "sweep", "output"});

    ScenarioConfig cfg;
    if (!doc.contains("preset")) fail("preset", "required");
    parse_preset(doc["preset"], cfg.preset);

    if (doc.contains("grid_n")) cfg.grid_n = as_int(doc["grid_n"], "grid_n");
    if (cfg.grid_n < 2) fail("grid_n", "must be at least 2");

    if (doc.contains("interval")) {
        const json& v = doc["interval"];
        if (!v.is_array() || v.size() != 2) fail("interval", "expected [a, b]");
        cfg.a = as_number(v[0], "interval[0]");
        cfg.b = as_number(v[1], "interval[1]");
        if (!(cfg.a < cfg.b)) fail("interval", "needs a < b");
    }

    if (doc.contains("phi")) parse_phi(doc["phi"], cfg.phi);
    if (cfg.phi.kind == PhiSpec::Kind::Power && cfg.a < 0.0)
        fail("phi.kind", "the power symbol needs interval[0] >= 0 to stay increasing");

    if (doc.contains("entry_mode")) {
        std::string mode = as_string(doc["entry_mode"], "entry_mode");
        if (mode == "node-sample")
            cfg.entry_mode = EntryMode::NodeSample;
        else if (mode == "cell-average")
            cfg.entry_mode = EntryMode::CellAverage;
        else
            fail("entry_mode", "expected node-sample or cell-average");
        cfg.entry_mode_set = true;
    }

    if (doc.contains("tolerances")) {
        const json& v = doc["tolerances"];
        if (!v.is_object()) fail("tolerances", "expected an object");
        expect_keys(v, "tolerances", {"term_tol", "residual_target", "spr_margin"});
        if (v.contains("term_tol"))
            cfg.tol.term_tol = as_number(v["term_tol"], "tolerances.term_tol");
        if (v.contains("residual_target"))
            cfg.tol.residual_target = as_number(v["residual_target"],
                                                "tolerances.residual_target");
        if (v.contains("spr_margin"))
            cfg.tol.spr_margin = as_number(v["spr_margin"], "tolerances.spr_margin");
        if (!(cfg.tol.term_tol > 0.0)) fail("tolerances.term_tol", "must be positive");
        if (!(cfg.tol.residual_target > 0.0))
            fail("tolerances.residual_target", "must be positive");
        if (!(cfg.tol.spr_margin > 0.0 && cfg.tol.spr_margin < 1.0))
            fail("tolerances.spr_margin", "must lie in (0, 1)");
    }

    if (doc.contains("transform")) {
        const json& v = doc["transform"];
        if (!v.is_object()) fail("transform", "expected an object");
        expect_keys(v, "transform", {"terms_cap", "gelfand_terms"});
        if (v.contains("terms_cap"))
            cfg.terms_cap = as_int(v["terms_cap"], "transform.terms_cap");
        if (v.contains("gelfand_terms"))
            cfg.gelfand_terms = as_int(v["gelfand_terms"], "transform.gelfand_terms");
        if (cfg.terms_cap < 1) fail("transform.terms_cap", "must be at least 1");
        if (cfg.gelfand_terms < 2) fail("transform.gelfand_terms", "must be at least 2");
    }

    if (doc.contains("evolve")) {
        const json& v = doc["evolve"];
        if (!v.is_object()) fail("evolve", "expected an object");
        expect_keys(v, "evolve", {"t_grid", "t_cap"});
        if (v.contains("t_grid")) cfg.t_grid = as_number_array(v["t_grid"], "evolve.t_grid");
        if (v.contains("t_cap")) cfg.t_cap = as_number(v["t_cap"], "evolve.t_cap");
        if (cfg.t_grid.empty()) fail("evolve.t_grid", "must not be empty");
        if (!(cfg.t_cap > 0.0)) fail("evolve.t_cap", "must be positive");
    }

    if (doc.contains("sweep") && !doc["sweep"].is_null()) {
        const json& v = doc["sweep"];
        if (!v.is_object()) fail("sweep", "expected an object");
        expect_keys(v, "sweep", {"axis", "values", "command"});
        SweepSpec sweep;
        if (!v.contains("axis")) fail("sweep.axis", "required");
        sweep.axis = as_string(v["axis"], "sweep.axis");
        if (!preset_default_params(cfg.preset.name).count(sweep.axis))
            fail("sweep.axis",
                 "'" + sweep.axis + "' is not a parameter of preset '" + cfg.preset.name + "'");
        if (v.contains("values")) sweep.values = as_number_array(v["values"], "sweep.values");
        if (v.contains("command")) {
            std::string name = as_string(v["command"], "sweep.command");
            if (name != "analyze" && name != "transform" && name != "evolve")
                fail("sweep.command", "expected analyze, transform, or evolve");
            sweep.command = command_from_string(name);
        }
        cfg.sweep = std::move(sweep);
    }

    if (doc.contains("output")) {
        const json& v = doc["output"];
        if (!v.is_object()) fail("output", "expected an object");
        expect_keys(v, "output", {"path", "format", "kernel_csv", "timings"});
        if (v.contains("path")) cfg.output.path = as_string(v["path"], "output.path");
        if (v.contains("format")) {
            std::string f = as_string(v["format"], "output.format");
            if (f == "json")
                cfg.output.format = ReportFormat::Json;
            else if (f == "csv")
                cfg.output.format = ReportFormat::Csv;
            else
                fail("output.format", "expected json or csv");
        }
        if (v.contains("kernel_csv"))
            cfg.output.kernel_csv = as_string(v["kernel_csv"], "output.kernel_csv");
        if (v.contains("timings")) cfg.output.timings = as_bool(v["timings"], "output.timings");
    }
    return cfg;
}

namespace {

std::function<double(double)> phi_function(const PhiSpec& spec) {
    switch (spec.kind) {
        case PhiSpec::Kind::Identity:
            return [](double x) { return x; };
        case PhiSpec::Kind::Power:
            return [e = spec.exponent](double x) { return std::pow(x, e); };
        default:
            return [r = spec.rate](double x) { return std::exp(r * x); };
    }
}

std::function<double(double)> phi_derivative(const PhiSpec& spec) {
    switch (spec.kind) {
        case PhiSpec::Kind::Identity:
            return [](double) { return 1.0; };
        case PhiSpec::Kind::Power:
            return [e = spec.exponent](double x) { return e * std::pow(x, e - 1.0); };
        default:
            return [r = spec.rate](double x) { return r * std::exp(r * x); };
    }
}

std::string suffixed_path(const std::string& path, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
        return path + "-" + buf;
    return path.substr(0, dot) + "-" + buf + path.substr(dot);
}

ScenarioResult run_single(const ScenarioConfig& cfg, Command cmd,
                          const std::optional<double>& sweep_value) {
    Grid grid(cfg.grid_n, cfg.a, cfg.b);
    KernelPreset preset = cfg.preset.name == "custom-csv"
                              ? make_csv_preset(cfg.preset.kernel_csv)
                              : make_preset(cfg.preset.name, cfg.preset.params, cfg.a, cfg.b);
    auto phi = phi_function(cfg.phi);
    MultiplicationOperator s = MultiplicationOperator::from_function(phi, grid);
    EntryMode mode = cfg.entry_mode_set
                         ? cfg.entry_mode
                         : (preset.requires_cell_average ? EntryMode::CellAverage
                                                         : EntryMode::NodeSample);
    KernelOperator v = preset.matrix ? KernelOperator(grid, *preset.matrix, mode)
                                     : from_kernel_fn(preset.v, grid, mode);
    KernelOperator w = preset.matrix ? derive_w(v, s) : derive_w(preset.v, phi, grid, mode);

    ScenarioResult res;
    if (sweep_value) {
        res.has_sweep_value = true;
        res.sweep_value = *sweep_value;
    }
    ConvolutionMajorant q;
    if (preset.has_q) q = make_convolution_majorant(preset.q);
    std::optional<std::vector<double>> corner;
    if (preset.v_diag) {
        auto dphi = phi_derivative(cfg.phi);
        corner.emplace(grid.size());
        for (int i = 0; i < grid.size(); ++i)
            (*corner)[i] = preset.v_diag(grid.node(i)) / dphi(grid.node(i));
    }
    res.certificate =
        spr_certificate(w, preset.has_q ? &q : nullptr, cfg.tol.spr_margin, cfg.gelfand_terms,
                        corner ? &*corner : nullptr);
    if (preset.has_moduli) {
        double upper = 0.5 * (cfg.b - cfg.a);
        ModulusCondition mc = modulus_condition(preset.omega1, preset.omega2, upper);
        res.modulus = {true, mc.verdict == IntegralVerdict::Finite, mc.value, upper};
    }

    bool verdict_positive = res.certificate.verdict != Verdict::Inconclusive;
    std::optional<SimilarityTransform> transform;
    if (cmd == Command::Transform || (cmd == Command::Evolve && verdict_positive)) {
        SimilarityTransform tr = friedrichs_iterate(s, v, w, cfg.tol.term_tol, cfg.terms_cap);
        res.has_transform = true;
        TransformSummary& ts = res.transform;
        ts.terms_used = tr.terms_used;
        ts.term_norms = tr.term_norms;
        ts.ratios = tr.ratios;
        ts.residual = tr.residual;
        ts.residual_ok = tr.residual <= cfg.tol.residual_target;
        ts.chain_ok = tr.chain_ok;
        ts.chain_checked = tr.chain_checked;
        ts.spr_K_estimate = tr.spr_K_estimate;
        ts.invertibility_certified = verdict_positive;
        if (!verdict_positive)
            ts.note = tr.spr_K_estimate < 1.0
                          ? "series-converged, invertibility uncertified"
                          : "series converged but the spr(K) estimate is not below 1; "
                            "inversion skipped";
        if (tr.spr_K_estimate < 1.0) {
            Inversion inv = invert_transform_checked(tr.K);
            ts.inverted = true;
            ts.inversion_gap = inv.cross_check_gap;
            ts.neumann_terms = inv.neumann_terms;
        }
        if (!cfg.output.kernel_csv.empty()) {
            std::string path = sweep_value ? suffixed_path(cfg.output.kernel_csv, *sweep_value)
                                           : cfg.output.kernel_csv;
            save_kernel_csv(tr.K, path);
        }
        transform = std::move(tr);
    }
    if (cmd == Command::Evolve) {
        res.stability = stability_scan(s, v, transform ? &transform->K : nullptr, cfg.t_grid,
                                       cfg.t_cap);
        res.has_stability = true;
    }
    return res;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg, Command command) {
    auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.command = command;
    report.config = cfg;
    report.tool_version = tool_version;
    if (command == Command::Sweep) {
        if (!cfg.sweep) throw ConfigError("the sweep command needs a sweep block");
        for (double value : cfg.sweep->values) {
            ScenarioConfig sub = cfg;
            sub.preset.params[cfg.sweep->axis] = value;
            sub.sweep.reset();
            report.results.push_back(run_single(sub, cfg.sweep->command, value));
        }
        std::stable_sort(report.results.begin(), report.results.end(),
                         [](const ScenarioResult& x, const ScenarioResult& y) {
                             return x.sweep_value < y.sweep_value;
                         });
    } else {
        report.results.push_back(run_single(cfg, command, std::nullopt));
    }
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

int exit_code(const RunReport& report) {
    for (const ScenarioResult& r : report.results)
        if (r.certificate.verdict == Verdict::Inconclusive) return 2;
    return 0;
}

}  // namespace voltra
