// Command line front end: scenario configs in, certificates and reports out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "voltra/scenario.hpp"
#include "voltra/version.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    int grid_n = 0;
    std::string out_path;
    std::string format;
    std::string preset;
    std::vector<std::string> params;
    std::string kernel_csv;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw voltra::IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::pair<std::string, double> parse_param(const std::string& text) {
    size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw voltra::ConfigError("--param expects key=value, got '" + text + "'");
    std::string key = text.substr(0, eq);
    std::string value = text.substr(eq + 1);
    size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw voltra::ConfigError("--param " + key + ": '" + value + "' is not a number");
    }
    if (pos != value.size())
        throw voltra::ConfigError("--param " + key + ": '" + value + "' is not a number");
    return {key, v};
}

voltra::ScenarioConfig build_config(const CliOptions& opt) {
    voltra::ScenarioConfig cfg;
    if (!opt.config_path.empty()) cfg = voltra::parse_config(read_file(opt.config_path));
    if (!opt.preset.empty() && opt.preset != cfg.preset.name) {
        voltra::preset_default_params(opt.preset);  // validates the name
        cfg.preset.name = opt.preset;
        cfg.preset.params.clear();
        cfg.preset.kernel_csv.clear();
    }
    if (cfg.preset.name.empty())
        throw voltra::ConfigError("a preset is required: pass --preset or a config file");
    for (const std::string& p : opt.params) {
        auto [key, value] = parse_param(p);
        if (!voltra::preset_default_params(cfg.preset.name).count(key))
            throw voltra::ConfigError("preset '" + cfg.preset.name +
                                      "' has no parameter '" + key + "'");
        cfg.preset.params[key] = value;
    }
    if (!opt.kernel_csv.empty()) cfg.preset.kernel_csv = opt.kernel_csv;
    if (cfg.preset.name == "custom-csv" && cfg.preset.kernel_csv.empty())
        throw voltra::ConfigError("the custom-csv preset needs --kernel-csv or "
                                  "preset.kernel_csv in the config");
    if (opt.grid_n != 0) {
        if (opt.grid_n < 2) throw voltra::ConfigError("--grid must be at least 2");
        cfg.grid_n = opt.grid_n;
    }
    if (!opt.out_path.empty()) cfg.output.path = opt.out_path;
    if (!opt.format.empty())
        cfg.output.format = opt.format == "json" ? voltra::ReportFormat::Json
                                                 : voltra::ReportFormat::Csv;
    return cfg;
}

int run_command(voltra::Command command, const CliOptions& opt) {
    voltra::ScenarioConfig cfg = build_config(opt);
    voltra::RunReport report = voltra::run_scenario(cfg, command);
    std::string text = voltra::emit_report(report, cfg.output.format);
    if (cfg.output.path.empty())
        std::cout << text;
    else
        voltra::write_text_file(cfg.output.path, text);
    return voltra::exit_code(report);
}

void list_presets() {
    for (const voltra::PresetInfo& info : voltra::preset_catalog()) {
        std::printf("%s\n", info.name.c_str());
        std::printf("  parameters: %s\n", info.parameters.c_str());
        std::printf("  %s\n", info.summary.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"similarity certificates and transforms for Volterra-perturbed "
                 "multiplication operators"};
    app.set_version_flag("--version",
                         std::string(voltra::tool_name) + " " + voltra::tool_version);
    app.require_subcommand(1);

    CliOptions opt;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "scenario config file (JSON)");
        sub->add_option("--grid", opt.grid_n, "override grid_n");
        sub->add_option("--out", opt.out_path, "write the report here instead of stdout");
        sub->add_option("--format", opt.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--preset", opt.preset, "kernel preset name");
        sub->add_option("--param", opt.params, "preset parameter key=value (repeatable)");
        sub->add_option("--kernel-csv", opt.kernel_csv,
                        "kernel matrix file for the custom-csv preset");
    };

    CLI::App* analyze = app.add_subcommand(
        "analyze", "build V and its majorant, emit the applicability certificate");
    CLI::App* transform = app.add_subcommand(
        "transform", "additionally construct K, check the chain, residual, and inverse");
    CLI::App* evolve = app.add_subcommand(
        "evolve", "additionally scan the evolution group norms over t");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "repeat a command over the configured parameter values");
    CLI::App* presets = app.add_subcommand("presets", "list the kernel preset catalog");
    for (CLI::App* sub : {analyze, transform, evolve, sweep}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (presets->parsed()) {
            list_presets();
            return 0;
        }
        voltra::Command command = voltra::Command::Analyze;
        if (transform->parsed()) command = voltra::Command::Transform;
        if (evolve->parsed()) command = voltra::Command::Evolve;
        if (sweep->parsed()) command = voltra::Command::Sweep;
        return run_command(command, opt);
    } catch (const std::exception& e) {
        std::cerr << voltra::error_report(e);
        return 1;
    }
}
