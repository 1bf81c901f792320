#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "voltra/scenario.hpp"
#include "voltra/version.hpp"

namespace voltra {

using nlohmann::json;

namespace {

// 12 significant digits is the canonical precision of every emitted number.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json num(double v) { return std::stod(fmt(v)); }

json num_or_divergent(double v) {
    if (std::isinf(v)) return "divergent";
    return num(v);
}

json num_array(const std::vector<double>& values) {
    json arr = json::array();
    for (double v : values) arr.push_back(num(v));
    return arr;
}

json config_json(const ScenarioConfig& cfg) {
    json preset{{"name", cfg.preset.name}};
    json params = json::object();
    for (const auto& [key, val] : cfg.preset.params) params[key] = num(val);
    preset["params"] = params;
    if (!cfg.preset.kernel_csv.empty()) preset["kernel_csv"] = cfg.preset.kernel_csv;

    json phi;
    switch (cfg.phi.kind) {
        case PhiSpec::Kind::Identity: phi = {{"kind", "identity"}}; break;
        case PhiSpec::Kind::Power:
            phi = {{"kind", "power"}, {"exponent", num(cfg.phi.exponent)}};
            break;
        default: phi = {{"kind", "exp"}, {"rate", num(cfg.phi.rate)}}; break;
    }

    json out{{"preset", preset},
             {"grid_n", cfg.grid_n},
             {"interval", json::array({num(cfg.a), num(cfg.b)})},
             {"phi", phi},
             {"tolerances",
              {{"term_tol", num(cfg.tol.term_tol)},
               {"residual_target", num(cfg.tol.residual_target)},
               {"spr_margin", num(cfg.tol.spr_margin)}}},
             {"transform",
              {{"terms_cap", cfg.terms_cap}, {"gelfand_terms", cfg.gelfand_terms}}},
             {"evolve", {{"t_grid", num_array(cfg.t_grid)}, {"t_cap", num(cfg.t_cap)}}},
             {"output",
              {{"path", cfg.output.path},
               {"format", cfg.output.format == ReportFormat::Json ? "json" : "csv"},
               {"kernel_csv", cfg.output.kernel_csv},
               {"timings", cfg.output.timings}}}};
    if (cfg.entry_mode_set)
        out["entry_mode"] =
            cfg.entry_mode == EntryMode::NodeSample ? "node-sample" : "cell-average";
    if (cfg.sweep)
        out["sweep"] = {{"axis", cfg.sweep->axis},
                        {"values", num_array(cfg.sweep->values)},
                        {"command", to_string(cfg.sweep->command)}};
    return out;
}

json certificate_json(const Certificate& cert) {
    json out{{"verdict", to_string(cert.verdict)},
             {"gelfand_estimate", num(cert.gelfand_estimate)},
             {"gelfand_terms", cert.gelfand_terms},
             {"gelfand_corner", cert.gelfand_corner},
             {"eigenvalue_spr", num(cert.eigenvalue_spr)},
             {"volterra_flag", cert.volterra_flag},
             {"spr_margin", num(cert.spr_margin)},
             {"grid_n", cert.grid_n}};
    if (cert.has_schur) {
        out["schur"] = {{"value", num_or_divergent(cert.schur_value)},
                        {"integrable", cert.schur_integrable}};
        out["majorant_check"] = {{"holds", cert.majorant_check_ok},
                                 {"worst_margin", num(cert.majorant_margin)}};
    }
    return out;
}

json result_json(const ScenarioResult& r) {
    json out{{"certificate", certificate_json(r.certificate)}};
    if (r.has_sweep_value) out["sweep_value"] = num(r.sweep_value);
    if (r.modulus.evaluated)
        out["modulus"] = {{"finite", r.modulus.finite},
                          {"value", num_or_divergent(r.modulus.value)},
                          {"upper", num(r.modulus.upper)}};
    if (r.has_transform) {
        const TransformSummary& t = r.transform;
        json tr{{"terms_used", t.terms_used},
                {"term_norms", num_array(t.term_norms)},
                {"ratios", num_array(t.ratios)},
                {"residual", num(t.residual)},
                {"residual_ok", t.residual_ok},
                {"chain_ok", t.chain_ok},
                {"chain_checked", t.chain_checked},
                {"spr_K_estimate", num(t.spr_K_estimate)},
                {"invertibility_certified", t.invertibility_certified}};
        if (t.inverted)
            tr["inversion"] = {{"cross_check_gap", num(t.inversion_gap)},
                               {"neumann_terms", t.neumann_terms}};
        if (!t.note.empty()) tr["note"] = t.note;
        out["transform"] = tr;
    }
    if (r.has_stability) {
        const StabilityReport& s = r.stability;
        json st{{"t_grid", num_array(s.t_grid)},
                {"norms", num_array(s.norms)},
                {"sup_norm", num(s.sup_norm)},
                {"has_transform", s.has_transform}};
        if (s.has_transform) {
            st["norms_conjugated"] = num_array(s.norms_conjugated);
            st["gaps"] = num_array(s.gaps);
            st["conjugation_gap"] = num(s.conjugation_gap);
            st["cond_bound"] = num(s.cond_bound);
        }
        out["stability"] = st;
    }
    return out;
}

// Cells always prepend their separator; rows strip the leading one on emit.
void csv_cell(std::string& line, const std::string& value) {
    line += ',';
    line += value;
}

void csv_cell(std::string& line, const char* value) { csv_cell(line, std::string(value)); }

void csv_cell(std::string& line, bool value) { csv_cell(line, value ? "true" : "false"); }

void csv_cell_num(std::string& line, double v) {
    csv_cell(line, std::isinf(v) ? "divergent" : fmt(v));
}

std::string emit_csv(const RunReport& report) {
    Command shape = report.command == Command::Sweep ? report.config.sweep->command
                                                     : report.command;
    std::string out;
    if (shape == Command::Evolve) {
        out = "sweep_value,t,norm_direct,norm_conjugated,gap\n";
        for (const ScenarioResult& r : report.results) {
            const StabilityReport& s = r.stability;
            std::vector<size_t> order(s.t_grid.size());
            std::iota(order.begin(), order.end(), size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](size_t x, size_t y) { return s.t_grid[x] < s.t_grid[y]; });
            for (size_t idx : order) {
                std::string line;
                csv_cell(line, r.has_sweep_value ? fmt(r.sweep_value) : "");
                csv_cell_num(line, s.t_grid[idx]);
                csv_cell_num(line, s.norms[idx]);
                if (s.has_transform) {
                    csv_cell_num(line, s.norms_conjugated[idx]);
                    csv_cell_num(line, s.gaps[idx]);
                } else {
                    csv_cell(line, "");
                    csv_cell(line, "");
                }
                out += line.substr(1) + "\n";
            }
        }
        return out;
    }
    out = "sweep_value,preset,grid_n,verdict,schur_value,schur_integrable,majorant_ok,"
          "gelfand_estimate,gelfand_terms,eigenvalue_spr,volterra_flag,modulus_finite,"
          "modulus_value";
    if (shape == Command::Transform)
        out += ",terms_used,residual,residual_ok,chain_ok,spr_k_estimate,inverted,"
               "inversion_gap,invertibility_certified";
    out += "\n";
    for (const ScenarioResult& r : report.results) {
        std::string line;
        csv_cell(line, r.has_sweep_value ? fmt(r.sweep_value) : "");
        csv_cell(line, report.config.preset.name);
        csv_cell(line, std::to_string(r.certificate.grid_n));
        csv_cell(line, to_string(r.certificate.verdict));
        if (r.certificate.has_schur) {
            csv_cell_num(line, r.certificate.schur_value);
            csv_cell(line, r.certificate.schur_integrable);
            csv_cell(line, r.certificate.majorant_check_ok);
        } else {
            csv_cell(line, "");
            csv_cell(line, "");
            csv_cell(line, "");
        }
        csv_cell_num(line, r.certificate.gelfand_estimate);
        csv_cell(line, std::to_string(r.certificate.gelfand_terms));
        csv_cell_num(line, r.certificate.eigenvalue_spr);
        csv_cell(line, r.certificate.volterra_flag);
        if (r.modulus.evaluated) {
            csv_cell(line, r.modulus.finite);
            csv_cell_num(line, r.modulus.value);
        } else {
            csv_cell(line, "");
            csv_cell(line, "");
        }
        if (shape == Command::Transform) {
            if (r.has_transform) {
                csv_cell(line, std::to_string(r.transform.terms_used));
                csv_cell_num(line, r.transform.residual);
                csv_cell(line, r.transform.residual_ok);
                csv_cell(line, r.transform.chain_ok);
                csv_cell_num(line, r.transform.spr_K_estimate);
                csv_cell(line, r.transform.inverted);
                csv_cell_num(line, r.transform.inversion_gap);
                csv_cell(line, r.transform.invertibility_certified);
            } else {
                for (int i = 0; i < 8; ++i) csv_cell(line, "");
            }
        }
        out += line.substr(1) + "\n";
    }
    return out;
}

}  // namespace

std::string config_echo(const ScenarioConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

std::string emit_report(const RunReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) return emit_csv(report);
    json results = json::array();
    for (const ScenarioResult& r : report.results) results.push_back(result_json(r));
    json doc{{"command", to_string(report.command)},
             {"config", config_json(report.config)},
             {"results", results},
             {"tool", {{"name", tool_name}, {"version", report.tool_version}}}};
    if (report.config.output.timings) doc["timings"] = {{"elapsed_ms", num(report.elapsed_ms)}};
    return doc.dump(2) + "\n";
}

std::string error_report(const std::exception& error) {
    json body{{"message", error.what()}, {"type", "error"}};
    if (dynamic_cast<const ConfigError*>(&error))
        body["type"] = "config";
    else if (auto* div = dynamic_cast<const DivergenceError*>(&error)) {
        body["type"] = "divergence";
        body["term_norms"] = num_array(div->term_norms);
        body["ratios"] = num_array(div->ratios);
    } else if (auto* conv = dynamic_cast<const ConvergenceError*>(&error)) {
        body["type"] = "convergence";
        body["last_estimate"] = num(conv->last_estimate);
    } else if (dynamic_cast<const InversionError*>(&error))
        body["type"] = "inversion";
    else if (dynamic_cast<const SingularDivisionError*>(&error))
        body["type"] = "singular-division";
    else if (dynamic_cast<const OverflowError*>(&error))
        body["type"] = "overflow";
    else if (dynamic_cast<const IoError*>(&error))
        body["type"] = "io";
    else if (dynamic_cast<const SamplingError*>(&error))
        body["type"] = "sampling";
    else if (dynamic_cast<const GridMismatchError*>(&error))
        body["type"] = "grid-mismatch";
    else if (dynamic_cast<const InvalidInputError*>(&error))
        body["type"] = "invalid-input";
    json doc{{"error", body}};
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace voltra
