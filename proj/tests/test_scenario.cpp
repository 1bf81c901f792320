#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "voltra/scenario.hpp"

using namespace voltra;

namespace {

std::string minimal = R"({"preset": {"name": "constant-times-lag"}})";

ScenarioConfig small_config(const std::string& preset, int n = 48) {
    ScenarioConfig cfg = parse_config(R"({"preset": {"name": ")" + preset + R"("}})");
    cfg.grid_n = n;
    return cfg;
}

}  // namespace

TEST_CASE("parse defaults") {
    ScenarioConfig cfg = parse_config(minimal);
    CHECK(cfg.preset.name == "constant-times-lag");
    CHECK(cfg.preset.params.empty());
    CHECK(cfg.grid_n == 512);
    CHECK(cfg.a == 0.0);
    CHECK(cfg.b == 1.0);
    CHECK(cfg.phi.kind == PhiSpec::Kind::Identity);
    CHECK_FALSE(cfg.entry_mode_set);
    CHECK(cfg.tol.term_tol == 1e-10);
    CHECK(cfg.tol.residual_target == 1e-8);
    CHECK(cfg.tol.spr_margin == 0.45);
    CHECK(cfg.terms_cap == 64);
    CHECK(cfg.gelfand_terms == 30);
    REQUIRE(cfg.t_grid.size() == 21);
    CHECK(cfg.t_grid.front() == 0.0);
    CHECK(cfg.t_grid.back() == 20.0);
    CHECK(cfg.t_cap == 100.0);
    CHECK_FALSE(cfg.sweep.has_value());
    CHECK(cfg.output.path.empty());
    CHECK(cfg.output.format == ReportFormat::Json);
    CHECK_FALSE(cfg.output.timings);
}

TEST_CASE("parse rejections name the key") {
    auto reject = [](const std::string& text, const char* needle) {
        CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains(needle), ConfigError);
    };

    reject("{", "not valid JSON");
    reject("[1, 2]", "top level");
    reject("{}", "preset");
    reject(R"({"preset": {"name": "constant-times-lag"}, "gridd_n": 64})", "gridd_n");
    reject(R"({"preset": {"name": "nope"}})", "nope");
    reject(R"({"preset": {"name": "cesaro", "params": {"q": 1}}})", "preset.params.q");
    reject(R"({"preset": {"name": "cesaro", "params": {"c": "big"}}})", "expected a number");
    reject(R"({"preset": {"name": "cesaro"}, "grid_n": 1})", "at least 2");
    reject(R"({"preset": {"name": "cesaro"}, "grid_n": 2.5})", "integer");
    reject(R"({"preset": {"name": "cesaro"}, "interval": [1, 1]})", "a < b");
    reject(R"({"preset": {"name": "cesaro"}, "interval": [0]})", "[a, b]");
    reject(R"({"preset": {"name": "cesaro"}, "phi": {"kind": "cubic"}})", "phi.kind");
    reject(R"({"preset": {"name": "cesaro"}, "phi": {"kind": "identity", "exponent": 2}})",
           "no parameters");
    reject(R"({"preset": {"name": "cesaro"}, "phi": {"kind": "power", "rate": 1}})",
           "phi.rate");
    reject(R"({"preset": {"name": "cesaro"}, "phi": {"kind": "power", "exponent": -1}})",
           "positive");
    reject(
        R"({"preset": {"name": "cesaro"}, "interval": [-1, 1], "phi": {"kind": "power"}})",
        "interval[0] >= 0");
    reject(R"({"preset": {"name": "cesaro"}, "entry_mode": "exact"})", "entry_mode");
    reject(R"({"preset": {"name": "cesaro"}, "tolerances": {"spr_margin": 1.5}})",
           "(0, 1)");
    reject(R"({"preset": {"name": "cesaro"}, "tolerances": {"term_tol": 0}})", "positive");
    reject(R"({"preset": {"name": "cesaro"}, "transform": {"terms_cap": 0}})",
           "at least 1");
    reject(R"({"preset": {"name": "cesaro"}, "transform": {"gelfand_terms": 1}})",
           "at least 2");
    reject(R"({"preset": {"name": "cesaro"}, "evolve": {"t_grid": []}})", "empty");
    reject(R"({"preset": {"name": "cesaro"}, "evolve": {"t_cap": -1}})", "positive");
    reject(R"({"preset": {"name": "cesaro"}, "sweep": {"values": [1]}})", "sweep.axis");
    reject(R"({"preset": {"name": "cesaro"}, "sweep": {"axis": "alpha", "values": [1]}})",
           "not a parameter");
    reject(
        R"({"preset": {"name": "cesaro"}, "sweep": {"axis": "c", "command": "sweep"}})",
        "sweep.command");
    reject(R"({"preset": {"name": "cesaro"}, "output": {"format": "xml"}})", "json or csv");
    reject(R"({"preset": {"name": "cesaro"}, "output": {"timings": 1}})", "boolean");
    reject(R"({"preset": {"name": "custom-csv"}})", "kernel file path");
    reject(R"({"preset": {"name": "cesaro", "kernel_csv": "k.csv"}})", "custom-csv");
}

TEST_CASE("echo round trip") {
    std::string rich = R"({
      "preset": {"name": "cesaro", "params": {"c": 0.25}},
      "grid_n": 96,
      "interval": [0.5, 2],
      "phi": {"kind": "exp", "rate": 0.75},
      "entry_mode": "cell-average",
      "tolerances": {"term_tol": 1e-9, "residual_target": 1e-7, "spr_margin": 0.4},
      "transform": {"terms_cap": 32, "gelfand_terms": 12},
      "evolve": {"t_grid": [0, 2.5, 5], "t_cap": 50},
      "sweep": {"axis": "c", "values": [0.1, 0.3], "command": "transform"},
      "output": {"path": "out.json", "format": "csv", "kernel_csv": "k.csv",
                 "timings": true}
    })";
    ScenarioConfig cfg = parse_config(rich);
    CHECK(cfg.preset.params.at("c") == 0.25);
    CHECK(cfg.grid_n == 96);
    CHECK(cfg.phi.kind == PhiSpec::Kind::Exp);
    CHECK(cfg.phi.rate == 0.75);
    CHECK(cfg.entry_mode == EntryMode::CellAverage);
    CHECK(cfg.entry_mode_set);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->command == Command::Transform);
    CHECK(cfg.output.format == ReportFormat::Csv);
    CHECK(cfg.output.timings);

    std::string echo = config_echo(cfg);
    ScenarioConfig back = parse_config(echo);
    CHECK(config_echo(back) == echo);
    CHECK(back.grid_n == cfg.grid_n);
    CHECK(back.phi.rate == cfg.phi.rate);
    CHECK(back.sweep->values == cfg.sweep->values);
    CHECK(back.tol.term_tol == cfg.tol.term_tol);

    // defaults round trip too
    std::string plain = config_echo(parse_config(minimal));
    CHECK(config_echo(parse_config(plain)) == plain);
}

TEST_CASE("echo uses 12 significant digits") {
    ScenarioConfig cfg = parse_config(minimal);
    cfg.tol.term_tol = 1.0 / 3.0;
    CHECK(config_echo(cfg).find("0.333333333333") != std::string::npos);
}

TEST_CASE("analyze shapes") {
    RunReport rep = run_scenario(small_config("constant-times-lag"), Command::Analyze);
    REQUIRE(rep.results.size() == 1);
    const ScenarioResult& r = rep.results[0];
    CHECK(r.certificate.verdict == Verdict::SimilarByCor1);
    CHECK_FALSE(r.has_transform);
    CHECK_FALSE(r.has_stability);
    CHECK_FALSE(r.has_sweep_value);
    CHECK(r.modulus.evaluated);
    CHECK(r.modulus.finite);
    CHECK(r.modulus.value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.modulus.upper == 0.5);
    CHECK(exit_code(rep) == 0);
    CHECK(rep.command == Command::Analyze);
    CHECK_FALSE(rep.tool_version.empty());

    RunReport stuck = run_scenario(small_config("log-moduli"), Command::Analyze);
    CHECK(stuck.results[0].certificate.verdict == Verdict::Inconclusive);
    CHECK(stuck.results[0].modulus.evaluated);
    CHECK_FALSE(stuck.results[0].modulus.finite);
    CHECK(std::isinf(stuck.results[0].certificate.schur_value));
    CHECK(exit_code(stuck) == 2);
}

TEST_CASE("transform shapes") {
    RunReport rep = run_scenario(small_config("fractional"), Command::Transform);
    const ScenarioResult& r = rep.results[0];
    REQUIRE(r.has_transform);
    CHECK(r.transform.terms_used >= 2);
    CHECK(r.transform.residual_ok);
    CHECK(r.transform.chain_ok);
    CHECK(r.transform.inverted);
    CHECK(r.transform.invertibility_certified);
    CHECK(r.transform.note.empty());
    CHECK(r.transform.inversion_gap <= 1e-9);
    CHECK_FALSE(r.has_stability);

    // inconclusive verdict still converges here, with the cautionary note
    RunReport stuck = run_scenario(small_config("log-moduli"), Command::Transform);
    const ScenarioResult& sr = stuck.results[0];
    REQUIRE(sr.has_transform);
    CHECK_FALSE(sr.transform.invertibility_certified);
    CHECK(sr.transform.note == "series-converged, invertibility uncertified");
    CHECK(exit_code(stuck) == 2);
}

TEST_CASE("evolve shapes") {
    ScenarioConfig cfg = small_config("fractional", 32);
    cfg.t_grid = {0.0, 1.0, 2.0};
    RunReport rep = run_scenario(cfg, Command::Evolve);
    const ScenarioResult& r = rep.results[0];
    CHECK(r.has_transform);
    REQUIRE(r.has_stability);
    CHECK(r.stability.has_transform);
    REQUIRE(r.stability.norms.size() == 3);
    CHECK(r.stability.norms_conjugated.size() == 3);
    CHECK(r.stability.sup_norm <= r.stability.cond_bound + 1e-4);

    // no certificate, no conjugation: the scan still reports the raw norms
    ScenarioConfig stuck = small_config("log-moduli", 32);
    stuck.t_grid = {0.0, 1.0};
    RunReport bare = run_scenario(stuck, Command::Evolve);
    CHECK_FALSE(bare.results[0].has_transform);
    REQUIRE(bare.results[0].has_stability);
    CHECK_FALSE(bare.results[0].stability.has_transform);
    CHECK(bare.results[0].stability.norms_conjugated.empty());
}

TEST_CASE("sweep ordering and exit code") {
    ScenarioConfig cfg = small_config("cesaro", 64);
    SweepSpec sweep;
    sweep.axis = "c";
    sweep.values = {0.3, 0.1, 0.2};
    sweep.command = Command::Analyze;
    cfg.sweep = sweep;

    RunReport rep = run_scenario(cfg, Command::Sweep);
    REQUIRE(rep.results.size() == 3);
    CHECK(rep.results[0].sweep_value == 0.1);
    CHECK(rep.results[1].sweep_value == 0.2);
    CHECK(rep.results[2].sweep_value == 0.3);
    for (const ScenarioResult& r : rep.results) CHECK(r.has_sweep_value);
    CHECK(rep.results[0].certificate.verdict == Verdict::SimilarByThm1);
    CHECK(rep.results[2].certificate.verdict == Verdict::Inconclusive);
    CHECK(exit_code(rep) == 2);

    ScenarioConfig no_sweep = small_config("cesaro");
    CHECK_THROWS_AS(run_scenario(no_sweep, Command::Sweep), ConfigError);
}

TEST_CASE("custom csv scenario") {
    {
        std::ofstream out("scenario_kernel.csv");
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) out << (j ? "," : "") << (j < i ? 0.125 : 0.0);
            out << "\n";
        }
    }
    ScenarioConfig cfg = parse_config(
        R"({"preset": {"name": "custom-csv", "kernel_csv": "scenario_kernel.csv"},
            "grid_n": 8})");
    RunReport rep = run_scenario(cfg, Command::Analyze);
    CHECK(rep.results[0].certificate.verdict == Verdict::SimilarByThm1);
    CHECK_FALSE(rep.results[0].modulus.evaluated);

    cfg.grid_n = 16;
    CHECK_THROWS_AS(run_scenario(cfg, Command::Analyze), GridMismatchError);
}

TEST_CASE("kernel export") {
    ScenarioConfig cfg = small_config("fractional", 24);
    cfg.output.kernel_csv = "exported_k.csv";
    run_scenario(cfg, Command::Transform);
    std::ifstream in("exported_k.csv");
    CHECK(in.good());

    SweepSpec sweep;
    sweep.axis = "alpha";
    sweep.values = {2.0, 3.0};
    sweep.command = Command::Transform;
    cfg.sweep = sweep;
    run_scenario(cfg, Command::Sweep);
    CHECK(std::ifstream("exported_k-2.csv").good());
    CHECK(std::ifstream("exported_k-3.csv").good());
}

TEST_CASE("json emission") {
    ScenarioConfig cfg = small_config("cesaro");
    RunReport rep = run_scenario(cfg, Command::Analyze);
    std::string once = emit_report(rep, ReportFormat::Json);
    CHECK(once == emit_report(rep, ReportFormat::Json));
    CHECK(once.find("\"divergent\"") != std::string::npos);
    CHECK(once.find("\"verdict\": \"inconclusive\"") != std::string::npos);
    CHECK(once.find("elapsed_ms") == std::string::npos);

    rep.config.output.timings = true;
    std::string timed = emit_report(rep, ReportFormat::Json);
    CHECK(timed.find("\"timings\"") != std::string::npos);
    CHECK(timed.find("\"elapsed_ms\"") != std::string::npos);

    // a fresh run emits byte-identical output when timings stay off
    RunReport again = run_scenario(cfg, Command::Analyze);
    CHECK(emit_report(again, ReportFormat::Json) == once);
}

TEST_CASE("csv emission") {
    ScenarioConfig cfg = small_config("cesaro", 64);
    SweepSpec sweep;
    sweep.axis = "c";
    sweep.values = {0.2, 0.1};
    sweep.command = Command::Analyze;
    cfg.sweep = sweep;
    RunReport rep = run_scenario(cfg, Command::Sweep);
    std::string csv = emit_report(rep, ReportFormat::Csv);

    size_t first_break = csv.find('\n');
    std::string header = csv.substr(0, first_break);
    CHECK(header ==
          "sweep_value,preset,grid_n,verdict,schur_value,schur_integrable,majorant_ok,"
          "gelfand_estimate,gelfand_terms,eigenvalue_spr,volterra_flag,modulus_finite,"
          "modulus_value");
    std::string row1 = csv.substr(first_break + 1, csv.find('\n', first_break + 1) -
                                                       first_break - 1);
    CHECK(row1.rfind("0.1,cesaro,64,similar-by-thm1,divergent,false,true,", 0) == 0);

    // every row carries the full column count
    size_t columns = std::count(header.begin(), header.end(), ',');
    std::string body = csv;
    size_t pos;
    while ((pos = body.find('\n')) != std::string::npos) {
        std::string line = body.substr(0, pos);
        body = body.substr(pos + 1);
        if (line.empty()) continue;
        CHECK(size_t(std::count(line.begin(), line.end(), ',')) == columns);
    }

    // evolve rows are t-sorted with one block per sweep value
    ScenarioConfig ecfg = small_config("fractional", 24);
    ecfg.t_grid = {2.0, 0.0, 1.0};
    RunReport erep = run_scenario(ecfg, Command::Evolve);
    std::string ecsv = emit_report(erep, ReportFormat::Csv);
    CHECK(ecsv.rfind("sweep_value,t,norm_direct,norm_conjugated,gap\n", 0) == 0);
    CHECK(ecsv.find("\n,0,") != std::string::npos);
    size_t t0 = ecsv.find("\n,0,"), t1 = ecsv.find("\n,1,"), t2 = ecsv.find("\n,2,");
    CHECK(t0 < t1);
    CHECK(t1 < t2);
}

TEST_CASE("error reports") {
    CHECK(error_report(ConfigError("bad key")).find("\"type\": \"config\"") !=
          std::string::npos);
    CHECK(error_report(InversionError("routes disagree")).find("\"inversion\"") !=
          std::string::npos);
    CHECK(error_report(IoError("no file")).find("\"io\"") != std::string::npos);
    CHECK(error_report(InvalidInputError("nope")).find("\"invalid-input\"") !=
          std::string::npos);
    CHECK(error_report(std::runtime_error("plain")).find("\"type\": \"error\"") !=
          std::string::npos);

    DivergenceError div("grew", {1.0, 2.0}, {2.0});
    std::string rep = error_report(div);
    CHECK(rep.find("\"divergence\"") != std::string::npos);
    CHECK(rep.find("term_norms") != std::string::npos);
    CHECK(rep.find("ratios") != std::string::npos);

    ConvergenceError conv("slow", 0.7);
    CHECK(error_report(conv).find("last_estimate") != std::string::npos);
}

TEST_CASE("command names") {
    for (const char* name : {"analyze", "transform", "evolve", "sweep"})
        CHECK(to_string(command_from_string(name)) == name);
    CHECK_THROWS_AS(command_from_string("audit"), ConfigError);
}

TEST_CASE("write text file") {
    write_text_file("scenario_note.txt", "payload\n");
    std::ifstream in("scenario_note.txt");
    std::string line;
    std::getline(in, line);
    CHECK(line == "payload");
    CHECK_THROWS_AS(write_text_file("no_such_dir/scenario_note.txt", "x"), IoError);
}
