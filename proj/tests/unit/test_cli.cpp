// test_cli.cpp: Configuration schema, environment overrides, sweeps and the command-line front end

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "heatrect/cli.hpp"
#include "heatrect/floquet_solver.hpp"
#include "heatrect/metrics.hpp"
#include "heatrect/sweep.hpp"

using namespace heatrect;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

Json base_doc() {
    return Json::parse(R"({
      "model": {"type": "two_oscillator", "omega1": 2.0, "omega2": 1.0, "c0": 0.2, "v1": 0.1, "omega_d": 0.9633},
      "baths": [
        {"node": 0, "temperature": 1.2, "gamma": 0.01, "cutoff": 10.0},
        {"node": 1, "temperature": 1.0, "gamma": 0.01, "cutoff": 10.0}
      ]
    })");
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("heatrect_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_json(const fs::path& p, const Json& j) {
    std::ofstream(p) << j.dump(2);
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct CliRun {
    int code;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Data rows of a CSV written by the tool (comment lines skipped), split on commas.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("config round trip and defaults") {
    const RunConfig cfg = parse_config(base_doc());
    CHECK(cfg.model.type == "two_oscillator");
    CHECK(*cfg.model.omega_d == 0.9633);
    CHECK(cfg.solver.quad_rel_tol == 1e-7);
    CHECK(cfg.output.formats == std::vector<std::string>{"csv", "json"});
    const Json j = to_json(cfg);
    CHECK(to_json(parse_config(j)) == j);

    const Model m = build_model(cfg);
    CHECK(m.bath_count() == 2);
    CHECK(m.network().driven());
    CHECK(m.network().harmonic(1)(0, 0).real() == Approx(0.1));
}

TEST_CASE("strict schema") {
    Json d = base_doc();
    d["model"]["omega_3"] = 1.0;
    CHECK_THROWS_AS(parse_config(d), ConfigError);
    d = base_doc();
    d["solver"] = {{"quad_rel_tol", "tight"}};
    CHECK_THROWS_AS(parse_config(d), ConfigError);
    d = base_doc();
    d.erase("baths");
    CHECK_THROWS_AS(parse_config(d), ConfigError);
    d = base_doc();
    d["sweep"] = {{"axes", Json::array({{{"path", "model.c0"}, {"start", 0}, {"stop", 1}, {"count", 2}},
                                        {{"path", "model.v1"}, {"start", 0}, {"stop", 1}, {"count", 2}},
                                        {{"path", "model.omega_d"}, {"start", 1}, {"stop", 2}, {"count", 2}}})}};
    CHECK_THROWS_AS(parse_config(d), ConfigError);
    d = base_doc();
    d["baths"][0]["gamma"] = -0.01;
    const RunConfig bad = parse_config(d);
    CHECK_THROWS_AS(build_model(bad), ValidationError);
}

TEST_CASE("generic models with harmonics") {
    Json d = Json::parse(R"({
      "model": {"type": "generic", "omega_d": 2.0, "masses": [1.0, 2.0], "v0": [3.0, -0.1, -0.1, 2.0],
                "harmonics": [{"k": 1, "re": [0.05, 0.0, 0.0, 0.0], "im": [0.0, 0.01, 0.01, 0.0]}]},
      "baths": [{"node": 0, "temperature": 1.0}, {"node": 1, "temperature": 0.5}]
    })");
    const Model m = build_model(parse_config(d));
    CHECK(m.network().masses()[1] == 2.0);
    CHECK(m.network().harmonic(-1)(0, 1) == std::conj(m.network().harmonic(1)(0, 1)));
    CHECK(m.baths()[1].gamma == 0.01);
}

TEST_CASE("environment overrides") {
    Json d = base_doc();
    apply_env_overrides(d, {{"HEATRECT_MODEL__OMEGA_D", "1.5"},
                            {"HEATRECT_BATHS__1__TEMPERATURE", "0.7"},
                            {"HEATRECT_SOLVER__INSTABILITY_POLICY", "error"},
                            {"HEATRECT_CLI", "/usr/bin/heatrect"},
                            {"UNRELATED", "1"}});
    const RunConfig cfg = parse_config(d);
    CHECK(*cfg.model.omega_d == 1.5);
    CHECK(cfg.baths[1].temperature == 0.7);
    CHECK(cfg.solver.instability_policy == "error");
    Json e = base_doc();
    CHECK_THROWS_AS(apply_env_overrides(e, {{"HEATRECT_BATHS__5__TEMPERATURE", "1"}}), ConfigError);
}

TEST_CASE("config hash covers physics only") {
    RunConfig a = parse_config(base_doc());
    RunConfig b = a;
    b.output.directory = "elsewhere";
    b.output.precision = 6;
    CHECK(config_hash(a) == config_hash(b));
    b.model.c0 = 0.21;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(hex64(0x1234abcdULL) == "000000001234abcd");
}

TEST_CASE("sweep grids") {
    SweepAxis a{"model.omega_d", 1.0, 2.0, 3};
    SweepAxis b{"baths.1.temperature", 0.5, 0.6, 2};
    const auto g = grid_coordinates({a, b});
    REQUIRE(g.size() == 6);
    CHECK(g[1] == std::vector<double>{1.0, 0.6});
    CHECK(g[2] == std::vector<double>{1.5, 0.5});
    CHECK(grid_coordinates({}).size() == 1);
    CHECK(axis_column("model.omega_d") == "omega_d");
    CHECK(axis_column("baths.2.temperature") == "baths_2_temperature");
    RunConfig base = parse_config(base_doc());
    base.sweep.axes = {a, b};
    const RunConfig p = config_at(base, g[5]);
    CHECK(*p.model.omega_d == 2.0);
    CHECK(p.baths[1].temperature == 0.6);
}

TEST_CASE("usage, config, validation and io errors map to exit codes") {
    TempDir tmp("errors");
    CHECK(cli({}).code == exit_code::usage);
    CHECK(cli({"bogus-command"}).code == exit_code::usage);
    CHECK(cli({"static-currents"}).code == exit_code::usage);
    const CliRun v = cli({"--version"});
    CHECK(v.code == exit_code::ok);
    CHECK(v.out.find("1.0.0") != std::string::npos);

    const CliRun missing = cli({"static-currents", "--config", (tmp.path / "nope.json").string()});
    CHECK(missing.code == exit_code::io);
    const Json e = Json::parse(missing.err);
    CHECK(e["error"]["kind"] == "io");
    CHECK(e["error"]["exit_code"] == exit_code::io);

    Json d = base_doc();
    d["extra"] = 1;
    CHECK(cli({"static-currents", "--config", write_json(tmp.path / "c1.json", d)}).code == exit_code::config);
    std::ofstream(tmp.path / "broken.json") << "{ not json";
    CHECK(cli({"static-currents", "--config", (tmp.path / "broken.json").string()}).code == exit_code::config);

    d = base_doc();
    d["baths"][1]["node"] = 7;
    const CliRun val = cli({"static-currents", "--config", write_json(tmp.path / "c2.json", d), "--quiet"});
    CHECK(val.code == exit_code::validation);
    CHECK(Json::parse(val.err)["error"]["kind"] == "validation");

    d = base_doc();
    d["solver"] = {{"instability_policy", "error"}};
    d["model"]["v1"] = 1.0;
    d["model"]["omega_d"] = 4.1053;
    d["baths"][0]["gamma"] = 0.001;
    d["baths"][1]["gamma"] = 0.001;
    const CliRun unstable = cli({"driven-currents", "--config", write_json(tmp.path / "c3.json", d), "--quiet",
                                 "--out", (tmp.path / "o3").string()});
    CHECK(unstable.code == exit_code::solver);
    CHECK(Json::parse(unstable.err)["error"]["kind"] == "instability");

    CHECK(exit_code_for(ErrorKind::domain) == exit_code::validation);
    CHECK(exit_code_for(ErrorKind::unsupported) == exit_code::validation);
    CHECK(exit_code_for(ErrorKind::singular) == exit_code::solver);
    CHECK(exit_code_for(ErrorKind::quadrature) == exit_code::solver);
}

TEST_CASE("static-currents writes csv and json with provenance metadata") {
    TempDir tmp("static");
    Json d = base_doc();
    d["model"].erase("omega_d");
    const std::string cfg = write_json(tmp.path / "static.json", d);
    const CliRun r = cli({"static-currents", "--config", cfg, "--out", tmp.path.string(), "--quiet", "--emit-gnuplot"});
    REQUIRE(r.code == exit_code::ok);
    const std::string csv = slurp(tmp.path / "static-currents.csv");
    CHECK(csv.find("# tool: heatrect 1.0.0") != std::string::npos);
    CHECK(csv.find("# config_hash: fnv1a64:" + hex64(config_hash(parse_config(d)))) != std::string::npos);
    const auto rows = csv_rows(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][3] == "heat");
    CHECK(std::stod(rows[1][3]) == Approx(2.851099212e-5).epsilon(1e-7));
    CHECK(std::stod(rows[2][3]) == Approx(-2.851099212e-5).epsilon(1e-7));
    const Json j = Json::parse(slurp(tmp.path / "static-currents.json"));
    CHECK(j["columns"][3] == "heat");
    CHECK(j["config"].contains("model"));
    CHECK_FALSE(j["config"].contains("output"));
    CHECK(fs::exists(tmp.path / "static-currents.gp"));
}

TEST_CASE("one-point sweep equals the single run") {
    RunConfig cfg = parse_config(base_doc());
    const CommandResult single = run_command("driven-currents", cfg, 1, false);
    cfg.sweep.axes = {{"model.omega_d", 0.9633, 0.9633, 1}};
    const CommandResult map = run_command("rectification-map", cfg, 1, false);
    REQUIRE(map.table.rows.size() == 1);
    const auto& cols = map.table.columns;
    const auto at = [&](const std::string& name) {
        const auto it = std::find(cols.begin(), cols.end(), name);
        REQUIRE(it != cols.end());
        return std::get<double>(map.table.rows[0][static_cast<std::size_t>(it - cols.begin())]);
    };
    const double q_single = std::get<double>(single.table.rows[0][3]);
    // The map integrates forward and swapped temperatures as one vector integrand, so agreement
    // with the single run is to rounding; against the same library call it is exact.
    CHECK(at("q_fwd") == Approx(q_single).epsilon(1e-12));
    CHECK(at("q_fwd") == rectification_point(build_model(cfg), 0.9633, 0.2).q_fwd);
    CHECK(at("omega_d") == 0.9633);
    const CurrentsReport direct = averaged_currents(build_model(cfg));
    CHECK(q_single == direct.heat[0]);
}

TEST_CASE("sweep output is byte-identical across worker counts") {
    TempDir tmp("determinism");
    Json d = base_doc();
    d["sweep"] = {{"axes", Json::array({{{"path", "model.omega_d"}, {"start", 0.8}, {"stop", 3.2}, {"count", 4}},
                                        {{"path", "model.c0"}, {"start", 0.1}, {"stop", 0.3}, {"count", 2}}})}};
    const std::string cfg = write_json(tmp.path / "map.json", d);
    for (const std::string sub : {"rectification-map", "stability-map"}) {
        REQUIRE(cli({sub, "--config", cfg, "--out", (tmp.path / "w1").string(), "--workers", "1", "--quiet"}).code == 0);
        REQUIRE(cli({sub, "--config", cfg, "--out", (tmp.path / "w3").string(), "--workers", "3", "--quiet"}).code == 0);
        CHECK(slurp(tmp.path / "w1" / (sub + ".csv")) == slurp(tmp.path / "w3" / (sub + ".csv")));
        CHECK(slurp(tmp.path / "w1" / (sub + ".json")) == slurp(tmp.path / "w3" / (sub + ".json")));
        CHECK(csv_rows(slurp(tmp.path / "w1" / (sub + ".csv"))).size() == 9);
    }
}

TEST_CASE("transistor subcommands") {
    RunConfig cfg = parse_config(base_doc());
    cfg.sweep.axes = {{"model.omega_d", 2.0, 3.0, 3}};
    const CommandResult dyn = run_command("transistor-dynamic", cfg, 1, false);
    REQUIRE(dyn.table.rows.size() == 3);
    const auto col = [](const ResultTable& t, const std::string& n) {
        return static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), n) - t.columns.begin());
    };
    for (const auto& row : dyn.table.rows) CHECK(std::abs(std::get<double>(row[col(dyn.table, "residual")])) < 1e-4);

    const Json doc = Json::parse(R"({
      "model": {"type": "generic", "masses": [1, 1, 1], "v0": [1.3, -0.3, 0, -0.3, 1.8, -0.3, 0, -0.3, 1.3]},
      "baths": [{"node": 0, "temperature": 1.0}, {"node": 2, "temperature": 1.0}, {"node": 1, "temperature": 1.1}],
      "sweep": {"axes": [{"path": "baths.2.temperature", "start": 0.9, "stop": 1.3, "count": 2}]}
    })");
    const CommandResult st = run_command("transistor-static", parse_config(doc), 1, false);
    REQUIRE(st.table.rows.size() == 2);
    for (const auto& row : st.table.rows) {
        CHECK(std::get<double>(row[col(st.table, "a1")]) == Approx(-0.5).epsilon(1e-6));
        CHECK(std::get<double>(row[col(st.table, "a1_integral")]) == Approx(-0.5).epsilon(1e-6));
    }
}

TEST_CASE("stability-map flags the parametric tongue") {
    RunConfig cfg = parse_config(base_doc());
    cfg.model.v1 = 1.0;
    cfg.baths[0].gamma = cfg.baths[1].gamma = 0.001;
    cfg.sweep.axes = {{"model.omega_d", 4.1053, 4.1053, 1}};
    const CommandResult r = run_command("stability-map", cfg, 1, false);
    const auto& cols = r.table.columns;
    const auto idx = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "stable") - cols.begin());
    CHECK(std::get<bool>(r.table.rows[0][idx]) == false);
}

TEST_CASE("installed executable") {
    const char* exe = std::getenv("HEATRECT_CLI");
    if (!exe) SKIP("HEATRECT_CLI not set");
    auto status = [&](const std::string& args) {
        const int s = std::system((std::string(exe) + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(status("--version") == 0);
    CHECK(status("--help") == 0);
    CHECK(status("") == exit_code::usage);
    CHECK(status("static-currents --config /nonexistent/heatrect.json") == exit_code::io);
}
