#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "casispec/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    CliResult run(const std::string& args) const {
        const fs::path out = dir / "__stdout", err = dir / "__stderr";
        const std::string cmd = std::string(CASISPEC_BIN) + " " + args + " >" + out.string() +
                                " 2>" + err.string();
        const int rc = std::system(cmd.c_str());
        CliResult r;
        r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    fs::path write_config(const json& cfg) const {
        const fs::path p = dir / "config.json";
        std::ofstream(p) << cfg.dump(2);
        return p;
    }
};

json gold_material() {
    return {{"type", "drude_lorentz"},
            {"drude", {{"plasma_frequency_rad_s", 1.37e16}, {"damping_rad_s", 5.3e13}}}};
}

json simulate_config(const fs::path& out, const json& mat1, const json& mat2) {
    return {{"config_version", 1},
            {"simulate",
             {{"material_1", mat1},
              {"material_2", mat2},
              {"separations_m", {{"min_m", 6e-8}, {"max_m", 4e-7}, {"count", 6}}},
              {"temperature_K", 300.0},
              {"kind", "pressure"},
              {"output", out.string()}}}};
}

}  // namespace

TEST_CASE("cli: --version and missing subcommand") {
    Scratch s("casispec_cli_version");
    const auto v = s.run("--version");
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);

    const auto none = s.run("");
    CHECK(none.code == 2);
}

TEST_CASE("cli simulate: vacuum gives a zero curve with a provenance sidecar") {
    Scratch s("casispec_cli_vacuum");
    const fs::path out = s.dir / "curve.csv";
    const json vacuum = {{"type", "vacuum"}};
    const auto cfg = s.write_config(simulate_config(out, vacuum, vacuum));
    const auto r = s.run("simulate -c " + cfg.string());
    CHECK(r.code == 0);

    const auto csv = casispec::parse_csv(slurp(out));
    CHECK(csv.rows.size() == 6);
    for (const auto& row : csv.rows) CHECK(row[1] == "0");

    const json sidecar = json::parse(slurp(s.dir / "curve.json"));
    CHECK(sidecar.at("kind") == "pressure");
    CHECK(sidecar.at("temperature_K") == 300.0);
    CHECK(sidecar.contains("version"));
    CHECK(sidecar.at("config_echo").at("config_version") == 1);
}

TEST_CASE("cli: unknown config keys are rejected with the key named") {
    Scratch s("casispec_cli_badkey");
    json cfg = simulate_config(s.dir / "c.csv", gold_material(), gold_material());
    cfg["simulate"]["surprise_knob"] = 1;
    const auto r = s.run("simulate -c " + s.write_config(cfg).string());
    CHECK(r.code == 2);
    CHECK(r.err.find("surprise_knob") != std::string::npos);
    CHECK_FALSE(fs::exists(s.dir / "c.csv"));
}

TEST_CASE("cli simulate: malformed tabulated csv exits 3 without partial output") {
    Scratch s("casispec_cli_badcsv");
    std::ofstream(s.dir / "bad.csv") << "omega_rad_s,eps_imag\n1e12,not_a_number\n";
    json tab = {{"type", "tabulated"},
                {"csv", (s.dir / "bad.csv").string()},
                {"drude_extrapolation",
                 {{"plasma_frequency_rad_s", 0.0}, {"damping_rad_s", 1e13}}}};
    const fs::path out = s.dir / "c.csv";
    const auto cfg = s.write_config(simulate_config(out, tab, gold_material()));
    const auto r = s.run("simulate -c " + cfg.string());
    CHECK(r.code == 3);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("cli: generate/train/reconstruct round trip, deterministic, workers-independent") {
    Scratch s("casispec_cli_pipeline");
    json cfg = {
        {"config_version", 1},
        {"generate",
         {{"n_samples", 24},
          {"seed", 9},
          {"separations_m", {{"min_m", 4e-8}, {"max_m", 1e-6}, {"count", 10}}},
          {"grid", {{"points", 12}, {"omega_min_rad_s", 1e11}, {"omega_max_rad_s", 1e19}}},
          {"ranges", {{"preset", "drude_only"}}},
          {"validation_fraction", 0.25},
          {"output_dir", (s.dir / "ds").string()}}},
        {"train",
         {{"dataset_dir", (s.dir / "ds").string()},
          {"hyper", {{"n_trees", 8}, {"n_ensembles", 1}}},
          {"folds", 2},
          {"seed", 3},
          {"model_output", (s.dir / "forest.json").string()},
          {"scores_output", (s.dir / "scores.csv").string()}}},
        {"reconstruct",
         {{"model", (s.dir / "forest.json").string()},
          {"curve", (s.dir / "probe.csv").string()},
          {"output", (s.dir / "spectrum.csv").string()}}}};
    const auto cfg_path = s.write_config(cfg);

    CHECK(s.run("generate -c " + cfg_path.string() + " --workers 1").code == 0);
    const std::string curves1 = slurp(s.dir / "ds" / "curves.csv");
    const std::string spectra1 = slurp(s.dir / "ds" / "spectra.csv");

    CHECK(s.run("generate -c " + cfg_path.string() + " --workers 2").code == 0);
    CHECK(slurp(s.dir / "ds" / "curves.csv") == curves1);
    CHECK(slurp(s.dir / "ds" / "spectra.csv") == spectra1);

    CHECK(s.run("train -c " + cfg_path.string()).code == 0);
    const std::string forest1 = slurp(s.dir / "forest.json");
    CHECK(s.run("train -c " + cfg_path.string() + " --workers 2").code == 0);
    CHECK(slurp(s.dir / "forest.json") == forest1);
    CHECK(fs::exists(s.dir / "scores.csv"));

    // probe curve: the first training curve, extracted from the dataset
    const auto curves = casispec::parse_csv(curves1);
    std::ofstream probe(s.dir / "probe.csv");
    probe << "d_m,value\n";
    const std::string first_id = curves.rows.front()[0];
    for (const auto& row : curves.rows)
        if (row[0] == first_id) probe << row[1] << ',' << row[2] << '\n';
    probe.close();
    std::ofstream(s.dir / "probe.json") << R"({"kind":"pressure"})";

    CHECK(s.run("reconstruct -c " + cfg_path.string()).code == 0);
    const std::string spec1 = slurp(s.dir / "spectrum.csv");
    CHECK(s.run("reconstruct -c " + cfg_path.string()).code == 0);
    CHECK(slurp(s.dir / "spectrum.csv") == spec1);
    CHECK(spec1.rfind("omega_rad_s,eps_real,eps_imag\n", 0) == 0);

    // separation mismatch is rejected with the offending separation named
    std::ofstream bad(s.dir / "probe.csv");
    bad << "d_m,value\n1e-08,-1\n2e-08,-0.5\n";
    bad.close();
    const auto r = s.run("reconstruct -c " + cfg_path.string());
    CHECK(r.code == 3);
    CHECK(r.err.find("separation") != std::string::npos);
}

TEST_CASE("cli experiment: missing sidecar is an input error") {
    Scratch s("casispec_cli_nosidecar");
    std::ofstream(s.dir / "meas.csv") << "d_m,gradient_N_per_m\n1e-7,-1\n2e-7,-0.5\n";
    json cfg = {{"config_version", 1},
                {"experiment",
                 {{"input", (s.dir / "meas.csv").string()},
                  {"n_bins", 2},
                  {"training",
                   {{"n_samples", 8},
                    {"seed", 1},
                    {"grid", {{"points", 8}, {"omega_min_rad_s", 1e11}, {"omega_max_rad_s", 1e19}}}}},
                  {"hyper", {{"n_trees", 2}, {"n_ensembles", 1}}},
                  {"output_dir", (s.dir / "out").string()}}}};
    const auto r = s.run("experiment -c " + s.write_config(cfg).string());
    CHECK(r.code == 3);
    CHECK(r.err.find("sidecar") != std::string::npos);
    CHECK_FALSE(fs::exists(s.dir / "out"));
}

TEST_CASE("cli: eV frequency inputs convert exactly") {
    Scratch s("casispec_cli_ev");
    // 1 eV = e/hbar rad/s; a Drude model given in eV must match the rad/s one
    const double ev = 1.602176634e-19 / 1.054571817e-34;
    json in_ev = {{"type", "drude_lorentz"},
                  {"drude", {{"plasma_frequency_eV", 9.0}, {"damping_eV", 0.035}}}};
    json in_rad = {{"type", "drude_lorentz"},
                   {"drude",
                    {{"plasma_frequency_rad_s", 9.0 * ev}, {"damping_rad_s", 0.035 * ev}}}};
    const auto cfg_ev = simulate_config(s.dir / "ev.csv", in_ev, in_ev);
    const auto cfg_rad = simulate_config(s.dir / "rad.csv", in_rad, in_rad);
    CHECK(s.run("simulate -c " + s.write_config(cfg_ev).string()).code == 0);
    fs::rename(s.dir / "config.json", s.dir / "c2.json");
    std::ofstream(s.dir / "config.json") << cfg_rad.dump(2);
    CHECK(s.run("simulate -c " + (s.dir / "config.json").string()).code == 0);
    CHECK(slurp(s.dir / "ev.csv") == slurp(s.dir / "rad.csv"));
}
