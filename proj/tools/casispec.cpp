// casispec command-line tool: forward Casimir force curves from dielectric
// models, synthetic dataset generation, forest training, and spectrum
// reconstruction, driven by a single JSON config with per-subcommand
// sections. Progress goes to stderr; data goes to files.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "casispec/analysis.hpp"
#include "casispec/constants.hpp"
#include "casispec/errors.hpp"
#include "casispec/forest.hpp"
#include "casispec/io.hpp"
#include "casispec/lifshitz.hpp"
#include "casispec/parallel.hpp"
#include "casispec/synth.hpp"
#include "casispec/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace casispec;

namespace {

// ---------------------------------------------------------------- config --

void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("--set expects key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;  // bare strings need no quotes

    json* node = &cfg;
    std::size_t pos = 0;
    for (;;) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw config_error("--set: empty key in '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json cfg = read_json_file(path);
    if (!cfg.is_object()) throw config_error("config must be a JSON object");
    for (const auto& assignment : overrides) apply_override(cfg, assignment);
    if (!cfg.contains("config_version"))
        throw config_error("config: missing key 'config_version'");
    if (cfg.at("config_version") != 1)
        throw config_error("config: unsupported config_version (expected 1)");
    return cfg;
}

const json& section(const json& cfg, const char* name) {
    if (!cfg.contains(name))
        throw config_error(std::string("config: missing section '") + name + "'");
    if (!cfg.at(name).is_object())
        throw config_error(std::string("config: section '") + name + "' must be an object");
    return cfg.at(name);
}

json provenance(const json& cfg) {
    return json{{"version", casispec::version}, {"config_echo", cfg}};
}

// Frequencies may be given in rad/s or eV (omega = E * e / hbar).
double read_frequency(const json& obj, const std::string& base, const std::string& context) {
    const std::string rad = base + "_rad_s";
    const std::string ev = base + "_eV";
    const bool has_rad = obj.contains(rad);
    const bool has_ev = obj.contains(ev);
    if (has_rad == has_ev)
        throw config_error(context + ": provide exactly one of '" + rad + "' or '" + ev + "'");
    return has_rad ? obj.at(rad).get<double>()
                   : obj.at(ev).get<double>() * constants::ev_to_rad_per_s;
}

// ------------------------------------------------------------- materials --

DrudeParams parse_drude(const json& j, const std::string& context, bool allow_zero_plasma) {
    reject_unknown_keys(
        j, {"plasma_frequency_rad_s", "plasma_frequency_eV", "damping_rad_s", "damping_eV"},
        context);
    DrudeParams d;
    d.plasma_frequency = read_frequency(j, "plasma_frequency", context);
    d.damping = read_frequency(j, "damping", context);
    if (!allow_zero_plasma && !(d.plasma_frequency > 0.0))
        throw config_error(context + ": plasma frequency must be > 0");
    return d;
}

DielectricModel parse_model(const json& j, const std::string& context) {
    reject_unknown_keys(j, {"type", "drude", "oscillators"}, context);
    DielectricModel model;
    if (j.contains("drude")) model.drude = parse_drude(j.at("drude"), context + ".drude", false);
    if (j.contains("oscillators")) {
        for (const auto& o : j.at("oscillators")) {
            const std::string octx = context + ".oscillators";
            reject_unknown_keys(o,
                                {"strength_rad_s", "strength_eV", "resonance_rad_s", "resonance_eV",
                                 "damping_rad_s", "damping_eV"},
                                octx);
            model.oscillators.push_back({read_frequency(o, "strength", octx),
                                         read_frequency(o, "resonance", octx),
                                         read_frequency(o, "damping", octx)});
        }
    }
    model.validate();
    return model;
}

std::unique_ptr<Material> parse_material(const json& j, const std::string& context) {
    if (!j.is_object() || !j.contains("type"))
        throw config_error(context + ": material needs a 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "vacuum") {
        reject_unknown_keys(j, {"type"}, context);
        return std::make_unique<ConstantMaterial>(1.0);
    }
    if (type == "constant") {
        reject_unknown_keys(j, {"type", "eps"}, context);
        return std::make_unique<ConstantMaterial>(j.at("eps").get<double>());
    }
    if (type == "drude_lorentz") {
        return std::make_unique<ModelMaterial>(parse_model(j, context));
    }
    if (type == "tabulated") {
        reject_unknown_keys(j, {"type", "csv", "drude_extrapolation"}, context);
        const Csv csv = read_csv(j.at("csv").get<std::string>());
        expect_header(csv, {"omega_rad_s", "eps_imag"}, context);
        TabulatedOptics table;
        for (const auto& row : csv.rows) {
            table.omega.push_back(parse_double(row[0]));
            table.eps_imag.push_back(parse_double(row[1]));
        }
        table.low_freq_extrapolation =
            parse_drude(j.at("drude_extrapolation"), context + ".drude_extrapolation", true);
        return std::make_unique<TabulatedMaterial>(std::move(table));
    }
    throw config_error(context + ": unknown material type '" + type + "'");
}

// ------------------------------------------------------- shared builders --

std::vector<double> parse_separations(const json& j, const std::string& context) {
    if (j.is_array()) return j.get<std::vector<double>>();
    reject_unknown_keys(j, {"min_m", "max_m", "count"}, context);
    return uniform_separations(j.at("min_m").get<double>(), j.at("max_m").get<double>(),
                               j.at("count").get<std::size_t>());
}

FrequencyGrid parse_grid(const json& parent, const std::string& context) {
    if (!parent.contains("grid")) return FrequencyGrid::default_grid();
    const json& j = parent.at("grid");
    reject_unknown_keys(j, {"points", "omega_min_rad_s", "energy_min_eV", "omega_max_rad_s",
                            "energy_max_eV"},
                        context + ".grid");
    const double lo = j.contains("omega_min_rad_s")
                          ? j.at("omega_min_rad_s").get<double>()
                          : j.at("energy_min_eV").get<double>() * constants::ev_to_rad_per_s;
    const double hi = j.contains("omega_max_rad_s")
                          ? j.at("omega_max_rad_s").get<double>()
                          : j.at("energy_max_eV").get<double>() * constants::ev_to_rad_per_s;
    return FrequencyGrid::log_spaced(j.at("points").get<std::size_t>(), lo, hi);
}

SamplingRanges parse_ranges(const json& parent, const std::string& context) {
    if (!parent.contains("ranges")) return SamplingRanges::drude_only();
    const json& j = parent.at("ranges");
    reject_unknown_keys(j,
                        {"preset", "p_drude", "log10_plasma_frequency", "log10_drude_damping",
                         "oscillator_count", "log10_strength", "log10_resonance",
                         "log10_osc_damping"},
                        context + ".ranges");
    SamplingRanges r = SamplingRanges::drude_only();
    if (j.contains("preset")) {
        const std::string preset = j.at("preset").get<std::string>();
        if (preset == "drude_only")
            r = SamplingRanges::drude_only();
        else if (preset == "drude_lorentz")
            r = SamplingRanges::drude_lorentz();
        else
            throw config_error(context + ".ranges: unknown preset '" + preset + "'");
    }
    if (j.contains("p_drude")) r.p_drude = j.at("p_drude").get<double>();
    if (j.contains("log10_plasma_frequency"))
        r.log10_plasma_frequency = j.at("log10_plasma_frequency").get<std::array<double, 2>>();
    if (j.contains("log10_drude_damping"))
        r.log10_drude_damping = j.at("log10_drude_damping").get<std::array<double, 2>>();
    if (j.contains("oscillator_count"))
        r.oscillator_count = j.at("oscillator_count").get<std::array<int, 2>>();
    if (j.contains("log10_strength"))
        r.log10_strength = j.at("log10_strength").get<std::array<double, 2>>();
    if (j.contains("log10_resonance"))
        r.log10_resonance = j.at("log10_resonance").get<std::array<double, 2>>();
    if (j.contains("log10_osc_damping"))
        r.log10_osc_damping = j.at("log10_osc_damping").get<std::array<double, 2>>();
    r.validate();
    return r;
}

Hyperparams parse_hyper(const json& parent, const std::string& context) {
    Hyperparams h;
    if (!parent.contains("hyper")) return h;
    const json& j = parent.at("hyper");
    reject_unknown_keys(j,
                        {"n_trees", "max_depth", "min_samples_leaf", "max_features_fraction",
                         "bootstrap", "n_ensembles"},
                        context + ".hyper");
    if (j.contains("n_trees")) h.n_trees = j.at("n_trees").get<std::size_t>();
    if (j.contains("max_depth")) h.max_depth = j.at("max_depth").get<std::size_t>();
    if (j.contains("min_samples_leaf"))
        h.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
    if (j.contains("max_features_fraction"))
        h.max_features_fraction = j.at("max_features_fraction").get<double>();
    if (j.contains("bootstrap")) h.bootstrap = j.at("bootstrap").get<bool>();
    if (j.contains("n_ensembles")) h.n_ensembles = j.at("n_ensembles").get<std::size_t>();
    h.validate();
    return h;
}

// Dataset spec shared by generate, sweep.base and experiment.training.
DatasetSpec parse_dataset_spec(const json& j, const std::string& context, bool need_separations) {
    reject_unknown_keys(j,
                        {"n_samples", "seed", "separations_m", "grid", "ranges", "temperature_K",
                         "curve_kind", "sphere_radius_m", "validation_fraction", "split_seed",
                         "output_dir"},
                        context);
    DatasetSpec spec;
    spec.n_samples = j.at("n_samples").get<std::size_t>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("separations_m"))
        spec.separations = parse_separations(j.at("separations_m"), context + ".separations_m");
    else if (need_separations)
        spec.separations = uniform_separations(40e-9, 5e-6, 64);
    else
        spec.separations = {1e-7, 2e-7};  // placeholder, replaced downstream
    spec.grid = parse_grid(j, context);
    spec.ranges = parse_ranges(j, context);
    if (j.contains("temperature_K")) spec.temperature = j.at("temperature_K").get<double>();
    if (j.contains("curve_kind")) {
        const std::string kind = j.at("curve_kind").get<std::string>();
        if (kind == "pressure")
            spec.curve_kind = CurveKind::pressure;
        else if (kind == "gradient")
            spec.curve_kind = CurveKind::gradient;
        else
            throw config_error(context + ": unknown curve_kind '" + kind + "'");
    }
    if (j.contains("sphere_radius_m")) spec.sphere_radius = j.at("sphere_radius_m").get<double>();
    spec.validate();
    return spec;
}

// Staged directory output: assembled under <dir>.tmp, renamed on commit.
struct StagedDir {
    fs::path final_path;
    fs::path tmp_path;
    bool committed = false;

    explicit StagedDir(const fs::path& out)
        : final_path(out), tmp_path(out.string() + ".tmp") {
        fs::remove_all(tmp_path);
        fs::create_directories(tmp_path);
    }
    void commit() {
        fs::remove_all(final_path);
        fs::rename(tmp_path, final_path);
        committed = true;
    }
    ~StagedDir() {
        if (!committed) {
            std::error_code ec;
            fs::remove_all(tmp_path, ec);
        }
    }
};

std::string curve_csv_text(const ForceCurve& curve) {
    std::ostringstream out;
    out << "d_m,value\n";
    for (std::size_t i = 0; i < curve.separations.size(); ++i)
        out << format_double(curve.separations[i]) << ',' << format_double(curve.values[i]) << '\n';
    return out.str();
}

fs::path sidecar_path(fs::path p) {
    p.replace_extension(".json");
    return p;
}

ForceCurve read_curve_csv(const fs::path& path) {
    const Csv csv = read_csv(path);
    expect_header(csv, {"d_m", "value"}, path.string());
    ForceCurve curve;
    for (const auto& row : csv.rows) {
        curve.separations.push_back(parse_double(row[0]));
        curve.values.push_back(parse_double(row[1]));
    }
    const fs::path side = sidecar_path(path);
    if (!fs::exists(side)) throw input_error("curve file: missing sidecar " + side.string());
    const json meta = read_json_file(side);
    if (!meta.contains("kind")) throw input_error("curve sidecar: missing 'kind'");
    const std::string kind = meta.at("kind").get<std::string>();
    if (kind == "pressure")
        curve.kind = CurveKind::pressure;
    else if (kind == "gradient")
        curve.kind = CurveKind::gradient;
    else
        throw input_error("curve sidecar: unknown kind '" + kind + "'");
    curve.validate();
    return curve;
}

std::string spectrum_csv_text(const SpectrumSample& s) {
    std::ostringstream out;
    out << "omega_rad_s,eps_real,eps_imag\n";
    for (std::size_t k = 0; k < s.grid.size(); ++k)
        out << format_double(s.grid.omega[k]) << ',' << format_double(s.eps_real[k]) << ','
            << format_double(s.eps_imag[k]) << '\n';
    return out.str();
}

SpectrumSample read_spectrum_csv(const fs::path& path) {
    const Csv csv = read_csv(path);
    expect_header(csv, {"omega_rad_s", "eps_real", "eps_imag"}, path.string());
    SpectrumSample s;
    for (const auto& row : csv.rows) {
        s.grid.omega.push_back(parse_double(row[0]));
        s.eps_real.push_back(parse_double(row[1]));
        s.eps_imag.push_back(parse_double(row[2]));
    }
    s.validate();
    return s;
}

// ------------------------------------------------------------- commands --

int cmd_simulate(const json& cfg) {
    const json& j = section(cfg, "simulate");
    reject_unknown_keys(j,
                        {"material_1", "material_2", "separations_m", "temperature_K", "kind",
                         "sphere_radius_m", "term_tolerance", "quadrature_tolerance", "output",
                         "output_format"},
                        "simulate");
    const auto mat1 = parse_material(j.at("material_1"), "simulate.material_1");
    const auto mat2 = parse_material(j.at("material_2"), "simulate.material_2");
    const auto separations = parse_separations(j.at("separations_m"), "simulate.separations_m");

    MatsubaraSettings settings;
    if (j.contains("temperature_K")) settings.temperature = j.at("temperature_K").get<double>();
    if (j.contains("term_tolerance")) settings.term_tolerance = j.at("term_tolerance").get<double>();
    if (j.contains("quadrature_tolerance"))
        settings.quadrature_tolerance = j.at("quadrature_tolerance").get<double>();

    const std::string kind_name = j.contains("kind") ? j.at("kind").get<std::string>() : "pressure";
    CurveKind kind;
    if (kind_name == "pressure")
        kind = CurveKind::pressure;
    else if (kind_name == "gradient")
        kind = CurveKind::gradient;
    else
        throw config_error("simulate: unknown kind '" + kind_name + "'");

    std::optional<SphereGeometry> geometry;
    if (kind == CurveKind::gradient) {
        if (!j.contains("sphere_radius_m"))
            throw config_error("simulate: gradient curves need sphere_radius_m");
        geometry = SphereGeometry{j.at("sphere_radius_m").get<double>()};
    }

    const std::string format =
        j.contains("output_format") ? j.at("output_format").get<std::string>() : "curve";
    if (format != "curve" && format != "measured")
        throw config_error("simulate: output_format must be 'curve' or 'measured'");
    if (format == "measured" && kind != CurveKind::gradient)
        throw config_error("simulate: measured output requires kind = gradient");

    std::fprintf(stderr, "simulate: %zu separations, kind=%s\n", separations.size(),
                 kind_name.c_str());
    const ForceCurve curve = force_curve(separations, *mat1, *mat2, settings, kind, geometry);

    const fs::path out = j.at("output").get<std::string>();
    json meta = provenance(cfg);
    meta["kind"] = kind_name;
    meta["temperature_K"] = settings.temperature;
    if (geometry) meta["radius_m"] = geometry->radius;

    if (format == "measured") {
        std::ostringstream csv;
        csv << "d_m,gradient_N_per_m\n";
        for (std::size_t i = 0; i < curve.separations.size(); ++i)
            csv << format_double(curve.separations[i]) << ','
                << format_double(curve.values[i]) << '\n';
        write_json_file(sidecar_path(out), meta);
        atomic_write_file(out, csv.str());
    } else {
        write_json_file(sidecar_path(out), meta);
        atomic_write_file(out, curve_csv_text(curve));
    }
    std::fprintf(stderr, "simulate: wrote %s\n", out.string().c_str());
    return 0;
}

int cmd_generate(const json& cfg) {
    const json& j = section(cfg, "generate");
    const DatasetSpec spec = parse_dataset_spec(j, "generate", true);
    const double fraction =
        j.contains("validation_fraction") ? j.at("validation_fraction").get<double>() : 0.2;
    const std::uint64_t split_seed =
        j.contains("split_seed") ? j.at("split_seed").get<std::uint64_t>() : spec.seed;
    const fs::path out = j.at("output_dir").get<std::string>();

    std::fprintf(stderr, "generate: %zu samples, %zu separations\n", spec.n_samples,
                 spec.separations.size());
    Dataset dataset = generate_dataset(spec);
    split(dataset, fraction, split_seed);

    StagedDir staged(out);
    write_dataset(staged.tmp_path, dataset);
    json meta = read_json_file(staged.tmp_path / "spec.json");
    meta["version"] = casispec::version;
    meta["config_echo"] = cfg;
    write_json_file(staged.tmp_path / "spec.json", meta);
    staged.commit();
    std::fprintf(stderr, "generate: wrote %s\n", out.string().c_str());
    return 0;
}

int cmd_train(const json& cfg) {
    const json& j = section(cfg, "train");
    reject_unknown_keys(j,
                        {"dataset_dir", "hyper", "grid", "folds", "holdout_fraction", "seed",
                         "model_output", "scores_output"},
                        "train");
    const Dataset dataset = read_dataset(j.at("dataset_dir").get<std::string>());
    const auto train = dataset.train_view();
    const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
    const Hyperparams hyper = parse_hyper(j, "train");

    HyperGrid grid;
    grid.n_trees = {hyper.n_trees};
    grid.max_depth = {hyper.max_depth};
    grid.min_samples_leaf = {hyper.min_samples_leaf};
    grid.max_features_fraction = {hyper.max_features_fraction};
    grid.bootstrap = hyper.bootstrap;
    grid.n_ensembles = hyper.n_ensembles;
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown_keys(g, {"n_trees", "max_depth", "min_samples_leaf", "max_features_fraction"},
                            "train.grid");
        if (g.contains("n_trees")) grid.n_trees = g.at("n_trees").get<std::vector<std::size_t>>();
        if (g.contains("max_depth"))
            grid.max_depth = g.at("max_depth").get<std::vector<std::size_t>>();
        if (g.contains("min_samples_leaf"))
            grid.min_samples_leaf = g.at("min_samples_leaf").get<std::vector<std::size_t>>();
        if (g.contains("max_features_fraction"))
            grid.max_features_fraction = g.at("max_features_fraction").get<std::vector<double>>();
    }
    const std::size_t folds = j.contains("folds") ? j.at("folds").get<std::size_t>() : 2;
    std::optional<double> holdout;
    if (j.contains("holdout_fraction")) holdout = j.at("holdout_fraction").get<double>();

    std::fprintf(stderr, "train: %zu training samples, %zu grid points\n", train.rows.size(),
                 grid.n_trees.size() * grid.max_depth.size() * grid.min_samples_leaf.size() *
                     grid.max_features_fraction.size());
    const GridSearchResult searched = grid_search(train, grid, folds, seed, holdout);

    std::ostringstream scores;
    scores << "n_trees,max_depth,min_samples_leaf,max_features_fraction,bootstrap,n_ensembles";
    const std::size_t n_folds = searched.table.front().fold_r2.size();
    for (std::size_t f = 0; f < n_folds; ++f) scores << ",fold" << f << "_r2";
    scores << ",mean_r2\n";
    for (const auto& row : searched.table) {
        scores << row.hyper.n_trees << ',' << row.hyper.max_depth << ','
               << row.hyper.min_samples_leaf << ',' << format_double(row.hyper.max_features_fraction)
               << ',' << (row.hyper.bootstrap ? "true" : "false") << ',' << row.hyper.n_ensembles;
        for (const double r2 : row.fold_r2) scores << ',' << format_double(r2);
        scores << ',' << format_double(row.mean_r2) << '\n';
    }

    std::fprintf(stderr, "train: best point n_trees=%zu max_depth=%zu; fitting final forest\n",
                 searched.best.n_trees, searched.best.max_depth);
    const Forest forest = fit_forest(train, searched.best, derive_stream(seed, stream_tag::train));

    json model = forest_to_json(forest);
    model["version"] = casispec::version;
    model["config_echo"] = cfg;
    atomic_write_file(j.at("model_output").get<std::string>(), model.dump() + "\n");
    atomic_write_file(j.at("scores_output").get<std::string>(), scores.str());
    std::fprintf(stderr, "train: wrote %s and %s\n",
                 j.at("model_output").get<std::string>().c_str(),
                 j.at("scores_output").get<std::string>().c_str());
    return 0;
}

int cmd_reconstruct(const json& cfg) {
    const json& j = section(cfg, "reconstruct");
    reject_unknown_keys(j, {"model", "curve", "output"}, "reconstruct");
    const Forest forest = load_forest(j.at("model").get<std::string>());
    const ForceCurve curve = read_curve_csv(j.at("curve").get<std::string>());
    const SpectrumSample spectrum = forest.predict(curve);

    const fs::path out = j.at("output").get<std::string>();
    json meta = provenance(cfg);
    meta["dataset_spec_hash"] = forest.dataset_spec_hash;
    write_json_file(sidecar_path(out), meta);
    atomic_write_file(out, spectrum_csv_text(spectrum));
    std::fprintf(stderr, "reconstruct: wrote %s\n", out.string().c_str());
    return 0;
}

int cmd_sweep(const json& cfg) {
    const json& j = section(cfg, "sweep");
    reject_unknown_keys(j, {"base", "d_max_m", "d_min_m", "validation_fraction", "hyper",
                            "output_dir"},
                        "sweep");
    SweepSpec spec;
    spec.base = parse_dataset_spec(section(j, "base"), "sweep.base", true);
    spec.d_max = j.at("d_max_m").get<std::vector<double>>();
    if (j.contains("d_min_m")) spec.d_min = j.at("d_min_m").get<double>();
    if (j.contains("validation_fraction"))
        spec.validation_fraction = j.at("validation_fraction").get<double>();
    const Hyperparams hyper = parse_hyper(j, "sweep");

    std::fprintf(stderr, "sweep: %zu legs over %zu samples\n", spec.d_max.size(),
                 spec.base.n_samples);
    const SweepResult result = dmax_sweep(spec, hyper);

    std::ostringstream fig2j;
    fig2j << "d_max_m,mean_lowfreq_abs_err_eps_real,band_lo,band_hi,validation_r2\n";
    for (const auto& leg : result.legs)
        fig2j << format_double(leg.d_max) << ',' << format_double(leg.mean_lowfreq_abs_err_eps_real)
              << ',' << format_double(leg.band.lo) << ',' << format_double(leg.band.hi) << ','
              << format_double(leg.validation_r2) << '\n';

    std::ostringstream per_freq;
    per_freq << "d_max_m,omega_rad_s,mae_eps_real,mae_eps_imag\n";
    for (const auto& leg : result.legs)
        for (std::size_t k = 0; k < leg.per_frequency.grid.size(); ++k)
            per_freq << format_double(leg.d_max) << ','
                     << format_double(leg.per_frequency.grid.omega[k]) << ','
                     << format_double(leg.per_frequency.mae_eps_real[k]) << ','
                     << format_double(leg.per_frequency.mae_eps_imag[k]) << '\n';

    StagedDir staged(j.at("output_dir").get<std::string>());
    atomic_write_file(staged.tmp_path / "fig2j.csv", fig2j.str());
    atomic_write_file(staged.tmp_path / "per_freq_error.csv", per_freq.str());
    write_json_file(staged.tmp_path / "sweep.json", provenance(cfg));
    staged.commit();
    std::fprintf(stderr, "sweep: wrote %s\n", j.at("output_dir").get<std::string>().c_str());
    return 0;
}

int cmd_experiment(const json& cfg) {
    const json& j = section(cfg, "experiment");
    reject_unknown_keys(j, {"input", "n_bins", "noise", "training", "validation_fraction", "hyper",
                            "reference", "output_dir"},
                        "experiment");
    MeasuredGradientFile file = read_measured_file(j.at("input").get<std::string>());
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        reject_unknown_keys(n, {"sigma_rel", "seed"}, "experiment.noise");
        file = add_relative_noise(std::move(file), n.at("sigma_rel").get<double>(),
                                  n.at("seed").get<std::uint64_t>());
    }
    const std::size_t n_bins = j.contains("n_bins") ? j.at("n_bins").get<std::size_t>() : 32;
    const DatasetSpec training = parse_dataset_spec(section(j, "training"), "experiment.training",
                                                    false);
    const double fraction =
        j.contains("validation_fraction") ? j.at("validation_fraction").get<double>() : 0.2;
    const Hyperparams hyper = parse_hyper(j, "experiment");

    std::optional<SpectrumSample> reference;
    if (j.contains("reference")) {
        const json& r = j.at("reference");
        reject_unknown_keys(r, {"material", "csv"}, "experiment.reference");
        if (r.contains("material") == r.contains("csv"))
            throw config_error("experiment.reference: provide exactly one of material, csv");
        if (r.contains("material")) {
            const DielectricModel model = parse_model(r.at("material"), "experiment.reference");
            reference = evaluate_spectrum(model, training.grid);
        } else {
            reference = read_spectrum_csv(r.at("csv").get<std::string>());
            if (!(reference->grid == training.grid))
                throw input_error("experiment.reference: spectrum grid differs from training grid");
        }
    }

    std::fprintf(stderr, "experiment: %zu rows -> %zu bins, training %zu samples\n",
                 file.separations.size(), n_bins, training.n_samples);
    const ExperimentResult result =
        reconstruct_experiment(file, n_bins, training, hyper, fraction, reference);

    std::ostringstream recon;
    recon << "omega_rad_s,eps_real_pred,eps_imag_pred";
    if (reference) recon << ",eps_real_ref,eps_imag_ref";
    recon << '\n';
    for (std::size_t k = 0; k < result.reconstruction.grid.size(); ++k) {
        recon << format_double(result.reconstruction.grid.omega[k]) << ','
              << format_double(result.reconstruction.eps_real[k]) << ','
              << format_double(result.reconstruction.eps_imag[k]);
        if (reference)
            recon << ',' << format_double(reference->eps_real[k]) << ','
                  << format_double(reference->eps_imag[k]);
        recon << '\n';
    }

    json report = provenance(cfg);
    report["validation_r2"] = result.report.validation_r2;
    report["val_lowfreq_abs_err_eps_real"] = {{"mean", result.report.val_lowfreq_band.mean},
                                              {"band_lo", result.report.val_lowfreq_band.lo},
                                              {"band_hi", result.report.val_lowfreq_band.hi}};
    if (result.report.reference) {
        const auto& ref = *result.report.reference;
        report["reference_errors"] = {
            {"lowfreq_abs_err_eps_real", ref.lowfreq_abs_err_eps_real},
            {"mean_abs_err_eps_real", ref.mean_abs_err_eps_real},
            {"median_rel_err_eps_imag", ref.median_rel_err_eps_imag},
            {"median_rel_err_eps_imag_lowest_decade", ref.median_rel_err_eps_imag_lowest_decade}};
    }

    StagedDir staged(j.at("output_dir").get<std::string>());
    atomic_write_file(staged.tmp_path / "fig4_recon.csv", recon.str());
    atomic_write_file(staged.tmp_path / "binned.csv", curve_csv_text(result.binned));
    write_json_file(staged.tmp_path / "report.json", report);
    staged.commit();
    std::fprintf(stderr, "experiment: wrote %s\n", j.at("output_dir").get<std::string>().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Casimir force curves and machine-learned broadband permittivity reconstruction"};
    app.set_version_flag("--version", casispec::version);
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    int workers = 0;

    const std::vector<std::string> names{"simulate", "generate", "train",
                                         "reconstruct", "sweep", "experiment"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "JSON config file")->required();
        sub->add_option("--set", overrides, "override a config key: a.b.c=value");
        sub->add_option("--workers", workers, "worker thread cap (0 = hardware)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_max_workers(workers);
        const json cfg = load_config(config_path, overrides);
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "simulate") return cmd_simulate(cfg);
        if (name == "generate") return cmd_generate(cfg);
        if (name == "train") return cmd_train(cfg);
        if (name == "reconstruct") return cmd_reconstruct(cfg);
        if (name == "sweep") return cmd_sweep(cfg);
        if (name == "experiment") return cmd_experiment(cfg);
        std::fprintf(stderr, "unknown subcommand\n");
        return 2;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 3;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
