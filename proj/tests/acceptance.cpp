// Acceptance suite: end-to-end checks of the physics oracles, the inversion
// round trip, the separation-sensitivity trend, the measured-file control
// pipeline, CLI determinism and the module property suites. Prints one
// PASS/FAIL line per criterion; exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "casispec/analysis.hpp"
#include "casispec/constants.hpp"
#include "casispec/forest.hpp"
#include "casispec/io.hpp"
#include "casispec/lifshitz.hpp"
#include "casispec/synth.hpp"

namespace fs = std::filesystem;
using namespace casispec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const ModelMaterial& gold_material() {
    static const ModelMaterial m{DielectricModel{gold_drude(), {}}};
    return m;
}

// --- criterion 1: ideal-metal closed forms ---------------------------------

Outcome ideal_metal_oracle() {
    const double d = 100e-9;
    const ConstantMaterial metal{1e10};
    MatsubaraSettings settings;
    settings.temperature = 1.0;

    const double p_ref = -std::numbers::pi * std::numbers::pi * constants::hbar *
                         constants::c_light / (240.0 * d * d * d * d);
    const double f_ref = -std::numbers::pi * std::numbers::pi * constants::hbar *
                         constants::c_light / (720.0 * d * d * d);
    const double p = pressure(d, metal, metal, settings);
    const double f = free_energy_per_area(d, metal, metal, settings);
    const double p_err = std::abs(p - p_ref) / std::abs(p_ref);
    const double f_err = std::abs(f - f_ref) / std::abs(f_ref);
    return {p_err < 0.02 && f_err < 0.02,
            "pressure " + fmt(p) + " Pa vs " + fmt(p_ref) + " (rel err " + fmt(p_err) +
                "), energy rel err " + fmt(f_err) + ", bars 0.02"};
}

// --- criterion 2: energy-pressure consistency -------------------------------

Outcome energy_pressure_consistency() {
    MatsubaraSettings settings;
    double worst = 0.0;
    for (const double d : {60e-9, 100e-9, 1e-6}) {
        const double h = d / 1000.0;
        const double fd =
            -(free_energy_per_area(d + h, gold_material(), gold_material(), settings) -
              free_energy_per_area(d - h, gold_material(), gold_material(), settings)) /
            (2.0 * h);
        const double p = pressure(d, gold_material(), gold_material(), settings);
        worst = std::max(worst, std::abs(fd - p) / std::abs(p));
    }
    return {worst < 0.005, "worst relative mismatch " + fmt(worst) + ", bar 0.005"};
}

// --- criterion 3: continuation oracle ---------------------------------------

Outcome continuation_oracle() {
    const DrudeParams gold = gold_drude();
    DielectricModel model;
    model.drude = gold;

    TabulatedOptics table;
    table.low_freq_extrapolation = gold;
    const std::size_t per_decade = 100;
    const double decades = 8.0;
    const auto n = static_cast<std::size_t>(decades * per_decade) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1e11 * std::pow(10.0, decades * static_cast<double>(i) /
                                                   static_cast<double>(n - 1));
        table.omega.push_back(w);
        table.eps_imag.push_back(eval_real(model, w).imag());
    }

    const auto grid = FrequencyGrid::default_grid();
    double worst = 0.0;
    for (const double xi : grid.omega) {
        const double expected = eval_imag(model, xi);
        const double got = kk_continuation(table, xi);
        worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    }
    return {worst < 1e-3,
            "worst relative error over " + std::to_string(grid.size()) + " grid points " +
                fmt(worst) + ", bar 0.001"};
}

// --- criterion 4: round-trip inversion ---------------------------------------

Outcome round_trip_inversion() {
    DatasetSpec spec;
    spec.n_samples = 1000;
    spec.separations = uniform_separations(40e-9, 5e-6, 48);
    spec.grid = FrequencyGrid::default_grid();
    spec.ranges = SamplingRanges::drude_only();
    spec.seed = 42;

    Dataset dataset = generate_dataset(spec);
    split(dataset, 0.2, derive_stream(spec.seed, stream_tag::split));
    const Forest forest = fit_forest(dataset.train_view(), Hyperparams{},
                                     derive_stream(spec.seed, stream_tag::train));

    const auto val = dataset.validation_rows();
    Matrix pred_t(val.size(), 2 * spec.grid.size());
    std::vector<double> rel_lowfreq;
    for (std::size_t i = 0; i < val.size(); ++i) {
        const auto& sample = dataset.samples[val[i]];
        const auto t = forest.predict_transformed(sample.curve.values);
        for (std::size_t c = 0; c < t.size(); ++c) pred_t.at(i, c) = t[c];
        const SpectrumSample rec = forest.predict(sample.curve);
        rel_lowfreq.push_back(std::abs(rec.eps_real.front() - sample.spectrum.eps_real.front()) /
                              std::abs(sample.spectrum.eps_real.front()));
    }
    const Matrix truth_t = forest.target_transform.forward(target_matrix(dataset, val));
    const double r2 = r2_score(pred_t, truth_t);
    const double med = median_of(rel_lowfreq);
    return {r2 > 0.9 && med < 0.25,
            "validation R^2 " + fmt(r2) + " (bar 0.9), median low-freq eps' rel err " + fmt(med) +
                " (bar 0.25) over " + std::to_string(val.size()) + " samples"};
}

// --- criterion 5: d_max sweep trend ------------------------------------------

Outcome dmax_trend() {
    SweepSpec spec;
    spec.base.n_samples = 1000;
    spec.base.separations = uniform_separations(40e-9, 5e-6, 64);
    spec.base.grid = FrequencyGrid::default_grid();
    spec.base.ranges = SamplingRanges::drude_only();
    spec.base.seed = 42;
    spec.d_max = {0.5e-6, 1e-6, 2e-6, 5e-6};
    spec.d_min = 40e-9;
    spec.validation_fraction = 0.2;

    const SweepResult result = dmax_sweep(spec, Hyperparams{});

    bool strictly_decreasing = true;
    std::ostringstream errs;
    for (std::size_t i = 0; i < result.legs.size(); ++i) {
        if (i > 0 && !(result.legs[i].mean_lowfreq_abs_err_eps_real <
                       result.legs[i - 1].mean_lowfreq_abs_err_eps_real))
            strictly_decreasing = false;
        errs << (i ? " > " : "") << fmt(result.legs[i].mean_lowfreq_abs_err_eps_real);
    }

    // mean eps'' error over the top frequency decade, per leg
    const auto& grid = result.legs.front().per_frequency.grid;
    const double cut = grid.omega.back() / 10.0 * (1.0 - 1e-12);
    double top_min = 0.0, top_max = 0.0;
    for (std::size_t i = 0; i < result.legs.size(); ++i) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (grid.omega[k] >= cut) {
                acc += result.legs[i].per_frequency.mae_eps_imag[k];
                ++count;
            }
        const double mean = acc / static_cast<double>(count);
        top_min = i == 0 ? mean : std::min(top_min, mean);
        top_max = i == 0 ? mean : std::max(top_max, mean);
    }
    const double ratio = top_max / top_min;
    return {strictly_decreasing && ratio < 2.0,
            "low-freq errors " + errs.str() + " (strictly decreasing: " +
                (strictly_decreasing ? "yes" : "NO") + "), top-decade eps'' error ratio " +
                fmt(ratio) + " (bar 2)"};
}

// --- criterion 6: measured-control analog ------------------------------------

Outcome measured_control() {
    const auto separations = uniform_separations(60e-9, 400e-9, 320);
    const MeasuredGradientFile file =
        synthesize_gradient_file(gold_material(), gold_material(), separations, 37.69e-6, 300.0);

    DatasetSpec training;
    training.n_samples = 800;
    training.separations = {1e-7, 2e-7};  // replaced by the binned separations
    training.grid = FrequencyGrid::default_grid();
    training.ranges = SamplingRanges::drude_only();
    training.seed = 2718;

    const auto reference = evaluate_spectrum(gold_material().model(), training.grid);

    const ExperimentResult clean =
        reconstruct_experiment(file, 32, training, Hyperparams{}, 0.2, reference);
    const MeasuredGradientFile noisy_file = add_relative_noise(file, 0.01, 13);
    const ExperimentResult noisy =
        reconstruct_experiment(noisy_file, 32, training, Hyperparams{}, 0.2, reference);

    const double med_low = clean.report.reference->median_rel_err_eps_imag_lowest_decade;
    const double clean_real = clean.report.reference->mean_abs_err_eps_real;
    const double noisy_real = noisy.report.reference->mean_abs_err_eps_real;
    const bool degraded = noisy_real > clean_real;
    return {med_low < 0.5 && degraded,
            "lowest-decade eps'' median rel err " + fmt(med_low) +
                " (bar 0.5); mean eps' error " + fmt(clean_real) + " -> " + fmt(noisy_real) +
                " with 1% noise (" + (degraded ? "degraded" : "NOT degraded") + ")"};
}

// --- criterion 7: CLI determinism --------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "casispec_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);

    nlohmann::json cfg = {
        {"config_version", 1},
        {"generate",
         {{"n_samples", 40},
          {"seed", 7},
          {"separations_m", {{"min_m", 4e-8}, {"max_m", 2e-6}, {"count", 12}}},
          {"grid", {{"points", 16}, {"omega_min_rad_s", 1e11}, {"omega_max_rad_s", 1e19}}},
          {"ranges", {{"preset", "drude_only"}}},
          {"validation_fraction", 0.25},
          {"output_dir", (dir / "ds").string()}}},
        {"train",
         {{"dataset_dir", (dir / "ds").string()},
          {"hyper", {{"n_trees", 20}, {"n_ensembles", 2}}},
          {"folds", 2},
          {"seed", 3},
          {"model_output", (dir / "forest.json").string()},
          {"scores_output", (dir / "scores.csv").string()}}},
        {"reconstruct",
         {{"model", (dir / "forest.json").string()},
          {"curve", (dir / "probe.csv").string()},
          {"output", (dir / "spectrum.csv").string()}}}};
    const fs::path cfg_path = dir / "config.json";
    std::ofstream(cfg_path) << cfg.dump(2);

    const auto run = [&](const std::string& args) {
        const std::string cmd = std::string(CASISPEC_BIN) + " " + args + " -c " +
                                cfg_path.string() + " >/dev/null 2>>" + (dir / "log").string();
        return std::system(cmd.c_str()) == 0;
    };

    std::vector<std::string> stage_names{"ds/curves.csv", "ds/spectra.csv", "ds/split.csv",
                                         "ds/spec.json", "forest.json", "scores.csv",
                                         "spectrum.csv"};
    std::vector<std::string> first, second;
    for (int round = 0; round < 2; ++round) {
        if (!run("generate") || !run("train")) return {false, "a CLI stage failed, see log"};
        // probe: first curve of the dataset
        const auto curves = parse_csv(slurp(dir / "ds" / "curves.csv"));
        std::ofstream probe(dir / "probe.csv");
        probe << "d_m,value\n";
        for (const auto& row : curves.rows)
            if (row[0] == curves.rows.front()[0]) probe << row[1] << ',' << row[2] << '\n';
        probe.close();
        std::ofstream(dir / "probe.json") << R"({"kind":"pressure"})";
        if (!run("reconstruct")) return {false, "reconstruct failed, see log"};

        auto& bucket = round == 0 ? first : second;
        for (const auto& name : stage_names) bucket.push_back(slurp(dir / name));
    }
    fs::remove_all(dir);
    for (std::size_t i = 0; i < stage_names.size(); ++i)
        if (first[i].empty() || first[i] != second[i])
            return {false, "byte mismatch in " + stage_names[i]};
    return {true, "generate + train + reconstruct byte-identical across reruns (7 artifacts)"};
}

// --- criterion 8: module property suites --------------------------------------

Outcome property_suites() {
    std::ostringstream log;
    bool ok = true;
    const auto require = [&](bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << (log.str().empty() ? "" : "; ") << "FAILED: " << what;
        }
    };

    // dielectric: monotone continuation, passivity, limit (200 random models)
    {
        Rng rng(1001);
        const auto ranges = SamplingRanges::drude_lorentz();
        bool mono = true, passive = true, limit = true;
        for (int i = 0; i < 200; ++i) {
            const auto model = sample_model(rng, ranges);
            const double xi = rng.log_uniform10(11.0, 18.0);
            const double factor = 1.0 + rng.uniform(0.001, 10.0);
            if (!(eval_imag(model, xi * factor) < eval_imag(model, xi))) mono = false;
            if (!(eval_real(model, rng.log_uniform10(11.0, 19.0)).imag() >= 0.0)) passive = false;
            const double eps_far = eval_imag(model, 1e22);
            if (!(eps_far > 1.0 && eps_far - 1.0 < 1e-6)) limit = false;
        }
        require(mono, "eval_imag monotonicity");
        require(passive, "real-axis passivity");
        require(limit, "eval_imag -> 1 from above");
    }

    // dielectric: continuation consistency for random pure models
    {
        Rng rng(1002);
        for (int i = 0; i < 3; ++i) {
            DielectricModel model;
            model.drude = DrudeParams{rng.log_uniform10(15.0, 16.5), rng.log_uniform10(13.0, 14.5)};
            TabulatedOptics table;
            table.low_freq_extrapolation = *model.drude;
            for (int k = 0; k <= 600; ++k) {
                const double w = 1e11 * std::pow(10.0, 8.0 * k / 600.0);
                table.omega.push_back(w);
                table.eps_imag.push_back(eval_real(model, w).imag());
            }
            double worst = 0.0;
            for (const double xi : FrequencyGrid::default_grid().omega) {
                const double expected = eval_imag(model, xi);
                worst = std::max(worst,
                                 std::abs(kk_continuation(table, xi) - expected) / expected);
            }
            require(worst < 1e-3, "Drude continuation consistency (err " + fmt(worst) + ")");
        }
    }

    // lifshitz: sign, decay, symmetry, bounding, convergence (random models)
    {
        Rng rng(1003);
        MatsubaraSettings settings;
        const ConstantMaterial metal{1e10};
        for (int i = 0; i < 12; ++i) {
            const ModelMaterial m{sample_model(rng, SamplingRanges::drude_lorentz())};
            const double d = rng.log_uniform10(-7.3, -6.3);
            const double p1 = pressure(d, m, m, settings);
            const double p2 = pressure(2.0 * d, m, m, settings);
            require(p1 < 0.0 && p2 < 0.0, "attraction sign");
            require(std::abs(p2) < std::abs(p1), "monotone decay");
            require(pressure(d, m, gold_material(), settings) ==
                        pressure(d, gold_material(), m, settings),
                    "material symmetry");
            require(std::abs(p1) <= std::abs(pressure(d, metal, metal, settings)),
                    "ideal-metal bound");
            require(free_energy_per_area(d, m, m, settings) < 0.0, "energy sign");
        }
        MatsubaraSettings fine = settings;
        fine.quadrature_tolerance = 0.5e-8;
        const double pc = pressure(100e-9, gold_material(), gold_material(), settings);
        const double pf = pressure(100e-9, gold_material(), gold_material(), fine);
        require(std::abs(pc - pf) <= settings.quadrature_tolerance * std::abs(pc),
                "quadrature convergence");
    }

    // synth: generated invariants, serialization round trip, KS uniformity
    {
        DatasetSpec spec;
        spec.n_samples = 100;
        spec.separations = uniform_separations(40e-9, 2e-6, 16);
        spec.grid = FrequencyGrid::log_spaced(24, 1e11, 1e19);
        spec.ranges = SamplingRanges::drude_lorentz();
        spec.seed = 77;
        Dataset ds = generate_dataset(spec);
        split(ds, 0.2, 5);
        bool curves_ok = true, spectra_ok = true;
        for (const auto& s : ds.samples) {
            for (std::size_t k = 0; k < s.curve.values.size(); ++k) {
                if (!(s.curve.values[k] < 0.0)) curves_ok = false;
                if (k > 0 && !(std::abs(s.curve.values[k]) < std::abs(s.curve.values[k - 1])))
                    curves_ok = false;
            }
            for (const double e2 : s.spectrum.eps_imag)
                if (!(e2 >= 0.0)) spectra_ok = false;
        }
        require(curves_ok, "generated curves attractive and decaying");
        require(spectra_ok, "generated spectra passive");

        const fs::path dir = fs::temp_directory_path() / "casispec_acceptance_rt";
        fs::remove_all(dir);
        write_dataset(dir / "a", ds);
        write_dataset(dir / "b", read_dataset(dir / "a"));
        bool rt = true;
        for (const char* name : {"spec.json", "spectra.csv", "curves.csv", "split.csv"})
            if (slurp(dir / "a" / name) != slurp(dir / "b" / name)) rt = false;
        fs::remove_all(dir);
        require(rt, "dataset serialization round trip");

        Rng rng(1004);
        std::vector<double> u;
        for (int i = 0; i < 1500; ++i) {
            const auto model = sample_model(rng, SamplingRanges::drude_only());
            u.push_back((std::log10(model.drude->plasma_frequency) - 15.0) / 1.5);
        }
        std::sort(u.begin(), u.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            ks = std::max(ks, u[i] - static_cast<double>(i) / u.size());
            ks = std::max(ks, static_cast<double>(i + 1) / u.size() - u[i]);
        }
        require(ks < 0.05, "log10 plasma frequency KS uniformity (" + fmt(ks) + ")");
    }

    // inversion: transform round trip, ensemble stability, overfit, baseline
    {
        Rng rng(1005);
        SignedLogTransform t;
        t.scales = {0.01, 1.0, 1e4};
        bool rt = true;
        for (int i = 0; i < 300; ++i) {
            const std::size_t col = i % 3;
            const double x = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-6.0, 8.0));
            const double back = t.inverse_one(t.forward_one(x, col), col);
            if (std::abs(back - x) > 1e-12 * std::abs(x)) rt = false;
        }
        require(rt, "signed-log transform round trip");

        DatasetSpec spec;
        spec.n_samples = 120;
        spec.separations = uniform_separations(40e-9, 2e-6, 12);
        spec.grid = FrequencyGrid::log_spaced(16, 1e11, 1e19);
        spec.ranges = SamplingRanges::drude_only();
        spec.seed = 2025;
        Dataset ds = generate_dataset(spec);
        split(ds, 0.25, 6);
        Hyperparams h;
        h.n_trees = 40;
        h.n_ensembles = 1;
        Forest f = fit_forest(ds.train_view(), h, 12);

        const auto& probe = ds.samples[0].curve;
        const auto before = f.predict_transformed(probe.values);
        Tree last = f.ensembles.back().back();
        f.ensembles.back().pop_back();
        f.ensembles.back().push_back(std::move(last));
        require(f.predict_transformed(probe.values) == before, "tree remove/re-add stability");

        Dataset shuffled = ds;
        std::reverse(shuffled.samples.begin(), shuffled.samples.end());
        std::reverse(shuffled.partitions.begin(), shuffled.partitions.end());
        require(forest_to_json(fit_forest(shuffled.train_view(), h, 12)).dump() ==
                    forest_to_json(f).dump(),
                "row-permutation invariance");

        const Forest memo = fit_forest(ds.train_view(),
                                       Hyperparams{1, 0, 1, 1.0, false, 1}, 3);
        const auto view = ds.train_view();
        Matrix pred(view.rows.size(), 2 * spec.grid.size());
        for (std::size_t i = 0; i < view.rows.size(); ++i) {
            const auto tv = memo.predict_transformed(ds.samples[view.rows[i]].curve.values);
            for (std::size_t c = 0; c < tv.size(); ++c) pred.at(i, c) = tv[c];
        }
        const Matrix truth = memo.target_transform.forward(target_matrix(ds, view.rows));
        require(r2_score(pred, truth) > 1.0 - 1e-12, "single-tree overfit R^2 = 1");

        const auto val = ds.validation_rows();
        Matrix pv(val.size(), 2 * spec.grid.size());
        for (std::size_t i = 0; i < val.size(); ++i) {
            const auto tv = f.predict_transformed(ds.samples[val[i]].curve.values);
            for (std::size_t c = 0; c < tv.size(); ++c) pv.at(i, c) = tv[c];
        }
        const Matrix tv = f.target_transform.forward(target_matrix(ds, val));
        const Matrix train_t = f.target_transform.forward(target_matrix(ds, view.rows));
        Matrix baseline(val.size(), train_t.cols);
        for (std::size_t c = 0; c < train_t.cols; ++c) {
            double mean = 0.0;
            for (std::size_t r = 0; r < train_t.rows; ++r) mean += train_t.at(r, c);
            mean /= static_cast<double>(train_t.rows);
            for (std::size_t r = 0; r < val.size(); ++r) baseline.at(r, c) = mean;
        }
        require(r2_score(pv, tv) > r2_score(baseline, tv), "forest beats the mean predictor");
    }

    // analysis: metric positivity, sweep determinism + restriction identity
    {
        const auto grid = FrequencyGrid::log_spaced(8, 1e12, 1e16);
        SpectrumSample a;
        a.grid = grid;
        a.eps_real.assign(8, 1.0);
        a.eps_imag.assign(8, 2.0);
        SpectrumSample b = a;
        b.eps_real[2] += 0.5;
        const auto same = per_frequency_error({a}, {a});
        const auto diff = per_frequency_error({b}, {a});
        bool metrics_ok = true;
        for (std::size_t k = 0; k < 8; ++k) {
            if (same.mae_eps_real[k] != 0.0 || same.mae_eps_imag[k] != 0.0) metrics_ok = false;
            if (diff.mae_eps_real[k] < 0.0) metrics_ok = false;
        }
        require(metrics_ok && diff.mae_eps_real[2] == 0.5, "per-frequency error semantics");

        SweepSpec sweep;
        sweep.base.n_samples = 60;
        sweep.base.separations = uniform_separations(40e-9, 2e-6, 12);
        sweep.base.grid = FrequencyGrid::log_spaced(12, 1e11, 1e19);
        sweep.base.ranges = SamplingRanges::drude_only();
        sweep.base.seed = 99;
        sweep.d_max = {2e-6};
        sweep.validation_fraction = 0.25;
        Hyperparams h;
        h.n_trees = 10;
        h.n_ensembles = 1;
        const auto s1 = dmax_sweep(sweep, h);
        const auto s2 = dmax_sweep(sweep, h);
        require(s1.legs[0].mean_lowfreq_abs_err_eps_real ==
                        s2.legs[0].mean_lowfreq_abs_err_eps_real &&
                    s1.legs[0].validation_r2 == s2.legs[0].validation_r2,
                "sweep determinism");

        Dataset ds = generate_dataset(sweep.base);
        split(ds, sweep.validation_fraction, derive_stream(sweep.base.seed, stream_tag::split));
        const Forest baseline = fit_forest(ds.train_view(), h,
                                           derive_stream(sweep.base.seed, stream_tag::train));
        const auto val = ds.validation_rows();
        double mean_err = 0.0;
        for (const auto row : val) {
            const auto rec = baseline.predict(ds.samples[row].curve);
            mean_err +=
                std::abs(rec.eps_real.front() - ds.samples[row].spectrum.eps_real.front());
        }
        mean_err /= static_cast<double>(val.size());
        require(s1.legs[0].mean_lowfreq_abs_err_eps_real == mean_err,
                "full-range restriction equals baseline");
    }

    return {ok, ok ? "dielectric, lifshitz, synth, inversion and analysis invariants hold"
                   : log.str()};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"1 ideal-metal oracle", ideal_metal_oracle},
        {"2 energy-pressure consistency", energy_pressure_consistency},
        {"3 continuation oracle", continuation_oracle},
        {"4 round-trip inversion", round_trip_inversion},
        {"5 d_max sensitivity trend", dmax_trend},
        {"6 measured-control analog", measured_control},
        {"7 CLI determinism", cli_determinism},
        {"8 module property suites", property_suites},
    };

    bool all_pass = true;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %s: %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.name, outcome.detail.c_str(), seconds);
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
