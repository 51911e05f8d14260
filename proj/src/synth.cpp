#include "casispec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "casispec/errors.hpp"
#include "casispec/io.hpp"
#include "casispec/parallel.hpp"

namespace casispec {

DrudeParams gold_drude() { return {1.37e16, 5.3e13}; }

SamplingRanges SamplingRanges::drude_only() { return SamplingRanges{}; }

SamplingRanges SamplingRanges::drude_lorentz() {
    SamplingRanges r;
    r.p_drude = 0.9;
    r.oscillator_count = {0, 4};
    return r;
}

namespace {

void check_range(const std::array<double, 2>& r, const char* name) {
    if (!(r[0] <= r[1])) throw config_error(std::string("sampling ranges: ") + name + " has min > max");
}

}  // namespace

void SamplingRanges::validate() const {
    if (!(p_drude >= 0.0 && p_drude <= 1.0))
        throw config_error("sampling ranges: p_drude must be in [0,1]");
    check_range(log10_plasma_frequency, "log10_plasma_frequency");
    check_range(log10_drude_damping, "log10_drude_damping");
    check_range(log10_strength, "log10_strength");
    check_range(log10_resonance, "log10_resonance");
    check_range(log10_osc_damping, "log10_osc_damping");
    if (oscillator_count[0] < 0 || oscillator_count[0] > oscillator_count[1])
        throw config_error("sampling ranges: oscillator_count must satisfy 0 <= min <= max");
    if (p_drude == 0.0 && oscillator_count[1] == 0)
        throw config_error("sampling ranges: p_drude = 0 with no oscillators cannot produce a model");
}

DatasetSpec DatasetSpec::defaults() {
    DatasetSpec spec;
    spec.separations = uniform_separations(40e-9, 5e-6, 64);
    spec.grid = FrequencyGrid::default_grid();
    return spec;
}

MatsubaraSettings DatasetSpec::solver() const {
    MatsubaraSettings s;
    s.temperature = temperature;
    return s;
}

void DatasetSpec::validate() const {
    if (n_samples < 1) throw config_error("dataset spec: n_samples must be >= 1");
    if (separations.empty()) throw config_error("dataset spec: no separations");
    if (!(separations.front() > 0.0))
        throw config_error("dataset spec: separations must be > 0");
    for (std::size_t i = 1; i < separations.size(); ++i)
        if (!(separations[i] > separations[i - 1]))
            throw config_error("dataset spec: separations must be strictly increasing");
    grid.validate();
    ranges.validate();
    if (!(temperature > 0.0)) throw config_error("dataset spec: temperature must be > 0");
    if (curve_kind == CurveKind::gradient) {
        if (!sphere_radius || !(*sphere_radius > 0.0))
            throw config_error("dataset spec: gradient curves need sphere_radius > 0");
    }
}

TrainView TrainView::subset(const std::vector<std::size_t>& keep) const {
    TrainView out;
    out.dataset = dataset;
    out.rows.reserve(keep.size());
    for (const std::size_t pos : keep) out.rows.push_back(rows.at(pos));
    return out;
}

TrainView Dataset::train_view() const {
    if (!has_split()) throw input_error("dataset has no train/validation split");
    TrainView view;
    view.dataset = this;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (partitions[i] == Partition::train) view.rows.push_back(i);
    // canonical id-ascending order, so row shuffles cannot change training
    std::sort(view.rows.begin(), view.rows.end(),
              [&](std::size_t a, std::size_t b) { return samples[a].id < samples[b].id; });
    return view;
}

std::vector<std::size_t> Dataset::validation_rows() const {
    if (!has_split()) throw input_error("dataset has no train/validation split");
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (partitions[i] == Partition::validation) rows.push_back(i);
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return samples[a].id < samples[b].id; });
    return rows;
}

Dataset Dataset::restrict_separations(double d_max) const {
    if (!(d_max > 0.0)) throw input_error("restrict_separations: d_max must be > 0");
    const double cutoff = d_max * (1.0 + 1e-12);
    std::size_t keep = 0;
    while (keep < spec.separations.size() && spec.separations[keep] <= cutoff) ++keep;
    if (keep < 2) throw input_error("restrict_separations: fewer than 2 separations survive");

    Dataset out;
    out.spec = spec;
    out.spec.separations.resize(keep);
    out.partitions = partitions;
    out.validation_fraction = validation_fraction;
    out.split_seed = split_seed;
    out.samples = samples;
    for (auto& s : out.samples) {
        s.curve.separations.resize(keep);
        s.curve.values.resize(keep);
    }
    return out;
}

void Dataset::validate() const {
    spec.validate();
    for (const auto& s : samples) {
        s.spectrum.validate();
        s.curve.validate();
        if (!(s.spectrum.grid == spec.grid)) throw input_error("dataset: sample grid differs from spec");
        if (s.curve.separations != spec.separations)
            throw input_error("dataset: sample separations differ from spec");
        if (s.curve.kind != spec.curve_kind) throw input_error("dataset: sample curve kind differs from spec");
    }
    if (!partitions.empty() && partitions.size() != samples.size())
        throw input_error("dataset: split labels do not cover all samples");
}

DielectricModel sample_model(Rng& rng, const SamplingRanges& ranges) {
    ranges.validate();
    for (;;) {
        DielectricModel model;
        if (rng.bernoulli(ranges.p_drude)) {
            model.drude = DrudeParams{
                rng.log_uniform10(ranges.log10_plasma_frequency[0], ranges.log10_plasma_frequency[1]),
                rng.log_uniform10(ranges.log10_drude_damping[0], ranges.log10_drude_damping[1])};
        }
        const int n = rng.uniform_int(ranges.oscillator_count[0], ranges.oscillator_count[1]);
        for (int j = 0; j < n; ++j) {
            model.oscillators.push_back(
                {rng.log_uniform10(ranges.log10_strength[0], ranges.log10_strength[1]),
                 rng.log_uniform10(ranges.log10_resonance[0], ranges.log10_resonance[1]),
                 rng.log_uniform10(ranges.log10_osc_damping[0], ranges.log10_osc_damping[1])});
        }
        if (!model.empty()) return model;
    }
}

Dataset generate_dataset(const DatasetSpec& spec) {
    spec.validate();
    const ModelMaterial sensor{DielectricModel{gold_drude(), {}}};
    const MatsubaraSettings settings = spec.solver();
    std::optional<SphereGeometry> geometry;
    if (spec.curve_kind == CurveKind::gradient) geometry = SphereGeometry{*spec.sphere_radius};

    const std::size_t n = spec.n_samples;
    std::vector<DatasetSample> slots(n);
    std::vector<std::string> failures(n);

    parallel_for(n, [&](std::size_t i) {
        Rng rng(derive_stream(spec.seed, stream_tag::sample, i));
        DatasetSample& s = slots[i];
        s.id = i;
        s.model = sample_model(rng, spec.ranges);
        s.spectrum = evaluate_spectrum(*s.model, spec.grid);
        try {
            const ModelMaterial sample_material{*s.model};
            s.curve = force_curve(spec.separations, sample_material, sensor, settings,
                                  spec.curve_kind, geometry);
        } catch (const numerical_error& e) {
            failures[i] = e.what();
        }
    });

    Dataset dataset;
    dataset.spec = spec;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i].empty()) {
            ++failed;
            std::fprintf(stderr, "sample %zu dropped: %s\n", i, failures[i].c_str());
            continue;
        }
        dataset.samples.push_back(std::move(slots[i]));
    }
    if (failed * 100 > n)
        throw numerical_error("dataset generation: " + std::to_string(failed) + " of " +
                              std::to_string(n) + " samples failed (> 1%)");
    return dataset;
}

void split(Dataset& dataset, double validation_fraction, std::uint64_t seed) {
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw config_error("split: validation fraction must be in (0,1)");
    const std::size_t n = dataset.samples.size();
    const auto k = static_cast<std::size_t>(
        std::llround(validation_fraction * static_cast<double>(n)));
    if (k == 0 || k == n) throw config_error("split: a partition would be empty");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_stream(seed, stream_tag::split));
    rng.shuffle(order);

    dataset.partitions.assign(n, Partition::train);
    for (std::size_t i = 0; i < k; ++i) dataset.partitions[order[i]] = Partition::validation;
    dataset.validation_fraction = validation_fraction;
    dataset.split_seed = seed;
}

namespace {

const char* kind_name(CurveKind kind) {
    return kind == CurveKind::pressure ? "pressure" : "gradient";
}

CurveKind kind_from_name(const std::string& name) {
    if (name == "pressure") return CurveKind::pressure;
    if (name == "gradient") return CurveKind::gradient;
    throw input_error("unknown curve kind '" + name + "'");
}

}  // namespace

nlohmann::json spec_to_json(const DatasetSpec& spec) {
    nlohmann::json j;
    j["n_samples"] = spec.n_samples;
    j["separations_m"] = spec.separations;
    j["grid_omega_rad_s"] = spec.grid.omega;
    j["ranges"] = {
        {"p_drude", spec.ranges.p_drude},
        {"log10_plasma_frequency", spec.ranges.log10_plasma_frequency},
        {"log10_drude_damping", spec.ranges.log10_drude_damping},
        {"oscillator_count", spec.ranges.oscillator_count},
        {"log10_strength", spec.ranges.log10_strength},
        {"log10_resonance", spec.ranges.log10_resonance},
        {"log10_osc_damping", spec.ranges.log10_osc_damping},
    };
    j["temperature_K"] = spec.temperature;
    j["curve_kind"] = kind_name(spec.curve_kind);
    if (spec.sphere_radius) j["sphere_radius_m"] = *spec.sphere_radius;
    j["seed"] = spec.seed;
    return j;
}

DatasetSpec spec_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"n_samples", "separations_m", "grid_omega_rad_s", "ranges", "temperature_K",
                         "curve_kind", "sphere_radius_m", "seed"},
                        "dataset spec");
    DatasetSpec spec;
    spec.n_samples = j.at("n_samples").get<std::size_t>();
    spec.separations = j.at("separations_m").get<std::vector<double>>();
    spec.grid.omega = j.at("grid_omega_rad_s").get<std::vector<double>>();
    const auto& r = j.at("ranges");
    reject_unknown_keys(r,
                        {"p_drude", "log10_plasma_frequency", "log10_drude_damping", "oscillator_count",
                         "log10_strength", "log10_resonance", "log10_osc_damping"},
                        "sampling ranges");
    spec.ranges.p_drude = r.at("p_drude").get<double>();
    spec.ranges.log10_plasma_frequency = r.at("log10_plasma_frequency").get<std::array<double, 2>>();
    spec.ranges.log10_drude_damping = r.at("log10_drude_damping").get<std::array<double, 2>>();
    spec.ranges.oscillator_count = r.at("oscillator_count").get<std::array<int, 2>>();
    spec.ranges.log10_strength = r.at("log10_strength").get<std::array<double, 2>>();
    spec.ranges.log10_resonance = r.at("log10_resonance").get<std::array<double, 2>>();
    spec.ranges.log10_osc_damping = r.at("log10_osc_damping").get<std::array<double, 2>>();
    spec.temperature = j.at("temperature_K").get<double>();
    spec.curve_kind = kind_from_name(j.at("curve_kind").get<std::string>());
    if (j.contains("sphere_radius_m")) spec.sphere_radius = j.at("sphere_radius_m").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
}

std::string dataset_spec_hash(const DatasetSpec& spec) { return fnv1a_hex(spec_to_json(spec).dump()); }

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
    if (!dataset.has_split()) throw input_error("write_dataset: dataset has no split labels");
    std::filesystem::create_directories(dir);

    nlohmann::json meta;
    meta["format_version"] = 1;
    meta["dataset_spec"] = spec_to_json(dataset.spec);
    meta["split"] = {{"validation_fraction", *dataset.validation_fraction},
                     {"seed", *dataset.split_seed}};
    write_json_file(dir / "spec.json", meta);

    std::ostringstream spectra;
    spectra << "sample_id,grid_index,omega_rad_s,eps_real,eps_imag\n";
    for (const auto& s : dataset.samples)
        for (std::size_t k = 0; k < s.spectrum.grid.size(); ++k)
            spectra << s.id << ',' << k << ',' << format_double(s.spectrum.grid.omega[k]) << ','
                    << format_double(s.spectrum.eps_real[k]) << ','
                    << format_double(s.spectrum.eps_imag[k]) << '\n';
    atomic_write_file(dir / "spectra.csv", spectra.str());

    std::ostringstream curves;
    curves << "sample_id,d_m,value\n";
    for (const auto& s : dataset.samples)
        for (std::size_t k = 0; k < s.curve.separations.size(); ++k)
            curves << s.id << ',' << format_double(s.curve.separations[k]) << ','
                   << format_double(s.curve.values[k]) << '\n';
    atomic_write_file(dir / "curves.csv", curves.str());

    std::ostringstream splits;
    splits << "sample_id,partition\n";
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
        splits << dataset.samples[i].id << ','
               << (dataset.partitions[i] == Partition::train ? "train" : "validation") << '\n';
    atomic_write_file(dir / "split.csv", splits.str());
}

Dataset read_dataset(const std::filesystem::path& dir) {
    const nlohmann::json meta = read_json_file(dir / "spec.json");
    reject_unknown_keys(meta, {"format_version", "dataset_spec", "split", "version", "config_echo"},
                        "dataset spec.json");
    Dataset dataset;
    dataset.spec = spec_from_json(meta.at("dataset_spec"));
    dataset.validation_fraction = meta.at("split").at("validation_fraction").get<double>();
    dataset.split_seed = meta.at("split").at("seed").get<std::uint64_t>();

    const Csv spectra = read_csv(dir / "spectra.csv");
    expect_header(spectra, {"sample_id", "grid_index", "omega_rad_s", "eps_real", "eps_imag"},
                  "spectra.csv");
    const Csv curves = read_csv(dir / "curves.csv");
    expect_header(curves, {"sample_id", "d_m", "value"}, "curves.csv");
    const Csv splits = read_csv(dir / "split.csv");
    expect_header(splits, {"sample_id", "partition"}, "split.csv");

    const std::size_t g = dataset.spec.grid.size();
    const std::size_t c = dataset.spec.separations.size();
    if (spectra.rows.size() % g != 0 || curves.rows.size() % c != 0)
        throw input_error("dataset: row counts are not multiples of the grid/curve lengths");
    const std::size_t n = spectra.rows.size() / g;
    if (curves.rows.size() / c != n || splits.rows.size() != n)
        throw input_error("dataset: spectra, curves and split disagree on the sample count");

    dataset.samples.resize(n);
    dataset.partitions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        DatasetSample& s = dataset.samples[i];
        s.id = static_cast<std::uint64_t>(std::stoull(spectra.rows[i * g][0]));
        s.spectrum.grid = dataset.spec.grid;
        s.spectrum.eps_real.resize(g);
        s.spectrum.eps_imag.resize(g);
        for (std::size_t k = 0; k < g; ++k) {
            const auto& row = spectra.rows[i * g + k];
            if (std::stoull(row[0]) != s.id || std::stoull(row[1]) != k)
                throw input_error("spectra.csv: rows are not grouped by sample and grid index");
            s.spectrum.eps_real[k] = parse_double(row[3]);
            s.spectrum.eps_imag[k] = parse_double(row[4]);
        }
        s.curve.kind = dataset.spec.curve_kind;
        s.curve.separations.resize(c);
        s.curve.values.resize(c);
        for (std::size_t k = 0; k < c; ++k) {
            const auto& row = curves.rows[i * c + k];
            if (std::stoull(row[0]) != s.id)
                throw input_error("curves.csv: rows are not grouped like spectra.csv");
            s.curve.separations[k] = parse_double(row[1]);
            s.curve.values[k] = parse_double(row[2]);
        }
        const auto& srow = splits.rows[i];
        if (std::stoull(srow[0]) != s.id) throw input_error("split.csv: sample order mismatch");
        if (srow[1] == "train")
            dataset.partitions[i] = Partition::train;
        else if (srow[1] == "validation")
            dataset.partitions[i] = Partition::validation;
        else
            throw input_error("split.csv: unknown partition '" + srow[1] + "'");
    }
    dataset.validate();
    return dataset;
}

}  // namespace casispec
