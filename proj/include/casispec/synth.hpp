#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "casispec/dielectric.hpp"
#include "casispec/lifshitz.hpp"
#include "casispec/rng.hpp"

namespace casispec {

// Drude stand-in for the gold sensing surface every synthetic curve is
// computed against.
DrudeParams gold_drude();  // omega_p = 1.37e16 rad/s, gamma = 5.3e13 rad/s

struct SamplingRanges {
    double p_drude = 1.0;  // probability a sample includes a Drude term
    std::array<double, 2> log10_plasma_frequency{15.0, 16.5};
    std::array<double, 2> log10_drude_damping{13.0, 14.5};
    std::array<int, 2> oscillator_count{0, 0};
    std::array<double, 2> log10_strength{14.5, 16.5};
    std::array<double, 2> log10_resonance{14.5, 17.0};
    std::array<double, 2> log10_osc_damping{13.5, 15.5};

    static SamplingRanges drude_only();     // p_drude = 1, no oscillators
    static SamplingRanges drude_lorentz();  // p_drude = 0.9, up to 4 oscillators
    void validate() const;                  // throws config_error
};

struct DatasetSpec {
    std::size_t n_samples = 5000;
    std::vector<double> separations;  // m; default 64 uniform over [40 nm, 5 um]
    FrequencyGrid grid;
    SamplingRanges ranges;
    double temperature = 300.0;  // K
    CurveKind curve_kind = CurveKind::pressure;
    std::optional<double> sphere_radius;  // m, required for gradient curves
    std::uint64_t seed = 0;

    static DatasetSpec defaults();
    MatsubaraSettings solver() const;
    void validate() const;
};

enum class Partition : std::uint8_t { train, validation };

struct DatasetSample {
    std::uint64_t id = 0;
    std::optional<DielectricModel> model;  // absent for datasets loaded from disk
    SpectrumSample spectrum;
    ForceCurve curve;
};

struct Dataset;

// Read-only handle on the training partition: the only thing the fitting
// code accepts, so withheld validation rows cannot leak into training.
struct TrainView {
    const Dataset* dataset = nullptr;
    std::vector<std::size_t> rows;  // indices into dataset->samples, id-ascending

    TrainView subset(const std::vector<std::size_t>& keep) const;  // positions into rows
};

struct Dataset {
    DatasetSpec spec;
    std::vector<DatasetSample> samples;
    std::vector<Partition> partitions;  // parallel to samples, empty before split()
    std::optional<double> validation_fraction;
    std::optional<std::uint64_t> split_seed;

    bool has_split() const { return partitions.size() == samples.size() && !samples.empty(); }
    TrainView train_view() const;
    std::vector<std::size_t> validation_rows() const;

    // Copy with every curve (and the spec) cut down to separations <= d_max.
    Dataset restrict_separations(double d_max) const;

    void validate() const;
};

// One model draw. Drude inclusion is Bernoulli(p_drude), all magnitudes are
// log-uniform, the oscillator count is uniform; draws repeat until the model
// is non-empty.
DielectricModel sample_model(Rng& rng, const SamplingRanges& ranges);

// Samples n_samples models, evaluates each spectrum on the grid and each
// force curve against the gold sensing surface. Sample i draws from an rng
// stream keyed by (seed, i), so generation is order-independent and
// parallel-safe. Samples whose curve fails to converge are dropped (logged
// to stderr); more than 1% failures aborts.
Dataset generate_dataset(const DatasetSpec& spec);

// Uniformly random validation assignment of round(fraction * n) samples.
void split(Dataset& dataset, double validation_fraction, std::uint64_t seed);

// Directory layout: spec.json, spectra.csv, curves.csv, split.csv. Models are
// not persisted. Byte-deterministic.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& dir);

nlohmann::json spec_to_json(const DatasetSpec& spec);
DatasetSpec spec_from_json(const nlohmann::json& j);
std::string dataset_spec_hash(const DatasetSpec& spec);

}  // namespace casispec
