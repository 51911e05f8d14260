#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "casispec/forest.hpp"
#include "casispec/synth.hpp"

namespace casispec {

// Measured sphere-plate force-gradient data plus the metadata needed to
// train a matching inversion model. Rows are sorted by separation on load.
struct MeasuredGradientFile {
    std::vector<double> separations;    // m
    std::vector<double> gradients;      // N/m
    std::vector<double> uncertainties;  // N/m; empty or same length
    double radius = 0.0;                // m
    double temperature = 0.0;           // K

    void sort_rows();
    void validate() const;
};

// CSV "d_m,gradient_N_per_m[,sigma_N_per_m]" with a JSON sidecar
// "<stem>.json" carrying {radius_m, temperature_K}.
MeasuredGradientFile read_measured_file(const std::filesystem::path& csv_path);
void write_measured_file(const std::filesystem::path& csv_path, const MeasuredGradientFile& file);

// v -> v + sigma_rel * |v| * N(0,1) per row.
MeasuredGradientFile add_relative_noise(MeasuredGradientFile file, double sigma_rel, std::uint64_t seed);

// Uniform bins over [d_min, d_max]; per-bin means of separation and gradient;
// empty bins dropped.
ForceCurve bin_measurements(const MeasuredGradientFile& file, std::size_t n_bins);

// Forward-model control data in the measured-file format.
MeasuredGradientFile synthesize_gradient_file(const Material& sample, const Material& sensor,
                                              const std::vector<double>& separations, double radius,
                                              double temperature);

struct PerFrequencyError {
    FrequencyGrid grid;
    std::vector<double> mae_eps_real;
    std::vector<double> mae_eps_imag;
};

// Mean absolute error per grid point, eps' and eps'' separately.
PerFrequencyError per_frequency_error(const std::vector<SpectrumSample>& pred,
                                      const std::vector<SpectrumSample>& truth);

struct BootstrapBand {
    double mean = 0.0;
    double lo = 0.0;  // 5th percentile of resampled means
    double hi = 0.0;  // 95th
};

BootstrapBand bootstrap_mean_band(const std::vector<double>& values, std::uint64_t seed,
                                  std::size_t resamples = 1000);

// Separation-range sensitivity sweep: one dataset (shared seed), one forest
// per d_max trained on curves truncated to separations <= d_max, scored on
// the withheld validation samples.
struct SweepSpec {
    DatasetSpec base;
    std::vector<double> d_max;  // m, strictly increasing
    double d_min = 40e-9;
    double validation_fraction = 0.2;

    void validate() const;
};

struct SweepLeg {
    double d_max = 0.0;
    double mean_lowfreq_abs_err_eps_real = 0.0;  // |eps'_pred - eps'_true| at the lowest grid point
    BootstrapBand band;
    double validation_r2 = 0.0;  // transformed target space
    PerFrequencyError per_frequency;
};

struct SweepResult {
    std::vector<SweepLeg> legs;  // sorted by d_max
};

SweepResult dmax_sweep(const SweepSpec& spec, const Hyperparams& hyper);

struct ReferenceErrors {
    double lowfreq_abs_err_eps_real = 0.0;
    double mean_abs_err_eps_real = 0.0;                 // over the whole grid
    double median_rel_err_eps_imag = 0.0;               // over the whole grid
    double median_rel_err_eps_imag_lowest_decade = 0.0; // grid points with w <= 10 w_min
    std::vector<double> abs_err_eps_real;
    std::vector<double> abs_err_eps_imag;
};

struct ReconstructionReport {
    double validation_r2 = 0.0;
    std::vector<double> val_lowfreq_abs_err_eps_real;  // per validation sample
    BootstrapBand val_lowfreq_band;
    std::optional<ReferenceErrors> reference;
};

struct ExperimentResult {
    ForceCurve binned;
    SpectrumSample reconstruction;
    ReconstructionReport report;
};

// Bins the measured file, generates a training set whose curves are PFA
// gradients on exactly the binned separations (file radius and temperature),
// trains a forest and reconstructs the spectrum. Reference errors are
// reported when a ground-truth spectrum is supplied.
ExperimentResult reconstruct_experiment(const MeasuredGradientFile& file, std::size_t n_bins,
                                        const DatasetSpec& training_base, const Hyperparams& hyper,
                                        double validation_fraction,
                                        const std::optional<SpectrumSample>& reference = {});

}  // namespace casispec
