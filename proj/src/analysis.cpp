#include "casispec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "casispec/errors.hpp"
#include "casispec/io.hpp"

namespace casispec {

void MeasuredGradientFile::sort_rows() {
    std::vector<std::size_t> order(separations.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return separations[a] < separations[b]; });
    const auto reorder = [&](std::vector<double>& v) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < order.size(); ++i) out[i] = v[order[i]];
        v = std::move(out);
    };
    reorder(separations);
    reorder(gradients);
    if (!uncertainties.empty()) reorder(uncertainties);
}

void MeasuredGradientFile::validate() const {
    if (separations.empty()) throw input_error("measured file: no rows");
    if (gradients.size() != separations.size())
        throw input_error("measured file: column lengths differ");
    if (!uncertainties.empty() && uncertainties.size() != separations.size())
        throw input_error("measured file: uncertainty column length differs");
    if (!(separations.front() > 0.0)) throw input_error("measured file: separations must be > 0");
    for (std::size_t i = 1; i < separations.size(); ++i)
        if (!(separations[i] >= separations[i - 1]))
            throw input_error("measured file: separations not sorted");
    if (!(radius > 0.0)) throw input_error("measured file: radius must be > 0");
    if (!(temperature > 0.0)) throw input_error("measured file: temperature must be > 0");
}

MeasuredGradientFile read_measured_file(const std::filesystem::path& csv_path) {
    const Csv csv = read_csv(csv_path);
    const std::vector<std::string> with_sigma{"d_m", "gradient_N_per_m", "sigma_N_per_m"};
    const std::vector<std::string> without{"d_m", "gradient_N_per_m"};
    bool has_sigma;
    if (csv.header == with_sigma)
        has_sigma = true;
    else if (csv.header == without)
        has_sigma = false;
    else
        throw input_error(csv_path.string() +
                          ": expected header 'd_m,gradient_N_per_m[,sigma_N_per_m]'");

    MeasuredGradientFile file;
    for (const auto& row : csv.rows) {
        file.separations.push_back(parse_double(row[0]));
        file.gradients.push_back(parse_double(row[1]));
        if (has_sigma) file.uncertainties.push_back(parse_double(row[2]));
    }

    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    if (!std::filesystem::exists(sidecar))
        throw input_error("measured file: missing sidecar " + sidecar.string());
    const nlohmann::json meta = read_json_file(sidecar);
    if (!meta.contains("radius_m") || !meta.contains("temperature_K"))
        throw input_error("measured file: sidecar needs radius_m and temperature_K");
    file.radius = meta.at("radius_m").get<double>();
    file.temperature = meta.at("temperature_K").get<double>();

    file.sort_rows();
    file.validate();
    return file;
}

void write_measured_file(const std::filesystem::path& csv_path, const MeasuredGradientFile& file) {
    file.validate();
    std::ostringstream out;
    const bool has_sigma = !file.uncertainties.empty();
    out << (has_sigma ? "d_m,gradient_N_per_m,sigma_N_per_m\n" : "d_m,gradient_N_per_m\n");
    for (std::size_t i = 0; i < file.separations.size(); ++i) {
        out << format_double(file.separations[i]) << ',' << format_double(file.gradients[i]);
        if (has_sigma) out << ',' << format_double(file.uncertainties[i]);
        out << '\n';
    }
    atomic_write_file(csv_path, out.str());

    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    write_json_file(sidecar, {{"radius_m", file.radius}, {"temperature_K", file.temperature}});
}

MeasuredGradientFile add_relative_noise(MeasuredGradientFile file, double sigma_rel,
                                        std::uint64_t seed) {
    if (!(sigma_rel >= 0.0)) throw input_error("add_relative_noise: sigma must be >= 0");
    Rng rng(derive_stream(seed, stream_tag::noise));
    for (double& v : file.gradients) v += sigma_rel * std::abs(v) * rng.normal();
    return file;
}

ForceCurve bin_measurements(const MeasuredGradientFile& file, std::size_t n_bins) {
    file.validate();
    if (n_bins < 2) throw input_error("bin_measurements: need at least 2 bins");
    if (file.separations.size() < n_bins)
        throw input_error("bin_measurements: fewer rows than bins");

    const double lo = file.separations.front();
    const double hi = file.separations.back();
    const double width = (hi - lo) / static_cast<double>(n_bins);

    std::vector<double> d_sum(n_bins, 0.0), v_sum(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    for (std::size_t i = 0; i < file.separations.size(); ++i) {
        std::size_t bin = width > 0.0
                              ? static_cast<std::size_t>((file.separations[i] - lo) / width)
                              : 0;
        bin = std::min(bin, n_bins - 1);
        d_sum[bin] += file.separations[i];
        v_sum[bin] += file.gradients[i];
        ++count[bin];
    }

    ForceCurve curve;
    curve.kind = CurveKind::gradient;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (count[b] == 0) continue;
        curve.separations.push_back(d_sum[b] / static_cast<double>(count[b]));
        curve.values.push_back(v_sum[b] / static_cast<double>(count[b]));
    }
    if (curve.separations.size() < 2)
        throw input_error("bin_measurements: all rows fall into a single bin");
    curve.validate();
    return curve;
}

MeasuredGradientFile synthesize_gradient_file(const Material& sample, const Material& sensor,
                                              const std::vector<double>& separations, double radius,
                                              double temperature) {
    MatsubaraSettings settings;
    settings.temperature = temperature;
    const ForceCurve curve = force_curve(separations, sample, sensor, settings, CurveKind::gradient,
                                         SphereGeometry{radius});
    MeasuredGradientFile file;
    file.separations = curve.separations;
    file.gradients = curve.values;
    file.radius = radius;
    file.temperature = temperature;
    return file;
}

PerFrequencyError per_frequency_error(const std::vector<SpectrumSample>& pred,
                                      const std::vector<SpectrumSample>& truth) {
    if (pred.size() != truth.size()) throw input_error("per_frequency_error: list length mismatch");
    if (pred.empty()) throw input_error("per_frequency_error: empty input");
    const FrequencyGrid& grid = truth.front().grid;
    for (const auto& s : pred)
        if (!(s.grid == grid)) throw input_error("per_frequency_error: grid mismatch");
    for (const auto& s : truth)
        if (!(s.grid == grid)) throw input_error("per_frequency_error: grid mismatch");

    PerFrequencyError out;
    out.grid = grid;
    out.mae_eps_real.assign(grid.size(), 0.0);
    out.mae_eps_imag.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out.mae_eps_real[k] += std::abs(pred[i].eps_real[k] - truth[i].eps_real[k]);
            out.mae_eps_imag[k] += std::abs(pred[i].eps_imag[k] - truth[i].eps_imag[k]);
        }
    }
    const auto n = static_cast<double>(pred.size());
    for (double& v : out.mae_eps_real) v /= n;
    for (double& v : out.mae_eps_imag) v /= n;
    return out;
}

BootstrapBand bootstrap_mean_band(const std::vector<double>& values, std::uint64_t seed,
                                  std::size_t resamples) {
    if (values.empty()) throw input_error("bootstrap_mean_band: no values");
    BootstrapBand band;
    band.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());

    Rng rng(derive_stream(seed, stream_tag::bootstrap_band));
    std::vector<double> means(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) acc += values[rng.below(values.size())];
        means[r] = acc / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    const auto rank = [&](double q) {
        const auto idx = static_cast<std::size_t>(
            std::llround(q * static_cast<double>(resamples - 1)));
        return means[std::min(idx, resamples - 1)];
    };
    band.lo = rank(0.05);
    band.hi = rank(0.95);
    return band;
}

void SweepSpec::validate() const {
    base.validate();
    if (d_max.empty()) throw config_error("sweep: d_max list is empty");
    if (!(d_min > 0.0)) throw config_error("sweep: d_min must be > 0");
    for (std::size_t i = 0; i < d_max.size(); ++i) {
        if (!(d_max[i] > d_min)) throw config_error("sweep: every d_max must exceed d_min");
        if (i > 0 && !(d_max[i] > d_max[i - 1]))
            throw config_error("sweep: d_max list must be strictly increasing");
    }
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw config_error("sweep: validation fraction must be in (0,1)");
}

namespace {

struct ValidationMetrics {
    double r2 = 0.0;
    std::vector<double> lowfreq_abs_err;  // per sample, |delta eps'| at w_min
    std::vector<SpectrumSample> predictions;
    std::vector<SpectrumSample> truths;
};

ValidationMetrics evaluate_on_validation(const Forest& forest, const Dataset& dataset) {
    const auto rows = dataset.validation_rows();
    if (rows.empty()) throw input_error("no validation samples");

    ValidationMetrics out;
    Matrix pred_t(rows.size(), 2 * dataset.spec.grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& sample = dataset.samples[rows[i]];
        SpectrumSample prediction = forest.predict(sample.curve);
        out.lowfreq_abs_err.push_back(
            std::abs(prediction.eps_real.front() - sample.spectrum.eps_real.front()));
        const auto t = forest.predict_transformed(sample.curve.values);
        for (std::size_t c = 0; c < t.size(); ++c) pred_t.at(i, c) = t[c];
        out.predictions.push_back(std::move(prediction));
        out.truths.push_back(sample.spectrum);
    }
    const Matrix truth_t = forest.target_transform.forward(target_matrix(dataset, rows));
    out.r2 = r2_score(pred_t, truth_t);
    return out;
}

}  // namespace

SweepResult dmax_sweep(const SweepSpec& spec, const Hyperparams& hyper) {
    spec.validate();
    Dataset dataset = generate_dataset(spec.base);
    split(dataset, spec.validation_fraction, derive_stream(spec.base.seed, stream_tag::split));

    // One training seed for every leg: restricting to the full range must
    // reproduce the unrestricted baseline bit for bit.
    const std::uint64_t train_seed = derive_stream(spec.base.seed, stream_tag::train);

    SweepResult result;
    for (std::size_t leg = 0; leg < spec.d_max.size(); ++leg) {
        const Dataset restricted = dataset.restrict_separations(spec.d_max[leg]);
        const Forest forest = fit_forest(restricted.train_view(), hyper, train_seed);
        const ValidationMetrics metrics = evaluate_on_validation(forest, restricted);

        SweepLeg out;
        out.d_max = spec.d_max[leg];
        out.mean_lowfreq_abs_err_eps_real =
            std::accumulate(metrics.lowfreq_abs_err.begin(), metrics.lowfreq_abs_err.end(), 0.0) /
            static_cast<double>(metrics.lowfreq_abs_err.size());
        out.band = bootstrap_mean_band(metrics.lowfreq_abs_err,
                                       derive_stream(spec.base.seed, stream_tag::bootstrap_band, leg));
        out.validation_r2 = metrics.r2;
        out.per_frequency = per_frequency_error(metrics.predictions, metrics.truths);
        result.legs.push_back(std::move(out));
    }
    return result;
}

namespace {

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ReferenceErrors reference_errors(const SpectrumSample& prediction, const SpectrumSample& reference) {
    if (!(prediction.grid == reference.grid))
        throw input_error("reference spectrum grid differs from the model grid");
    ReferenceErrors err;
    const std::size_t g = prediction.grid.size();
    err.abs_err_eps_real.resize(g);
    err.abs_err_eps_imag.resize(g);
    std::vector<double> rel_imag, rel_imag_low;
    const double decade_cut = prediction.grid.omega.front() * 10.0 * (1.0 + 1e-12);
    for (std::size_t k = 0; k < g; ++k) {
        err.abs_err_eps_real[k] = std::abs(prediction.eps_real[k] - reference.eps_real[k]);
        err.abs_err_eps_imag[k] = std::abs(prediction.eps_imag[k] - reference.eps_imag[k]);
        if (reference.eps_imag[k] != 0.0) {
            const double rel = err.abs_err_eps_imag[k] / std::abs(reference.eps_imag[k]);
            rel_imag.push_back(rel);
            if (prediction.grid.omega[k] <= decade_cut) rel_imag_low.push_back(rel);
        }
    }
    err.lowfreq_abs_err_eps_real = err.abs_err_eps_real.front();
    err.mean_abs_err_eps_real =
        std::accumulate(err.abs_err_eps_real.begin(), err.abs_err_eps_real.end(), 0.0) /
        static_cast<double>(g);
    err.median_rel_err_eps_imag = median(rel_imag);
    err.median_rel_err_eps_imag_lowest_decade = median(rel_imag_low);
    return err;
}

}  // namespace

ExperimentResult reconstruct_experiment(const MeasuredGradientFile& file, std::size_t n_bins,
                                        const DatasetSpec& training_base, const Hyperparams& hyper,
                                        double validation_fraction,
                                        const std::optional<SpectrumSample>& reference) {
    ExperimentResult result;
    result.binned = bin_measurements(file, n_bins);
    if (result.binned.separations.size() < 2)
        throw input_error("reconstruct_experiment: separation coverage narrower than 2 bins");

    DatasetSpec spec = training_base;
    spec.separations = result.binned.separations;
    spec.curve_kind = CurveKind::gradient;
    spec.sphere_radius = file.radius;
    spec.temperature = file.temperature;

    Dataset dataset = generate_dataset(spec);
    split(dataset, validation_fraction, derive_stream(spec.seed, stream_tag::split));
    const Forest forest =
        fit_forest(dataset.train_view(), hyper, derive_stream(spec.seed, stream_tag::train));

    const ValidationMetrics metrics = evaluate_on_validation(forest, dataset);
    result.report.validation_r2 = metrics.r2;
    result.report.val_lowfreq_abs_err_eps_real = metrics.lowfreq_abs_err;
    result.report.val_lowfreq_band = bootstrap_mean_band(
        metrics.lowfreq_abs_err, derive_stream(spec.seed, stream_tag::bootstrap_band));

    result.reconstruction = forest.predict(result.binned);
    if (reference) result.report.reference = reference_errors(result.reconstruction, *reference);
    return result;
}

}  // namespace casispec
