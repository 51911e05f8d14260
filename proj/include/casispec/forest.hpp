#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "casispec/rng.hpp"
#include "casispec/synth.hpp"

namespace casispec {

// Row-major dense matrix; enough linear algebra for trees.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

// x -> sign(x) log10(1 + |x|/scale) per column. Strictly monotone and
// exactly invertible; brings forces spanning many decades and metallic eps'
// onto comparable scales. The per-column scale is an order statistic of |x|
// over the fitted rows: the median for features, a low quantile for targets
// (so that leaf averaging in transformed space behaves like relative error
// for nearly the whole population, not just the upper half). Vanishing
// quantiles fall back to the smallest positive magnitude, then to 1.
struct SignedLogTransform {
    std::vector<double> scales;

    static SignedLogTransform fit(const Matrix& m, double scale_quantile = 0.5);
    double forward_one(double x, std::size_t col) const;
    double inverse_one(double t, std::size_t col) const;
    Matrix forward(const Matrix& m) const;
    Matrix inverse(const Matrix& m) const;
};

// target-scale quantile used by fit_forest
inline constexpr double target_scale_quantile = 0.05;

struct Hyperparams {
    std::size_t n_trees = 200;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_leaf = 2;
    double max_features_fraction = 1.0 / 3.0;
    bool bootstrap = true;
    std::size_t n_ensembles = 4;  // independently trained forests, averaged

    void validate() const;
    bool operator==(const Hyperparams&) const = default;
};

// Flat preorder node array; leaves carry the mean target vector.
struct Tree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::uint64_t count = 0;
        std::vector<double> value;  // leaf mean, length = n outputs
    };
    std::vector<Node> nodes;

    const std::vector<double>& leaf_value(std::span<const double> features) const;
};

// Multi-output CART: greedy binary splits maximizing the reduction of total
// variance summed over outputs; each node examines a random subset of
// ceil(max_features_fraction * n_features) features. Ties go to the lowest
// feature index, then the lowest threshold.
Tree fit_tree(const Matrix& features, const Matrix& targets, const Hyperparams& hyper, Rng& rng);

struct Forest {
    Hyperparams hyper;
    SignedLogTransform feature_transform;
    SignedLogTransform target_transform;
    std::vector<double> separations;  // m, the feature axis
    FrequencyGrid grid;               // the target axis
    CurveKind curve_kind = CurveKind::pressure;
    std::string dataset_spec_hash;
    std::uint64_t seed = 0;
    std::vector<std::vector<Tree>> ensembles;

    // Mean over every tree of every ensemble, in transformed target space.
    std::vector<double> predict_transformed(std::span<const double> raw_features) const;

    // Full prediction: transform features, average trees, invert the target
    // transform. The curve must carry exactly the training separations.
    SpectrumSample predict(const ForceCurve& curve) const;
};

// Features are the (transformed) curve values, targets the concatenated
// transformed [eps' | eps''] arrays on the grid. Transforms are fitted on
// the train partition only. Tree t of ensemble e draws from an rng stream
// keyed by (seed, e, t), so fitting parallelizes without changing results.
Forest fit_forest(const TrainView& train, const Hyperparams& hyper, std::uint64_t seed);

Matrix feature_matrix(const Dataset& dataset, const std::vector<std::size_t>& rows);
Matrix target_matrix(const Dataset& dataset, const std::vector<std::size_t>& rows);

// Mean over output dimensions of 1 - SS_res/SS_tot; zero-variance dimensions
// are skipped. Throws input_error when every dimension is degenerate.
double r2_score(const Matrix& pred, const Matrix& truth);

struct HyperGrid {
    std::vector<std::size_t> n_trees{200};
    std::vector<std::size_t> max_depth{0};
    std::vector<std::size_t> min_samples_leaf{2};
    std::vector<double> max_features_fraction{1.0 / 3.0};
    bool bootstrap = true;
    std::size_t n_ensembles = 1;

    static HyperGrid defaults();  // 3 x 3 x 3 x 2 search grid
};

struct GridSearchResult {
    struct Row {
        Hyperparams hyper;
        std::vector<double> fold_r2;
        double mean_r2 = 0.0;
    };
    Hyperparams best;
    std::vector<Row> table;
};

// Every grid point scored by k-fold cross-validated R^2 (transformed target
// space) on the train partition only. folds == 1 requires holdout_fraction.
// Ties break toward fewer trees, then shallower depth.
GridSearchResult grid_search(const TrainView& train, const HyperGrid& grid, std::size_t folds,
                             std::uint64_t seed, std::optional<double> holdout_fraction = {});

nlohmann::json forest_to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& j);
void save_forest(const std::filesystem::path& path, const Forest& forest);
Forest load_forest(const std::filesystem::path& path);

}  // namespace casispec
