#include "casispec/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "casispec/errors.hpp"
#include "casispec/io.hpp"
#include "casispec/parallel.hpp"

namespace casispec {

namespace {

// q = 0.5 is the exact median (midpoint convention); other quantiles use the
// nearest-rank order statistic.
double abs_quantile(std::vector<double> values, double q) {
    for (double& v : values) v = std::abs(v);
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (q == 0.5 && n % 2 == 0) return 0.5 * (values[n / 2 - 1] + values[n / 2]);
    const auto idx = static_cast<std::size_t>(
        std::llround(q * static_cast<double>(n - 1)));
    return values[std::min(idx, n - 1)];
}

double smallest_positive(const std::vector<double>& values) {
    double best = 0.0;
    for (const double v : values) {
        const double a = std::abs(v);
        if (a > 0.0 && (best == 0.0 || a < best)) best = a;
    }
    return best;
}

void check_finite(const Matrix& m, const char* what) {
    for (const double v : m.data)
        if (!std::isfinite(v)) throw input_error(std::string(what) + ": non-finite entry");
    }

}  // namespace

SignedLogTransform SignedLogTransform::fit(const Matrix& m, double scale_quantile) {
    SignedLogTransform t;
    t.scales.resize(m.cols);
    std::vector<double> column(m.rows);
    for (std::size_t c = 0; c < m.cols; ++c) {
        for (std::size_t r = 0; r < m.rows; ++r) column[r] = m.at(r, c);
        double s = abs_quantile(column, scale_quantile);
        if (!(s > 0.0)) s = smallest_positive(column);
        t.scales[c] = s > 0.0 ? s : 1.0;
    }
    return t;
}

double SignedLogTransform::forward_one(double x, std::size_t col) const {
    const double s = scales.at(col);
    // log1p/expm1 keep the round trip exact even for |x| << scale
    const double mag = std::log1p(std::abs(x) / s) / std::numbers::ln10;
    return x < 0.0 ? -mag : mag;
}

double SignedLogTransform::inverse_one(double t, std::size_t col) const {
    const double s = scales.at(col);
    const double mag = s * std::expm1(std::abs(t) * std::numbers::ln10);
    return t < 0.0 ? -mag : mag;
}

Matrix SignedLogTransform::forward(const Matrix& m) const {
    Matrix out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out.at(r, c) = forward_one(m.at(r, c), c);
    return out;
}

Matrix SignedLogTransform::inverse(const Matrix& m) const {
    Matrix out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out.at(r, c) = inverse_one(m.at(r, c), c);
    return out;
}

void Hyperparams::validate() const {
    if (n_trees < 1) throw config_error("hyperparams: n_trees must be >= 1");
    if (min_samples_leaf < 1) throw config_error("hyperparams: min_samples_leaf must be >= 1");
    if (!(max_features_fraction > 0.0 && max_features_fraction <= 1.0))
        throw config_error("hyperparams: max_features_fraction must be in (0,1]");
    if (n_ensembles < 1) throw config_error("hyperparams: n_ensembles must be >= 1");
}

const std::vector<double>& Tree::leaf_value(std::span<const double> features) const {
    std::size_t i = 0;
    for (;;) {
        const Node& node = nodes[i];
        if (node.feature < 0) return node.value;
        i = features[static_cast<std::size_t>(node.feature)] <= node.threshold
                ? static_cast<std::size_t>(node.left)
                : static_cast<std::size_t>(node.right);
    }
}

namespace {

std::size_t feature_subset_size(double fraction, std::size_t n_features) {
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_features)));
    return std::clamp<std::size_t>(k, 1, n_features);
}

struct TreeBuilder {
    const Matrix& features;
    const Matrix& targets;
    const Hyperparams& hyper;
    Rng& rng;
    std::size_t n_subset;
    Tree tree;
    std::vector<std::size_t> feature_scratch;

    TreeBuilder(const Matrix& x, const Matrix& y, const Hyperparams& h, Rng& r)
        : features(x), targets(y), hyper(h), rng(r),
          n_subset(feature_subset_size(h.max_features_fraction, x.cols)),
          feature_scratch(x.cols) {}

    // Candidate features for one node: all of them, or a uniform random
    // subset (sorted, so the lowest-index tie-break is well defined).
    std::vector<std::size_t> choose_features() {
        if (n_subset == features.cols) {
            std::vector<std::size_t> all(features.cols);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::iota(feature_scratch.begin(), feature_scratch.end(), 0);
        for (std::size_t i = 0; i < n_subset; ++i) {
            const std::size_t j = i + rng.below(feature_scratch.size() - i);
            std::swap(feature_scratch[i], feature_scratch[j]);
        }
        std::vector<std::size_t> chosen(feature_scratch.begin(),
                                        feature_scratch.begin() + static_cast<std::ptrdiff_t>(n_subset));
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    int build(std::vector<std::size_t> rows, std::size_t depth) {
        const int index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[index].count = rows.size();

        const std::size_t n = rows.size();
        const std::size_t m = targets.cols;
        std::vector<double> total(m, 0.0);
        for (const std::size_t r : rows)
            for (std::size_t c = 0; c < m; ++c) total[c] += targets.at(r, c);

        const bool depth_ok = hyper.max_depth == 0 || depth < hyper.max_depth;
        int best_feature = -1;
        double best_threshold = 0.0;

        if (depth_ok && n >= 2 * hyper.min_samples_leaf) {
            // Maximizing sum_c (S_L^2/n_L + S_R^2/n_R) over split positions is
            // the variance-sum reduction criterion; the parent value is the
            // bar a split must clear.
            double parent_score = 0.0;
            for (std::size_t c = 0; c < m; ++c) parent_score += total[c] * total[c] / static_cast<double>(n);
            double best_score = parent_score;

            std::vector<std::pair<double, std::size_t>> order(n);
            std::vector<double> left(m);
            for (const std::size_t f : choose_features()) {
                for (std::size_t i = 0; i < n; ++i) order[i] = {features.at(rows[i], f), rows[i]};
                std::sort(order.begin(), order.end());
                if (!(order.front().first < order.back().first)) continue;

                std::fill(left.begin(), left.end(), 0.0);
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    const std::size_t r = order[i].second;
                    for (std::size_t c = 0; c < m; ++c) left[c] += targets.at(r, c);
                    const std::size_t nl = i + 1, nr = n - nl;
                    if (nl < hyper.min_samples_leaf || nr < hyper.min_samples_leaf) continue;
                    if (!(order[i].first < order[i + 1].first)) continue;

                    double score = 0.0;
                    for (std::size_t c = 0; c < m; ++c) {
                        const double sl = left[c];
                        const double sr = total[c] - sl;
                        score += sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr);
                    }
                    if (score > best_score) {
                        best_score = score;
                        best_feature = static_cast<int>(f);
                        double thr = std::midpoint(order[i].first, order[i + 1].first);
                        if (thr >= order[i + 1].first) thr = order[i].first;  // rounding guard
                        best_threshold = thr;
                    }
                }
            }
        }

        if (best_feature < 0) {
            auto& node = tree.nodes[index];
            node.value.resize(m);
            for (std::size_t c = 0; c < m; ++c) node.value[c] = total[c] / static_cast<double>(n);
            return index;
        }

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(n);
        right_rows.reserve(n);
        for (const std::size_t r : rows) {
            if (features.at(r, static_cast<std::size_t>(best_feature)) <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[index].feature = best_feature;
        tree.nodes[index].threshold = best_threshold;
        const int left_index = build(std::move(left_rows), depth + 1);
        tree.nodes[index].left = left_index;
        const int right_index = build(std::move(right_rows), depth + 1);
        tree.nodes[index].right = right_index;
        return index;
    }
};

Tree fit_tree_rows(const Matrix& x, const Matrix& y, std::vector<std::size_t> rows,
                   const Hyperparams& hyper, Rng& rng) {
    TreeBuilder builder(x, y, hyper, rng);
    builder.build(std::move(rows), 0);
    return std::move(builder.tree);
}

}  // namespace

Tree fit_tree(const Matrix& features, const Matrix& targets, const Hyperparams& hyper, Rng& rng) {
    hyper.validate();
    if (features.rows == 0) throw input_error("fit_tree: empty training set");
    if (features.rows != targets.rows) throw input_error("fit_tree: feature/target row mismatch");
    check_finite(features, "fit_tree features");
    check_finite(targets, "fit_tree targets");
    std::vector<std::size_t> rows(features.rows);
    std::iota(rows.begin(), rows.end(), 0);
    return fit_tree_rows(features, targets, std::move(rows), hyper, rng);
}

Matrix feature_matrix(const Dataset& dataset, const std::vector<std::size_t>& rows) {
    const std::size_t cols = dataset.spec.separations.size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& curve = dataset.samples[rows[i]].curve;
        for (std::size_t c = 0; c < cols; ++c) m.at(i, c) = curve.values[c];
    }
    return m;
}

Matrix target_matrix(const Dataset& dataset, const std::vector<std::size_t>& rows) {
    const std::size_t g = dataset.spec.grid.size();
    Matrix m(rows.size(), 2 * g);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& spectrum = dataset.samples[rows[i]].spectrum;
        for (std::size_t c = 0; c < g; ++c) {
            m.at(i, c) = spectrum.eps_real[c];
            m.at(i, g + c) = spectrum.eps_imag[c];
        }
    }
    return m;
}

std::vector<double> Forest::predict_transformed(std::span<const double> raw_features) const {
    std::vector<double> feat(raw_features.size());
    for (std::size_t i = 0; i < feat.size(); ++i)
        feat[i] = feature_transform.forward_one(raw_features[i], i);

    const std::size_t m = 2 * grid.size();
    std::vector<double> acc(m, 0.0);
    std::size_t count = 0;
    for (const auto& ensemble : ensembles)
        for (const auto& tree : ensemble) {
            const auto& value = tree.leaf_value(feat);
            for (std::size_t c = 0; c < m; ++c) acc[c] += value[c];
            ++count;
        }
    if (count == 0) throw input_error("forest has no trees");
    for (double& v : acc) v /= static_cast<double>(count);
    return acc;
}

SpectrumSample Forest::predict(const ForceCurve& curve) const {
    if (curve.kind != curve_kind)
        throw input_error("predict: curve kind differs from the training curves");
    if (curve.separations.size() != separations.size())
        throw input_error("predict: curve has " + std::to_string(curve.separations.size()) +
                          " separations, model was trained on " + std::to_string(separations.size()));
    for (std::size_t i = 0; i < separations.size(); ++i)
        if (curve.separations[i] != separations[i])
            throw input_error("predict: separation " + std::to_string(i) + " differs: curve has " +
                              format_double(curve.separations[i]) + " m, model was trained at " +
                              format_double(separations[i]) + " m");

    const auto t = predict_transformed(curve.values);
    const std::size_t g = grid.size();
    SpectrumSample s;
    s.grid = grid;
    s.eps_real.resize(g);
    s.eps_imag.resize(g);
    for (std::size_t k = 0; k < g; ++k) {
        s.eps_real[k] = target_transform.inverse_one(t[k], k);
        s.eps_imag[k] = target_transform.inverse_one(t[g + k], g + k);
    }
    s.validate();
    return s;
}

Forest fit_forest(const TrainView& train, const Hyperparams& hyper, std::uint64_t seed) {
    hyper.validate();
    if (!train.dataset) throw input_error("fit_forest: detached train view");
    if (train.rows.size() < 2) throw input_error("fit_forest: need at least 2 training samples");
    const Dataset& dataset = *train.dataset;

    const Matrix x_raw = feature_matrix(dataset, train.rows);
    const Matrix y_raw = target_matrix(dataset, train.rows);
    check_finite(x_raw, "fit_forest features");
    check_finite(y_raw, "fit_forest targets");

    Forest forest;
    forest.hyper = hyper;
    forest.feature_transform = SignedLogTransform::fit(x_raw);
    forest.target_transform = SignedLogTransform::fit(y_raw, target_scale_quantile);
    forest.separations = dataset.spec.separations;
    forest.grid = dataset.spec.grid;
    forest.curve_kind = dataset.spec.curve_kind;
    forest.dataset_spec_hash = dataset_spec_hash(dataset.spec);
    forest.seed = seed;

    const Matrix x = forest.feature_transform.forward(x_raw);
    const Matrix y = forest.target_transform.forward(y_raw);

    forest.ensembles.assign(hyper.n_ensembles, std::vector<Tree>(hyper.n_trees));
    const std::size_t n = x.rows;
    parallel_for(hyper.n_ensembles * hyper.n_trees, [&](std::size_t idx) {
        const std::size_t e = idx / hyper.n_trees;
        const std::size_t t = idx % hyper.n_trees;
        Rng rng(derive_stream(derive_stream(seed, stream_tag::ensemble, e), stream_tag::tree, t));
        std::vector<std::size_t> rows;
        rows.reserve(n);
        if (hyper.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) rows.push_back(rng.below(n));
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), 0);
        }
        forest.ensembles[e][t] = fit_tree_rows(x, y, std::move(rows), hyper, rng);
    });
    return forest;
}

double r2_score(const Matrix& pred, const Matrix& truth) {
    if (pred.rows != truth.rows || pred.cols != truth.cols)
        throw input_error("r2_score: shape mismatch");
    if (truth.rows < 2) throw input_error("r2_score: need at least 2 rows");

    double acc = 0.0;
    std::size_t retained = 0;
    for (std::size_t c = 0; c < truth.cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < truth.rows; ++r) mean += truth.at(r, c);
        mean /= static_cast<double>(truth.rows);
        double ss_tot = 0.0, ss_res = 0.0;
        for (std::size_t r = 0; r < truth.rows; ++r) {
            const double dt = truth.at(r, c) - mean;
            const double dr = truth.at(r, c) - pred.at(r, c);
            ss_tot += dt * dt;
            ss_res += dr * dr;
        }
        if (ss_tot == 0.0) continue;
        acc += 1.0 - ss_res / ss_tot;
        ++retained;
    }
    if (retained == 0) throw input_error("r2_score: every output dimension has zero variance");
    return acc / static_cast<double>(retained);
}

HyperGrid HyperGrid::defaults() {
    HyperGrid g;
    g.n_trees = {100, 200, 400};
    g.max_depth = {8, 16, 0};
    g.min_samples_leaf = {1, 2, 5};
    g.max_features_fraction = {1.0 / 3.0, 1.0};
    return g;
}

GridSearchResult grid_search(const TrainView& train, const HyperGrid& grid, std::size_t folds,
                             std::uint64_t seed, std::optional<double> holdout_fraction) {
    if (grid.n_trees.empty() || grid.max_depth.empty() || grid.min_samples_leaf.empty() ||
        grid.max_features_fraction.empty())
        throw config_error("grid_search: every grid axis needs at least one value");
    if (folds < 1) throw config_error("grid_search: folds must be >= 1");
    if (folds == 1 && !holdout_fraction)
        throw config_error("grid_search: folds = 1 requires a holdout fraction");
    if (holdout_fraction && !(*holdout_fraction > 0.0 && *holdout_fraction < 1.0))
        throw config_error("grid_search: holdout fraction must be in (0,1)");

    const std::size_t n = train.rows.size();
    if (n < 4) throw input_error("grid_search: too few training samples");
    if (folds > n) throw config_error("grid_search: more folds than training samples");

    // Deterministic fold assignment over positions into the train view.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng fold_rng(derive_stream(seed, stream_tag::fold));
    fold_rng.shuffle(order);

    std::vector<std::vector<std::size_t>> held;  // positions per evaluation fold
    if (folds == 1) {
        auto k = static_cast<std::size_t>(std::llround(*holdout_fraction * static_cast<double>(n)));
        k = std::clamp<std::size_t>(k, 1, n - 1);
        held.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
        held.resize(folds);
        for (std::size_t i = 0; i < n; ++i) held[i % folds].push_back(order[i]);
    }
    for (auto& h : held) std::sort(h.begin(), h.end());

    const Dataset& dataset = *train.dataset;
    GridSearchResult result;
    std::size_t point = 0;
    for (const std::size_t nt : grid.n_trees)
        for (const std::size_t md : grid.max_depth)
            for (const std::size_t ml : grid.min_samples_leaf)
                for (const double mf : grid.max_features_fraction) {
                    Hyperparams h;
                    h.n_trees = nt;
                    h.max_depth = md;
                    h.min_samples_leaf = ml;
                    h.max_features_fraction = mf;
                    h.bootstrap = grid.bootstrap;
                    h.n_ensembles = grid.n_ensembles;

                    GridSearchResult::Row row;
                    row.hyper = h;
                    for (std::size_t f = 0; f < held.size(); ++f) {
                        std::vector<char> is_held(n, 0);
                        for (const std::size_t pos : held[f]) is_held[pos] = 1;
                        std::vector<std::size_t> fit_positions;
                        for (std::size_t pos = 0; pos < n; ++pos)
                            if (!is_held[pos]) fit_positions.push_back(pos);

                        const Forest forest =
                            fit_forest(train.subset(fit_positions), h,
                                       derive_stream(seed, stream_tag::grid_point,
                                                     point * held.size() + f));

                        Matrix pred(held[f].size(), 2 * dataset.spec.grid.size());
                        std::vector<std::size_t> held_rows;
                        for (const std::size_t pos : held[f]) held_rows.push_back(train.rows[pos]);
                        for (std::size_t i = 0; i < held_rows.size(); ++i) {
                            const auto p = forest.predict_transformed(
                                dataset.samples[held_rows[i]].curve.values);
                            for (std::size_t c = 0; c < p.size(); ++c) pred.at(i, c) = p[c];
                        }
                        const Matrix truth =
                            forest.target_transform.forward(target_matrix(dataset, held_rows));
                        row.fold_r2.push_back(r2_score(pred, truth));
                    }
                    row.mean_r2 = std::accumulate(row.fold_r2.begin(), row.fold_r2.end(), 0.0) /
                                  static_cast<double>(row.fold_r2.size());
                    result.table.push_back(std::move(row));
                    ++point;
                }

    const auto depth_key = [](std::size_t d) {
        return d == 0 ? std::numeric_limits<std::size_t>::max() : d;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i) {
        const auto& cand = result.table[i];
        const auto& cur = result.table[best];
        if (cand.mean_r2 > cur.mean_r2 ||
            (cand.mean_r2 == cur.mean_r2 &&
             (cand.hyper.n_trees < cur.hyper.n_trees ||
              (cand.hyper.n_trees == cur.hyper.n_trees &&
               depth_key(cand.hyper.max_depth) < depth_key(cur.hyper.max_depth)))))
            best = i;
    }
    result.best = result.table[best].hyper;
    return result;
}

namespace {

nlohmann::json tree_to_json(const Tree& tree) {
    nlohmann::json feature = nlohmann::json::array();
    nlohmann::json threshold = nlohmann::json::array();
    nlohmann::json left = nlohmann::json::array();
    nlohmann::json right = nlohmann::json::array();
    nlohmann::json count = nlohmann::json::array();
    nlohmann::json value = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
        feature.push_back(node.feature);
        threshold.push_back(node.threshold);
        left.push_back(node.left);
        right.push_back(node.right);
        count.push_back(node.count);
        value.push_back(node.value);
    }
    return {{"feature", std::move(feature)}, {"threshold", std::move(threshold)},
            {"left", std::move(left)},       {"right", std::move(right)},
            {"count", std::move(count)},     {"value", std::move(value)}};
}

Tree tree_from_json(const nlohmann::json& j, std::size_t n_outputs) {
    reject_unknown_keys(j, {"feature", "threshold", "left", "right", "count", "value"}, "tree");
    const auto& feature = j.at("feature");
    const std::size_t n = feature.size();
    if (j.at("threshold").size() != n || j.at("left").size() != n || j.at("right").size() != n ||
        j.at("count").size() != n || j.at("value").size() != n)
        throw input_error("tree: node arrays differ in length");
    Tree tree;
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Tree::Node& node = tree.nodes[i];
        node.feature = feature[i].get<int>();
        node.threshold = j.at("threshold")[i].get<double>();
        node.left = j.at("left")[i].get<int>();
        node.right = j.at("right")[i].get<int>();
        node.count = j.at("count")[i].get<std::uint64_t>();
        node.value = j.at("value")[i].get<std::vector<double>>();
        if (node.feature < 0) {
            if (node.value.size() != n_outputs) throw input_error("tree: leaf value length mismatch");
        } else if (node.left < 0 || node.right < 0 || node.left >= static_cast<int>(n) ||
                   node.right >= static_cast<int>(n)) {
            throw input_error("tree: child index out of range");
        }
    }
    return tree;
}

}  // namespace

nlohmann::json forest_to_json(const Forest& forest) {
    nlohmann::json ensembles = nlohmann::json::array();
    for (const auto& ensemble : forest.ensembles) {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : ensemble) trees.push_back(tree_to_json(tree));
        ensembles.push_back(std::move(trees));
    }
    return {{"format_version", 1},
            {"hyperparams",
             {{"n_trees", forest.hyper.n_trees},
              {"max_depth", forest.hyper.max_depth},
              {"min_samples_leaf", forest.hyper.min_samples_leaf},
              {"max_features_fraction", forest.hyper.max_features_fraction},
              {"bootstrap", forest.hyper.bootstrap},
              {"n_ensembles", forest.hyper.n_ensembles}}},
            {"feature_transform", {{"scales", forest.feature_transform.scales}}},
            {"target_transform", {{"scales", forest.target_transform.scales}}},
            {"separations_m", forest.separations},
            {"grid_omega_rad_s", forest.grid.omega},
            {"curve_kind", forest.curve_kind == CurveKind::pressure ? "pressure" : "gradient"},
            {"training", {{"dataset_spec_hash", forest.dataset_spec_hash}, {"seed", forest.seed}}},
            {"ensembles", std::move(ensembles)}};
}

Forest forest_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"format_version", "hyperparams", "feature_transform", "target_transform",
                         "separations_m", "grid_omega_rad_s", "curve_kind", "training", "ensembles",
                         "version", "config_echo"},
                        "forest");
    Forest forest;
    const auto& h = j.at("hyperparams");
    forest.hyper.n_trees = h.at("n_trees").get<std::size_t>();
    forest.hyper.max_depth = h.at("max_depth").get<std::size_t>();
    forest.hyper.min_samples_leaf = h.at("min_samples_leaf").get<std::size_t>();
    forest.hyper.max_features_fraction = h.at("max_features_fraction").get<double>();
    forest.hyper.bootstrap = h.at("bootstrap").get<bool>();
    forest.hyper.n_ensembles = h.at("n_ensembles").get<std::size_t>();
    forest.feature_transform.scales = j.at("feature_transform").at("scales").get<std::vector<double>>();
    forest.target_transform.scales = j.at("target_transform").at("scales").get<std::vector<double>>();
    forest.separations = j.at("separations_m").get<std::vector<double>>();
    forest.grid.omega = j.at("grid_omega_rad_s").get<std::vector<double>>();
    forest.grid.validate();
    const std::string kind = j.at("curve_kind").get<std::string>();
    if (kind == "pressure")
        forest.curve_kind = CurveKind::pressure;
    else if (kind == "gradient")
        forest.curve_kind = CurveKind::gradient;
    else
        throw input_error("forest: unknown curve kind '" + kind + "'");
    forest.dataset_spec_hash = j.at("training").at("dataset_spec_hash").get<std::string>();
    forest.seed = j.at("training").at("seed").get<std::uint64_t>();

    if (forest.feature_transform.scales.size() != forest.separations.size())
        throw input_error("forest: feature transform scales do not match the separations");
    if (forest.target_transform.scales.size() != 2 * forest.grid.size())
        throw input_error("forest: target transform scales do not match the grid");

    const std::size_t n_outputs = 2 * forest.grid.size();
    for (const auto& ens : j.at("ensembles")) {
        std::vector<Tree> trees;
        for (const auto& t : ens) trees.push_back(tree_from_json(t, n_outputs));
        forest.ensembles.push_back(std::move(trees));
    }
    if (forest.ensembles.empty() || forest.ensembles.front().empty())
        throw input_error("forest: no trees");
    return forest;
}

void save_forest(const std::filesystem::path& path, const Forest& forest) {
    atomic_write_file(path, forest_to_json(forest).dump() + "\n");
}

Forest load_forest(const std::filesystem::path& path) { return forest_from_json(read_json_file(path)); }

}  // namespace casispec
