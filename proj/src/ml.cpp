#include "vrsjam/ml.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "vrsjam/seed.hpp"

namespace vrsjam::ml {

namespace {

int idx(ScenarioKind k) { return static_cast<int>(k); }

}  // namespace

FeatureMatrix make_feature_matrix(std::span<const ObservationRecord> records, FeatureSet set) {
    FeatureMatrix m;
    m.feature_set = set;
    m.rows.reserve(records.size());
    m.labels.reserve(records.size());
    for (const auto& r : records) {
        std::vector<double> row{r.rssi, r.sinr, r.pdr, r.delta_u};
        if (set == FeatureSet::WithVrs) row.push_back(r.vrs);
        m.rows.push_back(std::move(row));
        m.labels.push_back(r.class_label);
    }
    return m;
}

SplitIndices split_indices(std::span<const ScenarioKind> labels, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw std::invalid_argument("train_fraction must be in (0, 1)");
    }
    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(idx(labels[i]))].push_back(i);
    for (int c = 0; c < kNumClasses; ++c) {
        if (by_class[static_cast<std::size_t>(c)].empty()) {
            throw std::invalid_argument("split: class '" + std::string(to_string(static_cast<ScenarioKind>(c))) +
                                        "' has no rows");
        }
    }

    std::mt19937_64 rng(spec.seed);
    SplitIndices out;
    if (spec.stratified) {
        for (auto& rows : by_class) {
            std::shuffle(rows.begin(), rows.end(), rng);
            const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(rows.size())));
            out.train.insert(out.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
            out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
        }
    } else {
        std::bernoulli_distribution pick(spec.train_fraction);
        for (std::size_t i = 0; i < labels.size(); ++i) (pick(rng) ? out.train : out.test).push_back(i);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

FeatureMatrix subset(const FeatureMatrix& matrix, std::span<const std::size_t> rows) {
    FeatureMatrix out;
    out.feature_set = matrix.feature_set;
    out.rows.reserve(rows.size());
    out.labels.reserve(rows.size());
    for (auto i : rows) {
        out.rows.push_back(matrix.rows.at(i));
        out.labels.push_back(matrix.labels.at(i));
    }
    return out;
}

std::pair<FeatureMatrix, FeatureMatrix> split_train_test(const FeatureMatrix& matrix, const SplitSpec& spec) {
    const auto s = split_indices(matrix.labels, spec);
    return {subset(matrix, s.train), subset(matrix, s.test)};
}

MinMaxScaler MinMaxScaler::fit(const FeatureMatrix& train) {
    if (train.rows.empty()) throw std::invalid_argument("cannot fit a scaler on an empty set");
    MinMaxScaler s;
    s.lo = train.rows.front();
    s.hi = train.rows.front();
    for (const auto& r : train.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            s.lo[j] = std::min(s.lo[j], r[j]);
            s.hi[j] = std::max(s.hi[j], r[j]);
        }
    }
    return s;
}

std::vector<double> MinMaxScaler::transform(std::span<const double> row, bool clamp) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        const double span = hi[j] - lo[j];
        double v = span > 0.0 ? (row[j] - lo[j]) / span : 0.5;
        if (clamp) v = std::clamp(v, -0.1, 1.1);
        out[j] = v;
    }
    return out;
}

FeatureMatrix MinMaxScaler::transform(const FeatureMatrix& m, bool clamp) const {
    FeatureMatrix out = m;
    for (auto& r : out.rows) r = transform(r, clamp);
    return out;
}

NormalizedSplit normalize_minmax(const FeatureMatrix& train, const FeatureMatrix& test) {
    NormalizedSplit n;
    n.scaler = MinMaxScaler::fit(train);
    n.train = n.scaler.transform(train);
    n.test = n.scaler.transform(test);
    return n;
}

ScenarioKind plurality(const std::array<int, kNumClasses>& votes) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    return static_cast<ScenarioKind>(best);
}

ScenarioKind knn_classify(const FeatureMatrix& train, std::span<const double> query, int k) {
    if (train.rows.empty()) throw std::invalid_argument("knn: empty training set");
    if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
        throw std::invalid_argument("knn: k must be in [1, train size]");
    }
    std::vector<std::pair<double, std::size_t>> d(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto& r = train.rows[i];
        if (r.size() != query.size()) throw std::invalid_argument("knn: query width mismatch");
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) {
            const double diff = r[j] - query[j];
            s += diff * diff;
        }
        d[i] = {s, i};
    }
    const auto kk = static_cast<std::ptrdiff_t>(k);
    std::partial_sort(d.begin(), d.begin() + kk, d.end());

    std::array<int, kNumClasses> votes{};
    std::array<double, kNumClasses> dist_sum{};
    for (std::ptrdiff_t i = 0; i < kk; ++i) {
        const int c = idx(train.labels[d[static_cast<std::size_t>(i)].second]);
        votes[static_cast<std::size_t>(c)] += 1;
        dist_sum[static_cast<std::size_t>(c)] += std::sqrt(d[static_cast<std::size_t>(i)].first);
    }
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        const auto bu = static_cast<std::size_t>(best);
        if (votes[cu] > votes[bu] || (votes[cu] == votes[bu] && votes[cu] > 0 && dist_sum[cu] < dist_sum[bu])) {
            best = c;
        }
    }
    return static_cast<ScenarioKind>(best);
}

std::vector<ScenarioKind> knn_classify_all(const FeatureMatrix& train, const FeatureMatrix& test, int k) {
    std::vector<ScenarioKind> out(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) out[i] = knn_classify(train, test.rows[i], k);
    return out;
}

ScenarioKind DecisionTree::predict(std::span<const double> row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(node)];
        node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].leaf;
}

int DecisionTree::depth() const {
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (nodes[i].feature >= 0) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return best;
}

namespace {

using Counts = std::array<int, kNumClasses>;

double gini(const Counts& c, int n) {
    if (n == 0) return 0.0;
    double s = 0.0;
    for (int v : c) {
        const double p = static_cast<double>(v) / n;
        s += p * p;
    }
    return 1.0 - s;
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, const ForestParams& params, std::mt19937_64& rng)
        : data_(data), params_(params), rng_(rng), width_(static_cast<int>(data.width())) {
        mtry_ = params.max_features > 0 ? std::min(params.max_features, width_)
                                        : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(width_))));
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        tree_.nodes.clear();
        grow(rows, 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t>& rows, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        Counts counts{};
        for (auto r : rows) counts[static_cast<std::size_t>(idx(data_.labels[r]))]++;
        const int n = static_cast<int>(rows.size());

        TreeNode leaf;
        leaf.leaf = plurality(counts);
        const bool pure = *std::max_element(counts.begin(), counts.end()) == n;
        const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
        if (pure || depth_capped || n < 2 * params_.min_leaf) {
            tree_.nodes[static_cast<std::size_t>(id)] = leaf;
            return id;
        }

        std::vector<int> features(static_cast<std::size_t>(width_));
        std::iota(features.begin(), features.end(), 0);
        std::shuffle(features.begin(), features.end(), rng_);

        Split best;
        // Draw mtry candidates; keep drawing only if none of them admits a split.
        for (int i = 0; i < width_; ++i) {
            if (i >= mtry_ && best.feature >= 0) break;
            consider(rows, features[static_cast<std::size_t>(i)], counts, best);
        }
        if (best.feature < 0) {
            tree_.nodes[static_cast<std::size_t>(id)] = leaf;
            return id;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (data_.rows[r][static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        node.leaf = leaf.leaf;
        return id;
    }

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double impurity = 0.0;
    };

    void consider(const std::vector<std::size_t>& rows, int f, const Counts& total, Split& best) {
        const auto fu = static_cast<std::size_t>(f);
        std::vector<std::pair<double, int>> vals(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = {data_.rows[rows[i]][fu], idx(data_.labels[rows[i]])};
        std::sort(vals.begin(), vals.end());
        const int n = static_cast<int>(vals.size());
        Counts left{};
        for (int i = 0; i + 1 < n; ++i) {
            left[static_cast<std::size_t>(vals[static_cast<std::size_t>(i)].second)]++;
            const double a = vals[static_cast<std::size_t>(i)].first;
            const double b = vals[static_cast<std::size_t>(i + 1)].first;
            if (!(a < b)) continue;
            const int nl = i + 1;
            const int nr = n - nl;
            if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
            Counts right{};
            for (int c = 0; c < kNumClasses; ++c) {
                right[static_cast<std::size_t>(c)] = total[static_cast<std::size_t>(c)] - left[static_cast<std::size_t>(c)];
            }
            const double imp = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
            if (best.feature < 0 || imp < best.impurity - 1e-12) {
                best.feature = f;
                best.threshold = a + (b - a) / 2.0;
                best.impurity = imp;
            }
        }
    }

    const FeatureMatrix& data_;
    const ForestParams& params_;
    std::mt19937_64& rng_;
    int width_;
    int mtry_ = 1;
    DecisionTree tree_;
};

}  // namespace

RandomForest rf_train(const FeatureMatrix& train, const ForestParams& params) {
    if (params.n_trees < 1) throw std::invalid_argument("rf_train: n_trees must be >= 1");
    if (train.rows.empty()) throw std::invalid_argument("rf_train: empty training set");
    if (params.min_leaf < 1) throw std::invalid_argument("rf_train: min_leaf must be >= 1");

    RandomForest forest;
    forest.trees.resize(static_cast<std::size_t>(params.n_trees));
    const std::size_t n = train.size();

    auto fit_one = [&](int t) {
        std::mt19937_64 rng(derive_seed(params.seed, {static_cast<std::uint64_t>(t)}));
        std::vector<std::size_t> rows(n);
        if (params.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (auto& r : rows) r = pick(rng);
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        TreeBuilder builder(train, params, rng);
        forest.trees[static_cast<std::size_t>(t)] = builder.build(std::move(rows));
    };

    int threads = params.threads > 0 ? params.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, params.n_trees);
    if (threads == 1) {
        for (int t = 0; t < params.n_trees; ++t) fit_one(t);
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (int t = w; t < params.n_trees; t += threads) fit_one(t);
            });
        }
    }
    return forest;
}

std::array<int, kNumClasses> RandomForest::votes(std::span<const double> row) const {
    std::array<int, kNumClasses> v{};
    for (const auto& t : trees) v[static_cast<std::size_t>(idx(t.predict(row)))]++;
    return v;
}

ScenarioKind rf_classify(const RandomForest& forest, std::span<const double> query) {
    return plurality(forest.votes(query));
}

std::vector<ScenarioKind> rf_classify_all(const RandomForest& forest, const FeatureMatrix& test) {
    std::vector<ScenarioKind> out(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) out[i] = rf_classify(forest, test.rows[i]);
    return out;
}

long ConfusionMatrix::total() const {
    long s = 0;
    for (const auto& r : counts) s += std::accumulate(r.begin(), r.end(), 0L);
    return s;
}

long ConfusionMatrix::correct() const {
    long s = 0;
    for (int c = 0; c < kNumClasses; ++c) s += counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    return s;
}

double ConfusionMatrix::accuracy() const {
    const long t = total();
    return t > 0 ? static_cast<double>(correct()) / static_cast<double>(t) : 0.0;
}

long ConfusionMatrix::column_sum(ScenarioKind actual) const {
    long s = 0;
    for (const auto& r : counts) s += r[static_cast<std::size_t>(idx(actual))];
    return s;
}

Evaluation evaluate(std::span<const ScenarioKind> predictions, std::span<const ScenarioKind> truths) {
    if (predictions.size() != truths.size()) {
        throw std::invalid_argument("evaluate: predictions and truths differ in length");
    }
    Evaluation e;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        e.matrix.counts[static_cast<std::size_t>(idx(predictions[i]))][static_cast<std::size_t>(idx(truths[i]))]++;
    }
    e.accuracy = e.matrix.accuracy();
    return e;
}

}  // namespace vrsjam::ml
