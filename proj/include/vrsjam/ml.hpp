#pragma once

// KNN and Random Forest classifiers over observation features, plus the
// split / normalization / confusion-matrix plumbing around them.

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vrsjam/types.hpp"

namespace vrsjam::ml {

enum class FeatureSet { WithVrs, WithoutVrs };

struct FeatureMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<ScenarioKind> labels;
    FeatureSet feature_set = FeatureSet::WithVrs;

    std::size_t size() const { return rows.size(); }
    std::size_t width() const { return rows.empty() ? 0 : rows.front().size(); }
};

/// Columns: rssi, sinr, pdr, delta_u[, vrs].
FeatureMatrix make_feature_matrix(std::span<const ObservationRecord> records, FeatureSet set);

struct SplitSpec {
    double train_fraction = 0.3;
    std::uint64_t seed = 1;
    bool stratified = true;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified: each class contributes round(fraction * n_class) shuffled rows to
/// train. Otherwise each row joins train independently with probability fraction.
/// Throws std::invalid_argument if any class is missing.
SplitIndices split_indices(std::span<const ScenarioKind> labels, const SplitSpec& spec);
std::pair<FeatureMatrix, FeatureMatrix> split_train_test(const FeatureMatrix& matrix, const SplitSpec& spec);
FeatureMatrix subset(const FeatureMatrix& matrix, std::span<const std::size_t> idx);

struct MinMaxScaler {
    std::vector<double> lo;
    std::vector<double> hi;

    static MinMaxScaler fit(const FeatureMatrix& train);
    /// Constant features map to 0.5; values outside the fit range clamp to [-0.1, 1.1].
    std::vector<double> transform(std::span<const double> row, bool clamp = true) const;
    FeatureMatrix transform(const FeatureMatrix& m, bool clamp = true) const;
};

struct NormalizedSplit {
    FeatureMatrix train;
    FeatureMatrix test;
    MinMaxScaler scaler;
};

NormalizedSplit normalize_minmax(const FeatureMatrix& train, const FeatureMatrix& test);

/// Majority vote among the k Euclidean-nearest rows; ties go to the smaller summed
/// distance, then to class order Interference < Smart < Constant.
ScenarioKind knn_classify(const FeatureMatrix& train, std::span<const double> query, int k);
std::vector<ScenarioKind> knn_classify_all(const FeatureMatrix& train, const FeatureMatrix& test, int k);

struct ForestParams {
    int n_trees = 100;
    int max_depth = 0;      // 0 = unlimited
    int min_leaf = 1;
    int max_features = 0;   // 0 = ceil(sqrt(width))
    std::uint64_t seed = 1;
    int threads = 0;        // 0 = hardware concurrency
    bool bootstrap = true;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    ScenarioKind leaf = ScenarioKind::Interference;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    ScenarioKind predict(std::span<const double> row) const;
    int depth() const;
};

struct RandomForest {
    std::vector<DecisionTree> trees;
    std::array<int, kNumClasses> votes(std::span<const double> row) const;
};

RandomForest rf_train(const FeatureMatrix& train, const ForestParams& params);
ScenarioKind rf_classify(const RandomForest& forest, std::span<const double> query);
std::vector<ScenarioKind> rf_classify_all(const RandomForest& forest, const FeatureMatrix& test);

/// Plurality over vote counts; ties by class order.
ScenarioKind plurality(const std::array<int, kNumClasses>& votes);

/// Rows are predicted classes, columns actual classes.
struct ConfusionMatrix {
    std::array<std::array<long, kNumClasses>, kNumClasses> counts{};

    long total() const;
    long correct() const;
    double accuracy() const;
    long column_sum(ScenarioKind actual) const;
    long at(ScenarioKind predicted, ScenarioKind actual) const {
        return counts[static_cast<int>(predicted)][static_cast<int>(actual)];
    }
};

struct Evaluation {
    ConfusionMatrix matrix;
    double accuracy = 0.0;
};

/// Throws std::invalid_argument on length mismatch.
Evaluation evaluate(std::span<const ScenarioKind> predictions, std::span<const ScenarioKind> truths);

}  // namespace vrsjam::ml
