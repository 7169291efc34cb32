#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergo/error.hpp"

namespace ergo::gbdt {

struct FeatureMatrix {
    size_t rows = 0, cols = 0;
    std::vector<double> data;  // row-major

    static FeatureMatrix zeros(size_t rows, size_t cols) {
        return {rows, cols, std::vector<double>(rows * cols, 0.0)};
    }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    std::span<const double> row(size_t r) const {
        return std::span<const double>(data.data() + r * cols, cols);
    }
    void push_row(std::span<const double> values) {
        if (cols == 0) cols = values.size();
        if (values.size() != cols)
            throw PreconditionError("ml_models", "feature row width mismatch");
        data.insert(data.end(), values.begin(), values.end());
        ++rows;
    }
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;   // x[feature] <  threshold
    int right = -1;  // x[feature] >= threshold
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> x) const;
    int leaf_count() const;
    int depth() const;
};

struct TreeLimits {
    int max_depth = 6;
    int max_leaves = 27;
};

// Greedy regression tree on squared error. Splits are chosen best-first
// until the gain is zero or a limit is reached; leaves hold the mean
// residual of their samples.
DecisionTree fit_tree(const FeatureMatrix& features, std::span<const double> residuals,
                      const TreeLimits& limits);

inline constexpr int kNumClasses = 3;  // low < medium < high

struct TrainConfig {
    int n_estimators = 29;
    TreeLimits limits{};
    double learning_rate = 0.18;
    uint64_t seed = 0;  // recorded in the model file; training itself is exact
};

struct GbdtModel {
    int n_classes = kNumClasses;
    size_t n_features = 0;
    double learning_rate = 0.18;
    int n_estimators = 0;
    std::vector<double> init_logits;  // class log-priors
    // rounds[r][k]: the round-r tree for class k
    std::vector<std::vector<DecisionTree>> rounds;
    std::vector<std::string> feature_names;  // optional
    bool degenerate_single_class = false;

    // Per-class logits after `upto_rounds` boosting rounds (-1 = all).
    std::vector<double> class_scores(std::span<const double> x, int upto_rounds = -1) const;
    // Argmax with ties broken toward the higher-risk class.
    int predict_class(std::span<const double> x) const;

    nlohmann::json to_json() const;
    static GbdtModel from_json(const nlohmann::json& doc);
    void save(const std::string& path, const nlohmann::json& producer) const;
    static GbdtModel load(const std::string& path);
};

struct TrainResult {
    GbdtModel model;
    // softmax cross-entropy after each round; entry 0 is the prior-only loss
    std::vector<double> loss_trace;
};

// Multiclass softmax boosting: each round fits one regression tree per class
// to the negative gradient (one-hot minus probability).
TrainResult train(const FeatureMatrix& features, std::span<const int> labels,
                  const TrainConfig& cfg);

}  // namespace ergo::gbdt
