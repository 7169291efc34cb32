#include "ergo/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "ergo/io_util.hpp"

using nlohmann::json;

namespace ergo::gbdt {

double DecisionTree::predict(std::span<const double> x) const {
    int node = 0;
    while (!nodes[node].is_leaf()) {
        const TreeNode& n = nodes[node];
        node = x[n.feature] < n.threshold ? n.left : n.right;
    }
    return nodes[node].value;
}

int DecisionTree::leaf_count() const {
    int leaves = 0;
    for (const TreeNode& n : nodes) leaves += n.is_leaf();
    return leaves;
}

int DecisionTree::depth() const {
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
        auto [node, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes[node].is_leaf()) {
            stack.push_back({nodes[node].left, d + 1});
            stack.push_back({nodes[node].right, d + 1});
        }
    }
    return deepest;
}

namespace {

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Variance-reduction gain over a sample range; iterating features and
// thresholds in ascending order with a strict comparison makes the result
// deterministic for identical inputs.
Split best_split(const FeatureMatrix& X, std::span<const double> r,
                 std::span<const int> idx, std::vector<std::pair<double, double>>& scratch) {
    size_t n = idx.size();
    Split best;
    if (n < 2) return best;
    double sum = 0.0;
    for (int i : idx) sum += r[i];
    double parent = sum * sum / static_cast<double>(n);

    for (size_t feature = 0; feature < X.cols; ++feature) {
        scratch.clear();
        for (int i : idx) scratch.push_back({X.at(i, feature), r[i]});
        std::sort(scratch.begin(), scratch.end());
        if (scratch.front().first == scratch.back().first) continue;
        double left_sum = 0.0;
        for (size_t k = 0; k + 1 < n; ++k) {
            left_sum += scratch[k].second;
            if (scratch[k].first == scratch[k + 1].first) continue;
            double nl = static_cast<double>(k + 1);
            double nr = static_cast<double>(n - k - 1);
            double right_sum = sum - left_sum;
            double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
            if (gain > best.gain + 1e-12) {
                best.found = true;
                best.feature = static_cast<int>(feature);
                best.threshold = scratch[k].first + 0.5 * (scratch[k + 1].first - scratch[k].first);
                best.gain = gain;
            }
        }
    }
    return best;
}

struct Candidate {
    double gain;
    size_t order;  // creation index; lower wins ties
    int node;
    int depth;
    size_t begin, end;  // index range owned by the node
    Split split;

    bool operator<(const Candidate& o) const {
        if (gain != o.gain) return gain < o.gain;  // max-heap by gain
        return order > o.order;
    }
};

}  // namespace

DecisionTree fit_tree(const FeatureMatrix& X, std::span<const double> residuals,
                      const TreeLimits& limits) {
    if (X.rows == 0) throw PreconditionError("ml_models", "fit_tree: empty input");
    if (residuals.size() != X.rows)
        throw PreconditionError("ml_models", "fit_tree: residual count mismatch");
    if (limits.max_depth < 0 || limits.max_leaves < 1)
        throw PreconditionError("ml_models", "fit_tree: invalid limits");

    std::vector<int> idx(X.rows);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::pair<double, double>> scratch;
    scratch.reserve(X.rows);

    auto mean_of = [&](size_t begin, size_t end) {
        double s = 0.0;
        for (size_t k = begin; k < end; ++k) s += residuals[idx[k]];
        return s / static_cast<double>(end - begin);
    };

    DecisionTree tree;
    tree.nodes.push_back({-1, 0.0, -1, -1, mean_of(0, X.rows)});

    std::priority_queue<Candidate> queue;
    size_t order = 0;
    auto consider = [&](int node, int depth, size_t begin, size_t end) {
        if (depth >= limits.max_depth) return;
        Split s = best_split(X, residuals, std::span<const int>(idx.data() + begin, end - begin),
                             scratch);
        if (s.found) queue.push({s.gain, order++, node, depth, begin, end, s});
    };
    consider(0, 0, 0, X.rows);

    int leaves = 1;
    while (!queue.empty() && leaves < limits.max_leaves) {
        Candidate c = queue.top();
        queue.pop();
        // partition the node's samples around the split
        auto mid_it = std::stable_partition(
            idx.begin() + c.begin, idx.begin() + c.end,
            [&](int i) { return X.at(i, c.split.feature) < c.split.threshold; });
        size_t mid = static_cast<size_t>(mid_it - idx.begin());

        int left = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({-1, 0.0, -1, -1, mean_of(c.begin, mid)});
        int right = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({-1, 0.0, -1, -1, mean_of(mid, c.end)});
        tree.nodes[c.node].feature = c.split.feature;
        tree.nodes[c.node].threshold = c.split.threshold;
        tree.nodes[c.node].left = left;
        tree.nodes[c.node].right = right;
        tree.nodes[c.node].value = 0.0;
        ++leaves;

        consider(left, c.depth + 1, c.begin, mid);
        consider(right, c.depth + 1, mid, c.end);
    }
    return tree;
}

std::vector<double> GbdtModel::class_scores(std::span<const double> x, int upto_rounds) const {
    if (x.size() != n_features)
        throw PreconditionError("ml_models",
                                "feature width " + std::to_string(x.size()) +
                                    " does not match model width " + std::to_string(n_features));
    std::vector<double> scores = init_logits;
    size_t upto = upto_rounds < 0 ? rounds.size()
                                  : std::min<size_t>(upto_rounds, rounds.size());
    for (size_t r = 0; r < upto; ++r)
        for (int k = 0; k < n_classes; ++k)
            scores[k] += learning_rate * rounds[r][k].predict(x);
    return scores;
}

int GbdtModel::predict_class(std::span<const double> x) const {
    std::vector<double> scores = class_scores(x);
    int best = n_classes - 1;
    for (int k = n_classes - 2; k >= 0; --k)
        if (scores[k] > scores[best]) best = k;  // ties stay at the higher risk
    return best;
}

TrainResult train(const FeatureMatrix& X, std::span<const int> labels,
                  const TrainConfig& cfg) {
    if (X.rows == 0) throw PreconditionError("ml_models", "train_gbdt: empty dataset");
    if (labels.size() != X.rows)
        throw PreconditionError("ml_models", "train_gbdt: label count mismatch");
    for (int y : labels)
        if (y < 0 || y >= kNumClasses)
            throw PreconditionError("ml_models", "train_gbdt: label out of range");

    size_t n = X.rows;
    TrainResult result;
    GbdtModel& model = result.model;
    model.n_features = X.cols;
    model.learning_rate = cfg.learning_rate;
    model.n_estimators = cfg.n_estimators;

    std::array<size_t, kNumClasses> counts{};
    for (int y : labels) ++counts[y];
    int classes_present = 0;
    for (size_t c : counts) classes_present += c > 0;
    model.init_logits.resize(kNumClasses);
    for (int k = 0; k < kNumClasses; ++k) {
        double prior = std::max(static_cast<double>(counts[k]) / static_cast<double>(n), 1e-12);
        model.init_logits[k] = std::log(prior);
    }

    // margins[i][k]
    std::vector<std::array<double, kNumClasses>> margins(n);
    for (size_t i = 0; i < n; ++i)
        for (int k = 0; k < kNumClasses; ++k) margins[i][k] = model.init_logits[k];

    auto mean_ce = [&]() {
        double loss = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double mx = std::max({margins[i][0], margins[i][1], margins[i][2]});
            double denom = 0.0;
            for (int k = 0; k < kNumClasses; ++k) denom += std::exp(margins[i][k] - mx);
            loss += -(margins[i][labels[i]] - mx - std::log(denom));
        }
        return loss / static_cast<double>(n);
    };
    result.loss_trace.push_back(mean_ce());

    if (classes_present <= 1) {
        // constant model: the prior argmax already reproduces the label
        model.degenerate_single_class = true;
        return result;
    }

    std::vector<double> residual(n);
    for (int round = 0; round < cfg.n_estimators; ++round) {
        // probabilities before this round's update
        std::vector<std::array<double, kNumClasses>> probs(n);
        for (size_t i = 0; i < n; ++i) {
            double mx = std::max({margins[i][0], margins[i][1], margins[i][2]});
            double denom = 0.0;
            for (int k = 0; k < kNumClasses; ++k) {
                probs[i][k] = std::exp(margins[i][k] - mx);
                denom += probs[i][k];
            }
            for (int k = 0; k < kNumClasses; ++k) probs[i][k] /= denom;
        }
        std::vector<DecisionTree> trees;
        trees.reserve(kNumClasses);
        for (int k = 0; k < kNumClasses; ++k) {
            for (size_t i = 0; i < n; ++i)
                residual[i] = (labels[i] == k ? 1.0 : 0.0) - probs[i][k];
            trees.push_back(fit_tree(X, residual, cfg.limits));
        }
        for (size_t i = 0; i < n; ++i)
            for (int k = 0; k < kNumClasses; ++k)
                margins[i][k] += cfg.learning_rate * trees[k].predict(X.row(i));
        model.rounds.push_back(std::move(trees));
        result.loss_trace.push_back(mean_ce());
    }
    return result;
}

// --- serialization -----------------------------------------------------------

namespace {

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const TreeNode& n : tree.nodes)
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    return json{{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& doc) {
    DecisionTree tree;
    for (const json& row : doc.at("nodes")) {
        TreeNode n;
        n.feature = row.at(0).get<int>();
        n.threshold = row.at(1).get<double>();
        n.left = row.at(2).get<int>();
        n.right = row.at(3).get<int>();
        n.value = row.at(4).get<double>();
        tree.nodes.push_back(n);
    }
    if (tree.nodes.empty()) throw ParseError("ml_models", "tree has no nodes");
    return tree;
}

}  // namespace

json GbdtModel::to_json() const {
    json doc;
    doc["schema"] = "ergo.gbdt.v1";
    doc["n_classes"] = n_classes;
    doc["n_features"] = n_features;
    doc["learning_rate"] = learning_rate;
    doc["n_estimators"] = n_estimators;
    doc["init_logits"] = init_logits;
    doc["degenerate_single_class"] = degenerate_single_class;
    doc["feature_names"] = feature_names;
    json rs = json::array();
    for (const auto& round : rounds) {
        json per_class = json::array();
        for (const DecisionTree& t : round) per_class.push_back(tree_to_json(t));
        rs.push_back(std::move(per_class));
    }
    doc["rounds"] = std::move(rs);
    return doc;
}

GbdtModel GbdtModel::from_json(const json& doc) {
    GbdtModel model;
    try {
        if (doc.at("schema").get<std::string>() != "ergo.gbdt.v1")
            throw ParseError("ml_models", "unknown gbdt model schema");
        model.n_classes = doc.at("n_classes").get<int>();
        model.n_features = doc.at("n_features").get<size_t>();
        model.learning_rate = doc.at("learning_rate").get<double>();
        model.n_estimators = doc.at("n_estimators").get<int>();
        model.init_logits = doc.at("init_logits").get<std::vector<double>>();
        model.degenerate_single_class = doc.at("degenerate_single_class").get<bool>();
        model.feature_names = doc.value("feature_names", std::vector<std::string>{});
        for (const json& round : doc.at("rounds")) {
            std::vector<DecisionTree> trees;
            for (const json& t : round) trees.push_back(tree_from_json(t));
            if (static_cast<int>(trees.size()) != model.n_classes)
                throw ParseError("ml_models", "gbdt round with wrong class count");
            model.rounds.push_back(std::move(trees));
        }
    } catch (const json::exception& e) {
        throw ParseError("ml_models", std::string("gbdt model: ") + e.what());
    }
    if (model.init_logits.size() != static_cast<size_t>(model.n_classes))
        throw ParseError("ml_models", "gbdt model: wrong init_logits size");
    return model;
}

void GbdtModel::save(const std::string& path, const json& producer) const {
    json doc = to_json();
    doc["producer"] = producer;
    write_text_file(path, doc.dump() + "\n");
}

GbdtModel GbdtModel::load(const std::string& path) {
    try {
        return from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw ParseError("ml_models", std::string("gbdt model: ") + e.what());
    }
}

}  // namespace ergo::gbdt
