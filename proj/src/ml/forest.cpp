/**
 * @file forest.cpp
 * @brief Bootstrap-aggregated CART trees with Gini splits
 */

#include <palm/ml/classifier.hpp>
#include <palm/error.hpp>
#include <palm/random.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace palm::ml {

namespace {

int argmax_first(const std::array<std::uint32_t, 4>& counts) {
    int best = 0;
    for (int k = 1; k < 4; ++k) {
        if (counts[k] > counts[best]) best = k;
    }
    return best;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const LabeledDataset& data, int max_depth, Rng& rng) : data_(data), max_depth_(max_depth), rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> rows) {
        tree_.nodes.clear();
        grow(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t> rows, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        std::array<std::uint32_t, 4> counts{};
        for (auto r : rows) ++counts[index_of(data_.labels[r])];
        tree_.nodes[id].counts = counts;

        const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
        const bool depth_reached = max_depth_ > 0 && depth >= max_depth_;
        if (pure || depth_reached || rows.size() < 2) return id;

        const SplitChoice split = best_split(rows);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            (data_.features[r][split.feature] <= split.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree_.nodes[id].feature = split.feature;
        tree_.nodes[id].threshold = split.threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    SplitChoice best_split(const std::vector<std::size_t>& rows) {
        std::array<int, kFeatureDim> features{};
        std::iota(features.begin(), features.end(), 0);
        // Partial Fisher-Yates: the first kFeaturesPerSplit entries are the sampled features.
        for (int i = 0; i < kFeaturesPerSplit; ++i) {
            const auto j = i + static_cast<int>(rng_.below(kFeatureDim - i));
            std::swap(features[i], features[j]);
        }

        SplitChoice best;
        best.impurity = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, int>> column(rows.size());
        const double n = static_cast<double>(rows.size());

        for (int fi = 0; fi < kFeaturesPerSplit; ++fi) {
            const int f = features[fi];
            for (std::size_t i = 0; i < rows.size(); ++i) {
                column[i] = {data_.features[rows[i]][f], index_of(data_.labels[rows[i]])};
            }
            std::sort(column.begin(), column.end());

            std::array<std::uint32_t, 4> left{}, right{};
            for (const auto& c : column) ++right[c.second];
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                ++left[column[i].second];
                --right[column[i].second];
                if (!(column[i].first < column[i + 1].first)) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                const double impurity = (nl * gini(left) + nr * gini(right)) / n;
                if (impurity < best.impurity) {
                    double t = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
                    if (!(t < column[i + 1].first)) t = column[i].first;
                    best = {f, t, impurity};
                }
            }
        }
        return best;
    }

    const LabeledDataset& data_;
    int max_depth_;
    Rng& rng_;
    DecisionTree tree_;
};

}  // namespace

double gini(const std::array<std::uint32_t, 4>& counts) {
    const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (n == 0.0) return 0.0;
    double sum_sq = 0.0;
    for (auto c : counts) {
        const double p = c / n;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

int DecisionTree::leaf_for(const FeatureVector& fv) const {
    int id = 0;
    while (!nodes[id].is_leaf()) {
        const auto& node = nodes[id];
        id = fv[node.feature] <= node.threshold ? node.left : node.right;
    }
    return id;
}

LineKind DecisionTree::predict(const FeatureVector& fv) const {
    return kAllLineKinds[argmax_first(nodes[leaf_for(fv)].counts)];
}

int DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    int deepest = 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes[id].is_leaf()) {
            stack.emplace_back(nodes[id].left, d + 1);
            stack.emplace_back(nodes[id].right, d + 1);
        }
    }
    return deepest;
}

ForestModel train_random_forest(const LabeledDataset& train, const ForestParams& params) {
    if (train.empty()) throw InvalidDataset("cannot train a random forest on an empty dataset");
    if (params.n_trees < 1) throw InvalidArgument("n_trees must be >= 1");
    if (params.max_depth < 0) throw InvalidArgument("max_depth must be >= 0");
    train.validate();

    ForestModel model;
    model.params = params;
    model.trees.reserve(params.n_trees);
    const std::size_t n = train.size();
    // Each tree draws from its own stream, so tree t is the same however trees are scheduled.
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
        TreeBuilder builder(train, params.max_depth, rng);
        model.trees.push_back(builder.build(std::move(rows)));
    }
    return model;
}

Prediction predict(const ForestModel& model, const FeatureVector& fv) {
    if (model.trees.empty()) throw InvalidArgument("forest has no trees");
    std::array<std::uint32_t, 4> votes{};
    for (const auto& tree : model.trees) ++votes[index_of(tree.predict(fv))];
    const int winner = argmax_first(votes);
    return {kAllLineKinds[winner], static_cast<double>(votes[winner]) / static_cast<double>(model.trees.size())};
}

}  // namespace palm::ml
