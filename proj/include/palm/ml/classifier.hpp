/**
 * @file classifier.hpp
 * @brief Random forest and one-vs-rest linear SVM over contour features
 */
#pragma once

#include <palm/features.hpp>
#include <palm/ml/dataset.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace palm::ml {

inline constexpr int kModelFormatVersion = 1;

struct Prediction {
    LineKind kind = LineKind::Heart;
    double confidence = 0.0;
};

// -----------------------------------------------------------------------------
// Random forest
// -----------------------------------------------------------------------------

/// Internal nodes have feature >= 0 and route x[feature] <= threshold to the left child.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::array<std::uint32_t, 4> counts{};  // training rows reaching this node, per kind

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    int leaf_for(const FeatureVector& fv) const;
    LineKind predict(const FeatureVector& fv) const;
    int depth() const;
    bool operator==(const DecisionTree&) const = default;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 12;  // 0 means unlimited
    std::uint64_t seed = 7;
    bool operator==(const ForestParams&) const = default;
};

struct ForestModel {
    ForestParams params;
    std::vector<DecisionTree> trees;
    bool operator==(const ForestModel&) const = default;
};

/// Features examined per node: ceil(sqrt(6)).
inline constexpr int kFeaturesPerSplit = 3;

double gini(const std::array<std::uint32_t, 4>& counts);

/// Bootstrap + CART (Gini, midpoint thresholds, 3 random features per node).
ForestModel train_random_forest(const LabeledDataset& train, const ForestParams& params);

/// Majority vote; confidence is the winning vote share; ties go to the earlier kind.
Prediction predict(const ForestModel& model, const FeatureVector& fv);

// -----------------------------------------------------------------------------
// Linear SVM
// -----------------------------------------------------------------------------

struct SvmParams {
    int epochs = 50;
    double lambda = 1e-3;
    std::uint64_t seed = 7;
    bool operator==(const SvmParams&) const = default;
};

struct SvmModel {
    SvmParams params;
    std::array<double, kFeatureDim> mean{};
    std::array<double, kFeatureDim> stddev{};
    std::array<std::array<double, kFeatureDim>, 4> weights{};
    std::array<double, 4> bias{};
    bool operator==(const SvmModel&) const = default;

    /// One-vs-rest margins on the standardized vector.
    std::array<double, 4> margins(const FeatureVector& fv) const;
};

/// Per-class objective (L2 term + mean hinge) of the running average of all iterates, sampled after each epoch.
struct SvmTrace {
    std::array<std::vector<double>, 4> objective;
};

SvmModel train_linear_svm(const LabeledDataset& train, const SvmParams& params, SvmTrace* trace = nullptr);

/// Regularized hinge objective of one binary problem on standardized rows.
double svm_objective(const std::array<double, kFeatureDim>& w, double b, double lambda,
                     const std::vector<std::array<double, kFeatureDim>>& rows, const std::vector<int>& signs);

/// Argmax margin; confidence is the softmax of the winning margin.
Prediction predict(const SvmModel& model, const FeatureVector& fv);

// -----------------------------------------------------------------------------
// Either model
// -----------------------------------------------------------------------------

using Model = std::variant<ForestModel, SvmModel>;

/// "random_forest" or "linear_svm".
std::string model_name(const Model& model);

/// Throws InvalidArgument on a non-finite component.
Prediction predict(const Model& model, const FeatureVector& fv);

}  // namespace palm::ml
