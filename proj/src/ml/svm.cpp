/**
 * @file svm.cpp
 * @brief One-vs-rest linear SVM trained with Pegasos-style subgradient steps
 */

#include <palm/ml/classifier.hpp>
#include <palm/error.hpp>
#include <palm/random.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace palm::ml {

namespace {

using Row = std::array<double, kFeatureDim>;

double dot(const Row& a, const Row& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kFeatureDim; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double svm_objective(const Row& w, double b, double lambda, const std::vector<Row>& rows, const std::vector<int>& signs) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        hinge += std::max(0.0, 1.0 - signs[i] * (dot(w, rows[i]) + b));
    }
    return 0.5 * lambda * (dot(w, w) + b * b) + hinge / static_cast<double>(rows.size());
}

std::array<double, 4> SvmModel::margins(const FeatureVector& fv) const {
    Row z{};
    for (std::size_t i = 0; i < kFeatureDim; ++i) z[i] = (fv[i] - mean[i]) / stddev[i];
    std::array<double, 4> m{};
    for (int k = 0; k < 4; ++k) m[k] = dot(weights[k], z) + bias[k];
    return m;
}

SvmModel train_linear_svm(const LabeledDataset& train, const SvmParams& params, SvmTrace* trace) {
    if (train.empty()) throw InvalidDataset("cannot train a linear SVM on an empty dataset");
    if (!(params.lambda > 0.0)) throw InvalidArgument("SVM lambda must be positive");
    if (params.epochs < 1) throw InvalidArgument("SVM epochs must be >= 1");
    train.validate();

    const std::size_t n = train.size();
    SvmModel model;
    model.params = params;

    for (std::size_t f = 0; f < kFeatureDim; ++f) {
        double mean = 0.0;
        for (const auto& x : train.features) mean += x[f];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& x : train.features) var += (x[f] - mean) * (x[f] - mean);
        var /= static_cast<double>(n);
        model.mean[f] = mean;
        model.stddev[f] = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    std::vector<Row> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < kFeatureDim; ++f) {
            rows[i][f] = (train.features[i][f] - model.mean[f]) / model.stddev[f];
        }
    }

    const double lambda = params.lambda;
    for (int k = 0; k < 4; ++k) {
        std::vector<int> signs(n);
        for (std::size_t i = 0; i < n; ++i) signs[i] = index_of(train.labels[i]) == k ? 1 : -1;

        // The bias is treated as a weight on a constant feature, so it is regularized too.
        Row w{};
        double b = 0.0;
        Rng rng(mix_seed(params.seed, 0x53564Du + static_cast<std::uint64_t>(k)));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::uint64_t t = 0;

        Row w_sum{};
        double b_sum = 0.0;
        Row w_avg{};
        double b_avg = 0.0;
        for (int epoch = 0; epoch < params.epochs; ++epoch) {
            for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
            for (auto idx : order) {
                ++t;
                const double eta = 1.0 / (lambda * static_cast<double>(t));
                const double margin = signs[idx] * (dot(w, rows[idx]) + b);
                const double shrink = 1.0 - eta * lambda;
                for (auto& v : w) v *= shrink;
                b *= shrink;
                if (margin < 1.0) {
                    for (std::size_t f = 0; f < kFeatureDim; ++f) w[f] += eta * signs[idx] * rows[idx][f];
                    b += eta * signs[idx];
                }
                for (std::size_t f = 0; f < kFeatureDim; ++f) w_sum[f] += w[f];
                b_sum += b;
            }
            for (std::size_t f = 0; f < kFeatureDim; ++f) w_avg[f] = w_sum[f] / static_cast<double>(t);
            b_avg = b_sum / static_cast<double>(t);
            if (trace) trace->objective[k].push_back(svm_objective(w_avg, b_avg, lambda, rows, signs));
        }
        model.weights[k] = w_avg;
        model.bias[k] = b_avg;
    }
    return model;
}

Prediction predict(const SvmModel& model, const FeatureVector& fv) {
    const auto m = model.margins(fv);
    int best = 0;
    for (int k = 1; k < 4; ++k) {
        if (m[k] > m[best]) best = k;
    }
    double denom = 0.0;
    for (int k = 0; k < 4; ++k) denom += std::exp(m[k] - m[best]);
    return {kAllLineKinds[best], 1.0 / denom};
}

std::string model_name(const Model& model) {
    return std::holds_alternative<ForestModel>(model) ? "random_forest" : "linear_svm";
}

Prediction predict(const Model& model, const FeatureVector& fv) {
    for (double v : fv) {
        if (!std::isfinite(v)) throw InvalidArgument("feature vector has a non-finite component");
    }
    return std::visit([&](const auto& m) { return predict(m, fv); }, model);
}

}  // namespace palm::ml
