/**
 * @file evaluation.hpp
 * @brief Accuracy/confusion reports and side-by-side model comparison
 */
#pragma once

#include <palm/ml/classifier.hpp>

#include <json.hpp>

#include <array>
#include <map>
#include <string>
#include <vector>

namespace palm::ml {

struct EvalReport {
    std::string model_name;
    double accuracy = 0.0;
    std::array<std::array<std::size_t, 4>, 4> confusion{};  // [true][predicted]
    std::array<double, 4> precision{};
    std::array<double, 4> recall{};
    std::size_t n_test = 0;
    std::map<std::string, std::string> params;  // hyperparameters echoed from the model

    double f1(int k) const;
};

EvalReport evaluate(const Model& model, const LabeledDataset& test);

/// Rebuilds accuracy/precision/recall from a confusion matrix.
EvalReport report_from_confusion(std::string model_name, const std::array<std::array<std::size_t, 4>, 4>& confusion);

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);

struct ComparisonRow {
    std::string metric;
    double a = 0.0;
    double b = 0.0;
};

struct ComparisonTable {
    std::string name_a;
    std::string name_b;
    std::vector<ComparisonRow> rows;  // accuracy, per-kind F1 x4, macro F1
    std::string winner;               // name of the higher-accuracy model, or "tie"
};

ComparisonTable compare_models(const EvalReport& a, const EvalReport& b);

std::string render_text(const ComparisonTable& t);
std::string render_csv(const ComparisonTable& t);

/// Two-column model,accuracy CSV for plotting.
std::string render_accuracy_csv(const ComparisonTable& t);

}  // namespace palm::ml
