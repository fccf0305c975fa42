/**
 * @file evaluation.cpp
 * @brief Confusion-matrix metrics and comparison tables
 */

#include <palm/ml/evaluation.hpp>
#include <palm/error.hpp>
#include <palm/text.hpp>

#include <fmt/format.h>

#include <algorithm>

namespace palm::ml {

namespace {

std::map<std::string, std::string> params_of(const Model& model) {
    std::map<std::string, std::string> p;
    if (const auto* f = std::get_if<ForestModel>(&model)) {
        p["n_trees"] = std::to_string(f->params.n_trees);
        p["max_depth"] = std::to_string(f->params.max_depth);
        p["seed"] = std::to_string(f->params.seed);
    } else {
        const auto& s = std::get<SvmModel>(model);
        p["epochs"] = std::to_string(s.params.epochs);
        p["lambda"] = format_double(s.params.lambda);
        p["seed"] = std::to_string(s.params.seed);
    }
    return p;
}

double macro_f1(const EvalReport& r) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += r.f1(k);
    return s / 4.0;
}

}  // namespace

double EvalReport::f1(int k) const {
    const double p = precision[k];
    const double r = recall[k];
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

EvalReport report_from_confusion(std::string model_name, const std::array<std::array<std::size_t, 4>, 4>& confusion) {
    EvalReport r;
    r.model_name = std::move(model_name);
    r.confusion = confusion;
    std::size_t trace = 0;
    for (int t = 0; t < 4; ++t) {
        trace += confusion[t][t];
        for (int p = 0; p < 4; ++p) r.n_test += confusion[t][p];
    }
    r.accuracy = r.n_test ? static_cast<double>(trace) / static_cast<double>(r.n_test) : 0.0;
    for (int k = 0; k < 4; ++k) {
        std::size_t row = 0, col = 0;
        for (int j = 0; j < 4; ++j) {
            row += confusion[k][j];
            col += confusion[j][k];
        }
        r.precision[k] = col ? static_cast<double>(confusion[k][k]) / static_cast<double>(col) : 0.0;
        r.recall[k] = row ? static_cast<double>(confusion[k][k]) / static_cast<double>(row) : 0.0;
    }
    return r;
}

EvalReport evaluate(const Model& model, const LabeledDataset& test) {
    if (test.empty()) throw InvalidDataset("cannot evaluate on an empty test set");
    test.validate();
    std::array<std::array<std::size_t, 4>, 4> confusion{};
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto pred = predict(model, test.features[i]);
        ++confusion[index_of(test.labels[i])][index_of(pred.kind)];
    }
    auto r = report_from_confusion(model_name(model), confusion);
    r.params = params_of(model);
    return r;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["model_name"] = r.model_name;
    j["accuracy"] = r.accuracy;
    j["n_test"] = r.n_test;
    j["confusion"] = r.confusion;
    nlohmann::json per_class = nlohmann::json::object();
    for (auto kind : kAllLineKinds) {
        const int k = index_of(kind);
        per_class[to_string(kind)] = {{"precision", r.precision[k]}, {"recall", r.recall[k]}, {"f1", r.f1(k)}};
    }
    j["per_class"] = per_class;
    j["params"] = r.params;
    return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    try {
        auto confusion = j.at("confusion").get<std::array<std::array<std::size_t, 4>, 4>>();
        auto r = report_from_confusion(j.at("model_name").get<std::string>(), confusion);
        if (j.contains("params")) r.params = j.at("params").get<std::map<std::string, std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(fmt::format("malformed evaluation report: {}", e.what()));
    }
}

ComparisonTable compare_models(const EvalReport& a, const EvalReport& b) {
    ComparisonTable t;
    t.name_a = a.model_name;
    t.name_b = b.model_name;
    t.rows.push_back({"accuracy", a.accuracy, b.accuracy});
    for (auto kind : kAllLineKinds) {
        const int k = index_of(kind);
        t.rows.push_back({fmt::format("f1_{}", to_string(kind)), a.f1(k), b.f1(k)});
    }
    t.rows.push_back({"macro_f1", macro_f1(a), macro_f1(b)});
    if (a.accuracy > b.accuracy) {
        t.winner = a.model_name;
    } else if (b.accuracy > a.accuracy) {
        t.winner = b.model_name;
    } else {
        t.winner = "tie";
    }
    return t;
}

std::string render_text(const ComparisonTable& t) {
    std::size_t w = 6;
    for (const auto& r : t.rows) w = std::max(w, r.metric.size());
    const std::size_t wa = std::max<std::size_t>(8, t.name_a.size());
    const std::size_t wb = std::max<std::size_t>(8, t.name_b.size());
    std::string out = fmt::format("{:<{}}  {:>{}}  {:>{}}\n", "metric", w, t.name_a, wa, t.name_b, wb);
    out += std::string(w + wa + wb + 4, '-') + "\n";
    for (const auto& r : t.rows) {
        out += fmt::format("{:<{}}  {:>{}.4f}  {:>{}.4f}\n", r.metric, w, r.a, wa, r.b, wb);
    }
    out += fmt::format("winner: {}\n", t.winner);
    return out;
}

std::string render_csv(const ComparisonTable& t) {
    std::string out = fmt::format("metric,{},{}\n", t.name_a, t.name_b);
    for (const auto& r : t.rows) out += fmt::format("{},{},{}\n", r.metric, format_double(r.a), format_double(r.b));
    return out;
}

std::string render_accuracy_csv(const ComparisonTable& t) {
    const auto& acc = t.rows.front();
    return fmt::format("model,accuracy\n{},{}\n{},{}\n", t.name_a, format_double(acc.a), t.name_b, format_double(acc.b));
}

}  // namespace palm::ml
