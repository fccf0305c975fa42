#include <palm/cli.hpp>
#include <palm/error.hpp>
#include <palm/ml/evaluation.hpp>
#include <palm/ml/model_io.hpp>
#include <palm/pipeline.hpp>
#include <palm/png_io.hpp>
#include <palm/service.hpp>
#include <palm/synth.hpp>
#include <palm/text.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace palm {

using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::string default_config_path() {
    if (const char* env = std::getenv("PALM_CONFIG"); env && *env) return env;
    return "data/palm.json";
}

void write_text(const std::string& path, const std::string& text) {
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw InvalidArgument(fmt::format("{}: {}", path, e.what()));
    }
}

HandCategory category_or_throw(const std::string& token) {
    const auto c = parse_category(token);
    if (!c) throw InvalidArgument(fmt::format("unknown category '{}'", token));
    return *c;
}

std::string format_report(const ml::EvalReport& r) {
    std::string out = fmt::format("model: {}\nn_test: {}\naccuracy: {:.4f}\n", r.model_name, r.n_test, r.accuracy);
    for (const auto& [k, v] : r.params) out += fmt::format("param {}: {}\n", k, v);
    out += "confusion (rows true, columns predicted):\n";
    out += fmt::format("{:>8}", "");
    for (auto kind : kAllLineKinds) out += fmt::format("{:>8}", to_string(kind));
    out += "\n";
    for (auto t : kAllLineKinds) {
        out += fmt::format("{:>8}", to_string(t));
        for (auto p : kAllLineKinds) out += fmt::format("{:>8}", r.confusion[index_of(t)][index_of(p)]);
        out += "\n";
    }
    for (auto kind : kAllLineKinds) {
        const int k = index_of(kind);
        out += fmt::format("{:<6} precision {:.4f} recall {:.4f} f1 {:.4f}\n", to_string(kind), r.precision[k], r.recall[k], r.f1(k));
    }
    return out;
}

struct Options {
    bool json = false;

    // synth
    std::size_t n = 400;
    std::uint64_t seed = 7;
    std::string out;
    std::string mode = "annotated";
    double noise = 6.0;
    double fate_probability = 0.7;
    double jitter = 5.0;
    int size = 256;

    // ingest / train / evaluate
    std::string manifest;
    std::string config;
    std::string dataset;
    std::string model = "forest";
    std::string model_path;
    double test_fraction = 0.2;
    int trees = 100;
    int max_depth = 12;
    int epochs = 50;
    double lambda = 1e-3;
    bool full = false;

    // compare
    std::string report_a, report_b, csv_out, accuracy_csv;

    // predict / annotate / serve
    std::string image;
    std::string forest, svm;
    std::string category = "male_right";
    std::string annotated_out;
    int port = -1;
    std::string bind;
};

int run_synth(const Options& o, std::ostream& out) {
    SynthConfig cfg;
    cfg.seed = o.seed;
    cfg.noise_sigma = o.noise;
    cfg.fate_line_probability = o.fate_probability;
    cfg.jitter = o.jitter;
    cfg.image_size = o.size;
    cfg.mode = o.mode == "raw" ? RenderMode::Raw : RenderMode::Annotated;
    const auto manifest = generate_corpus(cfg, o.n, o.out);
    const auto path = (std::filesystem::path(o.out) / "manifest.csv").string();
    if (o.json) {
        out << json{{"images", manifest.rows.size()}, {"manifest", path}, {"seed", o.seed}, {"mode", o.mode}}.dump() << "\n";
    } else {
        out << fmt::format("wrote {} images and {}\n", manifest.rows.size(), path);
    }
    return kExitOk;
}

int run_ingest(const Options& o, std::ostream& out) {
    const auto cfg = load_config(o.config);
    const auto ds = ingest_annotated_corpus(o.manifest, cfg);
    ml::write_dataset(o.out, ds);
    const auto counts = ds.class_counts();
    if (o.json) {
        json per = json::object();
        for (auto k : kAllLineKinds) per[std::string(to_string(k))] = counts[index_of(k)];
        out << json{{"rows", ds.size()}, {"per_class", per}, {"out", o.out}}.dump() << "\n";
    } else {
        out << fmt::format("wrote {} rows to {} (heart {}, head {}, life {}, fate {})\n", ds.size(), o.out, counts[0], counts[1],
                           counts[2], counts[3]);
    }
    return kExitOk;
}

int run_train(const Options& o, std::ostream& out) {
    const auto ds = ml::read_dataset(o.dataset);
    const auto split = ml::train_test_split(ds, o.test_fraction, o.seed);
    ml::Model model;
    if (o.model == "forest") {
        model = ml::train_random_forest(split.train, {o.trees, o.max_depth, o.seed});
    } else {
        model = ml::train_linear_svm(split.train, {o.epochs, o.lambda, o.seed});
    }
    ml::save_model(model, o.out);
    if (o.json) {
        out << json{{"model", ml::model_name(model)}, {"train_rows", split.train.size()}, {"test_rows", split.test.size()},
                    {"out", o.out}}.dump()
            << "\n";
    } else {
        out << fmt::format("trained {} on {} rows ({} held out), saved {}\n", ml::model_name(model), split.train.size(),
                           split.test.size(), o.out);
    }
    return kExitOk;
}

int run_evaluate(const Options& o, std::ostream& out) {
    const auto ds = ml::read_dataset(o.dataset);
    const auto model = ml::load_model(o.model_path);
    const auto report = ml::evaluate(model, o.full ? ds : ml::train_test_split(ds, o.test_fraction, o.seed).test);
    if (!o.out.empty()) write_text(o.out, ml::to_json(report).dump(2) + "\n");
    if (o.json) {
        out << ml::to_json(report).dump() << "\n";
    } else {
        out << format_report(report);
    }
    return kExitOk;
}

int run_compare(const Options& o, std::ostream& out) {
    const auto a = ml::eval_report_from_json(read_json_file(o.report_a));
    const auto b = ml::eval_report_from_json(read_json_file(o.report_b));
    const auto table = ml::compare_models(a, b);
    if (!o.csv_out.empty()) write_text(o.csv_out, ml::render_csv(table));
    if (!o.accuracy_csv.empty()) write_text(o.accuracy_csv, ml::render_accuracy_csv(table));
    if (o.json) {
        json rows = json::array();
        for (const auto& r : table.rows) rows.push_back({{"metric", r.metric}, {table.name_a, r.a}, {table.name_b, r.b}});
        out << json{{"models", {table.name_a, table.name_b}}, {"rows", rows}, {"winner", table.winner}}.dump() << "\n";
    } else {
        out << ml::render_text(table);
    }
    return kExitOk;
}

int run_predict(const Options& o, std::ostream& out, bool annotate_only) {
    const auto cfg = load_config(o.config);
    const auto rules = RuleTable::load(cfg.rules_path);
    const auto category = category_or_throw(o.category);
    const auto bytes = read_file_bytes(o.image);
    const auto forest = ml::load_model(o.forest.empty() ? cfg.forest_model : std::filesystem::path(o.forest));
    const auto result = analyze(bytes, category, forest, rules, cfg, make_request_id());
    const auto annotated_path = annotate_only ? o.out : o.annotated_out;
    if (!annotated_path.empty()) write_png(annotated_path, result.annotated);

    if (annotate_only) {
        if (o.json) {
            out << json{{"out", annotated_path}, {"lines", result.lines.size()}}.dump() << "\n";
        } else {
            out << fmt::format("wrote {} with {} line(s)\n", annotated_path, result.lines.size());
        }
        return kExitOk;
    }

    std::optional<AnalysisResult> svm_result;
    if (!o.svm.empty()) svm_result = analyze(bytes, category, ml::load_model(o.svm), rules, cfg, result.request_id);

    if (o.json) {
        auto j = summary_json(result, false);
        if (svm_result) j["svm"] = summary_json(*svm_result, false);
        out << j.dump() << "\n";
        return kExitOk;
    }
    auto describe = [&](const AnalysisResult& r) {
        out << fmt::format("model: {}\n", r.model_name);
        for (const auto& l : r.lines) {
            out << fmt::format("  {:<6} arc {:.1f} depth {:.1f} confidence {:.2f}\n", to_string(l.kind), l.arc_length, l.depth,
                               l.confidence);
        }
        if (r.lines.empty()) out << "  no lines detected\n";
    };
    describe(result);
    if (svm_result) describe(*svm_result);
    out << "\n" << render_report(result.report);
    return kExitOk;
}

int run_serve(const Options& o, std::ostream& out) {
    const auto raw = read_json_file(o.config);
    auto scfg = service_config_from_json(raw, std::filesystem::path(o.config).parent_path());
    apply_env_overrides(scfg);
    if (o.port >= 0) scfg.port = o.port;
    if (!o.bind.empty()) scfg.bind = o.bind;
    const auto engine = load_engine(o.config);
    if (!engine->model_loaded()) out << fmt::format("warning: model unavailable ({}); serving in degraded mode\n", engine->model_error);

    Service service(scfg, engine);
    const int port = service.start();
    out << fmt::format("listening on http://{}:{}\n", scfg.bind, port) << std::flush;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    service.stop();
    out << "stopped\n";
    return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Palm line analysis: corpus generation, training, evaluation, prediction, serving", "palm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Options o;
    o.config = default_config_path();

    auto json_flag = [&](CLI::App* sub) { sub->add_flag("--json", o.json, "Print machine-readable JSON"); };

    auto* synth = app.add_subcommand("synth", "Generate a synthetic palm corpus");
    synth->add_option("--n", o.n, "Number of images")->check(CLI::PositiveNumber);
    synth->add_option("--seed", o.seed, "Corpus seed");
    synth->add_option("--out", o.out, "Output directory")->required();
    synth->add_option("--mode", o.mode, "annotated or raw")->check(CLI::IsMember({"annotated", "raw"}));
    synth->add_option("--noise", o.noise, "Gaussian noise sigma in gray levels")->check(CLI::NonNegativeNumber);
    synth->add_option("--fate-probability", o.fate_probability, "Probability that a palm has a fate line")->check(CLI::Range(0.0, 1.0));
    synth->add_option("--jitter", o.jitter, "Control point jitter in pixels")->check(CLI::NonNegativeNumber);
    synth->add_option("--size", o.size, "Image side in pixels")->check(CLI::Range(64, 4096));
    json_flag(synth);

    auto* ingest = app.add_subcommand("ingest", "Extract a labeled feature dataset from an annotated corpus");
    ingest->add_option("--manifest", o.manifest, "Corpus manifest.csv")->required();
    ingest->add_option("--config", o.config, "Pipeline config");
    ingest->add_option("--out", o.out, "Dataset CSV to write")->required();
    json_flag(ingest);

    auto* train = app.add_subcommand("train", "Train a classifier on the training split of a dataset");
    train->add_option("--dataset", o.dataset, "Dataset CSV")->required();
    train->add_option("--model", o.model, "forest or svm")->check(CLI::IsMember({"forest", "svm"}));
    train->add_option("--out", o.out, "Model file to write (.palmmodel)")->required();
    train->add_option("--seed", o.seed, "Split and training seed");
    train->add_option("--test-fraction", o.test_fraction, "Held-out fraction")->check(CLI::Range(0.0, 1.0));
    train->add_option("--trees", o.trees, "Forest size")->check(CLI::PositiveNumber);
    train->add_option("--max-depth", o.max_depth, "Tree depth limit, 0 for none")->check(CLI::NonNegativeNumber);
    train->add_option("--epochs", o.epochs, "SVM epochs")->check(CLI::PositiveNumber);
    train->add_option("--lambda", o.lambda, "SVM regularization")->check(CLI::PositiveNumber);
    json_flag(train);

    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model on the held-out split");
    evaluate->add_option("--dataset", o.dataset, "Dataset CSV")->required();
    evaluate->add_option("--model", o.model_path, "Model file")->required();
    evaluate->add_option("--seed", o.seed, "Split seed (match the one used for training)");
    evaluate->add_option("--test-fraction", o.test_fraction, "Held-out fraction")->check(CLI::Range(0.0, 1.0));
    evaluate->add_flag("--full", o.full, "Evaluate on every row instead of the held-out split");
    evaluate->add_option("--out", o.out, "Write the report JSON here");
    json_flag(evaluate);

    auto* compare = app.add_subcommand("compare", "Compare two evaluation reports");
    compare->add_option("--report-a", o.report_a, "First report JSON")->required();
    compare->add_option("--report-b", o.report_b, "Second report JSON")->required();
    compare->add_option("--csv", o.csv_out, "Write the metric table as CSV");
    compare->add_option("--accuracy-csv", o.accuracy_csv, "Write model,accuracy CSV for plotting");
    json_flag(compare);

    auto* predict = app.add_subcommand("predict", "Detect palm lines in an image and print a reading");
    predict->add_option("--image", o.image, "PNG image")->required();
    predict->add_option("--config", o.config, "Pipeline config");
    predict->add_option("--forest", o.forest, "Forest model (defaults to the config's)");
    predict->add_option("--svm", o.svm, "Also run this SVM model and report its lines");
    predict->add_option("--category", o.category, "male_left, male_right, female_left or female_right");
    predict->add_option("--annotated", o.annotated_out, "Write the annotated PNG here");
    json_flag(predict);

    auto* annotate = app.add_subcommand("annotate", "Write an image with detected lines painted in their colors");
    annotate->add_option("--image", o.image, "PNG image")->required();
    annotate->add_option("--out", o.out, "Output PNG")->required();
    annotate->add_option("--config", o.config, "Pipeline config");
    annotate->add_option("--forest", o.forest, "Forest model (defaults to the config's)");
    json_flag(annotate);

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--config", o.config, "Pipeline config (also PALM_CONFIG)");
    serve->add_option("--port", o.port, "Port (also PALM_PORT)")->check(CLI::Range(0, 65535));
    serve->add_option("--bind", o.bind, "Bind address (also PALM_BIND)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(o, out);
        if (ingest->parsed()) return run_ingest(o, out);
        if (train->parsed()) return run_train(o, out);
        if (evaluate->parsed()) return run_evaluate(o, out);
        if (compare->parsed()) return run_compare(o, out);
        if (predict->parsed()) return run_predict(o, out, false);
        if (annotate->parsed()) return run_predict(o, out, true);
        if (serve->parsed()) return run_serve(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace palm
