#include <doctest.h>

#include <palm/cli.hpp>
#include <palm/png_io.hpp>
#include <palm/synth.hpp>
#include <palm/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <sstream>

using namespace palm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kSource = PALM_SOURCE_DIR;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "palm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
    args.push_back("--json");
    const auto r = run(args);
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    return json::parse(r.out);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"dance"}).code == kExitUsage);
    const auto missing = run({"synth"});
    CHECK(missing.code == kExitUsage);
    CHECK(missing.err.find("--out") != std::string::npos);
    CHECK(run({"synth", "--out", "/tmp/x", "--mode", "sketch"}).code == kExitUsage);
    CHECK(run({"train", "--dataset", "d.csv", "--out", "m", "--model", "cnn"}).code == kExitUsage);
    CHECK(run({"synth", "--out", "/tmp/x", "--n", "-3"}).code == kExitUsage);
}

TEST_CASE("help and version") {
    const auto top = run({"--help"});
    CHECK(top.code == kExitOk);
    for (const char* sub : {"synth", "ingest", "train", "evaluate", "compare", "predict", "annotate", "serve"}) {
        CHECK(top.out.find(sub) != std::string::npos);
        const auto h = run({sub, "--help"});
        CHECK(h.code == kExitOk);
        CHECK(h.out.find(sub) != std::string::npos);
        CHECK(h.out.find("--") != std::string::npos);
    }
    CHECK(run({"train", "--help"}).out.find("--lambda") != std::string::npos);
    const auto v = run({"--version"});
    CHECK(v.code == kExitOk);
    CHECK(v.out.find("1.0.0") != std::string::npos);
}

TEST_CASE("runtime errors exit 2") {
    const auto cfg = kSource + "/data/palm.json";
    auto r = run({"predict", "--image", "/nonexistent.png", "--config", cfg});
    CHECK(r.code == kExitRuntime);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(run({"evaluate", "--dataset", "/nonexistent.csv", "--model", "m"}).code == kExitRuntime);
    CHECK(run({"predict", "--image", kSource + "/static/index.html", "--config", cfg}).code == kExitRuntime);
    CHECK(run({"predict", "--image", "x.png", "--config", cfg, "--category", "dog_left"}).code == kExitRuntime);
}

TEST_CASE("end to end workflow") {
    const auto dir = fs::temp_directory_path() / "palm_test_cli";
    fs::remove_all(dir);
    const auto d = [&](const std::string& name) { return (dir / name).string(); };
    const auto cfg = kSource + "/data/palm.json";

    auto j = run_json({"synth", "--n", "40", "--noise", "0", "--jitter", "0", "--fate-probability", "1", "--out", d("corpus")});
    CHECK(j.at("images") == 40);

    j = run_json({"ingest", "--manifest", d("corpus/manifest.csv"), "--config", cfg, "--out", d("ds.csv")});
    CHECK(j.at("rows") == 160);
    CHECK(j.at("per_class").at("fate") == 40);

    j = run_json({"train", "--dataset", d("ds.csv"), "--model", "forest", "--trees", "25", "--out", d("f.palmmodel")});
    CHECK(j.at("train_rows") == 128);
    CHECK(j.at("test_rows") == 32);
    run_json({"train", "--dataset", d("ds.csv"), "--model", "forest", "--trees", "25", "--out", d("f2.palmmodel")});
    CHECK(read_text_file(d("f.palmmodel")) == read_text_file(d("f2.palmmodel")));
    run_json({"train", "--dataset", d("ds.csv"), "--model", "svm", "--out", d("s.palmmodel")});

    j = run_json({"evaluate", "--dataset", d("ds.csv"), "--model", d("f.palmmodel"), "--out", d("rf.json")});
    CHECK(j.at("model_name") == "random_forest");
    CHECK(j.at("accuracy") == 1.0);
    CHECK(j.at("n_test") == 32);
    CHECK(json::parse(read_text_file(d("rf.json"))) == j);
    const auto plain = run({"evaluate", "--dataset", d("ds.csv"), "--model", d("f.palmmodel")});
    CHECK(plain.out.find("accuracy: 1.0000") != std::string::npos);

    run_json({"evaluate", "--dataset", d("ds.csv"), "--model", d("s.palmmodel"), "--out", d("svm.json")});
    j = run_json({"compare", "--report-a", d("rf.json"), "--report-b", d("svm.json"), "--csv", d("cmp.csv"), "--accuracy-csv",
                  d("acc.csv")});
    CHECK(j.at("rows").size() == 6);
    CHECK(j.contains("winner"));
    const auto csv = read_text_file(d("cmp.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(read_text_file(d("acc.csv")).rfind("model,accuracy\nrandom_forest,1", 0) == 0);
    CHECK(run({"compare", "--report-a", d("rf.json"), "--report-b", d("ds.csv")}).code == kExitRuntime);

    SynthConfig raw;
    raw.mode = RenderMode::Raw;
    write_png(d("raw.png"), generate_palm(raw, 4).image);
    j = run_json({"predict", "--image", d("raw.png"), "--config", cfg, "--category", "female_left", "--svm",
                  kSource + "/models/svm.palmmodel", "--annotated", d("ann.png")});
    CHECK(j.at("model") == "random_forest");
    CHECK(j.at("svm").at("model") == "linear_svm");
    CHECK(j.at("report").at("entries").size() == 4);
    CHECK(read_png(d("ann.png")).width() == 256);

    const auto text = run({"predict", "--image", d("raw.png"), "--config", cfg});
    CHECK(text.code == kExitOk);
    CHECK(text.out.find("Reading for a male right hand.") != std::string::npos);

    const auto ann = run({"annotate", "--image", d("raw.png"), "--out", d("ann2.png"), "--config", cfg});
    CHECK(ann.code == kExitOk);
    CHECK(read_png(d("ann2.png")) == read_png(d("ann.png")));
    fs::remove_all(dir);
}
