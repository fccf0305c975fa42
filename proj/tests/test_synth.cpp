#include <doctest.h>

#include <palm/error.hpp>
#include <palm/png_io.hpp>
#include <palm/synth.hpp>
#include <palm/text.hpp>

#include <filesystem>
#include <fstream>

using namespace palm;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("palm_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

SynthConfig clean_config() {
    SynthConfig cfg;
    cfg.noise_sigma = 0.0;
    cfg.jitter = 0.0;
    cfg.fate_line_probability = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("categories") {
    CHECK(to_string(HandCategory::FemaleLeft) == "female_left");
    CHECK(parse_category("male_right") == HandCategory::MaleRight);
    CHECK_FALSE(parse_category("dog_left").has_value());
    CHECK(display_label(HandCategory::FemaleLeft) == "female left hand");
    for (std::uint64_t i = 0; i < 8; ++i) CHECK(category_for_index(i) == kAllCategories[i % 4]);
}

TEST_CASE("config validation") {
    SynthConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.image_size = 32;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.fate_line_probability = 1.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.noise_sigma = -1;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("generation is deterministic") {
    SynthConfig cfg;
    const auto a = generate_palm(cfg, 5);
    const auto b = generate_palm(cfg, 5);
    CHECK(a.image == b.image);
    CHECK(encode_png(a.image) == encode_png(b.image));
    CHECK(generate_palm(cfg, 6).image != a.image);
    cfg.seed = 8;
    CHECK(generate_palm(cfg, 5).image != a.image);
}

TEST_CASE("ground truth is well formed") {
    SynthConfig cfg;
    for (std::uint64_t i = 0; i < 24; ++i) {
        const auto s = generate_palm(cfg, i);
        CHECK(s.image.width() == 256);
        CHECK(s.image.channels() == 3);
        CHECK(s.truth.category == category_for_index(i));
        CHECK(s.truth.lines.size() <= 4);
        for (std::size_t k = 1; k < s.truth.lines.size(); ++k) CHECK(index_of(s.truth.lines[k - 1].kind) < index_of(s.truth.lines[k].kind));
        for (auto kind : {LineKind::Heart, LineKind::Head, LineKind::Life}) CHECK(s.truth.find(kind) != nullptr);
        for (const auto& line : s.truth.lines) {
            for (const auto& p : line.contour.points) {
                CHECK(p.x >= 0);
                CHECK(p.y >= 0);
                CHECK(p.x < 256);
                CHECK(p.y < 256);
            }
            CHECK(line.arc_length == doctest::Approx(arc_length(line.contour)));
            CHECK(line.depth == doctest::Approx(depth(line.contour)));
            CHECK(std::abs(line.arc_length - line.ideal_arc_length) <= 0.08 * line.ideal_arc_length);
            CHECK(std::abs(line.depth - line.ideal_depth) <= 1.5);
        }
    }
}

TEST_CASE("traced centerline matches ground-truth arc length within 5%") {
    SynthConfig cfg;
    for (std::uint64_t i = 0; i < 40; ++i) {
        const auto s = generate_palm(cfg, i);
        for (const auto& line : s.truth.lines) {
            BinaryMask m(256, 256);
            for (const auto& p : line.contour.points) m.set(p.x, p.y);
            const auto traces = extract_contours(m);
            REQUIRE(traces.size() == 1);
            const double traced = arc_length(open_contour(traces.front()));
            CHECK(std::abs(traced - line.arc_length) <= 0.05 * line.arc_length);
        }
    }
}

TEST_CASE("red annotation range recovers the heart stroke") {
    const auto cfg = clean_config();
    const HsvRange red{350, 10, 0.5, 1, 0.5, 1, true};
    for (std::uint64_t i = 0; i < 8; ++i) {
        const auto s = generate_palm(cfg, i);
        const auto* heart = s.truth.find(LineKind::Heart);
        REQUIRE(heart != nullptr);
        const auto stroke = line_footprint(heart->contour, 256, 256, cfg.stroke_width);
        const auto mask = hsv_mask(s.image, red);
        const double recovered = static_cast<double>((mask & stroke).count()) / static_cast<double>(stroke.count());
        CHECK(recovered >= 0.95);
    }
}

TEST_CASE("fate probability") {
    SynthConfig cfg;
    cfg.fate_line_probability = 0.0;
    for (std::uint64_t i = 0; i < 40; ++i) CHECK(generate_palm(cfg, i).truth.find(LineKind::Fate) == nullptr);
    cfg.fate_line_probability = 1.0;
    for (std::uint64_t i = 0; i < 40; ++i) CHECK(generate_palm(cfg, i).truth.find(LineKind::Fate) != nullptr);
}

TEST_CASE("lines_present restricts kinds") {
    SynthConfig cfg;
    cfg.lines_present = {LineKind::Head};
    const auto s = generate_palm(cfg, 3);
    REQUIRE(s.truth.lines.size() == 1);
    CHECK(s.truth.lines[0].kind == LineKind::Head);
}

TEST_CASE("raw mode has no annotation colors") {
    SynthConfig cfg = clean_config();
    cfg.mode = RenderMode::Raw;
    const auto s = generate_palm(cfg, 2);
    CHECK_FALSE(hsv_mask(s.image, HsvRange{90, 150, 0.5, 1, 0.3, 1, false}).any());
    CHECK_FALSE(hsv_mask(s.image, HsvRange{210, 260, 0.5, 1, 0.4, 1, false}).any());
}

TEST_CASE("corpus and manifest") {
    const auto dir = scratch_dir("corpus");
    SynthConfig cfg;
    const auto m = generate_corpus(cfg, 4, dir);
    REQUIRE(m.rows.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(m.rows[i].filename == corpus_filename(i));
        CHECK(m.rows[i].category == kAllCategories[i]);
        CHECK(fs::is_regular_file(dir / m.rows[i].filename));
    }
    CHECK(corpus_filename(7) == "palm_0007.png");

    const auto text = read_text_file((dir / "manifest.csv").string());
    CHECK(text.rfind(manifest_header(), 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(format_manifest(parse_manifest(text)) == text);

    generate_corpus(cfg, 4, dir);
    CHECK(read_text_file((dir / "manifest.csv").string()) == text);

    const auto img = read_png(dir / "palm_0001.png");
    CHECK(img == generate_palm(cfg, 1).image);

    const auto blocker = dir / "not_a_dir";
    std::ofstream(blocker) << "x";
    try {
        generate_corpus(cfg, 1, blocker / "sub");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("not_a_dir") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_manifest("filename,category\nx,y\n"), InvalidDataset);
    fs::remove_all(dir);
}
