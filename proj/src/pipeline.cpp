/**
 * @file pipeline.cpp
 * @brief Corpus ingestion and single-image analysis
 */

#include <palm/pipeline.hpp>
#include <palm/error.hpp>
#include <palm/png_io.hpp>
#include <palm/synth.hpp>
#include <palm/text.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace palm {

using nlohmann::json;

namespace {

json range_to_json(const HsvRange& r) {
    return {{"h_lo", r.h_lo}, {"h_hi", r.h_hi}, {"s_lo", r.s_lo}, {"s_hi", r.s_hi},
            {"v_lo", r.v_lo}, {"v_hi", r.v_hi}, {"wraps_hue", r.wraps_hue}};
}

HsvRange range_from_json(const json& j, HsvRange r) {
    r.h_lo = j.value("h_lo", r.h_lo);
    r.h_hi = j.value("h_hi", r.h_hi);
    r.s_lo = j.value("s_lo", r.s_lo);
    r.s_hi = j.value("s_hi", r.s_hi);
    r.v_lo = j.value("v_lo", r.v_lo);
    r.v_hi = j.value("v_hi", r.v_hi);
    r.wraps_hue = j.value("wraps_hue", r.wraps_hue);
    return r;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

Image fit_to_target(const Image& img, int target) {
    const Image rgb = to_rgb(img);
    if (rgb.width() == target && rgb.height() == target) return rgb;
    return resize(rgb, target, target);
}

/// Longest contour after opening, among those reaching min_arc.
std::optional<Contour> longest_open(const std::vector<Contour>& traces, double min_arc) {
    std::optional<Contour> best;
    double best_len = -1.0;
    for (const auto& t : traces) {
        Contour c = open_contour(t);
        const double len = arc_length(c);
        if (len >= min_arc && len > best_len) {
            best_len = len;
            best = std::move(c);
        }
    }
    return best;
}

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& out) : out_(out), last_(std::chrono::steady_clock::now()) {}
    void mark(std::string stage) {
        const auto now = std::chrono::steady_clock::now();
        out_.push_back({std::move(stage), std::chrono::duration<double, std::milli>(now - last_).count()});
        last_ = now;
    }

private:
    std::vector<StageTiming>& out_;
    std::chrono::steady_clock::time_point last_;
};

}  // namespace

void PipelineConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw InvalidConfig(fmt::format("config field '{}' {}", field, why));
    };
    if (resize_target < 16 || resize_target > 4096) fail("resize_target", "must be within [16, 4096]");
    if (!(blur_sigma > 0.0)) fail("blur.sigma", "must be positive");
    if (blur_ksize && (*blur_ksize < 1 || *blur_ksize % 2 == 0)) fail("blur.ksize", "must be odd and >= 1");
    if (!(canny_low >= 0.0) || !(canny_low <= canny_high) || canny_high > 255.0) {
        fail("canny", "requires 0 <= low <= high <= 255");
    }
    for (auto k : kAllLineKinds) {
        try {
            line_ranges[index_of(k)].validate();
        } catch (const Error& e) {
            fail(fmt::format("hsv_ranges.{}", to_string(k)), e.what());
        }
    }
    try {
        skin_range.validate();
    } catch (const Error& e) {
        fail("palm_region.skin", e.what());
    }
    if (palm_margin < 0) fail("palm_region.margin", "must be >= 0");
    if (!(min_arc_length >= 0.0)) fail("min_arc_length", "must be >= 0");
    if (max_candidates < 1) fail("max_candidates", "must be >= 1");
    if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) fail("confidence_floor", "must be within [0, 1]");
    try {
        thresholds.validate();
    } catch (const Error& e) {
        fail("descriptor", e.what());
    }
    if (overlay_thickness < 1) fail("overlay.thickness", "must be >= 1");
}

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    try {
        if (!j.is_object()) throw InvalidConfig("config root must be a JSON object");
        c.resize_target = j.value("resize_target", c.resize_target);
        if (j.contains("blur")) {
            const auto& b = j.at("blur");
            c.blur_sigma = b.value("sigma", c.blur_sigma);
            if (b.contains("ksize") && !b.at("ksize").is_null()) c.blur_ksize = b.at("ksize").get<int>();
        }
        if (j.contains("canny")) {
            c.canny_low = j.at("canny").value("low", c.canny_low);
            c.canny_high = j.at("canny").value("high", c.canny_high);
        }
        if (j.contains("hsv_ranges")) {
            for (auto k : kAllLineKinds) {
                const std::string key(to_string(k));
                if (j.at("hsv_ranges").contains(key)) {
                    c.line_ranges[index_of(k)] = range_from_json(j.at("hsv_ranges").at(key), c.line_ranges[index_of(k)]);
                }
            }
        }
        if (j.contains("palm_region")) {
            const auto& p = j.at("palm_region");
            c.palm_region = p.value("enabled", c.palm_region);
            if (p.contains("skin")) c.skin_range = range_from_json(p.at("skin"), c.skin_range);
            c.palm_margin = p.value("margin", c.palm_margin);
        }
        c.cleanup_min_size = j.value("cleanup_min_size", c.cleanup_min_size);
        c.min_arc_length = j.value("min_arc_length", c.min_arc_length);
        c.max_candidates = j.value("max_candidates", c.max_candidates);
        c.confidence_floor = j.value("confidence_floor", c.confidence_floor);
        if (j.contains("descriptor")) {
            const auto& d = j.at("descriptor");
            c.thresholds.short_below = d.value("short_below", c.thresholds.short_below);
            c.thresholds.long_above = d.value("long_above", c.thresholds.long_above);
            c.thresholds.curved_at = d.value("curved_at", c.thresholds.curved_at);
        }
        if (j.contains("overlay")) {
            const auto& o = j.at("overlay");
            c.overlay_thickness = o.value("thickness", c.overlay_thickness);
            if (o.contains("colors")) {
                for (auto k : kAllLineKinds) {
                    const std::string key(to_string(k));
                    if (!o.at("colors").contains(key)) continue;
                    const auto rgb = o.at("colors").at(key).get<std::array<int, 3>>();
                    for (int v : rgb) {
                        if (v < 0 || v > 255) throw InvalidConfig(fmt::format("config field 'overlay.colors.{}' out of range", key));
                    }
                    c.palette.colors[index_of(k)] = Rgb{static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                                                        static_cast<std::uint8_t>(rgb[2])};
                }
            }
        }
        if (j.contains("models")) {
            c.forest_model = resolve(base_dir, j.at("models").value("forest", std::string{}));
            c.svm_model = resolve(base_dir, j.at("models").value("svm", std::string{}));
        }
        c.rules_path = resolve(base_dir, j.value("rules", std::string{}));
    } catch (const json::exception& e) {
        throw InvalidConfig(fmt::format("malformed config: {}", e.what()));
    }
    c.validate();
    return c;
}

json to_json(const PipelineConfig& c) {
    json ranges = json::object();
    json colors = json::object();
    for (auto k : kAllLineKinds) {
        const std::string key(to_string(k));
        ranges[key] = range_to_json(c.line_ranges[index_of(k)]);
        const auto rgb = c.palette.color(k);
        colors[key] = {rgb.r, rgb.g, rgb.b};
    }
    return {
        {"resize_target", c.resize_target},
        {"blur", {{"sigma", c.blur_sigma}, {"ksize", c.blur_ksize ? json(*c.blur_ksize) : json(nullptr)}}},
        {"canny", {{"low", c.canny_low}, {"high", c.canny_high}}},
        {"hsv_ranges", ranges},
        {"palm_region", {{"enabled", c.palm_region}, {"skin", range_to_json(c.skin_range)}, {"margin", c.palm_margin}}},
        {"cleanup_min_size", c.cleanup_min_size},
        {"min_arc_length", c.min_arc_length},
        {"max_candidates", c.max_candidates},
        {"confidence_floor", c.confidence_floor},
        {"descriptor", {{"short_below", c.thresholds.short_below}, {"long_above", c.thresholds.long_above},
                        {"curved_at", c.thresholds.curved_at}}},
        {"overlay", {{"thickness", c.overlay_thickness}, {"colors", colors}}},
        {"models", {{"forest", c.forest_model.string()}, {"svm", c.svm_model.string()}}},
        {"rules", c.rules_path.string()},
    };
}

PipelineConfig load_config(const std::filesystem::path& path) {
    const auto text = read_text_file(path.string());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(fmt::format("{}: {}", path.string(), e.what()));
    }
    auto cfg = config_from_json(j, path.parent_path());
    if (cfg.rules_path.empty()) throw InvalidConfig(fmt::format("{}: 'rules' is required", path.string()));
    if (!std::filesystem::is_regular_file(cfg.rules_path)) {
        throw InvalidConfig(fmt::format("{}: rule file {} does not exist", path.string(), cfg.rules_path.string()));
    }
    return cfg;
}

std::optional<Contour> segment_annotated_line(const Image& rgb, LineKind kind, const PipelineConfig& cfg) {
    const auto mask = mask_cleanup(hsv_mask(rgb, cfg.line_ranges[index_of(kind)]), cfg.cleanup_min_size);
    return longest_open(extract_contours(mask), cfg.min_arc_length);
}

ml::LabeledDataset ingest_annotated_corpus(const std::filesystem::path& manifest_path, const PipelineConfig& cfg) {
    const auto manifest = read_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();
    ml::LabeledDataset ds;
    for (const auto& row : manifest.rows) {
        const auto file = dir / row.filename;
        if (!std::filesystem::is_regular_file(file)) throw IoError(fmt::format("missing corpus image {}", file.string()));
        const Image img = fit_to_target(read_png(file), cfg.resize_target);
        for (auto kind : kAllLineKinds) {
            if (auto c = segment_annotated_line(img, kind, cfg)) {
                ds.add(fmt::format("{}#{}", row.filename, to_string(kind)), kind, build_feature_vector(*c, img.width(), img.height()));
            }
        }
    }
    if (ds.empty()) throw EmptyDataset(fmt::format("no line contours extracted from {}", manifest_path.string()));
    return ds;
}

std::vector<Contour> candidate_contours(const Image& rgb, const PipelineConfig& cfg) {
    const Image gray = gaussian_blur(to_grayscale(rgb), cfg.blur_sigma, cfg.blur_ksize);
    BinaryMask edges = canny(gray, cfg.canny_low, cfg.canny_high);
    if (cfg.palm_region) {
        const auto skin = largest_component(hsv_mask(rgb, cfg.skin_range));
        if (skin.any()) edges = edges & erode(fill_holes(skin), cfg.palm_margin);
    }
    edges = mask_cleanup(edges, cfg.cleanup_min_size);

    std::vector<Contour> out;
    for (const auto& trace : extract_contours(edges)) {
        Contour c = open_contour(trace);
        if (arc_length(c) >= cfg.min_arc_length) out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) { return arc_length(a) > arc_length(b); });
    if (out.size() > static_cast<std::size_t>(cfg.max_candidates)) out.resize(cfg.max_candidates);
    return out;
}

AnalysisResult analyze_image(const Image& img, HandCategory category, const ml::Model& model, const RuleTable& rules,
                             const PipelineConfig& cfg, std::string request_id) {
    if (img.empty()) throw BadImage("image is empty");
    AnalysisResult result;
    result.request_id = std::move(request_id);
    result.model_name = ml::model_name(model);
    result.category = category;
    result.config = to_json(cfg);
    StageClock clock(result.timings);

    const Image rgb = fit_to_target(img, cfg.resize_target);
    clock.mark("resize");
    const auto candidates = candidate_contours(rgb, cfg);
    clock.mark("contours");

    std::array<std::optional<PalmLine>, 4> best;
    for (const auto& c : candidates) {
        const auto pred = ml::predict(model, build_feature_vector(c, rgb.width(), rgb.height()));
        if (pred.confidence < cfg.confidence_floor) continue;
        auto& slot = best[index_of(pred.kind)];
        if (!slot || pred.confidence > slot->confidence) slot = make_palm_line(pred.kind, c, pred.confidence);
    }
    for (auto& b : best) {
        if (b) result.lines.push_back(std::move(*b));
    }
    clock.mark("classify");

    const double diagonal = std::hypot(rgb.width(), rgb.height());
    result.report = generate_report(result.lines, category, rules, diagonal, cfg.thresholds);
    clock.mark("report");
    result.annotated = annotate_lines(rgb, result.lines, cfg.overlay_thickness, cfg.palette);
    clock.mark("annotate");
    return result;
}

AnalysisResult analyze(std::span<const std::uint8_t> png_bytes, HandCategory category, const ml::Model& model,
                       const RuleTable& rules, const PipelineConfig& cfg, std::string request_id) {
    const auto t0 = std::chrono::steady_clock::now();
    const Image img = decode_png(png_bytes);
    const double decode_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    auto result = analyze_image(img, category, model, rules, cfg, std::move(request_id));
    result.timings.insert(result.timings.begin(), StageTiming{"decode", decode_ms});
    return result;
}

json summary_json(const AnalysisResult& r, bool include_timings) {
    json lines = json::array();
    for (const auto& e : r.report.entries) {
        if (!e.descriptor.present) continue;
        const auto it = std::find_if(r.lines.begin(), r.lines.end(), [&](const PalmLine& l) { return l.kind == e.descriptor.kind; });
        lines.push_back({{"kind", to_string(e.descriptor.kind)},
                         {"arc_length", it->arc_length},
                         {"depth", it->depth},
                         {"confidence", it->confidence},
                         {"length_class", to_string(e.descriptor.length_class)},
                         {"shape_class", to_string(e.descriptor.shape_class)}});
    }
    json entries = json::array();
    for (const auto& e : r.report.entries) {
        json entry = {{"kind", to_string(e.descriptor.kind)}, {"present", e.descriptor.present}, {"text", e.text}};
        if (e.descriptor.present) {
            entry["length_class"] = to_string(e.descriptor.length_class);
            entry["shape_class"] = to_string(e.descriptor.shape_class);
            entry["confidence"] = e.confidence;
        }
        entries.push_back(std::move(entry));
    }
    json out = {
        {"id", r.request_id},
        {"category", to_string(r.category)},
        {"model", r.model_name},
        {"lines", lines},
        {"report", {{"greeting", r.report.greeting},
                    {"entries", entries},
                    {"combinations", r.report.combinations},
                    {"disclaimer", r.report.disclaimer},
                    {"rules_version", r.report.rules_version}}},
        {"annotated_url", fmt::format("/api/annotated/{}.png", r.request_id)},
        {"image", {{"width", r.annotated.width()}, {"height", r.annotated.height()}}},
        {"config", r.config},
    };
    if (include_timings) {
        json t = json::object();
        for (const auto& s : r.timings) t[s.stage] = s.ms;
        out["timings"] = t;
    }
    return out;
}

}  // namespace palm
