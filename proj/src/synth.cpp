/**
 * @file synth.cpp
 * @brief Synthetic palm renderer and corpus writer
 */

#include <palm/synth.hpp>
#include <palm/error.hpp>
#include <palm/png_io.hpp>
#include <palm/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace palm {

namespace {

// Right-hand template in normalized coordinates; left hands mirror x.
struct LineTemplate {
    std::array<Vec2, 3> ctrl;
    double length_lo, length_hi;  // scaling of the curve about its anchor P0
    double bend_lo, bend_hi;      // scaling of P1's offset from the chord midpoint
};

constexpr std::array<LineTemplate, 4> kTemplates = {{
    // Heart: pinky edge across the upper palm, sagging downward.
    {{{{0.82, 0.30}, {0.55, 0.42}, {0.28, 0.26}}}, 0.70, 1.10, 0.30, 1.80},
    // Head: from the thumb side across mid-palm, near horizontal.
    {{{{0.22, 0.45}, {0.50, 0.56}, {0.78, 0.52}}}, 0.65, 1.10, 0.30, 2.00},
    // Life: below the head-line start, curving around the thumb mount.
    {{{{0.37, 0.60}, {0.16, 0.74}, {0.39, 0.90}}}, 0.70, 1.05, 0.40, 1.50},
    // Fate: near vertical in the lower centre, rising from the wrist.
    {{{{0.55, 0.92}, {0.53, 0.79}, {0.54, 0.66}}}, 0.60, 1.00, -1.00, 1.00},
}};

constexpr Vec2 kPalmCenter{0.5, 0.52};
constexpr Vec2 kPalmRadii{0.44, 0.46};

Vec2 lerp(Vec2 a, Vec2 b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

Vec2 bezier_at(const std::array<Vec2, 3>& c, double t) {
    const double u = 1.0 - t;
    return {u * u * c[0].x + 2 * u * t * c[1].x + t * t * c[2].x, u * u * c[0].y + 2 * u * t * c[1].y + t * t * c[2].y};
}

struct PalmTransform {
    Vec2 center;
    double scale = 1.0;
    double cos_a = 1.0, sin_a = 0.0;
    bool mirror = false;
    double size = 256.0;

    Vec2 apply(Vec2 p) const {
        if (mirror) p.x = 1.0 - p.x;
        const double dx = (p.x - kPalmCenter.x) * scale;
        const double dy = (p.y - kPalmCenter.y) * scale;
        const double rx = cos_a * dx - sin_a * dy;
        const double ry = sin_a * dx + cos_a * dy;
        return {(center.x + rx) * size, (center.y + ry) * size};
    }

    /// Point in normalized palm frame for a pixel, used for the ellipse test.
    Vec2 invert(double px, double py) const {
        const double dx = px / size - center.x;
        const double dy = py / size - center.y;
        const double rx = cos_a * dx + sin_a * dy;
        const double ry = -sin_a * dx + cos_a * dy;
        return {rx / scale, ry / scale};
    }
};

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

int chebyshev(Point a, Point b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

void append_thin(std::vector<Point>& out, Point q) {
    if (!out.empty() && out.back() == q) return;
    out.push_back(q);
    while (out.size() >= 3 && chebyshev(out[out.size() - 3], out.back()) <= 1) {
        out.erase(out.end() - 2);
    }
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

void SynthConfig::validate() const {
    if (image_size < 64) throw InvalidArgument("synth image_size must be >= 64");
    if (fate_line_probability < 0.0 || fate_line_probability > 1.0) {
        throw InvalidArgument("fate_line_probability must be within [0,1]");
    }
    if (noise_sigma < 0.0) throw InvalidArgument("noise_sigma must be >= 0");
    if (jitter < 0.0) throw InvalidArgument("jitter must be >= 0");
    if (stroke_width < 1) throw InvalidArgument("stroke_width must be >= 1");
}

const GroundTruthLine* GroundTruth::find(LineKind kind) const {
    for (const auto& l : lines) {
        if (l.kind == kind) return &l;
    }
    return nullptr;
}

HandCategory category_for_index(std::uint64_t index) { return kAllCategories[index % kAllCategories.size()]; }

std::string corpus_filename(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "palm_%04llu.png", static_cast<unsigned long long>(index));
    return buf;
}

double bezier_length(const std::array<Vec2, 3>& ctrl) {
    // Composite Simpson on |B'(t)|; the integrand is smooth so 512 panels is far past double-digit accuracy.
    constexpr int n = 512;
    auto speed = [&](double t) {
        const double dx = 2 * (1 - t) * (ctrl[1].x - ctrl[0].x) + 2 * t * (ctrl[2].x - ctrl[1].x);
        const double dy = 2 * (1 - t) * (ctrl[1].y - ctrl[0].y) + 2 * t * (ctrl[2].y - ctrl[1].y);
        return std::hypot(dx, dy);
    };
    double acc = speed(0.0) + speed(1.0);
    for (int i = 1; i < n; ++i) acc += speed(static_cast<double>(i) / n) * (i % 2 ? 4.0 : 2.0);
    return acc / (3.0 * n);
}

Contour rasterize_bezier(const std::array<Vec2, 3>& ctrl, int width, int height) {
    const double poly = std::hypot(ctrl[1].x - ctrl[0].x, ctrl[1].y - ctrl[0].y) +
                        std::hypot(ctrl[2].x - ctrl[1].x, ctrl[2].y - ctrl[1].y);
    const int steps = std::max(8, static_cast<int>(std::ceil(poly * 4.0)));
    auto to_pixel = [&](Vec2 v) {
        return Point{std::clamp(static_cast<int>(std::lround(v.x)), 0, width - 1),
                     std::clamp(static_cast<int>(std::lround(v.y)), 0, height - 1)};
    };

    std::vector<Point> path;
    Point prev = to_pixel(ctrl[0]);
    append_thin(path, prev);
    for (int i = 1; i <= steps; ++i) {
        const Point q = to_pixel(bezier_at(ctrl, static_cast<double>(i) / steps));
        if (q == prev) continue;
        // Bresenham bridge for the rare sample gap wider than one pixel.
        int x0 = prev.x, y0 = prev.y;
        const int dx = std::abs(q.x - x0), sx = x0 < q.x ? 1 : -1;
        const int dy = -std::abs(q.y - y0), sy = y0 < q.y ? 1 : -1;
        int err = dx + dy;
        while (x0 != q.x || y0 != q.y) {
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
            append_thin(path, Point{x0, y0});
        }
        prev = q;
    }
    return Contour{std::move(path)};
}

SynthSample generate_palm(const SynthConfig& cfg, std::uint64_t index) {
    cfg.validate();
    Rng rng(mix_seed(cfg.seed, index));
    const int size = cfg.image_size;
    const double px_scale = size / 256.0;

    SynthSample sample;
    sample.truth.category = category_for_index(index);
    const HandCategory cat = sample.truth.category;

    PalmTransform tf;
    tf.size = size;
    tf.mirror = is_left(cat);
    tf.scale = (is_female(cat) ? 0.94 : 1.0) * rng.uniform(0.97, 1.03);
    tf.center = {kPalmCenter.x + rng.uniform(-0.02, 0.02), kPalmCenter.y + rng.uniform(-0.02, 0.02)};
    const double angle = rng.uniform(-6.0, 6.0) * std::numbers::pi / 180.0;
    tf.cos_a = std::cos(angle);
    tf.sin_a = std::sin(angle);

    const Rgb skin{clamp_byte(rng.uniform(205, 240)), clamp_byte(rng.uniform(160, 195)),
                   clamp_byte(rng.uniform(130, 165))};
    const double bg_level = rng.uniform(15, 45);
    const Rgb background{clamp_byte(bg_level), clamp_byte(bg_level), clamp_byte(bg_level + 6)};

    Image img(size, size, 3);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const Vec2 q = tf.invert(x, y);
            const double ex = q.x / kPalmRadii.x;
            const double ey = q.y / kPalmRadii.y;
            const Rgb c = ex * ex + ey * ey <= 1.0 ? skin : background;
            img.at(x, y, 0) = c.r;
            img.at(x, y, 1) = c.g;
            img.at(x, y, 2) = c.b;
        }
    }

    // Every random draw happens regardless of presence so a kind's geometry does not depend on the others.
    const bool fate_roll = rng.uniform() < cfg.fate_line_probability;
    for (LineKind kind : kAllLineKinds) {
        const auto& tpl = kTemplates[index_of(kind)];
        const double length = rng.uniform(tpl.length_lo, tpl.length_hi);
        const double bend = rng.uniform(tpl.bend_lo, tpl.bend_hi);
        std::array<Vec2, 3> jit{};
        for (auto& j : jit) j = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

        bool present = cfg.lines_present.count(kind) > 0;
        if (kind == LineKind::Fate) present = present && fate_roll;
        if (!present) continue;

        std::array<Vec2, 3> c = tpl.ctrl;
        c[1] = lerp(c[0], c[1], length);
        c[2] = lerp(c[0], c[2], length);
        const Vec2 mid = lerp(c[0], c[2], 0.5);
        c[1] = lerp(mid, c[1], bend);

        GroundTruthLine gt;
        gt.kind = kind;
        for (int i = 0; i < 3; ++i) {
            Vec2 p = tf.apply(c[i]);
            p.x += jit[i].x * cfg.jitter * px_scale;
            p.y += jit[i].y * cfg.jitter * px_scale;
            p.x = std::clamp(p.x, 2.0, size - 3.0);
            p.y = std::clamp(p.y, 2.0, size - 3.0);
            gt.control_points[i] = p;
        }
        gt.contour = rasterize_bezier(gt.control_points, size, size);
        gt.arc_length = arc_length(gt.contour);
        gt.depth = depth(gt.contour);
        gt.ideal_arc_length = bezier_length(gt.control_points);
        {
            const auto& p0 = gt.control_points[0];
            const auto& p1 = gt.control_points[1];
            const auto& p2 = gt.control_points[2];
            const double chord = std::hypot(p2.x - p0.x, p2.y - p0.y);
            gt.ideal_depth = chord > 0.0
                                 ? 0.5 * std::abs((p2.x - p0.x) * (p1.y - p0.y) - (p2.y - p0.y) * (p1.x - p0.x)) / chord
                                 : 0.5 * std::hypot(p1.x - p0.x, p1.y - p0.y);
        }

        const Rgb color = cfg.mode == RenderMode::Annotated ? cfg.palette.color(kind) : cfg.raw_line_color;
        const BinaryMask stroke = line_footprint(gt.contour, size, size, cfg.stroke_width);
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                if (!stroke.get(x, y)) continue;
                img.at(x, y, 0) = color.r;
                img.at(x, y, 1) = color.g;
                img.at(x, y, 2) = color.b;
            }
        }
        sample.truth.lines.push_back(std::move(gt));
    }

    if (cfg.noise_sigma > 0.0) {
        for (auto& v : img.data()) v = clamp_byte(v + cfg.noise_sigma * rng.normal());
    }
    sample.image = std::move(img);
    return sample;
}

// =============================================================================
// Manifest
// =============================================================================

std::string manifest_header() {
    std::string h = "filename,category";
    for (auto k : kAllLineKinds) h += "," + std::string(to_string(k)) + "_present";
    for (auto k : kAllLineKinds) {
        h += "," + std::string(to_string(k)) + "_arc_length";
        h += "," + std::string(to_string(k)) + "_depth";
    }
    return h;
}

std::string format_manifest(const Manifest& m) {
    std::string out = manifest_header() + "\n";
    for (const auto& r : m.rows) {
        out += r.filename + "," + std::string(to_string(r.category));
        for (int k = 0; k < 4; ++k) out += r.present[k] ? ",1" : ",0";
        for (int k = 0; k < 4; ++k) out += "," + format_fixed(r.arc_length[k]) + "," + format_fixed(r.depth[k]);
        out += "\n";
    }
    return out;
}

Manifest parse_manifest(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidDataset("manifest is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "filename" || header[1] != "category") {
        throw InvalidDataset("manifest header must start with filename,category");
    }
    const bool has_truth = header.size() == 14;
    Manifest m;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw InvalidDataset("manifest line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(header.size()) + " fields");
        }
        ManifestRow row;
        row.filename = f[0];
        const auto cat = parse_category(f[1]);
        if (!cat) throw InvalidDataset("manifest line " + std::to_string(line_no) + ": unknown category " + f[1]);
        row.category = *cat;
        if (has_truth) {
            try {
                for (int k = 0; k < 4; ++k) row.present[k] = f[2 + k] == "1";
                for (int k = 0; k < 4; ++k) {
                    row.arc_length[k] = std::stod(f[6 + 2 * k]);
                    row.depth[k] = std::stod(f[7 + 2 * k]);
                }
            } catch (const std::exception&) {
                throw InvalidDataset("manifest line " + std::to_string(line_no) + ": malformed number");
            }
        }
        m.rows.push_back(std::move(row));
    }
    return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

Manifest generate_corpus(const SynthConfig& cfg, std::size_t n, const std::filesystem::path& out_dir) {
    if (n < 1) throw InvalidArgument("corpus size must be >= 1");
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw IoError("cannot create corpus directory " + out_dir.string() + (ec ? ": " + ec.message() : ""));
    }

    Manifest m;
    m.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SynthSample s = generate_palm(cfg, i);
        ManifestRow row;
        row.filename = corpus_filename(i);
        row.category = s.truth.category;
        for (const auto& l : s.truth.lines) {
            row.present[index_of(l.kind)] = true;
            row.arc_length[index_of(l.kind)] = l.arc_length;
            row.depth[index_of(l.kind)] = l.depth;
        }
        write_png(out_dir / row.filename, s.image);
        m.rows.push_back(std::move(row));
    }

    const std::string text = format_manifest(m);
    std::ofstream out(out_dir / "manifest.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (out_dir / "manifest.csv").string());
    out << text;
    if (!out) throw IoError("write failed for " + (out_dir / "manifest.csv").string());
    return m;
}

}  // namespace palm
