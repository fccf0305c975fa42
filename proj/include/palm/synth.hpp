/**
 * @file synth.hpp
 * @brief Labeled synthetic palm corpus with ground truth
 *
 * Each palm is a flat skin-tone ellipse on a dark background with up to four
 * quadratic Bezier strokes, one per line kind, placed in kind-specific
 * regions. Left hands are mirror images of right hands.
 */
#pragma once

#include <palm/category.hpp>
#include <palm/features.hpp>
#include <palm/imaging.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace palm {

enum class RenderMode {
    Annotated,  // lines drawn in their overlay colors (training path)
    Raw,        // lines drawn in dark gray (inference path)
};

struct SynthConfig {
    int image_size = 256;
    std::set<LineKind> lines_present{LineKind::Heart, LineKind::Head, LineKind::Life, LineKind::Fate};
    double fate_line_probability = 0.7;
    double noise_sigma = 6.0;  // gray levels, per channel
    double jitter = 5.0;       // pixels, uniform per control point at 256 px
    std::uint64_t seed = 7;
    RenderMode mode = RenderMode::Annotated;
    int stroke_width = 3;
    Rgb raw_line_color{55, 45, 45};
    LinePalette palette;

    void validate() const;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct GroundTruthLine {
    LineKind kind = LineKind::Heart;
    std::array<Vec2, 3> control_points{};  // pixel coordinates after jitter
    Contour contour;                       // rendered 8-connected centerline
    double arc_length = 0.0;               // of the rendered centerline
    double depth = 0.0;                    // of the rendered centerline
    double ideal_arc_length = 0.0;         // of the continuous Bezier
    double ideal_depth = 0.0;              // half the control point's distance to the chord
};

struct GroundTruth {
    HandCategory category = HandCategory::MaleLeft;
    std::vector<GroundTruthLine> lines;  // at most one per kind, in kind order

    const GroundTruthLine* find(LineKind kind) const;
};

struct SynthSample {
    Image image;  // 3-channel
    GroundTruth truth;
};

/// Deterministic in (cfg.seed, index).
SynthSample generate_palm(const SynthConfig& cfg, std::uint64_t index);

/// Category assignment used by the corpus writer: round-robin.
HandCategory category_for_index(std::uint64_t index);

std::string corpus_filename(std::uint64_t index);

struct ManifestRow {
    std::string filename;
    HandCategory category = HandCategory::MaleLeft;
    std::array<bool, 4> present{};
    std::array<double, 4> arc_length{};
    std::array<double, 4> depth{};
};

struct Manifest {
    std::vector<ManifestRow> rows;
};

std::string manifest_header();
std::string format_manifest(const Manifest& m);
Manifest parse_manifest(const std::string& text);
Manifest read_manifest(const std::filesystem::path& path);

/// Writes n PNGs plus manifest.csv into out_dir and returns the manifest.
Manifest generate_corpus(const SynthConfig& cfg, std::size_t n, const std::filesystem::path& out_dir);

/// Rasterize a quadratic Bezier as a thin 8-connected path (no redundant corner pixels).
Contour rasterize_bezier(const std::array<Vec2, 3>& ctrl, int width, int height);

double bezier_length(const std::array<Vec2, 3>& ctrl);

}  // namespace palm
