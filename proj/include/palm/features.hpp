/**
 * @file features.hpp
 * @brief Contours from binary masks, contour geometry, and line overlays
 */
#pragma once

#include <palm/imaging.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace palm {

enum class LineKind { Heart = 0, Head = 1, Life = 2, Fate = 3 };

inline constexpr std::array<LineKind, 4> kAllLineKinds = {LineKind::Heart, LineKind::Head, LineKind::Life,
                                                          LineKind::Fate};
inline constexpr int kNumLineKinds = 4;

inline int index_of(LineKind k) { return static_cast<int>(k); }

/// Lowercase token: heart, head, life, fate.
std::string_view to_string(LineKind kind);
std::optional<LineKind> parse_line_kind(std::string_view token);

/// Overlay colors per kind, indexed by index_of(kind).
struct LinePalette {
    std::array<Rgb, 4> colors{Rgb{255, 0, 0}, Rgb{0, 128, 0}, Rgb{128, 0, 128}, Rgb{0, 0, 255}};
    Rgb color(LineKind k) const { return colors[index_of(k)]; }
};

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

/// Ordered pixel path; consecutive points are 8-neighbors.
struct Contour {
    std::vector<Point> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    bool operator==(const Contour&) const = default;
};

struct PalmLine {
    LineKind kind = LineKind::Heart;
    Contour contour;
    double arc_length = 0.0;
    double depth = 0.0;
    double confidence = 0.0;
};

inline constexpr std::size_t kFeatureDim = 6;

/// arc_length_norm, depth_ratio, centroid_x_norm, centroid_y_norm, bbox_aspect, orientation.
using FeatureVector = std::array<double, kFeatureDim>;

inline constexpr std::array<std::string_view, kFeatureDim> kFeatureNames = {
    "arc_length_norm", "depth_ratio", "centroid_x_norm", "centroid_y_norm", "bbox_aspect", "orientation"};

inline constexpr double kMaxBboxAspect = 10.0;

/**
 * @brief One boundary trace per 8-connected component
 *
 * Moore-neighbor border following, clockwise, starting at each component's
 * topmost-leftmost pixel and stopping when the first move repeats. Sorted by
 * descending point count (ties keep raster order of the start pixel).
 */
std::vector<Contour> extract_contours(const BinaryMask& mask);

/**
 * @brief Open a closed boundary trace into an end-to-end path
 *
 * Finds the two trace points farthest apart and returns the shorter of the two
 * trace arcs joining them. For a thin stroke this is the stroke itself, for a
 * thick stroke one of its two long sides.
 */
Contour open_contour(const Contour& trace);

/// Sum of consecutive Euclidean steps; no closing segment.
double arc_length(const Contour& c);

/// Chord length between first and last point.
double chord_length(const Contour& c);

/// Max perpendicular distance to the end-to-end chord (to the first point when the chord is degenerate).
double depth(const Contour& c);

/// Principal-axis angle of the points, radians in [0, pi).
double orientation(const Contour& c);

FeatureVector build_feature_vector(const Contour& c, int img_w, int img_h);

PalmLine make_palm_line(LineKind kind, Contour contour, double confidence);

/// Square footprint of side `thickness` around each contour point, clipped to the image.
BinaryMask line_footprint(const Contour& c, int width, int height, int thickness);

Image annotate_lines(const Image& base, const std::vector<PalmLine>& lines, int thickness,
                     const LinePalette& palette = {});

}  // namespace palm
