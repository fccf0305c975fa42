/**
 * @file features.cpp
 * @brief Moore tracing, contour geometry, feature vectors and overlays
 */

#include <palm/features.hpp>
#include <palm/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace palm {

namespace {

// Clockwise on screen (y down), starting west.
constexpr int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int direction_index(int dx, int dy) {
    for (int d = 0; d < 8; ++d) {
        if (kDx[d] == dx && kDy[d] == dy) return d;
    }
    return 0;
}

Contour trace_component(const BinaryMask& mask, Point start, std::size_t component_size) {
    Contour c;
    c.points.push_back(start);

    auto fg = [&](int x, int y) { return mask.in_bounds(x, y) && mask.get(x, y); };

    // Returns the next boundary pixel and the direction (from it) of the last background cell checked.
    auto step = [&](Point p, int backtrack) -> std::optional<std::pair<Point, int>> {
        for (int i = 1; i <= 8; ++i) {
            const int d = (backtrack + i) % 8;
            const Point q{p.x + kDx[d], p.y + kDy[d]};
            if (!fg(q.x, q.y)) continue;
            const int prev = (backtrack + i - 1) % 8;
            const Point b{p.x + kDx[prev], p.y + kDy[prev]};
            return std::make_pair(q, direction_index(b.x - q.x, b.y - q.y));
        }
        return std::nullopt;
    };

    // West of the topmost-leftmost pixel is always background.
    auto first = step(start, 0);
    if (!first) return c;

    const Point first_move = first->first;
    Point p = first_move;
    int backtrack = first->second;
    const std::size_t cap = 8 * component_size + 16;
    for (std::size_t guard = 0; guard < cap; ++guard) {
        if (p == start) {
            auto next = step(p, backtrack);
            if (!next || next->first == first_move) break;
            c.points.push_back(p);
            p = next->first;
            backtrack = next->second;
            continue;
        }
        c.points.push_back(p);
        auto next = step(p, backtrack);
        if (!next) break;
        p = next->first;
        backtrack = next->second;
    }
    return c;
}

}  // namespace

std::string_view to_string(LineKind kind) {
    switch (kind) {
        case LineKind::Heart: return "heart";
        case LineKind::Head: return "head";
        case LineKind::Life: return "life";
        case LineKind::Fate: return "fate";
    }
    return "unknown";
}

std::optional<LineKind> parse_line_kind(std::string_view token) {
    for (auto k : kAllLineKinds) {
        if (to_string(k) == token) return k;
    }
    return std::nullopt;
}

std::vector<Contour> extract_contours(const BinaryMask& mask) {
    const Labeling lab = label_components(mask);
    std::vector<bool> seen(lab.count + 1, false);
    std::vector<Contour> out;
    out.reserve(lab.count);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const int l = lab.labels[static_cast<std::size_t>(y) * mask.width() + x];
            if (l == 0 || seen[l]) continue;
            seen[l] = true;
            out.push_back(trace_component(mask, Point{x, y}, lab.sizes[l - 1]));
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Contour& a, const Contour& b) { return a.size() > b.size(); });
    return out;
}

Contour open_contour(const Contour& trace) {
    const std::size_t n = trace.size();
    if (n <= 2) return trace;

    std::size_t bi = 0, bj = 0;
    long best = -1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const long dx = trace.points[j].x - trace.points[i].x;
            const long dy = trace.points[j].y - trace.points[i].y;
            const long d2 = dx * dx + dy * dy;
            if (d2 > best) {
                best = d2;
                bi = i;
                bj = j;
            }
        }
    }

    Contour forward;
    forward.points.assign(trace.points.begin() + static_cast<long>(bi), trace.points.begin() + static_cast<long>(bj) + 1);
    const std::size_t backward_count = n - bj + bi + 1;
    if (forward.size() <= backward_count) return forward;

    Contour backward;
    backward.points.reserve(backward_count);
    for (std::size_t k = bj; k < n; ++k) backward.points.push_back(trace.points[k]);
    for (std::size_t k = 0; k <= bi; ++k) backward.points.push_back(trace.points[k]);
    return backward;
}

double arc_length(const Contour& c) {
    double total = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        total += std::hypot(static_cast<double>(c.points[i].x - c.points[i - 1].x),
                            static_cast<double>(c.points[i].y - c.points[i - 1].y));
    }
    return total;
}

double chord_length(const Contour& c) {
    if (c.empty()) return 0.0;
    const auto& a = c.points.front();
    const auto& b = c.points.back();
    return std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
}

double depth(const Contour& c) {
    if (c.size() < 2) return 0.0;
    const auto& a = c.points.front();
    const auto& b = c.points.back();
    const double cx = b.x - a.x;
    const double cy = b.y - a.y;
    const double chord = std::hypot(cx, cy);
    double best = 0.0;
    for (const auto& p : c.points) {
        const double px = p.x - a.x;
        const double py = p.y - a.y;
        const double d = chord > 0.0 ? std::abs(cx * py - cy * px) / chord : std::hypot(px, py);
        best = std::max(best, d);
    }
    return best;
}

double orientation(const Contour& c) {
    if (c.empty()) return 0.0;
    double mx = 0.0, my = 0.0;
    for (const auto& p : c.points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(c.size());
    my /= static_cast<double>(c.size());
    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
    for (const auto& p : c.points) {
        const double dx = p.x - mx;
        const double dy = p.y - my;
        mu20 += dx * dx;
        mu02 += dy * dy;
        mu11 += dx * dy;
    }
    double theta = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
    if (theta < 0.0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    return theta;
}

FeatureVector build_feature_vector(const Contour& c, int img_w, int img_h) {
    if (img_w <= 0 || img_h <= 0) throw InvalidArgument("feature normalization dimensions must be positive");
    FeatureVector fv{};
    if (c.empty()) return fv;

    const double diagonal = std::hypot(static_cast<double>(img_w), static_cast<double>(img_h));
    const double chord = chord_length(c);
    fv[0] = arc_length(c) / diagonal;
    fv[1] = chord > 0.0 ? depth(c) / chord : 0.0;

    double sx = 0.0, sy = 0.0;
    int min_x = c.points[0].x, max_x = min_x, min_y = c.points[0].y, max_y = min_y;
    for (const auto& p : c.points) {
        sx += p.x;
        sy += p.y;
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    fv[2] = sx / static_cast<double>(c.size()) / img_w;
    fv[3] = sy / static_cast<double>(c.size()) / img_h;
    const double bw = max_x - min_x + 1;
    const double bh = max_y - min_y + 1;
    fv[4] = std::min(bw / bh, kMaxBboxAspect);
    fv[5] = orientation(c);
    return fv;
}

PalmLine make_palm_line(LineKind kind, Contour contour, double confidence) {
    PalmLine line;
    line.kind = kind;
    line.arc_length = arc_length(contour);
    line.depth = depth(contour);
    line.confidence = confidence;
    line.contour = std::move(contour);
    return line;
}

BinaryMask line_footprint(const Contour& c, int width, int height, int thickness) {
    if (thickness < 1) throw InvalidArgument("line thickness must be >= 1");
    BinaryMask fp(width, height);
    const int lo = -(thickness - 1) / 2;
    const int hi = thickness / 2;
    for (const auto& p : c.points) {
        for (int dy = lo; dy <= hi; ++dy) {
            for (int dx = lo; dx <= hi; ++dx) {
                if (fp.in_bounds(p.x + dx, p.y + dy)) fp.set(p.x + dx, p.y + dy);
            }
        }
    }
    return fp;
}

Image annotate_lines(const Image& base, const std::vector<PalmLine>& lines, int thickness,
                     const LinePalette& palette) {
    if (thickness < 1) throw InvalidArgument("line thickness must be >= 1");
    Image out = to_rgb(base);
    for (const auto& line : lines) {
        for (const auto& p : line.contour.points) {
            if (p.x < 0 || p.y < 0 || p.x >= out.width() || p.y >= out.height()) {
                throw InvalidArgument("contour point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                      ") outside " + std::to_string(out.width()) + "x" +
                                      std::to_string(out.height()) + " image");
            }
        }
        const BinaryMask fp = line_footprint(line.contour, out.width(), out.height(), thickness);
        const Rgb color = palette.color(line.kind);
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) {
                if (!fp.get(x, y)) continue;
                out.at(x, y, 0) = color.r;
                out.at(x, y, 1) = color.g;
                out.at(x, y, 2) = color.b;
            }
        }
    }
    return out;
}

}  // namespace palm
