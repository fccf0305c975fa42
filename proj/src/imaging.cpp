/**
 * @file imaging.cpp
 * @brief Preprocessing primitives: color conversion, resize, blur, Canny, HSV masks
 */

#include <palm/imaging.hpp>
#include <palm/error.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <string>

namespace palm {

namespace {

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

void require_gray(const Image& img, const char* fn) {
    if (img.channels() != 1) {
        throw InvalidArgument(std::string(fn) + ": expected a 1-channel image, got " +
                              std::to_string(img.channels()));
    }
}

constexpr int kDx8[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDy8[8] = {0, -1, -1, -1, 0, 1, 1, 1};

}  // namespace

// =============================================================================
// Image / BinaryMask
// =============================================================================

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("image dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
        throw InvalidArgument("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : Image(width, height, channels) {
    if (data.size() != data_.size()) {
        throw InvalidArgument("image data length " + std::to_string(data.size()) +
                              " does not match " + std::to_string(data_.size()));
    }
    data_ = std::move(data);
}

bool HsvRange::contains(const HsvPixel& p) const noexcept {
    if (p.s < s_lo || p.s > s_hi || p.v < v_lo || p.v > v_hi) return false;
    if (wraps_hue) return p.h >= h_lo || p.h <= h_hi;
    return p.h >= h_lo && p.h <= h_hi;
}

void HsvRange::validate() const {
    if (s_lo > s_hi || v_lo > v_hi) throw InvalidArgument("HSV range has inverted s or v bounds");
    if (!wraps_hue && h_lo > h_hi) throw InvalidArgument("HSV range has h_lo > h_hi without hue wrap");
    if (s_lo < 0 || s_hi > 1 || v_lo < 0 || v_hi > 1) throw InvalidArgument("HSV s/v bounds outside [0,1]");
    if (h_lo < 0 || h_hi > 360) throw InvalidArgument("HSV hue bounds outside [0,360]");
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("mask dimensions must be non-negative");
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::operator&(const BinaryMask& other) const {
    if (other.width_ != width_ || other.height_ != height_) {
        throw InvalidArgument("mask dimensions differ");
    }
    BinaryMask out(width_, height_);
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & other.bits_[i];
    return out;
}

bool BinaryMask::is_subset_of(const BinaryMask& other) const {
    if (other.width_ != width_ || other.height_ != height_) return false;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && !other.bits_[i]) return false;
    }
    return true;
}

// =============================================================================
// Color conversion and resize
// =============================================================================

Image to_grayscale(const Image& img) {
    if (img.channels() == 1) return img;
    Image out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double luma = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
            out.at(x, y) = clamp_u8(luma);
        }
    }
    return out;
}

Image to_rgb(const Image& img) {
    if (img.channels() == 3) return img;
    Image out(img.width(), img.height(), 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const auto v = img.at(x, y);
            out.at(x, y, 0) = v;
            out.at(x, y, 1) = v;
            out.at(x, y, 2) = v;
        }
    }
    return out;
}

Image resize(const Image& img, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) {
        throw InvalidArgument("resize target must be positive, got " + std::to_string(out_w) + "x" +
                              std::to_string(out_h));
    }
    if (img.empty()) throw InvalidArgument("resize of an empty image");
    const int sw = img.width();
    const int sh = img.height();
    const int ch = img.channels();
    Image out(out_w, out_h, ch);
    const double scale_x = static_cast<double>(sw) / out_w;
    const double scale_y = static_cast<double>(sh) / out_h;

    for (int y = 0; y < out_h; ++y) {
        const double sy = std::clamp((y + 0.5) * scale_y - 0.5, 0.0, static_cast<double>(sh - 1));
        const int y0 = static_cast<int>(std::floor(sy));
        const int y1 = std::min(y0 + 1, sh - 1);
        const double fy = sy - y0;
        for (int x = 0; x < out_w; ++x) {
            const double sx = std::clamp((x + 0.5) * scale_x - 0.5, 0.0, static_cast<double>(sw - 1));
            const int x0 = static_cast<int>(std::floor(sx));
            const int x1 = std::min(x0 + 1, sw - 1);
            const double fx = sx - x0;
            for (int c = 0; c < ch; ++c) {
                const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
                const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
                out.at(x, y, c) = clamp_u8(top * (1.0 - fy) + bottom * fy);
            }
        }
    }
    return out;
}

// =============================================================================
// Gaussian blur
// =============================================================================

int default_kernel_size(double sigma) {
    return 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
}

std::vector<double> gaussian_kernel(double sigma, int ksize) {
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian sigma must be positive");
    if (ksize < 1 || ksize % 2 == 0) {
        throw InvalidArgument("gaussian kernel size must be odd and >= 1, got " + std::to_string(ksize));
    }
    const int r = ksize / 2;
    std::vector<double> k(ksize);
    for (int i = -r; i <= r; ++i) k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    const double sum = std::accumulate(k.begin(), k.end(), 0.0);
    for (auto& v : k) v /= sum;
    return k;
}

Image gaussian_blur(const Image& gray, double sigma, std::optional<int> ksize) {
    require_gray(gray, "gaussian_blur");
    const int size = ksize.value_or(default_kernel_size(sigma));
    const auto kernel = gaussian_kernel(sigma, size);
    const int r = size / 2;
    const int w = gray.width();
    const int h = gray.height();

    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += kernel[i + r] * gray.at(clampi(x + i, 0, w - 1), y);
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    Image out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                acc += kernel[i + r] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
            }
            out.at(x, y) = clamp_u8(acc);
        }
    }
    return out;
}

// =============================================================================
// Canny
// =============================================================================

Gradient sobel_gradient(const Image& gray) {
    require_gray(gray, "sobel_gradient");
    const int w = gray.width();
    const int h = gray.height();
    Gradient g;
    g.width = w;
    g.height = h;
    g.magnitude.resize(static_cast<std::size_t>(w) * h);
    g.direction.resize(static_cast<std::size_t>(w) * h);

    auto px = [&](int x, int y) { return static_cast<int>(gray.at(clampi(x, 0, w - 1), clampi(y, 0, h - 1))); };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                           (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            const int gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                           (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            g.magnitude[i] = std::hypot(static_cast<double>(gx), static_cast<double>(gy));

            double angle = std::atan2(static_cast<double>(gy), static_cast<double>(gx)) * 180.0 / std::numbers::pi;
            if (angle < 0) angle += 180.0;
            std::uint8_t bin = 0;
            if (angle >= 22.5 && angle < 67.5) bin = 1;
            else if (angle >= 67.5 && angle < 112.5) bin = 2;
            else if (angle >= 112.5 && angle < 157.5) bin = 3;
            g.direction[i] = bin;
        }
    }
    const double peak = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    if (peak > 0.0) {
        for (auto& m : g.magnitude) m = 255.0 * m / peak;
    }
    return g;
}

BinaryMask canny(const Image& gray, double low, double high) {
    if (low < 0 || low > high) {
        throw InvalidArgument("canny thresholds must satisfy 0 <= low <= high");
    }
    const Gradient g = sobel_gradient(gray);
    const int w = g.width;
    const int h = g.height;

    auto mag = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return g.magnitude[static_cast<std::size_t>(y) * w + x];
    };

    // Neighbor offsets along the gradient for each direction bin (y grows downward).
    constexpr int kOff[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};

    std::vector<double> thin(static_cast<std::size_t>(w) * h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = g.magnitude[i];
            const auto* off = kOff[g.direction[i]];
            const double behind = mag(x - off[0], y - off[1]);
            const double ahead = mag(x + off[0], y + off[1]);
            // Asymmetric comparison keeps exactly one pixel of a two-pixel plateau.
            if (m > behind && m >= ahead) thin[i] = m;
        }
    }

    BinaryMask edges(w, h);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = thin[static_cast<std::size_t>(y) * w + x];
            if (m > 0.0 && m >= high) {
                edges.set(x, y);
                queue.emplace_back(x, y);
            }
        }
    }
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 8; ++k) {
            const int nx = x + kDx8[k];
            const int ny = y + kDy8[k];
            if (!edges.in_bounds(nx, ny) || edges.get(nx, ny)) continue;
            const double m = thin[static_cast<std::size_t>(ny) * w + nx];
            if (m > 0.0 && m >= low) {
                edges.set(nx, ny);
                queue.emplace_back(nx, ny);
            }
        }
    }
    return edges;
}

// =============================================================================
// HSV
// =============================================================================

HsvPixel rgb_to_hsv(Rgb pixel) {
    const double r = pixel.r / 255.0;
    const double g = pixel.g / 255.0;
    const double b = pixel.b / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;

    HsvPixel out;
    out.v = mx;
    out.s = mx > 0.0 ? d / mx : 0.0;
    if (d > 0.0) {
        double h;
        if (mx == r) h = 60.0 * std::fmod((g - b) / d, 6.0);
        else if (mx == g) h = 60.0 * ((b - r) / d + 2.0);
        else h = 60.0 * ((r - g) / d + 4.0);
        if (h < 0.0) h += 360.0;
        if (h >= 360.0) h -= 360.0;
        out.h = h;
    }
    return out;
}

BinaryMask hsv_mask(const Image& rgb, const HsvRange& range) {
    if (rgb.channels() != 3) throw InvalidArgument("hsv_mask: expected a 3-channel image");
    BinaryMask mask(rgb.width(), rgb.height());
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            const Rgb p{rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2)};
            if (range.contains(rgb_to_hsv(p))) mask.set(x, y);
        }
    }
    return mask;
}

// =============================================================================
// Connected components and morphology
// =============================================================================

Labeling label_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    Labeling out;
    out.labels.assign(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y) || out.labels[static_cast<std::size_t>(y) * w + x] != 0) continue;
            const int label = ++out.count;
            std::size_t size = 0;
            stack.emplace_back(x, y);
            out.labels[static_cast<std::size_t>(y) * w + x] = label;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                ++size;
                for (int k = 0; k < 8; ++k) {
                    const int nx = cx + kDx8[k];
                    const int ny = cy + kDy8[k];
                    if (!mask.in_bounds(nx, ny) || !mask.get(nx, ny)) continue;
                    auto& l = out.labels[static_cast<std::size_t>(ny) * w + nx];
                    if (l != 0) continue;
                    l = label;
                    stack.emplace_back(nx, ny);
                }
            }
            out.sizes.push_back(size);
        }
    }
    return out;
}

BinaryMask mask_cleanup(const BinaryMask& mask, std::size_t min_component_size) {
    if (min_component_size == 0) return mask;
    const Labeling lab = label_components(mask);
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const int l = lab.labels[static_cast<std::size_t>(y) * mask.width() + x];
            if (l != 0 && lab.sizes[l - 1] >= min_component_size) out.set(x, y);
        }
    }
    return out;
}

BinaryMask largest_component(const BinaryMask& mask) {
    const Labeling lab = label_components(mask);
    BinaryMask out(mask.width(), mask.height());
    if (lab.count == 0) return out;
    // First label wins ties, so the result is stable under raster order.
    const auto best = std::max_element(lab.sizes.begin(), lab.sizes.end()) - lab.sizes.begin() + 1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (lab.labels[static_cast<std::size_t>(y) * mask.width() + x] == best) out.set(x, y);
        }
    }
    return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask outside(w, h);
    std::vector<std::pair<int, int>> stack;
    auto seed = [&](int x, int y) {
        if (!mask.get(x, y) && !outside.get(x, y)) {
            outside.set(x, y);
            stack.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    constexpr int dx4[4] = {1, -1, 0, 0};
    constexpr int dy4[4] = {0, 0, 1, -1};
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx4[k];
            const int ny = y + dy4[k];
            if (mask.in_bounds(nx, ny)) seed(nx, ny);
        }
    }
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) out.set(x, y, !outside.get(x, y));
    }
    return out;
}

BinaryMask erode(const BinaryMask& mask, int radius) {
    if (radius < 0) throw InvalidArgument("erosion radius must be non-negative");
    if (radius == 0) return mask;
    const int w = mask.width();
    const int h = mask.height();
    // A pixel survives when its (2r+1)^2 window lies inside the image and is fully set.
    std::vector<int> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    auto I = [&](int x, int y) -> int& { return integral[static_cast<std::size_t>(y) * (w + 1) + x]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            I(x + 1, y + 1) = (mask.get(x, y) ? 1 : 0) + I(x, y + 1) + I(x + 1, y) - I(x, y);
        }
    }
    const int full = (2 * radius + 1) * (2 * radius + 1);
    BinaryMask out(w, h);
    for (int y = radius; y < h - radius; ++y) {
        for (int x = radius; x < w - radius; ++x) {
            const int x0 = x - radius, x1 = x + radius + 1;
            const int y0 = y - radius, y1 = y + radius + 1;
            if (I(x1, y1) - I(x0, y1) - I(x1, y0) + I(x0, y0) == full) out.set(x, y);
        }
    }
    return out;
}

}  // namespace palm
