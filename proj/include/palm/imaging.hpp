/**
 * @file imaging.hpp
 * @brief Pixel-level preprocessing: grayscale, resize, blur, Canny, HSV masks
 *
 * All functions are pure and safe to call concurrently.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace palm {

/// Row-major 8-bit raster, 1 (gray) or 3 (interleaved RGB) channels.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, std::uint8_t fill = 0);
    Image(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

struct HsvPixel {
    double h = 0.0;  // degrees, [0, 360)
    double s = 0.0;  // [0, 1]
    double v = 0.0;  // [0, 1]
};

/// Inclusive HSV box. When wraps_hue is set the hue test is h >= h_lo || h <= h_hi.
struct HsvRange {
    double h_lo = 0.0, h_hi = 360.0;
    double s_lo = 0.0, s_hi = 1.0;
    double v_lo = 0.0, v_hi = 1.0;
    bool wraps_hue = false;

    bool contains(const HsvPixel& p) const noexcept;
    /// Throws InvalidArgument when the bounds are inverted or out of range.
    void validate() const;
};

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool get(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v = true) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::size_t count() const noexcept;
    bool any() const noexcept { return count() > 0; }

    /// Element-wise AND; dimensions must match.
    BinaryMask operator&(const BinaryMask& other) const;
    bool operator==(const BinaryMask&) const = default;

    /// Subset test: every true bit here is also true in other.
    bool is_subset_of(const BinaryMask& other) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

// ---------------------------------------------------------------------------
// Preprocessing stages
// ---------------------------------------------------------------------------

/// BT.601 luma, round-half-away. 1-channel input is returned unchanged.
Image to_grayscale(const Image& img);

/// Promote a gray image to RGB by replicating the channel; RGB passes through.
Image to_rgb(const Image& img);

/// Bilinear resize with half-pixel centers and edge clamping.
Image resize(const Image& img, int out_w, int out_h);

/// Kernel size covering +-3 sigma: 2*ceil(3*sigma)+1.
int default_kernel_size(double sigma);

/// Normalized 1-D Gaussian taps, length ksize.
std::vector<double> gaussian_kernel(double sigma, int ksize);

/// Separable Gaussian blur of a gray image with replicated borders.
Image gaussian_blur(const Image& gray, double sigma, std::optional<int> ksize = std::nullopt);

struct Gradient {
    int width = 0, height = 0;
    std::vector<double> magnitude;  // Sobel L2 magnitude rescaled so the image maximum reads 255
    std::vector<std::uint8_t> direction;  // 0: 0deg, 1: 45deg, 2: 90deg, 3: 135deg
};

/// 3x3 Sobel with replicated borders plus 4-bin direction quantization.
/// A flat image has zero magnitude everywhere.
Gradient sobel_gradient(const Image& gray);

/// Sobel, non-maximum suppression, then hysteresis with 8-connected growth.
/// Thresholds apply to the 0..255 rescaled magnitude.
BinaryMask canny(const Image& gray, double low, double high);

HsvPixel rgb_to_hsv(Rgb pixel);

BinaryMask hsv_mask(const Image& rgb, const HsvRange& range);

/// Drops 8-connected components smaller than min_component_size pixels.
BinaryMask mask_cleanup(const BinaryMask& mask, std::size_t min_component_size);

// ---------------------------------------------------------------------------
// Morphology helpers used for palm-region masking
// ---------------------------------------------------------------------------

/// Component labels (0 = background, 1..n in raster order of first pixel).
struct Labeling {
    std::vector<int> labels;
    std::vector<std::size_t> sizes;  // sizes[k-1] is the size of label k
    int count = 0;
};

Labeling label_components(const BinaryMask& mask);

BinaryMask largest_component(const BinaryMask& mask);

/// Sets every background pixel not 4-reachable from the border.
BinaryMask fill_holes(const BinaryMask& mask);

/// Erosion with a square structuring element of the given radius; outside counts as background.
BinaryMask erode(const BinaryMask& mask, int radius);

}  // namespace palm
