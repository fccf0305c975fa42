/**
 * @file oracles.hpp
 * @brief Slow, independent reference implementations used by the tests
 */
#pragma once

#include <palm/features.hpp>
#include <palm/imaging.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <vector>

namespace oracle {

inline palm::Image random_gray(int w, int h, std::mt19937& rng) {
    palm::Image img(w, h, 1);
    std::uniform_int_distribution<int> d(0, 255);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
    return img;
}

inline palm::Image random_rgb(int w, int h, std::mt19937& rng) {
    palm::Image img(w, h, 3);
    std::uniform_int_distribution<int> d(0, 255);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
    return img;
}

/// Full 2-D convolution with the product kernel written out directly, replicated borders.
inline palm::Image brute_blur(const palm::Image& img, double sigma, int ksize) {
    const int r = ksize / 2;
    std::vector<double> w2(static_cast<std::size_t>(ksize * ksize));
    double total = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            w2[(dy + r) * ksize + (dx + r)] = v;
            total += v;
        }
    }
    palm::Image out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double s = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int sx = std::clamp(x + dx, 0, img.width() - 1);
                    const int sy = std::clamp(y + dy, 0, img.height() - 1);
                    s += w2[(dy + r) * ksize + (dx + r)] * img.at(sx, sy);
                }
            }
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(s / total), 0L, 255L));
        }
    }
    return out;
}

/// Hexcone HSV to RGB, rounding to 8 bits.
inline palm::Rgb hsv_to_rgb(const palm::HsvPixel& p) {
    const double c = p.v * p.s;
    const double hp = p.h / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) {
        r = c; g = x;
    } else if (hp < 2) {
        r = x; g = c;
    } else if (hp < 3) {
        g = c; b = x;
    } else if (hp < 4) {
        g = x; b = c;
    } else if (hp < 5) {
        r = x; b = c;
    } else {
        r = c; b = x;
    }
    const double m = p.v - c;
    auto to8 = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L)); };
    return {to8(r + m), to8(g + m), to8(b + m)};
}

/// Number of 8-connected components by BFS.
inline int count_components(const palm::BinaryMask& m) {
    std::vector<char> seen(static_cast<std::size_t>(m.width() * m.height()), 0);
    int count = 0;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.get(x, y) || seen[y * m.width() + x]) continue;
            ++count;
            std::queue<std::pair<int, int>> q;
            q.push({x, y});
            seen[y * m.width() + x] = 1;
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (!m.in_bounds(nx, ny) || !m.get(nx, ny) || seen[ny * m.width() + nx]) continue;
                        seen[ny * m.width() + nx] = 1;
                        q.push({nx, ny});
                    }
                }
            }
        }
    }
    return count;
}

/**
 * @brief Sobel magnitude, 4-bin NMS and a single high threshold
 *
 * Written against the textbook description: for step edges every surviving
 * pixel is strong, so this equals full Canny there.
 */
inline palm::BinaryMask strong_edges(const palm::Image& g, double high) {
    const int w = g.width(), h = g.height();
    auto px = [&](int x, int y) { return static_cast<double>(g.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1))); };
    std::vector<double> mag(static_cast<std::size_t>(w * h)), ang(mag.size());
    double mx = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) - (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) - (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
            mag[y * w + x] = std::hypot(gx, gy);
            ang[y * w + x] = std::atan2(gy, gx);
            mx = std::max(mx, mag[y * w + x]);
        }
    }
    palm::BinaryMask out(w, h);
    if (mx == 0.0) return out;
    for (auto& m : mag) m = m * 255.0 / mx;
    auto at = [&](int x, int y) { return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : mag[y * w + x]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double deg = ang[y * w + x] * 180.0 / 3.14159265358979323846;
            if (deg < 0) deg += 180.0;
            int dx, dy;
            if (deg < 22.5 || deg >= 157.5) {
                dx = 1; dy = 0;
            } else if (deg < 67.5) {
                dx = 1; dy = 1;
            } else if (deg < 112.5) {
                dx = 0; dy = 1;
            } else {
                dx = -1; dy = 1;
            }
            const double m = mag[y * w + x];
            if (m > 0 && m > at(x - dx, y - dy) && m >= at(x + dx, y + dy) && m >= high) out.set(x, y);
        }
    }
    return out;
}

inline double point_to_line(double px, double py, double ax, double ay, double bx, double by) {
    const double len = std::hypot(bx - ax, by - ay);
    return std::fabs((bx - ax) * (ay - py) - (ax - px) * (by - ay)) / len;
}

}  // namespace oracle
