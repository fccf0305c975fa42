#include <doctest.h>

#include "oracles.hpp"

#include <palm/error.hpp>
#include <palm/imaging.hpp>
#include <palm/png_io.hpp>

#include <random>

using namespace palm;

namespace {

Image solid_rgb(int w, int h, Rgb c) {
    Image img(w, h, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(x, y, 0) = c.r;
            img.at(x, y, 1) = c.g;
            img.at(x, y, 2) = c.b;
        }
    }
    return img;
}

Image step_image(int w, int h, int split, bool vertical, std::uint8_t lo, std::uint8_t hi) {
    Image img(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img.at(x, y) = ((vertical ? x : y) < split) ? lo : hi;
    }
    return img;
}

}  // namespace

TEST_CASE("image construction checks dimensions") {
    CHECK_THROWS_AS(Image(0, 4, 1), InvalidArgument);
    CHECK_THROWS_AS(Image(4, 4, 2), InvalidArgument);
    CHECK_THROWS_AS(Image(2, 2, 1, std::vector<std::uint8_t>(3)), InvalidArgument);
    Image img(3, 2, 3);
    CHECK(img.data().size() == 18);
}

TEST_CASE("grayscale") {
    CHECK(to_grayscale(solid_rgb(1, 1, {255, 255, 255})).at(0, 0) == 255);
    CHECK(to_grayscale(solid_rgb(1, 1, {0, 0, 0})).at(0, 0) == 0);
    CHECK(to_grayscale(solid_rgb(1, 1, {255, 0, 0})).at(0, 0) == 76);
    CHECK(to_grayscale(solid_rgb(1, 1, {0, 255, 0})).at(0, 0) == 150);

    std::mt19937 rng(1);
    const auto g = oracle::random_gray(9, 7, rng);
    CHECK(to_grayscale(g) == g);
    CHECK(to_grayscale(to_grayscale(oracle::random_rgb(5, 5, rng))).channels() == 1);
}

TEST_CASE("resize") {
    std::mt19937 rng(2);
    const auto img = oracle::random_rgb(13, 9, rng);
    CHECK(resize(img, 13, 9) == img);

    Image two(2, 2, 1, std::vector<std::uint8_t>{0, 0, 255, 255});
    const auto one = resize(two, 1, 1);
    CHECK((one.at(0, 0) == 127 || one.at(0, 0) == 128));

    const auto big = resize(Image(512, 512, 3, 40), 256, 256);
    CHECK(big.width() == 256);
    CHECK(big.height() == 256);
    CHECK(big.channels() == 3);

    CHECK_THROWS_AS(resize(img, 0, 4), InvalidArgument);
}

TEST_CASE("gaussian kernel and blur") {
    CHECK(default_kernel_size(1.0) == 7);
    CHECK(default_kernel_size(0.5) == 5);
    const auto k = gaussian_kernel(1.3, 9);
    double s = 0;
    for (double v : k) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(gaussian_blur(Image(8, 8, 1), 1.0, 4), InvalidArgument);
    CHECK_THROWS_AS(gaussian_blur(Image(8, 8, 1), 1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_blur(Image(8, 8, 1), 0.0), InvalidArgument);

    SUBCASE("constant image is preserved") {
        for (double sigma : {0.5, 1.0, 2.5}) CHECK(gaussian_blur(Image(12, 10, 1, 100), sigma) == Image(12, 10, 1, 100));
    }

    SUBCASE("impulse response is the normalized 2-D kernel") {
        Image img(21, 21, 1, 0);
        img.at(10, 10) = 255;
        const double sigma = 1.5;
        const int ks = 7;
        const auto out = gaussian_blur(img, sigma, ks);
        double z = 0;
        for (int dy = -3; dy <= 3; ++dy)
            for (int dx = -3; dx <= 3; ++dx) z += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
        for (int dy = -3; dy <= 3; ++dy) {
            for (int dx = -3; dx <= 3; ++dx) {
                const double expect = 255.0 * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) / z;
                CHECK(std::abs(out.at(10 + dx, 10 + dy) - expect) <= 0.5 + 1e-9);
            }
        }
        CHECK(out.at(0, 0) == 0);
    }

    SUBCASE("matches brute-force convolution") {
        std::mt19937 rng(3);
        for (int trial = 0; trial < 10; ++trial) {
            const auto img = oracle::random_gray(16, 16, rng);
            const auto a = gaussian_blur(img, 1.2, 5);
            const auto b = oracle::brute_blur(img, 1.2, 5);
            for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) <= 1);
        }
    }

    SUBCASE("mean within one gray level") {
        std::mt19937 rng(4);
        const auto img = oracle::random_gray(32, 32, rng);
        const auto out = gaussian_blur(img, 1.0);
        double a = 0, b = 0;
        for (auto v : img.data()) a += v;
        for (auto v : out.data()) b += v;
        CHECK(std::abs(a - b) / img.data().size() <= 1.0);
    }
}

TEST_CASE("canny") {
    CHECK_THROWS_AS(canny(Image(8, 8, 1), 100, 50), InvalidArgument);
    CHECK_THROWS_AS(canny(Image(8, 8, 1), -1, 50), InvalidArgument);
    CHECK_FALSE(canny(Image(16, 16, 1, 90), 50, 100).any());

    SUBCASE("vertical step gives one column") {
        const auto edges = canny(step_image(16, 16, 8, true, 0, 255), 50, 100);
        CHECK(edges == oracle::strong_edges(step_image(16, 16, 8, true, 0, 255), 100));
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) CHECK(edges.get(x, y) == (x == 7));
        }
    }

    SUBCASE("horizontal step matches the oracle") {
        const auto img = step_image(20, 14, 5, false, 200, 30);
        CHECK(canny(img, 50, 100) == oracle::strong_edges(img, 100));
    }

    SUBCASE("raising thresholds never adds pixels") {
        std::mt19937 rng(5);
        for (int t = 0; t < 5; ++t) {
            const auto img = gaussian_blur(oracle::random_gray(32, 32, rng), 1.0);
            CHECK(canny(img, 50, 100).is_subset_of(canny(img, 10, 40)));
            CHECK(canny(img, 60, 120).is_subset_of(canny(img, 50, 100)));
        }
    }
}

TEST_CASE("rgb to hsv") {
    const auto gray = rgb_to_hsv({128, 128, 128});
    CHECK(gray.s == 0.0);
    CHECK(gray.v == doctest::Approx(128.0 / 255.0));
    const auto red = rgb_to_hsv({255, 0, 0});
    CHECK(red.h == 0.0);
    CHECK(red.s == 1.0);
    CHECK(red.v == 1.0);
    CHECK(rgb_to_hsv({0, 255, 0}).h == doctest::Approx(120.0));
    CHECK(rgb_to_hsv({0, 0, 255}).h == doctest::Approx(240.0));
    CHECK(rgb_to_hsv({0, 0, 0}).s == 0.0);

    std::mt19937 rng(6);
    std::uniform_int_distribution<int> d(0, 255);
    for (int i = 0; i < 1000; ++i) {
        const Rgb c{static_cast<std::uint8_t>(d(rng)), static_cast<std::uint8_t>(d(rng)), static_cast<std::uint8_t>(d(rng))};
        const auto hsv = rgb_to_hsv(c);
        REQUIRE(hsv.h >= 0.0);
        REQUIRE(hsv.h < 360.0);
        const auto back = oracle::hsv_to_rgb(hsv);
        CHECK(std::abs(back.r - c.r) <= 1);
        CHECK(std::abs(back.g - c.g) <= 1);
        CHECK(std::abs(back.b - c.b) <= 1);
    }
}

TEST_CASE("hsv range and mask") {
    CHECK_THROWS_AS((HsvRange{0, 10, 0.8, 0.2, 0, 1, false}.validate()), InvalidArgument);
    CHECK_THROWS_AS((HsvRange{300, 10, 0, 1, 0, 1, false}.validate()), InvalidArgument);
    CHECK_NOTHROW((HsvRange{300, 10, 0, 1, 0, 1, true}.validate()));

    const HsvRange red{350, 10, 0.5, 1, 0.5, 1, true};
    CHECK_FALSE(hsv_mask(Image(6, 6, 3, 0), HsvRange{0, 360, 0.1, 1, 0, 1, false}).any());
    CHECK(hsv_mask(solid_rgb(6, 6, {255, 0, 0}), red).count() == 36);
    CHECK(red.contains({355, 0.9, 0.9}));
    CHECK(red.contains({5, 0.9, 0.9}));
    CHECK_FALSE(red.contains({20, 0.9, 0.9}));

    std::mt19937 rng(7);
    const auto img = oracle::random_rgb(24, 24, rng);
    const HsvRange any{90, 200, 0.2, 0.9, 0.1, 1, false};
    std::size_t expect = 0;
    for (int y = 0; y < 24; ++y) {
        for (int x = 0; x < 24; ++x) {
            const auto p = rgb_to_hsv({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
            if (p.h >= 90 && p.h <= 200 && p.s >= 0.2 && p.s <= 0.9 && p.v >= 0.1 && p.v <= 1) ++expect;
        }
    }
    CHECK(hsv_mask(img, any).count() == expect);
}

TEST_CASE("mask cleanup and components") {
    CHECK(mask_cleanup(BinaryMask(10, 10), 5) == BinaryMask(10, 10));

    BinaryMask m(20, 20);
    for (int i = 0; i < 3; ++i) m.set(i, 0);
    for (int y = 5; y < 15; ++y)
        for (int x = 5; x < 10; ++x) m.set(x, y);
    CHECK(mask_cleanup(m, 0) == m);
    const auto kept = mask_cleanup(m, 10);
    CHECK(kept.count() == 50);
    CHECK_FALSE(kept.get(0, 0));

    const auto lab = label_components(m);
    CHECK(lab.count == 2);
    CHECK(lab.sizes[0] == 3);
    CHECK(lab.sizes[1] == 50);
    CHECK(largest_component(m) == kept);

    std::mt19937 rng(8);
    std::bernoulli_distribution coin(0.35);
    for (int t = 0; t < 20; ++t) {
        BinaryMask r(32, 32);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) r.set(x, y, coin(rng));
        CHECK(label_components(r).count == oracle::count_components(r));
    }
}

TEST_CASE("fill holes and erode") {
    BinaryMask ring(9, 9);
    for (int i = 1; i < 8; ++i) {
        ring.set(i, 1);
        ring.set(i, 7);
        ring.set(1, i);
        ring.set(7, i);
    }
    const auto filled = fill_holes(ring);
    CHECK(filled.count() == 49);
    CHECK_FALSE(filled.get(0, 0));

    BinaryMask full(9, 9, true);
    const auto e = erode(full, 2);
    CHECK(e.count() == 25);
    CHECK(e.get(4, 4));
    CHECK_FALSE(e.get(1, 4));
    CHECK(erode(full, 0) == full);
    CHECK_THROWS_AS(erode(full, -1), InvalidArgument);
}

TEST_CASE("png round trip") {
    std::mt19937 rng(9);
    const auto rgb = oracle::random_rgb(17, 11, rng);
    CHECK(decode_png(encode_png(rgb)) == rgb);
    const auto gray = oracle::random_gray(5, 23, rng);
    CHECK(decode_png(encode_png(gray)) == gray);
    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(decode_png(junk), BadImage);
    auto truncated = encode_png(rgb);
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(decode_png(truncated), BadImage);
}
