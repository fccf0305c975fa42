#include <doctest.h>

#include "oracles.hpp"

#include <palm/error.hpp>
#include <palm/features.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace palm;

namespace {

Contour line_points(int x0, int y0, int dx, int dy, int n) {
    Contour c;
    for (int i = 0; i < n; ++i) c.points.push_back({x0 + dx * i, y0 + dy * i});
    return c;
}

/// Upper semicircle from angle 0 to pi, 8-connected, duplicates removed.
Contour semicircle(int cx, int cy, double r) {
    Contour c;
    for (int i = 0; i <= 4000; ++i) {
        const double t = std::numbers::pi * i / 4000.0;
        const Point p{static_cast<int>(std::lround(cx + r * std::cos(t))), static_cast<int>(std::lround(cy - r * std::sin(t)))};
        if (c.points.empty() || !(c.points.back() == p)) c.points.push_back(p);
    }
    return c;
}

Contour random_walk(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> step(-1, 1);
    Contour c;
    Point p{100, 100};
    c.points.push_back(p);
    while (static_cast<int>(c.size()) < n) {
        const int dx = step(rng), dy = step(rng);
        if (dx == 0 && dy == 0) continue;
        p = {p.x + dx, p.y + dy};
        c.points.push_back(p);
    }
    return c;
}

bool eight_connected(const Contour& c) {
    for (std::size_t i = 1; i < c.size(); ++i) {
        const int dx = std::abs(c.points[i].x - c.points[i - 1].x);
        const int dy = std::abs(c.points[i].y - c.points[i - 1].y);
        if (dx > 1 || dy > 1 || (dx == 0 && dy == 0)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("line kinds") {
    CHECK(to_string(LineKind::Life) == "life");
    CHECK(parse_line_kind("fate") == LineKind::Fate);
    CHECK_FALSE(parse_line_kind("Fate").has_value());
    const LinePalette pal;
    CHECK(pal.color(LineKind::Heart) == Rgb{255, 0, 0});
    CHECK(pal.color(LineKind::Head) == Rgb{0, 128, 0});
    CHECK(pal.color(LineKind::Life) == Rgb{128, 0, 128});
    CHECK(pal.color(LineKind::Fate) == Rgb{0, 0, 255});
}

TEST_CASE("extract contours") {
    CHECK(extract_contours(BinaryMask(8, 8)).empty());

    BinaryMask sq(10, 10);
    for (int y = 2; y < 5; ++y)
        for (int x = 2; x < 5; ++x) sq.set(x, y);
    auto cs = extract_contours(sq);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].size() == 8);
    CHECK(cs[0].points.front() == Point{2, 2});
    CHECK(eight_connected(cs[0]));

    for (int y = 6; y < 9; ++y)
        for (int x = 6; x < 8; ++x) sq.set(x, y);
    CHECK(extract_contours(sq).size() == 2);

    BinaryMask dot(5, 5);
    dot.set(3, 1);
    cs = extract_contours(dot);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].points == std::vector<Point>{{3, 1}});

    SUBCASE("component count matches flood fill on random masks") {
        std::mt19937 rng(11);
        std::bernoulli_distribution coin(0.3);
        for (int t = 0; t < 25; ++t) {
            BinaryMask m(32, 32);
            for (int y = 0; y < 32; ++y)
                for (int x = 0; x < 32; ++x) m.set(x, y, coin(rng));
            const auto found = extract_contours(m);
            CHECK(static_cast<int>(found.size()) == oracle::count_components(m));
            for (std::size_t i = 1; i < found.size(); ++i) CHECK(found[i - 1].size() >= found[i].size());
            for (const auto& c : found) {
                CHECK(eight_connected(c));
                for (const auto& p : c.points) CHECK(m.get(p.x, p.y));
            }
        }
    }
}

TEST_CASE("open contour") {
    BinaryMask m(40, 10);
    for (int x = 5; x < 30; ++x) m.set(x, 4);
    const auto trace = extract_contours(m).front();
    const auto open = open_contour(trace);
    CHECK(arc_length(open) == doctest::Approx(24.0));
    CHECK(depth(open) == 0.0);
    CHECK(open.points.front().x + open.points.back().x == 34);

    BinaryMask thick(40, 10);
    for (int y = 3; y < 6; ++y)
        for (int x = 5; x < 30; ++x) thick.set(x, y);
    const auto side = open_contour(extract_contours(thick).front());
    CHECK(eight_connected(side));
    CHECK(arc_length(side) < 30.0);
    CHECK(arc_length(side) >= 24.0);
}

TEST_CASE("arc length") {
    CHECK(arc_length(line_points(3, 3, 0, 0, 1)) == 0.0);
    CHECK(arc_length(line_points(0, 0, 1, 0, 5)) == 4.0);
    CHECK(arc_length(line_points(0, 0, 0, 1, 5)) == 4.0);
    CHECK(std::abs(arc_length(line_points(0, 0, 1, 1, 10)) - 9.0 * std::sqrt(2.0)) <= 1e-9);
    CHECK(arc_length(Contour{}) == 0.0);
}

TEST_CASE("depth") {
    CHECK(depth(line_points(0, 0, 1, 0, 30)) == 0.0);
    CHECK(depth(line_points(4, 2, 1, 1, 17)) == 0.0);
    CHECK(depth(line_points(9, 1, 0, 1, 12)) == 0.0);

    Contour v;
    for (int i = 0; i <= 5; ++i) v.points.push_back({i, i});
    for (int i = 6; i <= 10; ++i) v.points.push_back({i, 10 - i});
    CHECK(depth(v) == doctest::Approx(5.0));

    const auto arc = semicircle(40, 40, 20.0);
    CHECK(eight_connected(arc));
    CHECK(std::abs(depth(arc) - 20.0) <= 1.0);

    Contour loop{{{0, 0}, {1, 0}, {2, 1}, {1, 2}, {0, 1}, {0, 0}}};
    CHECK(depth(loop) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("geometry properties on random walks") {
    std::mt19937 rng(12);
    for (int t = 0; t < 200; ++t) {
        const auto c = random_walk(rng, 2 + t % 60);
        const double a = arc_length(c);
        CHECK(depth(c) <= a / 2.0 + 1e-9);
        CHECK(a <= (c.size() - 1) * std::sqrt(2.0) + 1e-9);

        Contour moved = c;
        for (auto& p : moved.points) p = {p.x + 17, p.y - 9};
        CHECK(arc_length(moved) == doctest::Approx(a));
        CHECK(depth(moved) == doctest::Approx(depth(c)));
        CHECK(orientation(moved) == doctest::Approx(orientation(c)));

        Contour scaled = c;
        for (auto& p : scaled.points) p = {p.x * 3, p.y * 3};
        CHECK(arc_length(scaled) == doctest::Approx(3.0 * a));

        const double o = orientation(c);
        CHECK(o >= 0.0);
        CHECK(o < std::numbers::pi);
    }
}

TEST_CASE("feature vector") {
    const auto center = build_feature_vector(Contour{{{128, 128}}}, 256, 256);
    CHECK(center[0] == 0.0);
    CHECK(center[1] == 0.0);
    CHECK(center[2] == doctest::Approx(0.5));
    CHECK(center[3] == doctest::Approx(0.5));

    const auto seg = build_feature_vector(line_points(50, 100, 1, 0, 100), 256, 256);
    CHECK(seg[0] == doctest::Approx(99.0 / (256.0 * std::sqrt(2.0))));
    CHECK(seg[0] == doctest::Approx(0.2734).epsilon(1e-3));
    CHECK((seg[5] < 1e-9 || seg[5] > std::numbers::pi - 1e-9));
    CHECK(seg[4] == kMaxBboxAspect);

    const auto vert = build_feature_vector(line_points(10, 10, 0, 1, 40), 256, 256);
    CHECK(vert[5] == doctest::Approx(std::numbers::pi / 2));
    CHECK(vert[4] == doctest::Approx(1.0 / 40.0));

    CHECK_THROWS_AS(build_feature_vector(line_points(0, 0, 1, 0, 3), 0, 10), InvalidArgument);

    SUBCASE("padding leaves shape features unchanged") {
        const auto arc = semicircle(60, 60, 25.0);
        const auto a = build_feature_vector(arc, 128, 128);
        Contour padded = arc;
        for (auto& p : padded.points) p = {p.x + 20, p.y + 20};
        const auto b = build_feature_vector(padded, 168, 168);
        CHECK(b[1] == doctest::Approx(a[1]));
        CHECK(b[4] == doctest::Approx(a[4]));
        CHECK(b[5] == doctest::Approx(a[5]));
    }
}

TEST_CASE("palm line") {
    const auto line = make_palm_line(LineKind::Head, semicircle(40, 40, 10.0), 0.8);
    CHECK(line.kind == LineKind::Head);
    CHECK(line.arc_length == doctest::Approx(arc_length(line.contour)));
    CHECK(line.depth <= line.arc_length / 2.0);
    CHECK(line.confidence == 0.8);
}

TEST_CASE("annotate lines") {
    Image base(40, 30, 1, 90);
    const auto promoted = annotate_lines(base, {}, 3);
    CHECK(promoted == to_rgb(base));
    CHECK(promoted.channels() == 3);

    const auto heart = make_palm_line(LineKind::Heart, line_points(5, 5, 1, 0, 20), 1.0);
    const auto fate = make_palm_line(LineKind::Fate, line_points(10, 15, 0, 1, 10), 1.0);
    const auto out = annotate_lines(base, {heart}, 3);
    const auto fp = line_footprint(heart.contour, 40, 30, 3);
    CHECK(fp.count() == 22 * 3);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 40; ++x) {
            const Rgb px{out.at(x, y, 0), out.at(x, y, 1), out.at(x, y, 2)};
            CHECK((px == Rgb{255, 0, 0}) == fp.get(x, y));
            if (!fp.get(x, y)) CHECK(px == Rgb{90, 90, 90});
        }
    }

    const auto both = annotate_lines(base, {heart, fate}, 3);
    std::size_t painted = 0;
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x) painted += both.at(x, y, 0) != 90 || both.at(x, y, 2) != 90;
    CHECK(painted == fp.count() + line_footprint(fate.contour, 40, 30, 3).count());

    CHECK(annotate_lines(base, {heart}, 1) != out);
    CHECK_THROWS_AS(annotate_lines(base, {heart}, 0), InvalidArgument);
    const auto outside = make_palm_line(LineKind::Life, line_points(35, 5, 1, 0, 10), 1.0);
    CHECK_THROWS_AS(annotate_lines(base, {outside}, 1), InvalidArgument);
}
