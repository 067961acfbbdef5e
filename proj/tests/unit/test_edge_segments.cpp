#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "pupil/edge_segments.hpp"
#include "pupil/synth_eval.hpp"

using namespace pupil;

namespace {

void check_chain_properties(const std::vector<EdgeSegment>& segs, const GradientField& field, const EdgeConfig& cfg)
{
    std::set<Point> seen;
    for (const auto& s : segs) {
        CHECK(static_cast<int>(s.length()) >= cfg.min_segment_length);
        for (std::size_t i = 0; i < s.pixels.size(); ++i) {
            const Point p = s.pixels[i];
            CHECK(p.x >= 1);
            CHECK(p.y >= 1);
            CHECK(p.x < field.width - 1);
            CHECK(p.y < field.height - 1);
            CHECK(field.magnitude(p.x, p.y) >= cfg.gradient_threshold);
            CHECK(seen.insert(p).second);
            if (i > 0)
                CHECK(adjacent8(s.pixels[i - 1], p));
            if (i > 1)
                CHECK_FALSE(adjacent8(s.pixels[i - 2], p)); // one pixel wide
        }
    }
}

} // namespace

TEST_CASE("flat image has no segments")
{
    CHECK(detect_segments(GrayImage(60, 60, 90)).empty());
}

TEST_CASE("disk rim becomes one closed chain on the boundary")
{
    const EllipseParams e{80, 70, 40, 32, 0.5};
    const GrayImage img = oracle::disk_image(160, 140, e, 30, 150);
    const EdgeConfig cfg;
    const EdgeDetection det = detect_edges(img, cfg);
    REQUIRE_FALSE(det.segments.empty());
    check_chain_properties(det.segments, det.field, cfg);
    const auto longest = std::max_element(det.segments.begin(), det.segments.end(),
        [](const EdgeSegment& a, const EdgeSegment& b) { return a.length() < b.length(); });
    CHECK(longest->closed_gap() <= 2.0);
    CHECK(static_cast<double>(longest->length()) > 0.8 * perimeter(e) * 0.9);
    for (const Point p : longest->pixels)
        CHECK(point_ellipse_distance(e, PointD{static_cast<double>(p.x), static_cast<double>(p.y)}) < 1.5);
}

TEST_CASE("straight step edge becomes a straight chain")
{
    std::vector<std::uint8_t> px(100 * 60, 40);
    for (int y = 0; y < 60; ++y)
        for (int x = 50; x < 100; ++x)
            px[static_cast<std::size_t>(y * 100 + x)] = 200;
    const auto segs = detect_segments(GrayImage(100, 60, std::move(px)));
    REQUIRE(segs.size() == 1);
    for (const Point p : segs[0].pixels)
        CHECK((p.x == 49 || p.x == 50));
    CHECK(segs[0].length() >= 50);
}

TEST_CASE("chains from synthetic eye frames are valid")
{
    const EdgeConfig cfg;
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const SceneSpec spec = seed == 13 ? random_blink_scene(seed) : random_occluded_scene(seed, 0.2, 0.4);
        const GrayImage img = render(spec).image.crop(Rect{300, 100, 500, 400});
        const EdgeDetection det = detect_edges(img, cfg);
        check_chain_properties(det.segments, det.field, cfg);
    }
}

TEST_CASE("magnitude tail distribution")
{
    const GrayImage img = gaussian_smooth(oracle::random_image(80, 60, 6), 1.0);
    const GradientField f = compute_gradients(img);
    const MagnitudeTail tail(f);
    CHECK(tail.total() == f.mag.size());
    CHECK(tail.tail_fraction(0.0) == 1.0);
    CHECK(tail.bin_of(0.5) == 0);
    const double max_mag = *std::max_element(f.mag.begin(), f.mag.end());
    CHECK(tail.bin_of(max_mag) == MagnitudeTail::kBins - 1);
    CHECK(tail.tail_fraction(max_mag) >= 1.0 / static_cast<double>(f.mag.size()));
    double prev = 1.0;
    for (double mu = 0.0; mu <= max_mag; mu += max_mag / 200.0) {
        const double h = tail.tail_fraction(mu);
        CHECK(h <= prev);
        prev = h;
        // the bin of mu holds every pixel at or above mu
        std::size_t above = 0;
        for (double m : f.mag)
            above += m >= mu;
        CHECK(h >= static_cast<double>(above) / static_cast<double>(f.mag.size()));
    }
}

TEST_CASE("NFA follows n^2 * H^L")
{
    const EllipseParams e{60, 60, 30, 30, 0};
    const GrayImage img = oracle::disk_image(120, 120, e, 40, 140);
    const EdgeConfig cfg{.validate = false};
    const EdgeDetection det = detect_edges(img, cfg);
    const MagnitudeTail tail(det.field);
    for (const auto& seg : det.segments) {
        double mu = 1e300;
        for (const Point p : seg.pixels)
            mu = std::min(mu, det.field.magnitude(p.x, p.y));
        const double expected = 2.0 * std::log10(14400.0) + static_cast<double>(seg.length()) * std::log10(tail.tail_fraction(mu));
        CHECK(segment_nfa_log10(seg, det.field, tail, 14400) == doctest::Approx(expected));
        CHECK(validate_segment(seg, det.field, tail, 14400) == (expected <= 0.0));
    }
    CHECK(std::isinf(segment_nfa_log10(EdgeSegment{}, det.field, tail, 14400)));
}

TEST_CASE("validation rejects chains in pure noise and keeps the contrast edge")
{
    EdgeConfig raw_cfg;
    raw_cfg.validate = false;
    const GrayImage noise = oracle::random_image(120, 120, 99);
    const auto raw = detect_segments(noise, raw_cfg);
    const auto kept = detect_segments(noise, EdgeConfig{});
    CHECK(kept.size() < raw.size());

    const GrayImage disk = oracle::disk_image(120, 120, EllipseParams{60, 60, 30, 30, 0}, 40, 140);
    CHECK(detect_segments(disk, EdgeConfig{}).size() == detect_segments(disk, raw_cfg).size());
}

TEST_CASE("tiny fields produce no chains")
{
    GradientField f;
    f.width = 4;
    f.height = 4;
    f.gx.assign(16, 10.0);
    f.gy.assign(16, 0.0);
    f.mag.assign(16, 10.0);
    f.dir8.assign(16, 4);
    CHECK(trace_segments(f, EdgeConfig{}).empty());
}
