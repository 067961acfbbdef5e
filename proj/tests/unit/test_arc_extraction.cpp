#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "pupil/arc_extraction.hpp"
#include "pupil/synth_eval.hpp"

using namespace pupil;

namespace {

EdgeSegment longest(const std::vector<EdgeSegment>& segs)
{
    REQUIRE_FALSE(segs.empty());
    return *std::max_element(segs.begin(), segs.end(), [](const EdgeSegment& a, const EdgeSegment& b) { return a.length() < b.length(); });
}

} // namespace

TEST_CASE("square contour has four corners near its vertices")
{
    std::vector<std::uint8_t> px(120 * 120, 160);
    for (int y = 30; y < 90; ++y)
        for (int x = 30; x < 90; ++x)
            px[static_cast<std::size_t>(y * 120 + x)] = 30;
    const EdgeDetection det = detect_edges(GrayImage(120, 120, std::move(px)), EdgeConfig{});
    const EdgeSegment seg = longest(det.segments);
    REQUIRE(seg.closed_gap() <= 2.0);
    const auto corners = detect_corners(seg, det.field, ArcConfig{}, true);
    REQUIRE(corners.size() == 4);
    for (const auto& c : corners) {
        const int dx = std::min(std::abs(c.pixel.x - 29), std::abs(c.pixel.x - 90));
        const int dy = std::min(std::abs(c.pixel.y - 29), std::abs(c.pixel.y - 90));
        CHECK(dx <= 3);
        CHECK(dy <= 3);
        CHECK(seg.pixels[c.position] == c.pixel);
    }
    for (std::size_t i = 1; i < corners.size(); ++i)
        CHECK(corners[i - 1].position < corners[i].position);
}

TEST_CASE("smooth ellipses have no corners")
{
    // curvature radius b^2/a of at least 25 px
    for (const auto& e : {EllipseParams{100, 100, 30, 30, 0}, EllipseParams{100, 100, 60, 40, 0.3},
             EllipseParams{100, 100, 80, 64, 1.2}, EllipseParams{100, 100, 45, 36, 2.0}}) {
        const EdgeDetection det = detect_edges(oracle::disk_image(200, 200, e, 30, 150), EdgeConfig{});
        const EdgeSegment seg = longest(det.segments);
        CHECK(detect_corners(seg, det.field, ArcConfig{}, true).empty());
        const auto raw = turning_angles(seg, det.field, ArcConfig{}, true);
        const auto smooth = turning_curvature(seg, det.field, ArcConfig{}, true);
        REQUIRE(raw.size() == seg.length());
        REQUIRE(smooth.size() == seg.length());
        CHECK(*std::max_element(raw.begin(), raw.end()) < 30.0 * std::numbers::pi / 180.0);
    }
}

TEST_CASE("straight chains do not turn; short chains yield nothing")
{
    std::vector<std::uint8_t> px(100 * 60, 40);
    for (int y = 0; y < 60; ++y)
        for (int x = 50; x < 100; ++x)
            px[static_cast<std::size_t>(y * 100 + x)] = 200;
    const EdgeDetection det = detect_edges(GrayImage(100, 60, std::move(px)), EdgeConfig{});
    const EdgeSegment seg = longest(det.segments);
    for (double a : turning_angles(seg, det.field, ArcConfig{}, false))
        CHECK(a == doctest::Approx(0.0).epsilon(1e-12));
    EdgeSegment tiny;
    tiny.pixels.assign(seg.pixels.begin(), seg.pixels.begin() + 10);
    CHECK(detect_corners(tiny, det.field, ArcConfig{}, false).empty());
    CHECK(arcs_from_corners(seg, 0, {}, false, ArcConfig{}).empty()); // a line is no ellipse
}

TEST_CASE("eyelid junctions split the occluded rim and the arcs follow the pupil")
{
    SceneSpec spec;
    spec.width = 400;
    spec.height = 400;
    spec.iris_center = {200, 200};
    spec.iris_radius = 170;
    spec.pupil = EllipseParams{200, 210, 70, 60, 0.3};
    spec.occlusion = 0.35;
    spec.sclera_intensity = 150;
    spec.eyelid_intensity = 150;
    const GrayImage img = render(spec).image.crop(Rect{100, 110, 200, 200});
    const EdgeDetection det = detect_edges(img, EdgeConfig{});
    const EdgeSegment seg = longest(det.segments);
    const auto corners = detect_corners(seg, det.field, ArcConfig{}, seg.closed_gap() <= 15.0);
    CHECK(corners.size() >= 2);
    const auto arcs = arcs_from_corners(seg, 0, corners, seg.closed_gap() <= 15.0, ArcConfig{});
    REQUIRE_FALSE(arcs.empty());
    const auto best = std::max_element(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) { return a.pixels.size() < b.pixels.size(); });
    CHECK(best->fit.ellipse.cx + 100 == doctest::Approx(200).epsilon(0.01));
    CHECK(best->fit.ellipse.cy + 110 == doctest::Approx(210).epsilon(0.01));
    CHECK(best->fit.ellipse.a == doctest::Approx(70).epsilon(0.03));
    CHECK(best->fit.rmse <= ArcConfig{}.rmse);
    for (const auto& c : corners)
        for (const auto& arc : arcs)
            CHECK(std::find(arc.pixels.begin(), arc.pixels.end(), c.pixel) == arc.pixels.end());
}

TEST_CASE("arcs span the chain between corners")
{
    const EdgeDetection det = detect_edges(oracle::disk_image(200, 200, EllipseParams{100, 100, 60, 60, 0}, 30, 150), EdgeConfig{});
    const EdgeSegment seg = longest(det.segments);
    const std::size_t n = seg.length();
    const std::vector<Corner> corners{{0, 10, seg.pixels[10]}, {0, 10 + n / 3, seg.pixels[10 + n / 3]},
        {0, 10 + 2 * n / 3, seg.pixels[10 + 2 * n / 3]}};

    const auto closed = arcs_from_corners(seg, 4, corners, true, ArcConfig{});
    REQUIRE(closed.size() == 3);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(closed[i].segment == 4);
        CHECK(closed[i].first == (corners[i].position + 1) % n);
        CHECK(closed[i].fit.ellipse.a == doctest::Approx(60).epsilon(0.05)); // 120-degree raster arc
        covered += closed[i].pixels.size();
    }
    CHECK(covered == n - 3);
    CHECK(closed[2].pixels.back() == seg.pixels[9]); // wraps past the chain end

    const auto open = arcs_from_corners(seg, 0, corners, false, ArcConfig{});
    REQUIRE(open.size() == 3); // the 10-pixel head is below the minimum length
    CHECK(open[0].first == 11);
    CHECK(open.back().pixels.back() == seg.pixels.back());

    ArcConfig strict;
    strict.min_length = static_cast<int>(n);
    CHECK(arcs_from_corners(seg, 0, corners, true, strict).empty());
}

TEST_CASE("arc sources")
{
    std::vector<EdgeSegment> segs(3);
    segs[0].pixels.resize(30);
    segs[1].pixels.resize(20);
    segs[2].pixels.resize(40);
    std::vector<SegmentShapeStats> stats(3);
    stats[0].entropy = 2.5;
    stats[1].entropy = 2.9;
    stats[2].entropy = 1.5;
    const Config cfg;
    CHECK(arc_source_segments(segs, stats, std::nullopt, cfg) == std::vector<std::size_t>{0});
    CHECK(arc_source_segments(segs, stats, NearCircular{2, {}}, cfg) == std::vector<std::size_t>{2});
}
