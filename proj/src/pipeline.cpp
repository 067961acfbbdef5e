#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pupil/candidate_selection.hpp"

namespace pupil {

namespace {

class StageClock {
public:
    StageClock() : last_(std::chrono::steady_clock::now()) {}

    std::int64_t lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const auto us = std::chrono::duration_cast<std::chrono::microseconds>(now - last_).count();
        last_ = now;
        return static_cast<std::int64_t>(us);
    }

private:
    std::chrono::steady_clock::time_point last_;
};

std::string real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    // avoid "-0.000000"
    if (std::string(buf) == "-0.000000")
        return "0.000000";
    return buf;
}

} // namespace

DetectionResult detect(const GrayImage& img, const Config& cfg, DetectionTrace* trace)
{
    DetectionResult res;
    StageClock clock;

    res.roi = detect_roi(img, cfg.roi);
    const Rect window = expand_roi(res.roi.rect, cfg.roi.expand, img.width(), img.height());
    res.timings_us.roi = clock.lap();

    EdgeDetection edges = detect_edges(img.crop(window), cfg.edges);
    res.timings_us.edges = clock.lap();

    std::vector<SegmentShapeStats> stats;
    stats.reserve(edges.segments.size());
    for (const auto& seg : edges.segments)
        stats.push_back(gradient_entropy(seg, edges.field));
    const auto near = find_near_circular(edges.segments, stats, cfg.segments);
    res.path = near ? DetectionPath::fast : DetectionPath::full;
    res.timings_us.entropy = clock.lap();

    const auto sources = arc_source_segments(edges.segments, stats, near, cfg);
    std::vector<std::vector<Corner>> corners(sources.size());
    std::vector<char> closed(sources.size());
    for (std::size_t k = 0; k < sources.size(); ++k) {
        const auto& seg = edges.segments[sources[k]];
        closed[k] = seg.closed_gap() <= cfg.segments.closed_gap;
        corners[k] = detect_corners(seg, edges.field, cfg.arcs, closed[k] != 0, sources[k]);
    }
    res.timings_us.corners = clock.lap();

    std::vector<EllipticalArc> arcs;
    for (std::size_t k = 0; k < sources.size(); ++k) {
        auto part = arcs_from_corners(edges.segments[sources[k]], sources[k], corners[k], closed[k] != 0, cfg.arcs);
        std::move(part.begin(), part.end(), std::back_inserter(arcs));
    }
    res.timings_us.arcs = clock.lap();

    auto candidates = generate_candidates(arcs, cfg.candidates);
    const Selection sel = select_pupil(candidates, cfg.candidates.cost_threshold);
    res.verdict = sel.verdict;
    res.cost = sel.min_cost;
    if (sel.verdict == Verdict::pupil) {
        EllipseParams e = candidates[*sel.best].fit.ellipse;
        e.cx += window.x;
        e.cy += window.y;
        res.ellipse = e;
    }
    res.timings_us.selection = clock.lap();

    if (trace) {
        trace->window = window;
        trace->segments = std::move(edges.segments);
        trace->stats = std::move(stats);
        trace->near_circular = near;
        trace->corners.clear();
        for (auto& c : corners)
            trace->corners.insert(trace->corners.end(), c.begin(), c.end());
        trace->arcs = std::move(arcs);
        trace->candidates = std::move(candidates);
        trace->selection = sel;
    }
    return res;
}

std::string to_json(const DetectionResult& r, bool include_timings)
{
    std::string s = "{\"verdict\":\"";
    s += to_string(r.verdict);
    s += '"';
    if (r.ellipse) {
        const auto& e = *r.ellipse;
        s += ",\"ellipse\":{\"cx\":" + real(e.cx) + ",\"cy\":" + real(e.cy) + ",\"a\":" + real(e.a) + ",\"b\":" + real(e.b)
            + ",\"theta_deg\":" + real(e.theta * 180.0 / std::numbers::pi) + "}";
    }
    if (r.cost)
        s += ",\"cost\":" + real(*r.cost);
    s += ",\"roi\":{\"x\":" + std::to_string(r.roi.rect.x) + ",\"y\":" + std::to_string(r.roi.rect.y)
        + ",\"w\":" + std::to_string(r.roi.rect.width) + ",\"h\":" + std::to_string(r.roi.rect.height) + "}";
    s += ",\"path\":\"";
    s += to_string(r.path);
    s += '"';
    const StageTimings t = include_timings ? r.timings_us : StageTimings{};
    s += ",\"timings_us\":{\"roi\":" + std::to_string(t.roi) + ",\"edges\":" + std::to_string(t.edges)
        + ",\"entropy\":" + std::to_string(t.entropy) + ",\"corners\":" + std::to_string(t.corners)
        + ",\"arcs\":" + std::to_string(t.arcs) + ",\"selection\":" + std::to_string(t.selection) + "}}";
    return s;
}

} // namespace pupil
