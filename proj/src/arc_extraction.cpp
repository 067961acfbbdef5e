#include "pupil/arc_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pupil {

namespace {

std::size_t wrap_index(long long i, std::size_t n)
{
    const long long m = static_cast<long long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

std::size_t chain_distance(std::size_t a, std::size_t b, std::size_t n, bool closed)
{
    const std::size_t d = a > b ? a - b : b - a;
    return closed ? std::min(d, n - d) : d;
}

} // namespace

std::vector<double> turning_angles(const EdgeSegment& seg, const GradientField& field, const ArcConfig& cfg, bool closed)
{
    const std::size_t n = seg.length();
    const int w = cfg.css_window;
    std::vector<double> raw(n, 0.0);
    if (n < static_cast<std::size_t>(2 * w + 1))
        return raw;

    std::vector<double> ux(n, 0.0), uy(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t p = field.index(seg.pixels[i].x, seg.pixels[i].y);
        if (field.mag[p] > 0.0) {
            ux[i] = field.gx[p] / field.mag[p];
            uy[i] = field.gy[p] / field.mag[p];
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const long long li = static_cast<long long>(i);
        if (!closed && (li < w || li + w >= static_cast<long long>(n)))
            continue;
        double bx = 0, by = 0, ax = 0, ay = 0;
        for (int k = 1; k <= w; ++k) {
            const std::size_t before = wrap_index(li - k, n);
            const std::size_t after = wrap_index(li + k, n);
            bx += ux[before];
            by += uy[before];
            ax += ux[after];
            ay += uy[after];
        }
        if ((bx == 0 && by == 0) || (ax == 0 && ay == 0))
            continue;
        raw[i] = std::atan2(std::abs(bx * ay - by * ax), bx * ax + by * ay);
    }
    return raw;
}

namespace {

std::vector<double> smooth_chain(const std::vector<double>& raw, double sigma, bool closed)
{
    const std::size_t n = raw.size();
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (int k = -radius; k <= radius; ++k)
        kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * k * k / (sigma * sigma));

    std::vector<double> smooth(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0, wsum = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            const long long j = static_cast<long long>(i) + k;
            if (!closed && (j < 0 || j >= static_cast<long long>(n)))
                continue;
            const double kw = kernel[static_cast<std::size_t>(k + radius)];
            acc += kw * raw[wrap_index(j, n)];
            wsum += kw;
        }
        smooth[i] = wsum > 0.0 ? acc / wsum : 0.0;
    }
    return smooth;
}

} // namespace

std::vector<double> turning_curvature(const EdgeSegment& seg, const GradientField& field, const ArcConfig& cfg, bool closed)
{
    return smooth_chain(turning_angles(seg, field, cfg, closed), cfg.css_sigma, closed);
}

std::vector<Corner> detect_corners(const EdgeSegment& seg, const GradientField& field, const ArcConfig& cfg,
    bool closed, std::size_t segment_index)
{
    const std::size_t n = seg.length();
    if (n < static_cast<std::size_t>(2 * cfg.css_window + 1))
        return {};
    const std::vector<double> raw = turning_angles(seg, field, cfg, closed);
    const std::vector<double> k = smooth_chain(raw, cfg.css_sigma, closed);
    const double thresh = cfg.corner_angle_deg * std::numbers::pi / 180.0;

    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < n; ++i) {
        if (raw[i] < thresh)
            continue;
        if (!closed && (i == 0 || i + 1 == n))
            continue;
        const double prev = k[wrap_index(static_cast<long long>(i) - 1, n)];
        const double next = k[wrap_index(static_cast<long long>(i) + 1, n)];
        if (k[i] >= prev && k[i] >= next)
            peaks.push_back(i);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return k[a] > k[b]; });

    std::vector<std::size_t> kept;
    for (const std::size_t p : peaks) {
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t q) {
            return chain_distance(p, q, n, closed) <= static_cast<std::size_t>(cfg.css_window);
        });
        if (!suppressed)
            kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end());

    std::vector<Corner> out;
    out.reserve(kept.size());
    for (const std::size_t p : kept)
        out.push_back(Corner{segment_index, p, seg.pixels[p]});
    return out;
}

std::vector<std::size_t> arc_source_segments(std::span<const EdgeSegment> segments,
    std::span<const SegmentShapeStats> stats, const std::optional<NearCircular>& near_circular, const Config& cfg)
{
    if (near_circular)
        return {near_circular->index};
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < segments.size(); ++i)
        if (stats[i].entropy > cfg.segments.arc_entropy && static_cast<int>(segments[i].length()) >= cfg.arcs.min_length)
            out.push_back(i);
    return out;
}

std::vector<EllipticalArc> arcs_from_corners(const EdgeSegment& seg, std::size_t segment_index,
    std::span<const Corner> corners, bool closed, const ArcConfig& cfg)
{
    const std::size_t n = seg.length();
    struct Span {
        std::size_t first;
        std::size_t count;
    };
    std::vector<Span> spans;
    if (corners.empty()) {
        spans.push_back({0, n});
    } else if (closed) {
        for (std::size_t c = 0; c < corners.size(); ++c) {
            const std::size_t from = corners[c].position + 1;
            const std::size_t to = c + 1 < corners.size() ? corners[c + 1].position : corners.front().position + n;
            if (to > from)
                spans.push_back({from % n, to - from});
        }
    } else {
        std::size_t from = 0;
        for (const auto& c : corners) {
            if (c.position > from)
                spans.push_back({from, c.position - from});
            from = c.position + 1;
        }
        if (n > from)
            spans.push_back({from, n - from});
    }

    std::vector<EllipticalArc> out;
    for (const Span& s : spans) {
        if (s.count < static_cast<std::size_t>(cfg.min_length))
            continue;
        EllipticalArc arc;
        arc.segment = segment_index;
        arc.first = s.first;
        arc.pixels.reserve(s.count);
        for (std::size_t k = 0; k < s.count; ++k)
            arc.pixels.push_back(seg.pixels[(s.first + k) % n]);
        try {
            arc.fit = fit_ellipse(to_points(arc.pixels));
        } catch (const FitError&) {
            continue;
        }
        if (arc.fit.rmse <= cfg.rmse && arc.fit.ellipse.b >= cfg.min_axis_ratio * arc.fit.ellipse.a)
            out.push_back(std::move(arc));
    }
    return out;
}

std::vector<EllipticalArc> extract_arcs(std::span<const EdgeSegment> segments, std::span<const SegmentShapeStats> stats,
    const GradientField& field, const std::optional<NearCircular>& near_circular, const Config& cfg)
{
    std::vector<EllipticalArc> out;
    for (const std::size_t i : arc_source_segments(segments, stats, near_circular, cfg)) {
        const bool closed = segments[i].closed_gap() <= cfg.segments.closed_gap;
        const auto corners = detect_corners(segments[i], field, cfg.arcs, closed, i);
        auto arcs = arcs_from_corners(segments[i], i, corners, closed, cfg.arcs);
        std::move(arcs.begin(), arcs.end(), std::back_inserter(out));
    }
    return out;
}

} // namespace pupil
