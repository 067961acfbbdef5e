#include "pupil/segment_analysis.hpp"

#include <cmath>
#include <numeric>

namespace pupil {

int SegmentShapeStats::counted() const
{
    return std::accumulate(hist.begin(), hist.end(), 0);
}

double histogram_entropy(std::span<const int> hist)
{
    const double total = std::accumulate(hist.begin(), hist.end(), 0.0);
    if (total <= 0.0)
        return 0.0;
    double e = 0.0;
    for (int c : hist) {
        if (c <= 0)
            continue;
        const double p = c / total;
        e -= p * std::log2(p);
    }
    // -0.0 for a single occupied bin
    return e <= 0.0 ? 0.0 : e;
}

SegmentShapeStats gradient_entropy(const EdgeSegment& seg, const GradientField& field)
{
    SegmentShapeStats s;
    for (const Point p : seg.pixels) {
        const std::uint8_t d = field.dir8[field.index(p.x, p.y)];
        if (d < 8)
            ++s.hist[d];
    }
    s.entropy = histogram_entropy(s.hist);
    s.length = static_cast<int>(seg.length());
    s.closed_gap = seg.closed_gap();
    return s;
}

std::vector<PointD> to_points(std::span<const Point> pixels)
{
    std::vector<PointD> out;
    out.reserve(pixels.size());
    for (const Point p : pixels)
        out.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    return out;
}

std::optional<NearCircular> find_near_circular(std::span<const EdgeSegment> segments,
    std::span<const SegmentShapeStats> stats, const SegmentConfig& cfg)
{
    std::optional<NearCircular> best;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& st = stats[i];
        if (st.entropy < cfg.near_circular_entropy || st.closed_gap > cfg.closed_gap || static_cast<int>(segments[i].length()) < cfg.near_circular_min_length)
            continue;
        FitResult fit;
        if (st.fit) {
            fit = *st.fit;
        } else {
            try {
                fit = fit_ellipse(to_points(segments[i].pixels));
            } catch (const FitError&) {
                continue;
            }
        }
        if (fit.rmse > cfg.near_circular_rmse)
            continue;
        if (best) {
            const auto& cur = segments[best->index];
            const bool better = fit.rmse < best->fit.rmse
                || (fit.rmse == best->fit.rmse
                    && (segments[i].length() > cur.length()
                        || (segments[i].length() == cur.length() && segments[i].pixels.front() < cur.pixels.front())));
            if (!better)
                continue;
        }
        best = NearCircular{i, fit};
    }
    return best;
}

std::optional<NearCircular> find_near_circular(std::span<const EdgeSegment> segments, const GradientField& field,
    const SegmentConfig& cfg)
{
    std::vector<SegmentShapeStats> stats;
    stats.reserve(segments.size());
    for (const auto& s : segments)
        stats.push_back(gradient_entropy(s, field));
    return find_near_circular(segments, stats, cfg);
}

} // namespace pupil
