#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pupil/config.hpp"
#include "pupil/edge_segments.hpp"
#include "pupil/ellipse_geometry.hpp"
#include "pupil/segment_analysis.hpp"

namespace pupil {

struct Corner {
    std::size_t segment = 0;
    std::size_t position = 0; ///< index into the segment's pixel chain
    Point pixel;
};

struct EllipticalArc {
    std::size_t segment = 0;
    std::size_t first = 0; ///< chain index of the first pixel
    std::vector<Point> pixels;
    FitResult fit;

    int span_length() const { return static_cast<int>(pixels.size()); }
};

/// Turning angle (radians) between the mean gradient directions of the w
/// pixels before and after each chain position. Positions without full
/// windows on an open chain get 0.
std::vector<double> turning_angles(const EdgeSegment& seg, const GradientField& field, const ArcConfig& cfg, bool closed);

/// turning_angles Gaussian-smoothed along the chain (sigma = css_sigma).
std::vector<double> turning_curvature(const EdgeSegment& seg, const GradientField& field, const ArcConfig& cfg, bool closed);

/// Local maxima of the smoothed curvature whose unsmoothed turning angle
/// reaches the corner angle, non-max suppressed within the curvature window.
/// Closed chains wrap around.
std::vector<Corner> detect_corners(const EdgeSegment& seg, const GradientField& field, const ArcConfig& cfg,
    bool closed, std::size_t segment_index = 0);

/// Segments that feed arc extraction: only the near-circular one when present,
/// otherwise every segment above the arc entropy and length gates.
std::vector<std::size_t> arc_source_segments(std::span<const EdgeSegment> segments,
    std::span<const SegmentShapeStats> stats, const std::optional<NearCircular>& near_circular, const Config& cfg);

/// Splits one segment at its corners (corner pixels belong to no span) and
/// keeps the spans whose ellipse fit stays within the arc rmse bound.
std::vector<EllipticalArc> arcs_from_corners(const EdgeSegment& seg, std::size_t segment_index,
    std::span<const Corner> corners, bool closed, const ArcConfig& cfg);

std::vector<EllipticalArc> extract_arcs(std::span<const EdgeSegment> segments, std::span<const SegmentShapeStats> stats,
    const GradientField& field, const std::optional<NearCircular>& near_circular, const Config& cfg);

} // namespace pupil
