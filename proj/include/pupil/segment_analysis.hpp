#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "pupil/config.hpp"
#include "pupil/edge_segments.hpp"
#include "pupil/ellipse_geometry.hpp"

namespace pupil {

struct SegmentShapeStats {
    std::array<int, 8> hist{};   ///< direction counts, flat pixels excluded
    double entropy = 0.0;        ///< bits, in [0, 3]
    int length = 0;
    double closed_gap = 0.0;
    std::optional<FitResult> fit;

    int counted() const;
    bool all_flat() const { return counted() == 0; }
};

/// Shannon entropy in bits of a direction histogram; empty histogram -> 0.
double histogram_entropy(std::span<const int> hist);

SegmentShapeStats gradient_entropy(const EdgeSegment& seg, const GradientField& field);

struct NearCircular {
    std::size_t index = 0; ///< position in the input segment list
    FitResult fit;
};

/// Closed, high-entropy segment with the smallest fit error within bound, if any.
/// `stats` must be parallel to `segments`.
std::optional<NearCircular> find_near_circular(std::span<const EdgeSegment> segments,
    std::span<const SegmentShapeStats> stats, const SegmentConfig& cfg);

std::optional<NearCircular> find_near_circular(std::span<const EdgeSegment> segments, const GradientField& field,
    const SegmentConfig& cfg = {});

std::vector<PointD> to_points(std::span<const Point> pixels);

} // namespace pupil
