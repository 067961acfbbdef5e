#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pupil/arc_extraction.hpp"
#include "pupil/config.hpp"
#include "pupil/edge_segments.hpp"
#include "pupil/ellipse_geometry.hpp"
#include "pupil/imaging.hpp"
#include "pupil/roi_detector.hpp"
#include "pupil/segment_analysis.hpp"

namespace pupil {

struct PupilCandidate {
    std::uint32_t subset = 0;     ///< bit k set <=> arc k of the (capped) arc list
    std::vector<int> arc_ids;     ///< indices into the arc list given to generate_candidates
    FitResult fit;
    double eccentricity = 0.0;
    double phi = 0.0;             ///< contributing arc pixels / fitted perimeter
    double cost = 0.0;
};

/// rmse^2 * pi^eccentricity / phi^2
double candidate_cost(double rmse, double eccentricity, double phi);

/// Indices of the arcs that take part in subset enumeration: all of them, or
/// the `max_arcs` longest (ties by index) in ascending index order.
std::vector<int> capped_arc_ids(std::span<const EllipticalArc> arcs, int max_arcs);

/// Non-empty subset masks 1 .. 2^n - 1 in enumeration order.
std::vector<std::uint32_t> arc_subsets(int n);

/// Fits every non-empty arc subset and keeps fits within the candidate rmse
/// bound, ordered by subset mask.
std::vector<PupilCandidate> generate_candidates(std::span<const EllipticalArc> arcs, const CandidateConfig& cfg);

enum class Verdict { pupil, no_pupil };
enum class DetectionPath { fast, full };

std::string_view to_string(Verdict v);
std::string_view to_string(DetectionPath p);

struct Selection {
    Verdict verdict = Verdict::no_pupil;
    std::optional<std::size_t> best; ///< index of the minimum-cost candidate, when any
    std::optional<double> min_cost;
};

/// Minimum-cost candidate; no_pupil when there are none or the minimum
/// exceeds `threshold`.
Selection select_pupil(std::span<const PupilCandidate> candidates, double threshold);

struct StageTimings {
    std::int64_t roi = 0;
    std::int64_t edges = 0;
    std::int64_t entropy = 0;
    std::int64_t corners = 0;
    std::int64_t arcs = 0;
    std::int64_t selection = 0;

    std::int64_t total() const { return roi + edges + entropy + corners + arcs + selection; }
};

struct DetectionResult {
    Verdict verdict = Verdict::no_pupil;
    std::optional<EllipseParams> ellipse; ///< image coordinates
    std::optional<double> cost;
    RoiResult roi;
    DetectionPath path = DetectionPath::full;
    StageTimings timings_us;
};

/// Intermediate products of one detection, in ROI-window coordinates.
struct DetectionTrace {
    Rect window;
    std::vector<EdgeSegment> segments;
    std::vector<SegmentShapeStats> stats;
    std::optional<NearCircular> near_circular;
    std::vector<Corner> corners;
    std::vector<EllipticalArc> arcs;
    std::vector<PupilCandidate> candidates;
    Selection selection;
};

/// Full per-frame pipeline. Throws RoiError when no ROI scale fits.
DetectionResult detect(const GrayImage& img, const Config& cfg, DetectionTrace* trace = nullptr);

/// Fixed-order JSON; reals at 6 decimals. Timings are written as 0 when
/// `include_timings` is false.
std::string to_json(const DetectionResult& r, bool include_timings = true);

namespace serial {
std::vector<PupilCandidate> generate_candidates(std::span<const EllipticalArc> arcs, const CandidateConfig& cfg);
}

} // namespace pupil
