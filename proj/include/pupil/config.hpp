#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pupil {

struct RoiConfig {
    std::vector<int> scales{150, 200, 250, 300, 350};
    int stride = 4;
    /// Half-width of the stride-1 refinement window around the coarse argmax.
    int refine_radius = 8;
    double expand = 0.10;
};

struct EdgeConfig {
    double smooth_sigma = 1.0;
    int scan_interval = 2;
    double gradient_threshold = 8.0;
    double anchor_threshold = 0.0;
    int min_segment_length = 10;
    bool validate = true;
};

struct SegmentConfig {
    double near_circular_entropy = 2.8;
    double arc_entropy = 2.0;
    double closed_gap = 15.0;
    double near_circular_rmse = 0.6;
    /// Shorter closed segments (glints) cannot yield an arc and are not near-circular.
    int near_circular_min_length = 25;
};

struct ArcConfig {
    int min_length = 25;
    double rmse = 2.0;
    /// Spans whose fit is thinner than this (b / a) are straight pieces, not arcs.
    double min_axis_ratio = 0.3;
    int css_window = 7;
    double css_sigma = 3.0;
    double corner_angle_deg = 30.0;
};

struct CandidateConfig {
    int max_arcs = 10;
    double rmse = 3.0;
    /// Fits thinner than this (b / a) are not pupil shapes.
    double min_axis_ratio = 0.3;
    double cost_threshold = 50.0;
};

struct Config {
    RoiConfig roi;
    EdgeConfig edges;
    SegmentConfig segments;
    ArcConfig arcs;
    CandidateConfig candidates;
    std::uint64_t seed = 20180923;

    /// Applies one "key = value" setting; throws InvalidArgument on unknown
    /// keys or malformed values.
    void set(const std::string& key, const std::string& value);

    /// Every tunable as canonical key -> value text, sorted by key.
    std::map<std::string, std::string> entries() const;

    /// Throws InvalidArgument if a threshold is not positive.
    void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment.
Config load_config_text(const std::string& text, Config base = {});
Config load_config_file(const std::string& path, Config base = {});

} // namespace pupil
