#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pupil/candidate_selection.hpp"
#include "pupil/imaging.hpp"

namespace pupil {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; ///< row-major, 3 bytes per pixel

    void put(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

/// Gray frame with the ROI window (blue), extracted arcs (green, when a trace
/// is given) and the selected ellipse (red).
RgbImage render_overlay(const GrayImage& img, const DetectionResult& det, const DetectionTrace* trace = nullptr);

/// Binary P6.
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);

/// Per-segment table (length, gap, histogram, entropy, fit rmse) plus the
/// near-circular pick, arcs and candidates, in window coordinates.
std::string trace_to_json(const DetectionTrace& trace);

} // namespace pupil
