#pragma once

#include <optional>
#include <span>

#include "pupil/config.hpp"
#include "pupil/imaging.hpp"

namespace pupil {

struct RoiResult {
    Rect rect;        ///< winning window, width == height == aperture
    int aperture = 0;
    double score = 0.0;
};

/// Inner square side of the Haar feature: round-half-up of 3/5 of the aperture.
int haar_inner_side(int aperture);

/// Ring mean minus inner mean of the square Haar feature centered at
/// `center`. Returns nullopt when the outer square does not fit.
std::optional<double> haar_response(const IntegralImage& ii, Point center, int aperture);

/// Best response over all scales; ties go to the smallest (y, x, aperture).
RoiResult detect_roi(const GrayImage& img, const RoiConfig& cfg);
RoiResult detect_roi(const IntegralImage& ii, const RoiConfig& cfg);

/// The window handed to edge detection: rect grown by the fraction `expand`
/// (half on each side) and clamped to the image.
Rect expand_roi(const Rect& r, double expand, int width, int height);

namespace serial {

RoiResult detect_roi(const IntegralImage& ii, const RoiConfig& cfg);

/// Stride-1 scan over every center and scale; the oracle for the coarse+refine search.
RoiResult detect_roi_exhaustive(const IntegralImage& ii, std::span<const int> scales);

} // namespace serial

} // namespace pupil
