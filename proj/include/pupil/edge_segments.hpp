#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pupil/config.hpp"
#include "pupil/imaging.hpp"

namespace pupil {

/// Ordered, 8-connected, one-pixel-wide chain of edge pixels.
struct EdgeSegment {
    std::vector<Point> pixels;

    std::size_t length() const { return pixels.size(); }
    /// Euclidean distance between the first and last pixel.
    double closed_gap() const;
};

/// Empirical tail distribution of gradient magnitudes over a region, held as
/// a 256-bin log-spaced histogram. Serves as the a-contrario background model.
class MagnitudeTail {
public:
    static constexpr int kBins = 256;

    explicit MagnitudeTail(const GradientField& field);

    /// Fraction of pixels whose magnitude falls in the bin of `mu` or above.
    double tail_fraction(double mu) const;
    int bin_of(double mu) const;
    std::size_t total() const { return total_; }

private:
    double log_max_ = 0.0;
    std::size_t total_ = 0;
    std::array<std::size_t, kBins + 1> cumulative_{}; // cumulative_[b] = count in bins >= b
};

/// log10 of NFA = n_pixels^2 * H(mu_min)^L.
double segment_nfa_log10(const EdgeSegment& seg, const GradientField& field, const MagnitudeTail& tail, std::size_t n_pixels);

/// True iff NFA <= 1.
bool validate_segment(const EdgeSegment& seg, const GradientField& field, const MagnitudeTail& tail, std::size_t n_pixels);
bool validate_segment(const EdgeSegment& seg, const GradientField& field, std::size_t n_pixels);

struct EdgeDetection {
    GrayImage smoothed;
    GradientField field;
    std::vector<EdgeSegment> segments;
};

/// Smoothing, gradients, anchor extraction, smart routing, and validation.
/// Segment coordinates are relative to `img`.
EdgeDetection detect_edges(const GrayImage& img, const EdgeConfig& cfg);
std::vector<EdgeSegment> detect_segments(const GrayImage& img, const EdgeConfig& cfg = {});

/// Chain extraction on a precomputed gradient field (no smoothing or validation).
std::vector<EdgeSegment> trace_segments(const GradientField& field, const EdgeConfig& cfg);

} // namespace pupil
