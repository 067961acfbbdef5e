#include "pupil/roi_detector.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pupil {

namespace {

struct Hit {
    double score = 0.0;
    int cx = 0;
    int cy = 0;
    int aperture = 0;
    bool valid = false;
};

// Higher score first, then smallest (y, x, aperture).
bool better(const Hit& a, const Hit& b)
{
    if (!b.valid)
        return a.valid;
    if (!a.valid)
        return false;
    if (a.score != b.score)
        return a.score > b.score;
    if (a.cy != b.cy)
        return a.cy < b.cy;
    if (a.cx != b.cx)
        return a.cx < b.cx;
    return a.aperture < b.aperture;
}

// Response for the window whose outer top-left corner is (x0, y0).
double response_at(const IntegralImage& ii, int x0, int y0, int aperture, int inner, int offset)
{
    const double outer_sum = static_cast<double>(ii.box_sum_unchecked(x0, y0, aperture, aperture));
    const double inner_sum = static_cast<double>(ii.box_sum_unchecked(x0 + offset, y0 + offset, inner, inner));
    const double outer_area = static_cast<double>(aperture) * aperture;
    const double inner_area = static_cast<double>(inner) * inner;
    return (outer_sum - inner_sum) / (outer_area - inner_area) - inner_sum / inner_area;
}

Hit scan_window(const IntegralImage& ii, int aperture, int xlo, int xhi, int ylo, int yhi, int step)
{
    const int inner = haar_inner_side(aperture);
    const int offset = (aperture - inner) / 2;
    Hit best;
    for (int y0 = ylo; y0 <= yhi; y0 += step) {
        for (int x0 = xlo; x0 <= xhi; x0 += step) {
            Hit h{response_at(ii, x0, y0, aperture, inner, offset), x0 + aperture / 2, y0 + aperture / 2, aperture, true};
            if (better(h, best))
                best = h;
        }
    }
    return best;
}

bool fits(const IntegralImage& ii, int aperture)
{
    return aperture >= 2 && aperture <= ii.width() && aperture <= ii.height() && haar_inner_side(aperture) < aperture;
}

RoiResult to_result(const Hit& h)
{
    RoiResult r;
    r.aperture = h.aperture;
    r.score = h.score;
    r.rect = Rect{h.cx - h.aperture / 2, h.cy - h.aperture / 2, h.aperture, h.aperture};
    return r;
}

Hit refine(const IntegralImage& ii, int aperture, int stride, int refine_radius, const Hit& coarse)
{
    const int xmax = ii.width() - aperture;
    const int ymax = ii.height() - aperture;
    const int bx = coarse.cx - aperture / 2;
    const int by = coarse.cy - aperture / 2;
    const int rad = std::max(refine_radius, stride - 1);
    return scan_window(ii, aperture, std::max(0, bx - rad), std::min(xmax, bx + rad), std::max(0, by - rad),
        std::min(ymax, by + rad), 1);
}

Hit coarse_then_refine(const IntegralImage& ii, int aperture, int stride, int refine_radius, bool parallel)
{
    const int xmax = ii.width() - aperture;
    const int ymax = ii.height() - aperture;
    const int rows = ymax / stride + 1;

    Hit coarse;
#pragma omp parallel if (parallel)
    {
        Hit local;
#pragma omp for schedule(static) nowait
        for (int r = 0; r < rows; ++r) {
            const Hit h = scan_window(ii, aperture, 0, xmax, r * stride, r * stride, stride);
            if (better(h, local))
                local = h;
        }
#pragma omp critical
        {
            if (better(local, coarse))
                coarse = local;
        }
    }
    return refine(ii, aperture, stride, refine_radius, coarse);
}

RoiResult scan_scales(const IntegralImage& ii, const RoiConfig& cfg, bool parallel)
{
    if (cfg.scales.empty())
        throw RoiError("no ROI scales configured");
    if (cfg.stride < 1)
        throw InvalidArgument("ROI stride must be positive");
    Hit best;
    for (int aperture : cfg.scales) {
        if (!fits(ii, aperture))
            continue;
        const Hit h = coarse_then_refine(ii, aperture, cfg.stride, cfg.refine_radius, parallel);
        if (better(h, best))
            best = h;
    }
    if (!best.valid)
        throw RoiError("no ROI scale fits the image");
    return to_result(best);
}

} // namespace

int haar_inner_side(int aperture)
{
    return static_cast<int>(std::floor(aperture * 3.0 / 5.0 + 0.5));
}

std::optional<double> haar_response(const IntegralImage& ii, Point center, int aperture)
{
    if (!fits(ii, aperture))
        return std::nullopt;
    const int x0 = center.x - aperture / 2;
    const int y0 = center.y - aperture / 2;
    if (x0 < 0 || y0 < 0 || x0 + aperture > ii.width() || y0 + aperture > ii.height())
        return std::nullopt;
    const int inner = haar_inner_side(aperture);
    return response_at(ii, x0, y0, aperture, inner, (aperture - inner) / 2);
}

RoiResult detect_roi(const GrayImage& img, const RoiConfig& cfg)
{
    return detect_roi(IntegralImage(img), cfg);
}

RoiResult detect_roi(const IntegralImage& ii, const RoiConfig& cfg) { return scan_scales(ii, cfg, true); }

Rect expand_roi(const Rect& r, double expand, int width, int height)
{
    const int grow = static_cast<int>(std::lround(r.width * expand / 2.0));
    const int x0 = std::max(0, r.x - grow);
    const int y0 = std::max(0, r.y - grow);
    const int x1 = std::min(width, r.x + r.width + grow);
    const int y1 = std::min(height, r.y + r.height + grow);
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

namespace serial {

RoiResult detect_roi(const IntegralImage& ii, const RoiConfig& cfg) { return scan_scales(ii, cfg, false); }

RoiResult detect_roi_exhaustive(const IntegralImage& ii, std::span<const int> scales)
{
    Hit best;
    for (int aperture : scales) {
        if (!fits(ii, aperture))
            continue;
        const Hit h = scan_window(ii, aperture, 0, ii.width() - aperture, 0, ii.height() - aperture, 1);
        if (better(h, best))
            best = h;
    }
    if (!best.valid)
        throw RoiError("no ROI scale fits the image");
    return to_result(best);
}

} // namespace serial

} // namespace pupil
