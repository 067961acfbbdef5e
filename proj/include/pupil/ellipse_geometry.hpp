#pragma once

#include <array>
#include <span>
#include <string_view>

#include "pupil/types.hpp"

namespace pupil {

/// Ax^2 + Bxy + Cy^2 + Dx + Ey + F = 0, stored with unit coefficient norm.
struct Conic {
    double A = 0, B = 0, C = 0, D = 0, E = 0, F = 0;

    double discriminant() const { return B * B - 4.0 * A * C; }
    bool is_ellipse() const { return discriminant() < 0.0; }
    Conic normalized() const;
};

struct EllipseParams {
    double cx = 0.0;
    double cy = 0.0;
    double a = 0.0;     ///< semi-major, a >= b
    double b = 0.0;     ///< semi-minor
    double theta = 0.0; ///< major-axis angle in [0, pi)

    /// Swaps axes if needed and folds theta into [0, pi); exact circles get theta = 0.
    EllipseParams canonical() const;
    bool contains(double x, double y) const;
};

/// Interior test with the rotation precomputed, for per-pixel loops.
class EllipseInterior {
public:
    explicit EllipseInterior(const EllipseParams& e);
    bool contains(double x, double y) const
    {
        const double dx = x - cx_, dy = y - cy_;
        const double u = (dx * c_ + dy * s_) / a_;
        const double v = (-dx * s_ + dy * c_) / b_;
        return u * u + v * v <= 1.0;
    }

private:
    double cx_, cy_, a_, b_, c_, s_;
};

enum class FitMethod { taubin, fitzgibbon };

std::string_view to_string(FitMethod m);

struct FitResult {
    EllipseParams ellipse;
    double rmse = 0.0;
    int n_points = 0;
    FitMethod method = FitMethod::taubin;
};

Conic to_conic(const EllipseParams& e);

/// Throws FitError when the conic is not a real, non-degenerate ellipse.
EllipseParams to_ellipse(const Conic& c);

Conic fit_taubin(std::span<const PointD> points);
Conic fit_fitzgibbon(std::span<const PointD> points);

/// Taubin first; falls back to Fitzgibbon when Taubin yields a non-ellipse.
FitResult fit_ellipse(std::span<const PointD> points);

double point_ellipse_distance(const EllipseParams& e, PointD p);
double rmse(const EllipseParams& e, std::span<const PointD> points);

/// Ramanujan's second perimeter approximation.
double perimeter(const EllipseParams& e);
double eccentricity(const EllipseParams& e);

/// Pixel-counted intersection over union of two ellipse interiors on a
/// width x height canvas. Pixel (x, y) is inside when its center (x, y) is.
double overlap_ratio(const EllipseParams& e1, const EllipseParams& e2, int width, int height);

namespace serial {
double overlap_ratio(const EllipseParams& e1, const EllipseParams& e2, int width, int height);
}

} // namespace pupil
