#include <algorithm>
#include <cmath>
#include <numbers>

#include "pupil/ellipse_geometry.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pupil {

namespace {

constexpr double kPi = std::numbers::pi;

// Root of G(s) = (r0 z0 / (s + r0))^2 + (z1 / (s + 1))^2 - 1 on s > -1.
// G is strictly decreasing there; Newton steps are kept inside a shrinking
// bracket and replaced by bisection when they leave it.
double nearest_point_root(double r0, double z0, double z1, double g)
{
    const double n0 = r0 * z0;
    double lo = z1 - 1.0;
    double hi = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 64; ++it) {
        const double q0 = n0 / (s + r0);
        const double q1 = z1 / (s + 1.0);
        const double val = q0 * q0 + q1 * q1 - 1.0;
        if (val == 0.0)
            return s;
        if (val > 0.0)
            lo = s;
        else
            hi = s;
        const double deriv = -2.0 * (q0 * q0 / (s + r0) + q1 * q1 / (s + 1.0));
        double next = s - val / deriv;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-16 * std::max(1.0, std::abs(s)) || hi - lo <= 1e-16 * std::max(1.0, std::abs(s)))
            return next;
        s = next;
    }
    return s;
}

// Distance from (y0, y1), both >= 0, to the axis-aligned ellipse with
// semi-axes e0 >= e1 > 0.
double canonical_distance(double e0, double e1, double y0, double y1)
{
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0)
                return 0.0;
            const double r0 = (e0 / e1) * (e0 / e1);
            const double sbar = nearest_point_root(r0, z0, z1, g);
            const double x0 = r0 * y0 / (sbar + r0);
            const double x1 = y1 / (sbar + 1.0);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::abs(y1 - e1);
    }
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        const double x0 = e0 * xde0;
        const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
        return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
}

struct Box {
    int x0, y0, x1, y1; // inclusive
};

Box clipped_box(const EllipseParams& e, int width, int height)
{
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    const double hx = std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s);
    const double hy = std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c);
    Box b;
    b.x0 = std::max(0, static_cast<int>(std::floor(e.cx - hx)));
    b.y0 = std::max(0, static_cast<int>(std::floor(e.cy - hy)));
    b.x1 = std::min(width - 1, static_cast<int>(std::ceil(e.cx + hx)));
    b.y1 = std::min(height - 1, static_cast<int>(std::ceil(e.cy + hy)));
    return b;
}

struct OverlapCounts {
    long long both = 0;
    long long either = 0;
};

void count_row(const EllipseInterior& e1, const EllipseInterior& e2, int y, int x0, int x1, OverlapCounts& acc)
{
    for (int x = x0; x <= x1; ++x) {
        const bool in1 = e1.contains(x, y);
        const bool in2 = e2.contains(x, y);
        acc.both += (in1 && in2) ? 1 : 0;
        acc.either += (in1 || in2) ? 1 : 0;
    }
}

Box union_box(const EllipseParams& e1, const EllipseParams& e2, int width, int height)
{
    const Box b1 = clipped_box(e1, width, height);
    const Box b2 = clipped_box(e2, width, height);
    return Box{std::min(b1.x0, b2.x0), std::min(b1.y0, b2.y0), std::max(b1.x1, b2.x1), std::max(b1.y1, b2.y1)};
}

} // namespace

EllipseParams EllipseParams::canonical() const
{
    EllipseParams e = *this;
    if (e.b > e.a) {
        std::swap(e.a, e.b);
        e.theta += kPi / 2.0;
    }
    e.theta = std::fmod(e.theta, kPi);
    if (e.theta < 0.0)
        e.theta += kPi;
    if (e.theta >= kPi)
        e.theta = 0.0;
    if (std::abs(e.a - e.b) <= 1e-12 * e.a)
        e.theta = 0.0;
    return e;
}

bool EllipseParams::contains(double x, double y) const { return EllipseInterior(*this).contains(x, y); }

EllipseInterior::EllipseInterior(const EllipseParams& e)
    : cx_(e.cx), cy_(e.cy), a_(e.a), b_(e.b), c_(std::cos(e.theta)), s_(std::sin(e.theta))
{
}

Conic to_conic(const EllipseParams& e)
{
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    const double a2 = e.a * e.a, b2 = e.b * e.b;
    Conic q;
    q.A = a2 * s * s + b2 * c * c;
    q.B = 2.0 * (b2 - a2) * s * c;
    q.C = a2 * c * c + b2 * s * s;
    q.D = -2.0 * q.A * e.cx - q.B * e.cy;
    q.E = -q.B * e.cx - 2.0 * q.C * e.cy;
    q.F = q.A * e.cx * e.cx + q.B * e.cx * e.cy + q.C * e.cy * e.cy - a2 * b2;
    return q.normalized();
}

EllipseParams to_ellipse(const Conic& conic)
{
    Conic q = conic;
    if (q.A + q.C < 0.0)
        q = Conic{-q.A, -q.B, -q.C, -q.D, -q.E, -q.F};
    const double det = 4.0 * q.A * q.C - q.B * q.B;
    if (!(det > 0.0))
        throw FitError("conic is not an ellipse");

    EllipseParams e;
    e.cx = (q.B * q.E - 2.0 * q.C * q.D) / det;
    e.cy = (q.B * q.D - 2.0 * q.A * q.E) / det;
    const double f0 = q.F + 0.5 * (q.D * e.cx + q.E * e.cy);

    const double mean = 0.5 * (q.A + q.C);
    const double rad = std::hypot(0.5 * (q.A - q.C), 0.5 * q.B);
    const double lmin = mean - rad;
    const double lmax = mean + rad;
    if (!(lmin > 0.0) || !(f0 < 0.0))
        throw FitError("conic is an imaginary or degenerate ellipse");
    e.a = std::sqrt(-f0 / lmin);
    e.b = std::sqrt(-f0 / lmax);
    if (!std::isfinite(e.a) || !std::isfinite(e.b) || !std::isfinite(e.cx) || !std::isfinite(e.cy))
        throw FitError("conic yields non-finite ellipse");
    // 0.5 atan2(B, A - C) points along the eigenvector of lmax (minor axis)
    e.theta = 0.5 * std::atan2(q.B, q.A - q.C) + kPi / 2.0;
    return e.canonical();
}

double point_ellipse_distance(const EllipseParams& e, PointD p)
{
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    const double dx = p.x - e.cx, dy = p.y - e.cy;
    const double u = std::abs(dx * c + dy * s);
    const double v = std::abs(-dx * s + dy * c);
    if (e.a >= e.b)
        return canonical_distance(e.a, e.b, u, v);
    return canonical_distance(e.b, e.a, v, u);
}

double rmse(const EllipseParams& e, std::span<const PointD> points)
{
    if (points.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto& p : points) {
        const double d = point_ellipse_distance(e, p);
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(points.size()));
}

double perimeter(const EllipseParams& e)
{
    const double sum = e.a + e.b;
    const double h = (e.a - e.b) * (e.a - e.b) / (sum * sum);
    return kPi * sum * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

double eccentricity(const EllipseParams& e)
{
    const double a = std::max(e.a, e.b);
    const double b = std::min(e.a, e.b);
    return std::sqrt(std::max(0.0, 1.0 - (b * b) / (a * a)));
}

double overlap_ratio(const EllipseParams& e1, const EllipseParams& e2, int width, int height)
{
    const Box box = union_box(e1, e2, width, height);
    const EllipseInterior in1(e1), in2(e2);
    long long both = 0;
    long long either = 0;
#pragma omp parallel for reduction(+ : both, either) schedule(static)
    for (int y = box.y0; y <= box.y1; ++y) {
        OverlapCounts row;
        count_row(in1, in2, y, box.x0, box.x1, row);
        both += row.both;
        either += row.either;
    }
    return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

namespace serial {

double overlap_ratio(const EllipseParams& e1, const EllipseParams& e2, int width, int height)
{
    const Box box = union_box(e1, e2, width, height);
    const EllipseInterior in1(e1), in2(e2);
    OverlapCounts acc;
    for (int y = box.y0; y <= box.y1; ++y)
        count_row(in1, in2, y, box.x0, box.x1, acc);
    return acc.either == 0 ? 0.0 : static_cast<double>(acc.both) / static_cast<double>(acc.either);
}

} // namespace serial

} // namespace pupil
