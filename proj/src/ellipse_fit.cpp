#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "pupil/ellipse_geometry.hpp"

namespace pupil {

namespace {

using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;

// Positive definite with every Cholesky pivot above rel_tol * trace.
template <typename M>
bool well_conditioned_spd(const M& a, double rel_tol)
{
    const Eigen::LLT<M> llt(a);
    if (llt.info() != Eigen::Success)
        return false;
    const double trace = a.diagonal().cwiseAbs().sum();
    const auto d = llt.matrixLLT().diagonal();
    return (d.array().square() > rel_tol * trace).all();
}

struct Normalization {
    double mx = 0.0;
    double my = 0.0;
    double scale = 1.0;
};

Normalization normalization_of(std::span<const PointD> pts)
{
    Normalization n;
    for (const auto& p : pts) {
        n.mx += p.x;
        n.my += p.y;
    }
    n.mx /= static_cast<double>(pts.size());
    n.my /= static_cast<double>(pts.size());
    double r2 = 0.0;
    for (const auto& p : pts)
        r2 += (p.x - n.mx) * (p.x - n.mx) + (p.y - n.my) * (p.y - n.my);
    r2 /= static_cast<double>(pts.size());
    n.scale = r2 > 0.0 ? std::sqrt(r2 / 2.0) : 1.0;
    return n;
}

// Maps a conic expressed in normalized coordinates u = (x - mx)/s back to
// image coordinates.
Conic denormalize(const Conic& c, const Normalization& n)
{
    const double s = n.scale, mx = n.mx, my = n.my;
    Conic out;
    out.A = c.A;
    out.B = c.B;
    out.C = c.C;
    out.D = -2.0 * c.A * mx - c.B * my + s * c.D;
    out.E = -c.B * mx - 2.0 * c.C * my + s * c.E;
    out.F = c.A * mx * mx + c.B * mx * my + c.C * my * my - s * c.D * mx - s * c.E * my + s * s * c.F;
    return out.normalized();
}

struct Moments {
    // mean of u^i v^j for i + j <= 4
    double xx = 0, xy = 0, yy = 0;
    double xxx = 0, xxy = 0, xyy = 0, yyy = 0;
    double xxxx = 0, xxxy = 0, xxyy = 0, xyyy = 0, yyyy = 0;
};

Moments moments_of(std::span<const PointD> pts, const Normalization& n)
{
    Moments m;
    for (const auto& p : pts) {
        const double x = (p.x - n.mx) / n.scale;
        const double y = (p.y - n.my) / n.scale;
        const double x2 = x * x, y2 = y * y, xy = x * y;
        m.xx += x2;
        m.xy += xy;
        m.yy += y2;
        m.xxx += x2 * x;
        m.xxy += x2 * y;
        m.xyy += x * y2;
        m.yyy += y2 * y;
        m.xxxx += x2 * x2;
        m.xxxy += x2 * xy;
        m.xxyy += x2 * y2;
        m.xyyy += xy * y2;
        m.yyyy += y2 * y2;
    }
    const double inv = 1.0 / static_cast<double>(pts.size());
    for (double* v : {&m.xx, &m.xy, &m.yy, &m.xxx, &m.xxy, &m.xyy, &m.yyy, &m.xxxx, &m.xxxy, &m.xxyy, &m.xyyy, &m.yyyy})
        *v *= inv;
    return m;
}

} // namespace

Conic Conic::normalized() const
{
    const double n = std::sqrt(A * A + B * B + C * C + D * D + E * E + F * F);
    if (n == 0.0)
        return *this;
    return Conic{A / n, B / n, C / n, D / n, E / n, F / n};
}

Conic fit_taubin(std::span<const PointD> points)
{
    if (points.size() < 5)
        throw FitError("Taubin fit needs at least 5 points");
    const Normalization nz = normalization_of(points);
    const Moments m = moments_of(points, nz);

    Mat5 p;
    p << m.xxxx - m.xx * m.xx, m.xxxy - m.xx * m.xy, m.xxyy - m.xx * m.yy, m.xxx, m.xxy,
        m.xxxy - m.xx * m.xy, m.xxyy - m.xy * m.xy, m.xyyy - m.xy * m.yy, m.xxy, m.xyy,
        m.xxyy - m.xx * m.yy, m.xyyy - m.xy * m.yy, m.yyyy - m.yy * m.yy, m.xyy, m.yyy,
        m.xxx, m.xxy, m.xyy, m.xx, m.xy,
        m.xxy, m.xyy, m.yyy, m.xy, m.yy;
    Mat5 q;
    q << 4.0 * m.xx, 2.0 * m.xy, 0.0, 0.0, 0.0,
        2.0 * m.xy, m.xx + m.yy, 2.0 * m.xy, 0.0, 0.0,
        0.0, 2.0 * m.xy, 4.0 * m.yy, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0;

    if (!well_conditioned_spd(q, 1e-10))
        throw FitError("Taubin fit: rank-deficient point set");
    // P v = lambda Q v, smallest lambda
    const Eigen::GeneralizedSelfAdjointEigenSolver<Mat5> eig(p, q);
    if (eig.info() != Eigen::Success)
        throw FitError("Taubin fit: eigen solver failed");
    const Vec5 v = eig.eigenvectors().col(0);

    Conic c;
    c.A = v[0];
    c.B = v[1];
    c.C = v[2];
    c.D = v[3];
    c.E = v[4];
    c.F = -(v[0] * m.xx + v[1] * m.xy + v[2] * m.yy);
    return denormalize(c, nz);
}

Conic fit_fitzgibbon(std::span<const PointD> points)
{
    if (points.size() < 5)
        throw FitError("Fitzgibbon fit needs at least 5 points");
    const Normalization nz = normalization_of(points);
    const Moments m = moments_of(points, nz);

    // Halir-Flusser partition: quadratic part S1, mixed S2, linear part S3.
    Mat3 s1, s2, s3;
    s1 << m.xxxx, m.xxxy, m.xxyy, m.xxxy, m.xxyy, m.xyyy, m.xxyy, m.xyyy, m.yyyy;
    s2 << m.xxx, m.xxy, m.xx, m.xxy, m.xyy, m.xy, m.xyy, m.yyy, m.yy;
    s3 << m.xx, m.xy, 0.0, m.xy, m.yy, 0.0, 0.0, 0.0, 1.0;

    if (!well_conditioned_spd(s3, 1e-10))
        throw FitError("Fitzgibbon fit: rank-deficient point set");

    const Mat3 t = -s3.llt().solve(s2.transpose());
    Mat3 reduced = s1 + s2 * t;
    reduced = 0.5 * (reduced + reduced.transpose()).eval();

    // a^T K a = 4AC - B^2
    Mat3 k;
    k << 0.0, 0.0, 2.0, 0.0, -1.0, 0.0, 2.0, 0.0, 0.0;

    Vec3 a1;
    if (well_conditioned_spd(reduced, 1e-14)) {
        // K a = mu R a; the single positive mu carries the elliptical solution.
        const Eigen::GeneralizedSelfAdjointEigenSolver<Mat3> eig(k, reduced);
        if (eig.info() != Eigen::Success || !(eig.eigenvalues()[2] > 0.0))
            throw FitError("Fitzgibbon fit: degenerate constraint pencil");
        a1 = eig.eigenvectors().col(2);
    } else {
        // Exact conic through the data: take the null vector if it is elliptical.
        const Eigen::SelfAdjointEigenSolver<Mat3> eig(reduced);
        a1 = eig.eigenvectors().col(0);
        if (!(4.0 * a1[0] * a1[2] - a1[1] * a1[1] > 0.0))
            throw FitError("Fitzgibbon fit: degenerate constraint pencil");
    }

    Conic c;
    c.A = a1[0];
    c.B = a1[1];
    c.C = a1[2];
    const Vec3 lin = t * a1;
    c.D = lin[0];
    c.E = lin[1];
    c.F = lin[2];
    return denormalize(c, nz);
}

FitResult fit_ellipse(std::span<const PointD> points)
{
    if (points.size() < 5)
        throw FitError("ellipse fit needs at least 5 points");

    FitResult out;
    out.n_points = static_cast<int>(points.size());
    try {
        const Conic c = fit_taubin(points);
        if (c.is_ellipse()) {
            out.ellipse = to_ellipse(c);
            out.method = FitMethod::taubin;
            out.rmse = rmse(out.ellipse, points);
            return out;
        }
    } catch (const FitError&) {
        // fall through to the constrained fit
    }
    out.ellipse = to_ellipse(fit_fitzgibbon(points));
    out.method = FitMethod::fitzgibbon;
    out.rmse = rmse(out.ellipse, points);
    return out;
}

std::string_view to_string(FitMethod m)
{
    return m == FitMethod::taubin ? "taubin" : "fitzgibbon";
}

} // namespace pupil
