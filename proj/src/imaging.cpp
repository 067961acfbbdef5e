#include "pupil/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pupil {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), fill))
{
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data))
{
    if (width < 1 || height < 1)
        throw InvalidArgument("image dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw InvalidArgument("pixel buffer does not match image dimensions");
}

GrayImage GrayImage::crop(const Rect& r) const
{
    if (r.x < 0 || r.y < 0 || r.width < 1 || r.height < 1 || r.x + r.width > width_ || r.y + r.height > height_)
        throw InvalidArgument("crop rectangle outside image");
    GrayImage out(r.width, r.height);
    for (int y = 0; y < r.height; ++y)
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(index(r.x, r.y + y)), r.width,
            out.data_.begin() + static_cast<std::ptrdiff_t>(out.index(0, y)));
    return out;
}

// ---------------------------------------------------------------------------
// Integral image

IntegralImage::IntegralImage(const GrayImage& img)
    : width_(img.width()), height_(img.height()),
      sat_(static_cast<std::size_t>(img.width() + 1) * static_cast<std::size_t>(img.height() + 1), 0)
{
    const std::size_t stride = static_cast<std::size_t>(width_ + 1);
    for (int y = 0; y < height_; ++y) {
        std::uint32_t row = 0;
        const std::uint32_t* above = &sat_[static_cast<std::size_t>(y) * stride];
        std::uint32_t* cur = &sat_[static_cast<std::size_t>(y + 1) * stride];
        for (int x = 0; x < width_; ++x) {
            row += img.at(x, y);
            cur[x + 1] = above[x + 1] + row;
        }
    }
}

std::uint64_t IntegralImage::box_sum(const Rect& r) const
{
    if (r.x < 0 || r.y < 0 || r.width < 0 || r.height < 0 || r.x + r.width > width_ || r.y + r.height > height_)
        throw InvalidArgument("box_sum rectangle outside image");
    if (static_cast<std::uint64_t>(r.width) * static_cast<std::uint64_t>(r.height) > 0xFFFFFFFFull / 255u)
        throw InvalidArgument("box_sum rectangle too large");
    return box_sum_unchecked(r.x, r.y, r.width, r.height);
}

IntegralImage integral(const GrayImage& img) { return IntegralImage(img); }

// ---------------------------------------------------------------------------
// Smoothing

int gaussian_radius(double sigma) { return static_cast<int>(std::ceil(3.0 * sigma)); }

std::vector<double> gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0))
        throw InvalidArgument("sigma must be positive");
    const int radius = gaussian_radius(sigma);
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k)
        v /= sum;
    return k;
}

namespace {

void smooth_row(const GrayImage& img, const std::vector<double>& k, int radius, int y, double* out)
{
    const int w = img.width();
    const std::uint8_t* row = img.pixels().data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
    const double* kc = k.data() + radius;
    for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        if (x >= radius && x + radius < w) {
            for (int i = -radius; i <= radius; ++i)
                acc += kc[i] * row[x + i];
        } else {
            for (int i = -radius; i <= radius; ++i)
                acc += kc[i] * row[std::clamp(x + i, 0, w - 1)];
        }
        out[x] = acc;
    }
}

void smooth_column_pass(const std::vector<double>& tmp, int w, int h, const std::vector<double>& k, int radius, int y,
    GrayImage& out)
{
    std::vector<double> acc(static_cast<std::size_t>(w), 0.0);
    for (int i = -radius; i <= radius; ++i) {
        const double kv = k[static_cast<std::size_t>(i + radius)];
        const double* src = tmp.data() + static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * static_cast<std::size_t>(w);
        for (int x = 0; x < w; ++x)
            acc[static_cast<std::size_t>(x)] += kv * src[x];
    }
    std::uint8_t* dst = out.pixels().data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
    for (int x = 0; x < w; ++x)
        dst[x] = static_cast<std::uint8_t>(std::min(acc[static_cast<std::size_t>(x)] + 0.5, 255.0));
}

void sobel_at(const GrayImage& img, int x, int y, double& gx, double& gy)
{
    const int a = img.at(x - 1, y - 1), b = img.at(x, y - 1), c = img.at(x + 1, y - 1);
    const int d = img.at(x - 1, y), f = img.at(x + 1, y);
    const int g = img.at(x - 1, y + 1), h = img.at(x, y + 1), i = img.at(x + 1, y + 1);
    gx = static_cast<double>((c + 2 * f + i) - (a + 2 * d + g));
    gy = static_cast<double>((g + 2 * h + i) - (a + 2 * b + c));
}

void gradient_row(const GrayImage& img, int y, GradientField& field)
{
    const int w = img.width();
    const int h = img.height();
    const int sy = std::clamp(y, 1, h - 2);
    for (int x = 0; x < w; ++x) {
        const int sx = std::clamp(x, 1, w - 2);
        double gx = 0.0, gy = 0.0;
        sobel_at(img, sx, sy, gx, gy);
        const std::size_t p = field.index(x, y);
        field.gx[p] = gx;
        field.gy[p] = gy;
        field.mag[p] = std::sqrt(gx * gx + gy * gy);
        field.dir8[p] = quantize_direction(gx, gy);
    }
}

GradientField make_field(const GrayImage& img)
{
    if (img.width() < 3 || img.height() < 3)
        throw InvalidArgument("gradient computation needs at least a 3x3 image");
    GradientField f;
    f.width = img.width();
    f.height = img.height();
    const std::size_t n = img.size();
    f.gx.assign(n, 0.0);
    f.gy.assign(n, 0.0);
    f.mag.assign(n, 0.0);
    f.dir8.assign(n, kFlatDirection);
    return f;
}

} // namespace

GrayImage gaussian_smooth(const GrayImage& img, double sigma)
{
    const std::vector<double> k = gaussian_kernel(sigma);
    const int radius = gaussian_radius(sigma);
    const int w = img.width();
    const int h = img.height();
    std::vector<double> tmp(img.size());
    GrayImage out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        smooth_row(img, k, radius, y, &tmp[static_cast<std::size_t>(y) * static_cast<std::size_t>(w)]);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        smooth_column_pass(tmp, w, h, k, radius, y, out);
    return out;
}

GradientField compute_gradients(const GrayImage& img)
{
    GradientField f = make_field(img);
    const int h = img.height();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        gradient_row(img, y, f);
    return f;
}

std::uint8_t quantize_direction(double gx, double gy)
{
    if (gx == 0.0 && gy == 0.0)
        return kFlatDirection;
    if (gx == 0.0)
        return gy > 0.0 ? 7 : 0;
    if (gx < 0.0) {
        gx = -gx;
        gy = -gy;
    }
    // bin = number of boundaries -67.5, -45, ..., 67.5 degrees at or below atan(gy / gx)
    constexpr double t1 = 0.41421356237309503; // tan 22.5
    constexpr double t2 = 2.4142135623730949;  // tan 67.5
    const double bounds[7] = {-t2, -1.0, -t1, 0.0, t1, 1.0, t2};
    std::uint8_t bin = 0;
    for (const double t : bounds)
        bin += gy >= t * gx;
    return bin;
}

namespace serial {

GrayImage gaussian_smooth(const GrayImage& img, double sigma)
{
    const std::vector<double> k = gaussian_kernel(sigma);
    const int radius = gaussian_radius(sigma);
    const int w = img.width();
    const int h = img.height();
    std::vector<double> tmp(img.size());
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        smooth_row(img, k, radius, y, &tmp[static_cast<std::size_t>(y) * static_cast<std::size_t>(w)]);
    for (int y = 0; y < h; ++y)
        smooth_column_pass(tmp, w, h, k, radius, y, out);
    return out;
}

GradientField compute_gradients(const GrayImage& img)
{
    GradientField f = make_field(img);
    for (int y = 0; y < img.height(); ++y)
        gradient_row(img, y, f);
    return f;
}

} // namespace serial

} // namespace pupil
