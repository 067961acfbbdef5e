#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pupil/types.hpp"

namespace pupil {

/// 8-bit intensity raster, row-major. Pixel (x, y) lives at data[y * width + x].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return data_[index(x, y)]; }

    std::span<const std::uint8_t> pixels() const { return data_; }
    std::span<std::uint8_t> pixels() { return data_; }

    GrayImage crop(const Rect& r) const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Marker stored in GradientField::dir8 for zero-gradient pixels.
inline constexpr std::uint8_t kFlatDirection = 8;

struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;
    std::vector<double> mag;
    std::vector<std::uint8_t> dir8;

    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    double magnitude(int x, int y) const { return mag[index(x, y)]; }
};

/// Summed-area table with a zero first row and column: (width+1) x (height+1).
/// Entries are kept modulo 2^32, which keeps box sums exact for any box of
/// fewer than 2^32 / 255 pixels.
class IntegralImage {
public:
    IntegralImage() = default;
    explicit IntegralImage(const GrayImage& img);

    int width() const { return width_; }
    int height() const { return height_; }

    /// Sum over [0, x) x [0, y), modulo 2^32.
    std::uint32_t table(int x, int y) const
    {
        return sat_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) + static_cast<std::size_t>(x)];
    }

    /// Sum of intensities inside rect; throws InvalidArgument if rect leaves the image.
    std::uint64_t box_sum(const Rect& r) const;

    /// Unchecked variant for hot loops; caller guarantees bounds.
    std::uint64_t box_sum_unchecked(int x, int y, int w, int h) const
    {
        const std::uint32_t s = table(x + w, y + h) + table(x, y) - table(x + w, y) - table(x, y + h);
        return s;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint32_t> sat_;
};

GrayImage load_pgm(std::span<const std::uint8_t> bytes);
GrayImage load_pgm_file(const std::string& path);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
void save_pgm_file(const GrayImage& img, const std::string& path);

/// Kernel radius used by gaussian_smooth: ceil(3 sigma).
int gaussian_radius(double sigma);
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur, replicated borders, rounded back to 8 bits.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);

/// Sobel derivatives, Euclidean magnitude and 8-way direction symbols.
GradientField compute_gradients(const GrayImage& img);

/// Quantized gradient direction. theta = atan(gy/gx) in [-90, 90] degrees is
/// cut into 8 cells of 22.5 degrees; +90 belongs to the last cell. Returns
/// kFlatDirection when gx == gy == 0.
std::uint8_t quantize_direction(double gx, double gy);

IntegralImage integral(const GrayImage& img);

namespace serial {

// Single-threaded reference kernels, kept for equivalence tests and benchmarks.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);
GradientField compute_gradients(const GrayImage& img);

} // namespace serial

} // namespace pupil
