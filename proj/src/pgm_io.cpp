#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "pupil/imaging.hpp"

namespace pupil {

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_int()
    {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
            throw ParseError("PGM header: expected integer");
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000)
                throw ParseError("PGM header: value out of range");
            ++pos_;
        }
        return v;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw ParseError("not a binary PGM (P5) stream");
    HeaderReader rd(bytes);
    rd.advance(2);
    const long width = rd.read_int();
    const long height = rd.read_int();
    const long maxval = rd.read_int();
    if (width < 1 || height < 1)
        throw ParseError("PGM header: invalid dimensions");
    if (maxval < 1 || maxval > 255)
        throw ParseError("PGM header: only 8-bit maxval is supported");
    // exactly one whitespace byte separates the header from the raster
    if (rd.pos() >= bytes.size() || !std::isspace(bytes[rd.pos()]))
        throw ParseError("PGM header: missing separator");
    rd.advance(1);

    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - rd.pos() < n)
        throw ParseError("PGM payload truncated");
    std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(rd.pos()),
        bytes.begin() + static_cast<std::ptrdiff_t>(rd.pos() + n));
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

GrayImage load_pgm_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img)
{
    const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

void save_pgm_file(const GrayImage& img, const std::string& path)
{
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace pupil
