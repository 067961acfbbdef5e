#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pupil {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct RoiError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

struct SpecError : Error {
    using Error::Error;
};

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
};

struct PointD {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const Rect&, const Rect&) = default;

    bool contains(int px, int py) const
    {
        return px >= x && py >= y && px < x + width && py < y + height;
    }
};

inline bool adjacent8(Point a, Point b)
{
    const int dx = a.x - b.x;
    const int dy = a.y - b.y;
    return (dx != 0 || dy != 0) && dx >= -1 && dx <= 1 && dy >= -1 && dy <= 1;
}

} // namespace pupil
