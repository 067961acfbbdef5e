#include "pupil/overlay.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "json.hpp"

namespace pupil {

void RgbImage::put(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
    if (x < 0 || y < 0 || x >= width || y >= height)
        return;
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
}

namespace {

void draw_rect(RgbImage& out, const Rect& r)
{
    for (int x = r.x; x < r.x + r.width; ++x) {
        out.put(x, r.y, 0, 80, 255);
        out.put(x, r.y + r.height - 1, 0, 80, 255);
    }
    for (int y = r.y; y < r.y + r.height; ++y) {
        out.put(r.x, y, 0, 80, 255);
        out.put(r.x + r.width - 1, y, 0, 80, 255);
    }
}

void draw_ellipse(RgbImage& out, const EllipseParams& e)
{
    const int n = std::max(64, static_cast<int>(std::ceil(4.0 * perimeter(e))));
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        const double u = e.a * std::cos(t), v = e.b * std::sin(t);
        out.put(static_cast<int>(std::lround(e.cx + u * c - v * s)), static_cast<int>(std::lround(e.cy + u * s + v * c)), 255,
            0, 0);
    }
}

} // namespace

RgbImage render_overlay(const GrayImage& img, const DetectionResult& det, const DetectionTrace* trace)
{
    RgbImage out{img.width(), img.height(), std::vector<std::uint8_t>(3 * img.size())};
    for (std::size_t i = 0; i < img.size(); ++i)
        out.rgb[3 * i] = out.rgb[3 * i + 1] = out.rgb[3 * i + 2] = img.pixels()[i];
    if (det.roi.aperture > 0)
        draw_rect(out, det.roi.rect);
    if (trace)
        for (const auto& arc : trace->arcs)
            for (const Point p : arc.pixels)
                out.put(p.x + trace->window.x, p.y + trace->window.y, 0, 255, 0);
    if (det.ellipse)
        draw_ellipse(out, *det.ellipse);
    return out;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img)
{
    const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), img.rgb.begin(), img.rgb.end());
    return bytes;
}

namespace {

double r6(double v) { return std::round(v * 1e6) / 1e6; }

nlohmann::ordered_json fit_json(const FitResult& f)
{
    return {{"cx", r6(f.ellipse.cx)}, {"cy", r6(f.ellipse.cy)}, {"a", r6(f.ellipse.a)}, {"b", r6(f.ellipse.b)},
        {"theta_deg", r6(f.ellipse.theta * 180.0 / std::numbers::pi)}, {"rmse", r6(f.rmse)}};
}

} // namespace

std::string trace_to_json(const DetectionTrace& trace)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["window"] = {{"x", trace.window.x}, {"y", trace.window.y}, {"w", trace.window.width}, {"h", trace.window.height}};
    ordered_json segs = ordered_json::array();
    for (std::size_t i = 0; i < trace.segments.size(); ++i) {
        const auto& seg = trace.segments[i];
        ordered_json s;
        s["index"] = i;
        s["first"] = {seg.pixels.front().x, seg.pixels.front().y};
        s["length"] = seg.pixels.size();
        if (i < trace.stats.size()) {
            const auto& st = trace.stats[i];
            s["closed_gap"] = r6(st.closed_gap);
            s["hist"] = st.hist;
            s["entropy"] = r6(st.entropy);
            s["fit"] = st.fit ? fit_json(*st.fit) : ordered_json(nullptr);
        }
        segs.push_back(std::move(s));
    }
    j["segments"] = std::move(segs);
    j["near_circular"] = trace.near_circular ? ordered_json(trace.near_circular->index) : ordered_json(nullptr);
    ordered_json corners = ordered_json::array();
    for (const auto& c : trace.corners)
        corners.push_back({{"segment", c.segment}, {"position", c.position}, {"x", c.pixel.x}, {"y", c.pixel.y}});
    j["corners"] = std::move(corners);
    ordered_json arcs = ordered_json::array();
    for (const auto& a : trace.arcs)
        arcs.push_back({{"segment", a.segment}, {"first", a.first}, {"length", a.pixels.size()}, {"fit", fit_json(a.fit)}});
    j["arcs"] = std::move(arcs);
    ordered_json cands = ordered_json::array();
    for (const auto& c : trace.candidates)
        cands.push_back({{"subset", c.subset}, {"arcs", c.arc_ids}, {"fit", fit_json(c.fit)},
            {"eccentricity", r6(c.eccentricity)}, {"phi", r6(c.phi)}, {"cost", r6(c.cost)}});
    j["candidates"] = std::move(cands);
    j["selected"] = trace.selection.best ? ordered_json(*trace.selection.best) : ordered_json(nullptr);
    return j.dump(2) + "\n";
}

} // namespace pupil
