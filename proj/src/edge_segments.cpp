#include "pupil/edge_segments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pupil {

namespace {

enum PixelState : std::uint8_t { kNone = 0, kAnchor = 1, kEdge = 2 };

class Router {
public:
    Router(const GradientField& f, const EdgeConfig& cfg)
        : f_(f), cfg_(cfg), state_(static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height), kNone)
    {
    }

    std::vector<Point> find_anchors()
    {
        std::vector<Point> anchors;
        const int w = f_.width, h = f_.height;
        const int k = cfg_.scan_interval;
        for (int y = 2; y < h - 2; ++y) {
            int start = 2;
            int inc = 1;
            if (y % k != 0) {
                start = k;
                inc = k;
            }
            for (int x = start; x < w - 2; x += inc) {
                const double g = mag(x, y);
                if (g < cfg_.gradient_threshold)
                    continue;
                double n1 = 0.0, n2 = 0.0;
                if (horizontal(x, y)) {
                    n1 = mag(x, y - 1);
                    n2 = mag(x, y + 1);
                } else {
                    n1 = mag(x - 1, y);
                    n2 = mag(x + 1, y);
                }
                if (g - n1 >= cfg_.anchor_threshold && g - n2 >= cfg_.anchor_threshold) {
                    state(x, y) = kAnchor;
                    anchors.push_back({x, y});
                }
            }
        }
        std::stable_sort(anchors.begin(), anchors.end(),
            [this](Point a, Point b) { return mag(a.x, a.y) > mag(b.x, b.y); });
        return anchors;
    }

    std::vector<EdgeSegment> route(const std::vector<Point>& anchors)
    {
        std::vector<EdgeSegment> out;
        for (const Point a : anchors) {
            if (state(a.x, a.y) != kAnchor)
                continue;
            state(a.x, a.y) = kEdge;
            const bool horiz = horizontal(a.x, a.y);
            auto first = horiz ? walk(a, -1, 0) : walk(a, 0, -1);
            auto second = horiz ? walk(a, 1, 0) : walk(a, 0, 1);

            std::vector<Point> chain;
            chain.reserve(first.size() + second.size() + 1);
            chain.insert(chain.end(), first.rbegin(), first.rend());
            chain.push_back(a);
            chain.insert(chain.end(), second.begin(), second.end());

            EdgeSegment seg{thin(chain)};
            if (static_cast<int>(seg.length()) >= cfg_.min_segment_length)
                out.push_back(std::move(seg));
        }
        return out;
    }

private:
    double mag(int x, int y) const { return f_.mag[f_.index(x, y)]; }
    bool horizontal(int x, int y) const
    {
        const std::size_t p = f_.index(x, y);
        return std::abs(f_.gx[p]) < std::abs(f_.gy[p]);
    }
    std::uint8_t& state(int x, int y) { return state_[f_.index(x, y)]; }
    bool interior(int x, int y) const { return x >= 1 && y >= 1 && x < f_.width - 1 && y < f_.height - 1; }

    // Forward neighbours for the current mode, ordered middle, first side, second side.
    std::array<Point, 3> forward(Point p, bool horiz, int sx, int sy) const
    {
        if (horiz)
            return {Point{p.x + sx, p.y}, Point{p.x + sx, p.y - 1}, Point{p.x + sx, p.y + 1}};
        return {Point{p.x, p.y + sy}, Point{p.x - 1, p.y + sy}, Point{p.x + 1, p.y + sy}};
    }

    double best_forward(Point p, bool horiz, int sx, int sy)
    {
        double best = -1.0;
        for (const Point q : forward(p, horiz, sx, sy))
            if (interior(q.x, q.y) && state(q.x, q.y) != kEdge)
                best = std::max(best, mag(q.x, q.y));
        return best;
    }

    std::vector<Point> walk(Point p, int sx, int sy)
    {
        std::vector<Point> out;
        for (;;) {
            const bool horiz = horizontal(p.x, p.y);
            if (horiz) {
                if (interior(p.x, p.y - 1) && state(p.x, p.y - 1) == kAnchor)
                    state(p.x, p.y - 1) = kNone;
                if (interior(p.x, p.y + 1) && state(p.x, p.y + 1) == kAnchor)
                    state(p.x, p.y + 1) = kNone;
                if (sx == 0)
                    sx = best_forward(p, true, -1, sy) >= best_forward(p, true, 1, sy) ? -1 : 1;
            } else {
                if (interior(p.x - 1, p.y) && state(p.x - 1, p.y) == kAnchor)
                    state(p.x - 1, p.y) = kNone;
                if (interior(p.x + 1, p.y) && state(p.x + 1, p.y) == kAnchor)
                    state(p.x + 1, p.y) = kNone;
                if (sy == 0)
                    sy = best_forward(p, false, sx, -1) >= best_forward(p, false, sx, 1) ? -1 : 1;
            }

            const auto nb = forward(p, horiz, sx, sy);
            for (const Point q : nb)
                if (!interior(q.x, q.y))
                    return out;

            Point next = nb[0];
            bool linked = false;
            for (const Point q : nb) {
                if (state(q.x, q.y) != kNone) {
                    next = q;
                    linked = true;
                    break;
                }
            }
            if (!linked) {
                const double m = mag(nb[0].x, nb[0].y);
                const double a = mag(nb[1].x, nb[1].y);
                const double c = mag(nb[2].x, nb[2].y);
                if (a > m)
                    next = a > c ? nb[1] : nb[2];
                else if (c > m)
                    next = nb[2];
            }
            if (state(next.x, next.y) == kEdge || mag(next.x, next.y) < cfg_.gradient_threshold)
                return out;

            state(next.x, next.y) = kEdge;
            out.push_back(next);
            if (next.x != p.x)
                sx = next.x - p.x;
            if (next.y != p.y)
                sy = next.y - p.y;
            p = next;
        }
    }

    // Drops pixels whose predecessor and successor already touch.
    static std::vector<Point> thin(const std::vector<Point>& chain)
    {
        std::vector<Point> out;
        out.reserve(chain.size());
        for (const Point q : chain) {
            while (out.size() >= 2 && adjacent8(out[out.size() - 2], q))
                out.pop_back();
            out.push_back(q);
        }
        return out;
    }

    const GradientField& f_;
    const EdgeConfig& cfg_;
    std::vector<std::uint8_t> state_;
};

} // namespace

double EdgeSegment::closed_gap() const
{
    if (pixels.empty())
        return 0.0;
    const Point a = pixels.front();
    const Point b = pixels.back();
    return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

MagnitudeTail::MagnitudeTail(const GradientField& field)
{
    double max_mag = 0.0;
    for (double m : field.mag)
        max_mag = std::max(max_mag, m);
    log_max_ = max_mag > 1.0 ? std::log(max_mag) : 0.0;
    std::array<std::size_t, kBins> counts{};
    for (double m : field.mag)
        ++counts[static_cast<std::size_t>(bin_of(m))];
    total_ = field.mag.size();
    cumulative_[kBins] = 0;
    for (int b = kBins - 1; b >= 0; --b)
        cumulative_[static_cast<std::size_t>(b)] = cumulative_[static_cast<std::size_t>(b + 1)] + counts[static_cast<std::size_t>(b)];
}

int MagnitudeTail::bin_of(double mu) const
{
    if (mu < 1.0 || log_max_ <= 0.0)
        return 0;
    const int b = 1 + static_cast<int>(std::log(mu) / log_max_ * (kBins - 2));
    return std::clamp(b, 1, kBins - 1);
}

double MagnitudeTail::tail_fraction(double mu) const
{
    if (total_ == 0)
        return 1.0;
    return static_cast<double>(cumulative_[static_cast<std::size_t>(bin_of(mu))]) / static_cast<double>(total_);
}

double segment_nfa_log10(const EdgeSegment& seg, const GradientField& field, const MagnitudeTail& tail, std::size_t n_pixels)
{
    if (seg.pixels.empty())
        return std::numeric_limits<double>::infinity();
    double mu_min = std::numeric_limits<double>::infinity();
    for (const Point p : seg.pixels)
        mu_min = std::min(mu_min, field.magnitude(p.x, p.y));
    const double h = tail.tail_fraction(mu_min);
    if (h <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 2.0 * std::log10(static_cast<double>(n_pixels)) + static_cast<double>(seg.length()) * std::log10(h);
}

bool validate_segment(const EdgeSegment& seg, const GradientField& field, const MagnitudeTail& tail, std::size_t n_pixels)
{
    return segment_nfa_log10(seg, field, tail, n_pixels) <= 0.0;
}

bool validate_segment(const EdgeSegment& seg, const GradientField& field, std::size_t n_pixels)
{
    return validate_segment(seg, field, MagnitudeTail(field), n_pixels);
}

std::vector<EdgeSegment> trace_segments(const GradientField& field, const EdgeConfig& cfg)
{
    if (field.width < 5 || field.height < 5)
        return {};
    Router router(field, cfg);
    return router.route(router.find_anchors());
}

EdgeDetection detect_edges(const GrayImage& img, const EdgeConfig& cfg)
{
    EdgeDetection out;
    out.smoothed = gaussian_smooth(img, cfg.smooth_sigma);
    out.field = compute_gradients(out.smoothed);
    auto raw = trace_segments(out.field, cfg);
    if (!cfg.validate) {
        out.segments = std::move(raw);
        return out;
    }
    const MagnitudeTail tail(out.field);
    const std::size_t n = img.size();
    for (auto& seg : raw)
        if (validate_segment(seg, out.field, tail, n))
            out.segments.push_back(std::move(seg));
    return out;
}

std::vector<EdgeSegment> detect_segments(const GrayImage& img, const EdgeConfig& cfg)
{
    return detect_edges(img, cfg).segments;
}

} // namespace pupil
