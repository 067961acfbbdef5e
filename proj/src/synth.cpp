#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pupil/synth_eval.hpp"

namespace pupil {

namespace {

bool in_disk(double x, double y, PointD c, double r)
{
    const double dx = x - c.x;
    const double dy = y - c.y;
    return dx * dx + dy * dy <= r * r;
}

PointD eyelid_normal(double tilt) { return {std::sin(tilt), std::cos(tilt)}; }

std::vector<Point> occluded_rim(const SceneSpec& spec)
{
    if (spec.pupil)
        return boundary_pixels(*spec.pupil, spec.width, spec.height);
    const double r = spec.iris_radius;
    return boundary_pixels(EllipseParams{spec.iris_center.x, spec.iris_center.y, r, r, 0.0}, spec.width, spec.height);
}

void stamp_lash(std::vector<double>& canvas, int w, int h, const Lash& lash, double value)
{
    const double len = std::hypot(lash.control.x - lash.root.x, lash.control.y - lash.root.y)
        + std::hypot(lash.tip.x - lash.control.x, lash.tip.y - lash.control.y);
    const int steps = std::max(2, static_cast<int>(std::ceil(len * 4.0)));
    const double r = 0.5 * lash.width;
    const int ir = static_cast<int>(std::ceil(r));
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const double u = 1.0 - t;
        const double px = u * u * lash.root.x + 2.0 * u * t * lash.control.x + t * t * lash.tip.x;
        const double py = u * u * lash.root.y + 2.0 * u * t * lash.control.y + t * t * lash.tip.y;
        const int x0 = static_cast<int>(std::floor(px));
        const int y0 = static_cast<int>(std::floor(py));
        for (int y = y0 - ir; y <= y0 + ir + 1; ++y)
            for (int x = x0 - ir; x <= x0 + ir + 1; ++x)
                if (x >= 0 && y >= 0 && x < w && y < h && in_disk(x, y, {px, py}, r))
                    canvas[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = value;
    }
}

} // namespace

EyelidPlane eyelid_plane(const SceneSpec& spec)
{
    EyelidPlane plane{eyelid_normal(spec.eyelid_tilt), -std::numeric_limits<double>::infinity()};
    if (spec.occlusion <= 0.0 && !spec.eyelid_clearance)
        return plane;
    const std::vector<Point> rim = occluded_rim(spec);
    if (rim.empty())
        return plane;
    std::vector<double> proj;
    proj.reserve(rim.size());
    for (const Point p : rim)
        proj.push_back(p.x * plane.normal.x + p.y * plane.normal.y);
    std::sort(proj.begin(), proj.end());
    if (spec.occlusion <= 0.0) {
        plane.level = proj.front() - *spec.eyelid_clearance;
        return plane;
    }
    const auto k = static_cast<std::size_t>(std::lround(spec.occlusion * static_cast<double>(proj.size())));
    if (k == 0)
        return plane;
    plane.level = k >= proj.size() ? proj.back() + 1.0 : 0.5 * (proj[k - 1] + proj[k]);
    return plane;
}

namespace {

std::uint8_t clamp_pixel(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace

void SceneSpec::validate() const
{
    if (width < 16 || height < 16)
        throw SpecError("scene must be at least 16x16");
    if (!(iris_radius > 0.0))
        throw SpecError("iris radius must be positive");
    if (!(occlusion >= 0.0 && occlusion <= 1.0))
        throw SpecError("occlusion must lie in [0, 1]");
    if (!(noise_sigma >= 0.0))
        throw SpecError("noise sigma must be non-negative");
    for (const int v : {pupil_intensity, iris_intensity, sclera_intensity, eyelid_intensity, glint_intensity, lash_intensity})
        if (v < 0 || v > 255)
            throw SpecError("intensity out of range");
    if (!(pupil_intensity < iris_intensity && iris_intensity < sclera_intensity))
        throw SpecError("intensities must satisfy pupil < iris < sclera");
    for (const auto& g : glints)
        if (!(g.radius > 0.0))
            throw SpecError("glint radius must be positive");
    for (const auto& l : lashes)
        if (!(l.width > 0.0))
            throw SpecError("lash width must be positive");
    if (eyelid_clearance && !(*eyelid_clearance >= 0.0))
        throw SpecError("eyelid clearance must be non-negative");
    if (pupil) {
        const EllipseParams& e = *pupil;
        if (!(e.a > 0.0 && e.b > 0.0))
            throw SpecError("pupil axes must be positive");
        const double c = std::cos(e.theta);
        const double s = std::sin(e.theta);
        for (int k = 0; k < 360; ++k) {
            const double t = k * std::numbers::pi / 180.0;
            const double x = e.cx + e.a * std::cos(t) * c - e.b * std::sin(t) * s;
            const double y = e.cy + e.a * std::cos(t) * s + e.b * std::sin(t) * c;
            if (!in_disk(x, y, iris_center, iris_radius))
                throw SpecError("pupil must lie inside the iris");
        }
    }
}

std::vector<Point> boundary_pixels(const EllipseParams& e, int width, int height)
{
    const double r = std::max(e.a, e.b) + 2.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(e.cx - r)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(e.cx + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(e.cy - r)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(e.cy + r)));
    const EllipseInterior in(e);
    // interior mask over the box plus a one-pixel margin
    const int mw = x1 - x0 + 3;
    const int mh = y1 - y0 + 3;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(std::max(mw, 0)) * static_cast<std::size_t>(std::max(mh, 0)));
    for (int j = 0; j < mh; ++j)
        for (int i = 0; i < mw; ++i)
            mask[static_cast<std::size_t>(j * mw + i)] = in.contains(x0 - 1 + i, y0 - 1 + j);
    const auto at = [&](int x, int y) { return mask[static_cast<std::size_t>((y - y0 + 1) * mw + (x - x0 + 1))] != 0; };
    std::vector<Point> out;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            if (!at(x, y))
                continue;
            if (!at(x - 1, y) || !at(x + 1, y) || !at(x, y - 1) || !at(x, y + 1))
                out.push_back({x, y});
        }
    return out;
}

RenderedScene render(const SceneSpec& spec)
{
    spec.validate();
    const int w = spec.width;
    const int h = spec.height;
    const EyelidPlane lid = eyelid_plane(spec);

    std::optional<EllipseInterior> pupil;
    if (spec.pupil)
        pupil.emplace(*spec.pupil);
    std::vector<double> canvas(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = spec.sclera_intensity;
            if (in_disk(x, y, spec.iris_center, spec.iris_radius))
                v = spec.iris_intensity;
            if (pupil && pupil->contains(x, y))
                v = spec.pupil_intensity;
            for (const auto& g : spec.glints)
                if (in_disk(x, y, g.center, g.radius))
                    v = spec.glint_intensity;
            if (x * lid.normal.x + y * lid.normal.y < lid.level)
                v = spec.eyelid_intensity;
            canvas[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = v;
        }
    for (const auto& lash : spec.lashes)
        stamp_lash(canvas, w, h, lash, spec.lash_intensity);

    std::vector<std::uint8_t> pixels(canvas.size());
    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (std::size_t i = 0; i < canvas.size(); ++i)
            pixels[i] = clamp_pixel(canvas[i] + noise(rng));
    } else {
        std::transform(canvas.begin(), canvas.end(), pixels.begin(), clamp_pixel);
    }

    RenderedScene out{GrayImage(w, h, std::move(pixels)), std::nullopt};
    if (spec.pupil)
        out.ground_truth = spec.pupil->canonical();
    return out;
}

GtClass ground_truth_class(const SceneSpec& spec)
{
    if (!spec.pupil || spec.occlusion > 0.5)
        return GtClass::absent;
    return spec.occlusion > 0.0 ? GtClass::occluded : GtClass::visible;
}

// Presets ------------------------------------------------------------------

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

SceneSpec base_scene(std::mt19937_64& rng, int width, int height)
{
    SceneSpec s;
    s.width = width;
    s.height = height;
    s.pupil_intensity = uniform_int(rng, 20, 45);
    s.iris_intensity = uniform_int(rng, 95, 120);
    s.sclera_intensity = uniform_int(rng, 130, 160);
    s.eyelid_intensity = uniform_int(rng, 135, 165);
    s.noise_sigma = 2.0;
    s.seed = rng();
    return s;
}

void place_eye(SceneSpec& s, std::mt19937_64& rng)
{
    const double a = uniform(rng, 45.0, 80.0);
    const double b = a * uniform(rng, 0.8, 1.0);
    s.iris_radius = a * uniform(rng, 2.6, 3.2);
    // the pupil stays well inside the frame; the iris may run off it
    const double margin = a + 40.0;
    const PointD pc{uniform(rng, margin, s.width - margin), uniform(rng, margin, s.height - margin)};
    s.pupil = EllipseParams{pc.x, pc.y, a, b, uniform(rng, 0.0, std::numbers::pi)}.canonical();
    const double slack = s.iris_radius - a - 6.0;
    const double off = uniform(rng, 0.0, 0.25 * slack);
    const double dir = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    s.iris_center = {pc.x + off * std::cos(dir), pc.y + off * std::sin(dir)};

    const int count = uniform_int(rng, 1, 2);
    for (int k = 0; k < count; ++k) {
        const double r = uniform(rng, 2.0, 4.0);
        const double dist = uniform(rng, a * 1.3 + r, s.iris_radius - r - 4.0);
        const double ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        s.glints.push_back({{pc.x + dist * std::cos(ang), pc.y + dist * std::sin(ang)}, r});
    }
    s.eyelid_tilt = uniform(rng, -0.15, 0.15);
    s.lash_intensity = uniform_int(rng, 25, 55);
}

// Lashes hang from the lid line into the eye, fanned across the pupil width.
void add_lashes(SceneSpec& s, std::mt19937_64& rng, PointD center, double a)
{
    const EyelidPlane lid = eyelid_plane(s);
    if (!std::isfinite(lid.level))
        return;
    const PointD n = lid.normal;
    const PointD t{n.y, -n.x};
    const double along = lid.level - (center.x * n.x + center.y * n.y);
    const PointD base{center.x + along * n.x, center.y + along * n.y};
    const int count = uniform_int(rng, 8, 14);
    for (int k = 0; k < count; ++k) {
        const double offset = uniform(rng, -1.6 * a, 1.6 * a);
        const double len = uniform(rng, 0.3 * a, 0.7 * a);
        const double fan = 0.5 * offset / (1.6 * a) + uniform(rng, -0.2, 0.2);
        const PointD d{n.x * std::cos(fan) + t.x * std::sin(fan), n.y * std::cos(fan) + t.y * std::sin(fan)};
        const double curl = uniform(rng, -0.1, 0.1) * len;
        Lash lash;
        lash.root = {base.x + offset * t.x - 2.0 * n.x, base.y + offset * t.y - 2.0 * n.y};
        lash.tip = {lash.root.x + len * d.x, lash.root.y + len * d.y};
        lash.control = {lash.root.x + 0.5 * len * d.x - curl * d.y, lash.root.y + 0.5 * len * d.y + curl * d.x};
        lash.width = uniform(rng, 1.0, 2.0);
        s.lashes.push_back(lash);
    }
}

} // namespace

SceneSpec random_visible_scene(std::uint64_t seed, int width, int height)
{
    std::mt19937_64 rng(seed);
    SceneSpec s = base_scene(rng, width, height);
    place_eye(s, rng);
    const double a = s.pupil->a;
    s.eyelid_clearance = uniform(rng, 0.9 * a, 1.5 * a);
    add_lashes(s, rng, {s.pupil->cx, s.pupil->cy}, a);
    return s;
}

SceneSpec random_occluded_scene(std::uint64_t seed, double min_occlusion, double max_occlusion, int width, int height)
{
    std::mt19937_64 rng(seed);
    SceneSpec s = base_scene(rng, width, height);
    place_eye(s, rng);
    s.occlusion = uniform(rng, min_occlusion, max_occlusion);
    add_lashes(s, rng, {s.pupil->cx, s.pupil->cy}, s.pupil->a);
    return s;
}

SceneSpec random_blink_scene(std::uint64_t seed, int width, int height)
{
    std::mt19937_64 rng(seed);
    SceneSpec s = base_scene(rng, width, height);
    place_eye(s, rng);
    const PointD center{s.pupil->cx, s.pupil->cy};
    const double a = s.pupil->a;
    s.pupil.reset();
    s.glints.clear();
    s.occlusion = uniform(rng, 0.92, 1.0);
    add_lashes(s, rng, center, a);
    return s;
}

std::vector<SceneSpec> acceptance_corpus(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<SceneSpec> out;
    out.reserve(200);
    for (int i = 0; i < 114; ++i)
        out.push_back(random_visible_scene(rng()));
    for (int i = 0; i < 44; ++i)
        out.push_back(random_occluded_scene(rng(), 0.15, 0.45));
    for (int i = 0; i < 42; ++i)
        out.push_back(random_blink_scene(rng()));
    return out;
}

} // namespace pupil
