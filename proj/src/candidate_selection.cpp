#include "pupil/candidate_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pupil {

namespace {

std::optional<PupilCandidate> evaluate_subset(std::span<const EllipticalArc> arcs, std::span<const int> ids,
    std::uint32_t mask, const CandidateConfig& cfg)
{
    PupilCandidate cand;
    cand.subset = mask;
    std::vector<PointD> pts;
    int arc_pixels = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!(mask & (1u << k)))
            continue;
        const auto& arc = arcs[static_cast<std::size_t>(ids[k])];
        cand.arc_ids.push_back(ids[k]);
        arc_pixels += arc.span_length();
        for (const Point p : arc.pixels)
            pts.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    }
    try {
        cand.fit = fit_ellipse(pts);
    } catch (const FitError&) {
        return std::nullopt;
    }
    if (!(cand.fit.rmse <= cfg.rmse))
        return std::nullopt;
    if (!(cand.fit.ellipse.b >= cfg.min_axis_ratio * cand.fit.ellipse.a))
        return std::nullopt;
    cand.eccentricity = eccentricity(cand.fit.ellipse);
    cand.phi = arc_pixels / perimeter(cand.fit.ellipse);
    cand.cost = candidate_cost(cand.fit.rmse, cand.eccentricity, cand.phi);
    return cand;
}

} // namespace

double candidate_cost(double rmse, double eccentricity, double phi)
{
    return rmse * rmse * std::pow(std::numbers::pi, eccentricity) / (phi * phi);
}

std::vector<int> capped_arc_ids(std::span<const EllipticalArc> arcs, int max_arcs)
{
    std::vector<int> ids(arcs.size());
    std::iota(ids.begin(), ids.end(), 0);
    if (static_cast<int>(ids.size()) > max_arcs) {
        std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
            return arcs[static_cast<std::size_t>(a)].span_length() > arcs[static_cast<std::size_t>(b)].span_length();
        });
        ids.resize(static_cast<std::size_t>(max_arcs));
        std::sort(ids.begin(), ids.end());
    }
    return ids;
}

std::vector<std::uint32_t> arc_subsets(int n)
{
    if (n <= 0)
        return {};
    if (n > 31)
        throw InvalidArgument("too many arcs for subset enumeration");
    const std::uint32_t count = (1u << n) - 1u;
    std::vector<std::uint32_t> out(count);
    std::iota(out.begin(), out.end(), 1u);
    return out;
}

std::vector<PupilCandidate> generate_candidates(std::span<const EllipticalArc> arcs, const CandidateConfig& cfg)
{
    const std::vector<int> ids = capped_arc_ids(arcs, cfg.max_arcs);
    const std::vector<std::uint32_t> masks = arc_subsets(static_cast<int>(ids.size()));
    std::vector<std::optional<PupilCandidate>> slots(masks.size());
    const long long count = static_cast<long long>(masks.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < count; ++i)
        slots[static_cast<std::size_t>(i)] = evaluate_subset(arcs, ids, masks[static_cast<std::size_t>(i)], cfg);

    std::vector<PupilCandidate> out;
    for (auto& s : slots)
        if (s)
            out.push_back(std::move(*s));
    return out;
}

namespace serial {

std::vector<PupilCandidate> generate_candidates(std::span<const EllipticalArc> arcs, const CandidateConfig& cfg)
{
    const std::vector<int> ids = capped_arc_ids(arcs, cfg.max_arcs);
    std::vector<PupilCandidate> out;
    for (const std::uint32_t mask : arc_subsets(static_cast<int>(ids.size())))
        if (auto c = evaluate_subset(arcs, ids, mask, cfg))
            out.push_back(std::move(*c));
    return out;
}

} // namespace serial

Selection select_pupil(std::span<const PupilCandidate> candidates, double threshold)
{
    Selection sel;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!sel.best) {
            sel.best = i;
            continue;
        }
        const auto& c = candidates[i];
        const auto& b = candidates[*sel.best];
        const bool better = c.cost < b.cost
            || (c.cost == b.cost && (c.phi > b.phi || (c.phi == b.phi && c.fit.rmse < b.fit.rmse)));
        if (better)
            sel.best = i;
    }
    if (sel.best) {
        sel.min_cost = candidates[*sel.best].cost;
        if (*sel.min_cost <= threshold)
            sel.verdict = Verdict::pupil;
    }
    return sel;
}

std::string_view to_string(Verdict v) { return v == Verdict::pupil ? "pupil" : "no_pupil"; }
std::string_view to_string(DetectionPath p) { return p == DetectionPath::fast ? "fast" : "full"; }

} // namespace pupil
