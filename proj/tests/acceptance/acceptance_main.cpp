// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--allow-fail N[,N...]]
//
// Exit status is non-zero when a criterion fails that is not listed in
// --allow-fail. Allowed failures are still reported as FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oracles.hpp"

#include "pupil/candidate_selection.hpp"
#include "pupil/segment_analysis.hpp"
#include "pupil/synth_eval.hpp"

using namespace pupil;
using clock_type = std::chrono::steady_clock;
using std::numbers::pi;

namespace {

struct Result {
    bool pass = true;
    std::string detail;
};

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double angle_diff_mod_pi(double a, double b)
{
    double d = std::fmod(std::abs(a - b), pi);
    return std::min(d, pi - d);
}

// 1 -------------------------------------------------------------------------
Result numerics_oracles()
{
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_perimeter = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double a = 5.0 + 195.0 * u(rng);
        const double b = a / (1.0 + 9.0 * u(rng));
        const double got = perimeter(EllipseParams{0, 0, a, b, 0});
        const double ref = oracle::perimeter(a, b);
        worst_perimeter = std::max(worst_perimeter, std::abs(got - ref) / ref);
    }

    const oracle::BoundarySampler sampler;
    double worst_distance = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double a = 10.0 + 90.0 * u(rng);
        const EllipseParams e{200.0 * u(rng) - 100.0, 200.0 * u(rng) - 100.0, a, a * (0.1 + 0.9 * u(rng)), pi * u(rng)};
        const double r = 2.0 * a * u(rng), phi = 2.0 * pi * u(rng);
        const PointD q{e.cx + r * std::cos(phi), e.cy + r * std::sin(phi)};
        worst_distance = std::max(worst_distance, std::abs(point_ellipse_distance(e, q) - sampler.distance(e, q)));
    }
    const double secs = seconds_since(t0);
    return {worst_perimeter < 1e-4 && worst_distance < 1e-3 && secs < 5.0,
        fmt("perimeter rel err %.2e (<1e-4), distance err %.2e px (<1e-3), %.2f s (<5)", worst_perimeter, worst_distance, secs)};
}

// 2 -------------------------------------------------------------------------
Result fit_recovery()
{
    const EllipseParams truth{320, 240, 100, 60, pi / 6};
    const auto clean = oracle::sample_ellipse(truth, 100);
    const EllipseParams f = fit_ellipse(clean).ellipse.canonical();
    const double exact_err = std::max({std::abs(f.cx - truth.cx), std::abs(f.cy - truth.cy), std::abs(f.a - truth.a),
        std::abs(f.b - truth.b), angle_diff_mod_pi(f.theta, truth.theta)});

    int pass = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::normal_distribution<double> noise(0.0, 0.5);
        auto pts = clean;
        for (auto& p : pts) {
            p.x += noise(rng);
            p.y += noise(rng);
        }
        const EllipseParams g = fit_ellipse(pts).ellipse.canonical();
        const bool ok = std::hypot(g.cx - truth.cx, g.cy - truth.cy) < 0.5 && std::abs(g.a - truth.a) < 0.01 * truth.a
            && std::abs(g.b - truth.b) < 0.01 * truth.b;
        pass += ok;
    }
    return {exact_err <= 1e-6 && pass >= 95, fmt("noiseless max err %.2e (<=1e-6), noisy seeds passing %d/100 (>=95)", exact_err, pass)};
}

// 3 -------------------------------------------------------------------------
Result entropy_suite()
{
    std::vector<std::uint8_t> px(120 * 60, 40);
    for (int y = 0; y < 60; ++y)
        for (int x = 60; x < 120; ++x)
            px[static_cast<std::size_t>(y * 120 + x)] = 200;
    const EdgeDetection line = detect_edges(GrayImage(120, 60, std::move(px)), EdgeConfig{});
    double straight = -1.0;
    if (line.segments.size() == 1)
        straight = gradient_entropy(line.segments[0], line.field).entropy;

    const std::array<int, 8> uniform{7, 7, 7, 7, 7, 7, 7, 7};
    const double flat = histogram_entropy(uniform);

    double worst_circle = 10.0;
    for (int r = 30; r <= 120; r += 10) {
        const int size = 2 * r + 40;
        const EdgeDetection det = detect_edges(
            oracle::disk_image(size, size, EllipseParams{size / 2.0, size / 2.0, double(r), double(r), 0}, 30, 150), EdgeConfig{});
        double best = 0.0;
        for (const auto& seg : det.segments)
            if (seg.closed_gap() <= 15.0)
                best = std::max(best, gradient_entropy(seg, det.field).entropy);
        worst_circle = std::min(worst_circle, best);
    }
    return {straight == 0.0 && flat == 3.0 && worst_circle >= 2.8,
        fmt("straight %.3f (=0), uniform %.3f (=3), min circle r=30..120 %.3f (>=2.8)", straight, flat, worst_circle)};
}

// 4 and 5 share one corpus run ----------------------------------------------
struct CorpusStats {
    CorpusRun run;
    double seconds = 0.0;
};

const CorpusStats& corpus()
{
    static const CorpusStats stats = [] {
        const Config cfg;
        const auto t0 = clock_type::now();
        CorpusStats s{run_corpus(acceptance_corpus(cfg.seed), cfg, 0.2, 1), 0.0};
        s.seconds = seconds_since(t0);
        return s;
    }();
    return stats;
}

Result end_to_end()
{
    const auto& c = corpus();
    int clean = 0, clean_tp = 0, occl = 0, occl_tp = 0, blink = 0, blink_tn = 0, detected = 0;
    double or_sum = 0.0;
    for (const auto& r : c.run.records) {
        switch (r.gt_class) {
        case GtClass::visible:
            ++clean;
            clean_tp += r.outcome == pupil::Outcome::TP;
            if (r.verdict == Verdict::pupil) {
                ++detected;
                or_sum += r.overlap;
            }
            break;
        case GtClass::occluded:
            ++occl;
            occl_tp += r.outcome == pupil::Outcome::TP;
            break;
        case GtClass::absent:
            ++blink;
            blink_tn += r.outcome == pupil::Outcome::TN;
            break;
        }
    }
    const double mean_or = detected ? or_sum / detected : 0.0;
    const double f_clean = clean ? double(clean_tp) / clean : 0.0;
    const double f_occl = occl ? double(occl_tp) / occl : 0.0;
    const double f_blink = blink ? double(blink_tn) / blink : 0.0;
    return {mean_or >= 0.95 && f_clean >= 0.95 && f_occl >= 0.80 && f_blink >= 0.90 && c.seconds < 60.0,
        fmt("frames %d/%d/%d, mean OR %.4f (>=0.95), clean TP %.3f (>=0.95), occluded TP %.3f (>=0.80), blink TN %.3f (>=0.90), "
            "%.1f s (<60)",
            clean, occl, blink, mean_or, f_clean, f_occl, f_blink, c.seconds)};
}

Result adaptiveness()
{
    const auto& c = corpus();
    int clean = 0, clean_fast = 0, occl = 0, occl_fast = 0;
    double t_clean = 0.0, t_occl = 0.0;
    for (const auto& r : c.run.records) {
        if (r.gt_class == GtClass::visible) {
            ++clean;
            clean_fast += r.path == DetectionPath::fast;
            t_clean += static_cast<double>(r.total_us);
        } else if (r.gt_class == GtClass::occluded) {
            ++occl;
            occl_fast += r.path == DetectionPath::fast;
            t_occl += static_cast<double>(r.total_us);
        }
    }
    const double share = clean ? double(clean_fast) / clean : 0.0;
    const double mean_clean = clean ? t_clean / clean : 0.0;
    const double mean_occl = occl ? t_occl / occl : 0.0;
    const double ratio = mean_occl > 0.0 ? mean_clean / mean_occl : 1e9;
    return {share >= 0.90 && occl_fast == 0 && ratio <= 0.75,
        fmt("fast path clean %.3f (>=0.90), occluded fast %d (=0), mean time clean %.0f us / occluded %.0f us = %.3f (<=0.75)", share,
            occl_fast, mean_clean, mean_occl, ratio)};
}

// 6 -------------------------------------------------------------------------
Result performance()
{
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    std::vector<double> ms;
    for (std::uint64_t seed = 0; seed < 21; ++seed) {
        const GrayImage img = render(random_visible_scene(7000 + seed)).image;
        const auto t0 = clock_type::now();
        const DetectionResult det = detect(img, Config{});
        ms.push_back(1000.0 * seconds_since(t0));
        (void)det;
    }
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    std::nth_element(ms.begin(), ms.begin() + 10, ms.end());
    return {ms[10] < 50.0, fmt("median detect 1280x720 %.2f ms single-threaded (<50)", ms[10])};
}

// 7 -------------------------------------------------------------------------
Result cost_properties()
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
        const double eps = 0.01 + 3.0 * u(rng), e = 0.9 * u(rng), phi = 0.05 + 0.9 * u(rng), d = 1e-3 + 0.05 * u(rng);
        const double base = candidate_cost(eps, e, phi);
        violations += !(candidate_cost(eps + d, e, phi) > base);
        violations += !(candidate_cost(eps, e + d, phi) > base);
        violations += !(candidate_cost(eps, e, phi + d) < base);
    }
    int argmin_changes = 0;
    for (int k = 0; k < 200; ++k) {
        std::vector<PupilCandidate> c(9);
        for (auto& x : c) {
            x.cost = 100.0 * u(rng);
            x.phi = u(rng);
        }
        auto scaled = c;
        const double s = 0.01 + 100.0 * u(rng);
        for (auto& x : scaled)
            x.cost *= s;
        argmin_changes += *select_pupil(c, 1e12).best != *select_pupil(scaled, 1e12).best;
    }
    const std::size_t subsets = arc_subsets(3).size();
    return {violations == 0 && argmin_changes == 0 && subsets == 7,
        fmt("monotonicity violations %d/3000, argmin changes under scaling %d/200, n=3 subsets %zu (=7)", violations, argmin_changes,
            subsets)};
}

// 8 -------------------------------------------------------------------------
Result metric_identities()
{
    int complement = 0;
    for (const auto& r : corpus().run.records)
        complement += r.overlap_error != 1.0 - r.overlap;

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int or_mismatch = 0;
    for (int k = 0; k < 20; ++k) {
        const EllipseParams a{60 + 80 * u(rng), 60 + 80 * u(rng), 20 + 30 * u(rng), 15 + 20 * u(rng), pi * u(rng)};
        const EllipseParams b{a.cx + 10 * u(rng) - 5, a.cy + 10 * u(rng) - 5, a.a * (0.8 + 0.4 * u(rng)), a.b * (0.8 + 0.4 * u(rng)),
            a.theta + 0.4 * u(rng)};
        or_mismatch += std::abs(overlap_ratio(a, b, 200, 200) - oracle::overlap(a, b, 200, 200)) > 1e-12;
    }

    const double f = f_measure(0.8, 1.0);

    int partition = 0;
    for (int k = 0; k < 10000; ++k) {
        const Verdict v = u(rng) < 0.5 ? Verdict::pupil : Verdict::no_pupil;
        const bool present = u(rng) < 0.6;
        const double err = u(rng), eps = 0.3 * u(rng);
        const pupil::Outcome o = classify(v, present, err, eps);
        const int hits = (o == pupil::Outcome::TP) + (o == pupil::Outcome::FP) + (o == pupil::Outcome::TN) + (o == pupil::Outcome::FN);
        pupil::Outcome expected;
        if (present)
            expected = v == Verdict::no_pupil ? pupil::Outcome::FN : (err <= eps ? pupil::Outcome::TP : pupil::Outcome::FP);
        else
            expected = v == Verdict::pupil ? pupil::Outcome::FP : pupil::Outcome::TN;
        partition += hits != 1 || o != expected;
    }
    return {complement == 0 && or_mismatch == 0 && std::abs(f - 0.8889) < 5e-5 && partition == 0,
        fmt("OR/eps complement mismatches %d, OR vs oracle mismatches %d/20, F(0.8,1.0)=%.4f (0.8889), partition errors %d/10000",
            complement, or_mismatch, f, partition)};
}

// 9 -------------------------------------------------------------------------
Result determinism()
{
    const Config cfg;
    const std::vector<SceneSpec> specs{random_visible_scene(901), random_occluded_scene(902, 0.2, 0.4), random_blink_scene(903),
        random_visible_scene(904)};
    int detect_diff = 0;
    for (const auto& s : specs) {
        const GrayImage img = render(s).image;
        detect_diff += to_json(detect(img, cfg), false) != to_json(detect(img, cfg), false);
    }
    const CorpusRun a = run_corpus(specs, cfg, 0.2, 1);
    const CorpusRun b = run_corpus(specs, cfg, 0.2, 1);
    const CorpusRun c = run_corpus(specs, cfg, 0.2, 2);
    const bool csv_same = records_to_csv(a.records, false) == records_to_csv(b.records, false)
        && records_to_csv(a.records, false) == records_to_csv(c.records, false);
    const bool json_same = report_to_json(a.report, cfg) == report_to_json(b.report, cfg)
        && report_to_json(a.report, cfg) == report_to_json(c.report, cfg);
    return {detect_diff == 0 && csv_same && json_same,
        fmt("detect JSON differences %d/4, eval CSV identical %s, report JSON identical %s", detect_diff, csv_same ? "yes" : "no",
            json_same ? "yes" : "no")};
}

std::set<int> parse_allowed(int argc, char** argv)
{
    std::set<int> allowed;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--allow-fail") == 0) {
            std::stringstream ss(argv[i + 1]);
            std::string item;
            while (std::getline(ss, item, ','))
                allowed.insert(std::stoi(item));
        }
    return allowed;
}

} // namespace

int main(int argc, char** argv)
{
    const std::set<int> allowed = parse_allowed(argc, argv);
    const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
        {"numerics oracles", numerics_oracles},
        {"fit recovery", fit_recovery},
        {"entropy suite", entropy_suite},
        {"end-to-end corpus", end_to_end},
        {"adaptiveness", adaptiveness},
        {"performance envelope", performance},
        {"cost properties", cost_properties},
        {"metric identities", metric_identities},
        {"determinism", determinism},
    };
    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Result o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const bool tolerated = !o.pass && allowed.count(id);
        std::printf("%s %d %-21s %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(),
            tolerated ? "  [allowed]" : "");
        std::fflush(stdout);
        unexpected += !o.pass && !tolerated;
    }
    return unexpected == 0 ? 0 : 1;
}
