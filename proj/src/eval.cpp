#include <cmath>
#include <cstdio>
#include <numbers>

#include "json.hpp"

#include "pupil/synth_eval.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pupil {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fixed6(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    if (std::string(buf) == "-0.000000")
        return "0.000000";
    return buf;
}

// Rounded to 6 decimals so the JSON text does not depend on last-bit noise.
double round6(double v) { return std::round(v * 1e6) / 1e6; }

} // namespace

std::string_view to_string(GtClass c)
{
    switch (c) {
    case GtClass::visible: return "visible";
    case GtClass::occluded: return "occluded";
    case GtClass::absent: return "absent";
    }
    return "absent";
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::TP: return "TP";
    case Outcome::FP: return "FP";
    case Outcome::TN: return "TN";
    case Outcome::FN: return "FN";
    }
    return "FN";
}

Outcome classify(Verdict verdict, bool gt_present, double overlap_error, double eps_threshold)
{
    if (gt_present) {
        if (verdict == Verdict::no_pupil)
            return Outcome::FN;
        return overlap_error <= eps_threshold ? Outcome::TP : Outcome::FP;
    }
    return verdict == Verdict::pupil ? Outcome::FP : Outcome::TN;
}

Outcome classify(const DetectionResult& det, const std::optional<EllipseParams>& gt, double eps_threshold, int width,
    int height)
{
    double err = 1.0;
    if (gt && det.ellipse)
        err = 1.0 - overlap_ratio(*det.ellipse, *gt, width, height);
    return classify(det.verdict, gt.has_value(), err, eps_threshold);
}

double precision(int tp, int fp) { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }
double recall(int tp, int fn) { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }

double f_measure(double p, double r)
{
    if (p + r <= 0.0)
        return 0.0;
    return 2.0 * p * r / (p + r);
}

EvalReport aggregate(const std::vector<EvalRecord>& records, double eps_threshold)
{
    EvalReport rep;
    rep.frames = static_cast<int>(records.size());
    rep.eps_threshold = eps_threshold;
    double or_sum = 0.0;
    int or_count = 0;
    for (const auto& r : records) {
        switch (r.outcome) {
        case Outcome::TP: ++rep.tp; break;
        case Outcome::FP: ++rep.fp; break;
        case Outcome::TN: ++rep.tn; break;
        case Outcome::FN: ++rep.fn; break;
        }
        if (r.gt_class != GtClass::absent && r.verdict == Verdict::pupil) {
            or_sum += r.overlap;
            ++or_count;
        }
    }
    rep.precision = precision(rep.tp, rep.fp);
    rep.recall = recall(rep.tp, rep.fn);
    rep.f_measure = f_measure(rep.precision, rep.recall);
    rep.mean_overlap = or_count ? or_sum / or_count : 0.0;

    for (int k = 0; k <= 20; ++k) {
        const double eps = k / 100.0;
        int tp = 0, fp = 0, fn = 0;
        for (const auto& r : records) {
            const Outcome o = classify(r.verdict, r.gt_class != GtClass::absent, r.overlap_error, eps);
            tp += o == Outcome::TP;
            fp += o == Outcome::FP;
            fn += o == Outcome::FN;
        }
        SweepRow row{eps, precision(tp, fp), recall(tp, fn), 0.0};
        row.f_measure = f_measure(row.precision, row.recall);
        rep.sweep.push_back(row);
    }
    return rep;
}

EvalRecord evaluate_frame(const FrameInput& frame, const Config& cfg, double eps_threshold)
{
    EvalRecord rec;
    rec.frame_id = frame.id;
    rec.gt_class = frame.gt_class;
    DetectionResult det;
    try {
        det = detect(frame.image, cfg);
    } catch (const RoiError&) {
        det.verdict = Verdict::no_pupil;
    }
    rec.verdict = det.verdict;
    rec.path = det.path;
    rec.cost = det.cost;
    rec.total_us = det.timings_us.total();
    const bool gt_present = frame.gt_class != GtClass::absent;
    if (gt_present && frame.ground_truth && det.ellipse)
        rec.overlap = overlap_ratio(*det.ellipse, *frame.ground_truth, frame.image.width(), frame.image.height());
    rec.overlap_error = 1.0 - rec.overlap;
    rec.outcome = classify(rec.verdict, gt_present, rec.overlap_error, eps_threshold);
    return rec;
}

CorpusRun evaluate_frames(const std::vector<FrameInput>& frames, const Config& cfg, double eps_threshold, int jobs)
{
    CorpusRun run;
    run.records.resize(frames.size());
    const long long n = static_cast<long long>(frames.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 0 ? jobs : 1)
    for (long long i = 0; i < n; ++i)
        run.records[static_cast<std::size_t>(i)] = evaluate_frame(frames[static_cast<std::size_t>(i)], cfg, eps_threshold);
    run.report = aggregate(run.records, eps_threshold);
    return run;
}

CorpusRun run_corpus(const std::vector<SceneSpec>& specs, const Config& cfg, double eps_threshold, int jobs)
{
    CorpusRun run;
    run.records.resize(specs.size());
    const long long n = static_cast<long long>(specs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 0 ? jobs : 1)
    for (long long i = 0; i < n; ++i) {
        const auto& spec = specs[static_cast<std::size_t>(i)];
        RenderedScene scene = render(spec);
        FrameInput frame{frame_id(static_cast<std::size_t>(i)), std::move(scene.image), scene.ground_truth,
            ground_truth_class(spec)};
        run.records[static_cast<std::size_t>(i)] = evaluate_frame(frame, cfg, eps_threshold);
    }
    run.report = aggregate(run.records, eps_threshold);
    return run;
}

std::string frame_id(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu", index);
    return buf;
}

std::string records_to_csv(const std::vector<EvalRecord>& records, bool include_timings)
{
    std::string out = "frame_id,gt_class,verdict,or,eps_o,class,path,total_us\n";
    for (const auto& r : records) {
        out += r.frame_id;
        out += ',';
        out += to_string(r.gt_class);
        out += ',';
        out += to_string(r.verdict);
        out += ',' + fixed6(r.overlap) + ',' + fixed6(r.overlap_error) + ',';
        out += to_string(r.outcome);
        out += ',';
        out += to_string(r.path);
        out += ',' + std::to_string(include_timings ? r.total_us : 0) + '\n';
    }
    return out;
}

std::string report_to_json(const EvalReport& rep, const Config& cfg)
{
    ordered_json j;
    j["frames"] = rep.frames;
    j["eps_threshold"] = round6(rep.eps_threshold);
    j["counts"] = {{"TP", rep.tp}, {"FP", rep.fp}, {"TN", rep.tn}, {"FN", rep.fn}};
    j["precision"] = round6(rep.precision);
    j["recall"] = round6(rep.recall);
    j["f_measure"] = round6(rep.f_measure);
    j["mean_or"] = round6(rep.mean_overlap);
    ordered_json sweep = ordered_json::array();
    for (const auto& row : rep.sweep)
        sweep.push_back({{"eps", round6(row.eps)}, {"precision", round6(row.precision)}, {"recall", round6(row.recall)},
            {"f_measure", round6(row.f_measure)}});
    j["sweep"] = std::move(sweep);
    ordered_json config = ordered_json::object();
    for (const auto& [key, value] : cfg.entries())
        config[key] = value;
    j["config"] = std::move(config);
    return j.dump(2) + "\n";
}

// Scene (de)serialisation ---------------------------------------------------

namespace {

ordered_json ellipse_json(const EllipseParams& e)
{
    return {{"cx", e.cx}, {"cy", e.cy}, {"a", e.a}, {"b", e.b}, {"theta_deg", e.theta * 180.0 / std::numbers::pi}};
}

EllipseParams ellipse_from(const nlohmann::json& j)
{
    return EllipseParams{j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("a").get<double>(),
        j.at("b").get<double>(), j.at("theta_deg").get<double>() * std::numbers::pi / 180.0};
}

PointD point_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

} // namespace

std::string scene_to_json(const SceneSpec& s)
{
    ordered_json j;
    j["width"] = s.width;
    j["height"] = s.height;
    j["pupil"] = s.pupil ? ellipse_json(*s.pupil) : ordered_json(nullptr);
    j["iris"] = {{"cx", s.iris_center.x}, {"cy", s.iris_center.y}, {"r", s.iris_radius}};
    j["intensity"] = {{"pupil", s.pupil_intensity}, {"iris", s.iris_intensity}, {"sclera", s.sclera_intensity},
        {"eyelid", s.eyelid_intensity}, {"glint", s.glint_intensity}, {"lash", s.lash_intensity}};
    j["occlusion"] = s.occlusion;
    j["eyelid_tilt"] = s.eyelid_tilt;
    j["eyelid_clearance"] = s.eyelid_clearance ? ordered_json(*s.eyelid_clearance) : ordered_json(nullptr);
    ordered_json glints = ordered_json::array();
    for (const auto& g : s.glints)
        glints.push_back({{"cx", g.center.x}, {"cy", g.center.y}, {"r", g.radius}});
    j["glints"] = std::move(glints);
    ordered_json lashes = ordered_json::array();
    for (const auto& l : s.lashes)
        lashes.push_back({{"root", {l.root.x, l.root.y}}, {"control", {l.control.x, l.control.y}},
            {"tip", {l.tip.x, l.tip.y}}, {"width", l.width}});
    j["lashes"] = std::move(lashes);
    j["noise_sigma"] = s.noise_sigma;
    j["seed"] = s.seed;
    return j.dump(2);
}

SceneSpec scene_from_json(const std::string& text)
{
    SceneSpec s;
    try {
        const auto j = nlohmann::json::parse(text);
        s.width = j.value("width", s.width);
        s.height = j.value("height", s.height);
        if (j.contains("pupil") && !j["pupil"].is_null())
            s.pupil = ellipse_from(j["pupil"]);
        if (j.contains("iris")) {
            const auto& ir = j["iris"];
            s.iris_center = {ir.at("cx").get<double>(), ir.at("cy").get<double>()};
            s.iris_radius = ir.at("r").get<double>();
        }
        if (j.contains("intensity")) {
            const auto& in = j["intensity"];
            s.pupil_intensity = in.value("pupil", s.pupil_intensity);
            s.iris_intensity = in.value("iris", s.iris_intensity);
            s.sclera_intensity = in.value("sclera", s.sclera_intensity);
            s.eyelid_intensity = in.value("eyelid", s.eyelid_intensity);
            s.glint_intensity = in.value("glint", s.glint_intensity);
            s.lash_intensity = in.value("lash", s.lash_intensity);
        }
        s.occlusion = j.value("occlusion", s.occlusion);
        s.eyelid_tilt = j.value("eyelid_tilt", s.eyelid_tilt);
        if (j.contains("eyelid_clearance") && !j["eyelid_clearance"].is_null())
            s.eyelid_clearance = j["eyelid_clearance"].get<double>();
        if (j.contains("glints"))
            for (const auto& g : j["glints"])
                s.glints.push_back({{g.at("cx").get<double>(), g.at("cy").get<double>()}, g.at("r").get<double>()});
        if (j.contains("lashes"))
            for (const auto& l : j["lashes"])
                s.lashes.push_back({point_from(l.at("root")), point_from(l.at("control")), point_from(l.at("tip")),
                    l.value("width", 2.0)});
        s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
        s.seed = j.value("seed", s.seed);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("invalid scene description: ") + e.what());
    }
    s.validate();
    return s;
}

} // namespace pupil
