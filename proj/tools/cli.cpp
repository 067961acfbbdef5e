#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pupil/candidate_selection.hpp"
#include "pupil/config.hpp"
#include "pupil/overlay.hpp"
#include "pupil/synth_eval.hpp"

namespace pupil::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    bool no_timings = false;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", o.overrides, "override one setting, key=value (repeatable)");
    cmd->add_option("--jobs", o.jobs, "worker threads for batch work")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "corpus seed");
    cmd->add_flag("--no-timings", o.no_timings, "write zero timings for byte-stable output");
}

Config effective_config(const CommonOptions& o)
{
    Config cfg = o.config_path.empty() ? Config{} : load_config_file(o.config_path);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed)
        cfg.seed = *o.seed;
    cfg.validate();
    return cfg;
}

void write_atomic(const fs::path& path, const void* data, std::size_t size)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error("cannot write " + tmp.string());
        f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!f)
            throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_atomic(const fs::path& path, const std::string& text) { write_atomic(path, text.data(), text.size()); }
void write_atomic(const fs::path& path, const std::vector<std::uint8_t>& bytes) { write_atomic(path, bytes.data(), bytes.size()); }

std::string read_text(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ordered_json ellipse_json(const EllipseParams& e)
{
    return {{"cx", e.cx}, {"cy", e.cy}, {"a", e.a}, {"b", e.b}, {"theta_deg", e.theta * 180.0 / std::numbers::pi}};
}

GtClass gt_class_from(const std::string& s)
{
    if (s == "visible")
        return GtClass::visible;
    if (s == "occluded")
        return GtClass::occluded;
    if (s == "absent")
        return GtClass::absent;
    throw ParseError("unknown gt_class '" + s + "'");
}

// detect --------------------------------------------------------------------

struct DetectOptions {
    CommonOptions common;
    std::string image;
    std::string overlay;
    std::string trace;
};

int cmd_detect(const DetectOptions& o, std::ostream& out)
{
    const Config cfg = effective_config(o.common);
    const GrayImage img = load_pgm_file(o.image);
    DetectionTrace trace;
    const bool want_trace = !o.overlay.empty() || !o.trace.empty();
    const DetectionResult det = detect(img, cfg, want_trace ? &trace : nullptr);
    out << to_json(det, !o.common.no_timings) << '\n';
    if (!o.overlay.empty())
        write_atomic(o.overlay, encode_ppm(render_overlay(img, det, &trace)));
    if (!o.trace.empty())
        write_atomic(o.trace, trace_to_json(trace));
    return det.verdict == Verdict::pupil ? 0 : 1;
}

// synth ---------------------------------------------------------------------

struct SynthOptions {
    CommonOptions common;
    std::string spec;
    std::string preset;
    std::string out_dir;
    int count = 10;
};

std::vector<SceneSpec> synth_specs(const SynthOptions& o, std::uint64_t seed)
{
    if (!o.spec.empty())
        return {scene_from_json(read_text(o.spec))};
    if (o.preset == "acceptance")
        return acceptance_corpus(seed);
    std::mt19937_64 rng(seed);
    std::vector<SceneSpec> specs;
    for (int i = 0; i < o.count; ++i) {
        const std::uint64_t s = rng();
        if (o.preset == "visible")
            specs.push_back(random_visible_scene(s));
        else if (o.preset == "occluded")
            specs.push_back(random_occluded_scene(s, 0.15, 0.45));
        else
            specs.push_back(random_blink_scene(s));
    }
    return specs;
}

int cmd_synth(const SynthOptions& o, std::ostream& out)
{
    const Config cfg = effective_config(o.common);
    const std::vector<SceneSpec> specs = synth_specs(o, cfg.seed);
    fs::create_directories(o.out_dir);
    std::vector<ordered_json> entries(specs.size());
    std::string failure;
    const long long n = static_cast<long long>(specs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(o.common.jobs)
    for (long long i = 0; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        try {
            const RenderedScene scene = render(specs[k]);
            const std::string id = frame_id(k);
            write_atomic(fs::path(o.out_dir) / (id + ".pgm"), encode_pgm(scene.image));
            ordered_json e;
            e["id"] = id;
            e["file"] = id + ".pgm";
            e["gt_class"] = to_string(ground_truth_class(specs[k]));
            e["ground_truth"] = scene.ground_truth ? ellipse_json(*scene.ground_truth) : ordered_json(nullptr);
            e["scene"] = ordered_json::parse(scene_to_json(specs[k]));
            entries[k] = std::move(e);
        } catch (const std::exception& ex) {
#pragma omp critical
            if (failure.empty())
                failure = ex.what();
        }
    }
    if (!failure.empty())
        throw Error(failure);
    ordered_json manifest;
    manifest["seed"] = cfg.seed;
    manifest["frames"] = entries;
    write_atomic(fs::path(o.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << specs.size() << " frames to " << o.out_dir << '\n';
    return 0;
}

// eval ----------------------------------------------------------------------

struct EvalOptions {
    CommonOptions common;
    std::string frames_dir;
    std::string manifest;
    std::string out_dir;
    std::string overlay_dir;
    double threshold = 0.2;
};

std::vector<FrameInput> load_frames(const fs::path& dir, const fs::path& manifest_path)
{
    if (!fs::is_directory(dir))
        throw Error("not a directory: " + dir.string());
    if (!fs::exists(manifest_path))
        throw Error("no manifest at " + manifest_path.string());
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid manifest: ") + e.what());
    }
    std::vector<FrameInput> frames;
    try {
        for (const auto& e : manifest.at("frames")) {
            FrameInput f;
            f.id = e.at("id").get<std::string>();
            f.image = load_pgm_file((dir / e.at("file").get<std::string>()).string());
            f.gt_class = gt_class_from(e.at("gt_class").get<std::string>());
            const auto& gt = e.at("ground_truth");
            if (!gt.is_null())
                f.ground_truth = EllipseParams{gt.at("cx").get<double>(), gt.at("cy").get<double>(), gt.at("a").get<double>(),
                    gt.at("b").get<double>(), gt.at("theta_deg").get<double>() * std::numbers::pi / 180.0};
            frames.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid manifest: ") + e.what());
    }
    if (frames.empty())
        throw Error("no frames in " + dir.string());
    return frames;
}

int cmd_eval(const EvalOptions& o, std::ostream& out)
{
    const Config cfg = effective_config(o.common);
    if (!(o.threshold >= 0.0 && o.threshold <= 1.0))
        throw InvalidArgument("--threshold must lie in [0, 1]");
    const fs::path dir(o.frames_dir);
    const fs::path manifest = o.manifest.empty() ? dir / "manifest.json" : fs::path(o.manifest);
    const std::vector<FrameInput> frames = load_frames(dir, manifest);
    const CorpusRun run = evaluate_frames(frames, cfg, o.threshold, o.common.jobs);

    const fs::path out_dir = o.out_dir.empty() ? dir : fs::path(o.out_dir);
    fs::create_directories(out_dir);
    write_atomic(out_dir / "records.csv", records_to_csv(run.records, !o.common.no_timings));
    write_atomic(out_dir / "report.json", report_to_json(run.report, cfg));
    if (!o.overlay_dir.empty()) {
        fs::create_directories(o.overlay_dir);
        for (const auto& f : frames) {
            DetectionTrace trace;
            DetectionResult det;
            try {
                det = detect(f.image, cfg, &trace);
            } catch (const RoiError&) {
            }
            write_atomic(fs::path(o.overlay_dir) / (f.id + ".ppm"), encode_ppm(render_overlay(f.image, det, &trace)));
        }
    }
    const EvalReport& r = run.report;
    char line[256];
    std::snprintf(line, sizeof line, "frames %d  TP %d  FP %d  TN %d  FN %d  P %.4f  R %.4f  F %.4f  mean OR %.4f\n", r.frames,
        r.tp, r.fp, r.tn, r.fn, r.precision, r.recall, r.f_measure, r.mean_overlap);
    out << line;
    return 0;
}

// bench ---------------------------------------------------------------------

struct BenchOptions {
    CommonOptions common;
    std::string frames_dir;
    int repetitions = 5;
    std::string json_path;
};

std::int64_t median(std::vector<std::int64_t> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

constexpr const char* kStages[] = {"roi", "edges", "entropy", "corners", "arcs", "selection", "total"};

std::array<std::int64_t, 7> stage_values(const StageTimings& t)
{
    return {t.roi, t.edges, t.entropy, t.corners, t.arcs, t.selection, t.total()};
}

int cmd_bench(const BenchOptions& o, std::ostream& out)
{
    const Config cfg = effective_config(o.common);
    const fs::path dir(o.frames_dir);
    if (!fs::is_directory(dir))
        throw Error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".pgm")
            files.push_back(e.path());
    if (files.empty())
        throw Error("no .pgm frames in " + dir.string());
    std::sort(files.begin(), files.end());

    // path -> per-frame medians per stage
    std::map<std::string, std::vector<std::array<std::int64_t, 7>>> groups;
    for (const auto& file : files) {
        const GrayImage img = load_pgm_file(file.string());
        std::array<std::vector<std::int64_t>, 7> samples;
        std::string path = "error";
        for (int rep = 0; rep < o.repetitions; ++rep) {
            try {
                const DetectionResult det = detect(img, cfg);
                path = std::string(to_string(det.path));
                const auto v = stage_values(det.timings_us);
                for (std::size_t s = 0; s < v.size(); ++s)
                    samples[s].push_back(v[s]);
            } catch (const RoiError&) {
                break;
            }
        }
        if (samples[0].empty())
            continue;
        std::array<std::int64_t, 7> med{};
        for (std::size_t s = 0; s < med.size(); ++s)
            med[s] = median(samples[s]);
        groups[path].push_back(med);
        groups["all"].push_back(med);
    }
    if (groups.empty())
        throw Error("no frame produced an ROI");

    ordered_json j;
    j["repetitions"] = o.repetitions;
    ordered_json rows = ordered_json::array();
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %7s", "path", "frames");
    out << line;
    for (const char* s : kStages) {
        std::snprintf(line, sizeof line, " %10s", s);
        out << line;
    }
    out << "   (mean of per-frame medians, us)\n";
    for (const char* key : {"fast", "full", "all"}) {
        const auto it = groups.find(key);
        if (it == groups.end())
            continue;
        const auto& meds = it->second;
        ordered_json row;
        row["path"] = key;
        row["frames"] = meds.size();
        std::snprintf(line, sizeof line, "%-6s %7zu", key, meds.size());
        out << line;
        for (std::size_t s = 0; s < 7; ++s) {
            double sum = 0.0;
            for (const auto& m : meds)
                sum += static_cast<double>(m[s]);
            const double mean = sum / static_cast<double>(meds.size());
            row[kStages[s]] = std::round(mean * 10.0) / 10.0;
            std::snprintf(line, sizeof line, " %10.1f", mean);
            out << line;
        }
        out << '\n';
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    ordered_json config = ordered_json::object();
    for (const auto& [k, v] : cfg.entries())
        config[k] = v;
    j["config"] = std::move(config);
    if (!o.json_path.empty())
        write_atomic(o.json_path, j.dump(2) + "\n");
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Pupil boundary detection"};
    app.require_subcommand(1);

    DetectOptions det;
    auto* detect_cmd = app.add_subcommand("detect", "detect the pupil in one PGM frame");
    detect_cmd->add_option("image", det.image, "input PGM")->required();
    detect_cmd->add_option("--overlay", det.overlay, "write a PPM overlay");
    detect_cmd->add_option("--trace", det.trace, "write intermediate products as JSON");
    add_common(detect_cmd, det.common);

    SynthOptions syn;
    auto* synth_cmd = app.add_subcommand("synth", "render synthetic frames and a ground-truth manifest");
    auto* spec_opt = synth_cmd->add_option("--spec", syn.spec, "scene description JSON");
    auto* preset_opt = synth_cmd->add_option("--preset", syn.preset, "acceptance | visible | occluded | blink")
                           ->check(CLI::IsMember({"acceptance", "visible", "occluded", "blink"}));
    spec_opt->excludes(preset_opt);
    synth_cmd->add_option("--count", syn.count, "frames for the visible/occluded/blink presets")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--out", syn.out_dir, "output directory")->required();
    add_common(synth_cmd, syn.common);

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate detections against a manifest");
    eval_cmd->add_option("frames", ev.frames_dir, "directory with frames and manifest.json")->required();
    eval_cmd->add_option("--manifest", ev.manifest, "manifest path (default: FRAMES/manifest.json)");
    eval_cmd->add_option("--threshold", ev.threshold, "overlap-error threshold");
    eval_cmd->add_option("--out", ev.out_dir, "report directory (default: FRAMES)");
    eval_cmd->add_option("--overlay", ev.overlay_dir, "write per-frame PPM overlays here");
    add_common(eval_cmd, ev.common);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "per-stage timing table over a frame directory");
    bench_cmd->add_option("frames", bench.frames_dir, "directory of PGM frames")->required();
    bench_cmd->add_option("--repetitions", bench.repetitions, "runs per frame")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--json", bench.json_path, "also write the table as JSON");
    add_common(bench_cmd, bench.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*detect_cmd)
            return cmd_detect(det, out);
        if (*synth_cmd) {
            if (syn.spec.empty() && syn.preset.empty())
                throw InvalidArgument("synth needs --spec or --preset");
            return cmd_synth(syn, out);
        }
        if (*eval_cmd)
            return cmd_eval(ev, out);
        if (*bench_cmd)
            return cmd_bench(bench, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace pupil::cli
