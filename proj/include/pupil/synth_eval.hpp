#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pupil/candidate_selection.hpp"
#include "pupil/config.hpp"
#include "pupil/ellipse_geometry.hpp"
#include "pupil/imaging.hpp"

namespace pupil {

struct Glint {
    PointD center;
    double radius = 4.0;
};

/// Dark stroke along the quadratic Bezier root -> control -> tip.
struct Lash {
    PointD root;
    PointD control;
    PointD tip;
    double width = 2.0;
};

/// Parametric eye frame. A missing pupil renders a blink frame, in which case
/// the occlusion fraction applies to the iris boundary instead.
struct SceneSpec {
    int width = 640;
    int height = 480;
    std::optional<EllipseParams> pupil;
    PointD iris_center{320, 240};
    double iris_radius = 120.0;
    int pupil_intensity = 30;
    int iris_intensity = 110;
    int sclera_intensity = 200;
    int eyelid_intensity = 160;
    double occlusion = 0.0;   ///< fraction of the boundary hidden by the eyelid half-plane
    double eyelid_tilt = 0.0; ///< radians; 0 = eyelid descends from the top edge
    /// With zero occlusion, an eyelid may still be drawn this many pixels clear of the boundary.
    std::optional<double> eyelid_clearance;
    std::vector<Lash> lashes;
    int lash_intensity = 40;
    std::vector<Glint> glints;
    int glint_intensity = 250;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;

    /// Throws SpecError when the scene is inconsistent.
    void validate() const;
};

struct RenderedScene {
    GrayImage image;
    std::optional<EllipseParams> ground_truth;
};

RenderedScene render(const SceneSpec& spec);

/// Interior pixels of `e` on the canvas with at least one 4-neighbour outside.
std::vector<Point> boundary_pixels(const EllipseParams& e, int width, int height);

/// Eyelid half-plane: pixels with x * normal.x + y * normal.y < level are covered.
struct EyelidPlane {
    PointD normal;
    double level = 0.0;
};
EyelidPlane eyelid_plane(const SceneSpec& spec);

/// Ground-truth class of a frame: visible (no occlusion), occluded (at most half
/// the periphery hidden) or absent (no pupil, or more than half hidden).
enum class GtClass { visible, occluded, absent };
std::string_view to_string(GtClass c);
GtClass ground_truth_class(const SceneSpec& spec);

enum class Outcome { TP, FP, TN, FN };
std::string_view to_string(Outcome o);

/// gt_present: the frame counts as containing a pupil. overlap_error is only
/// consulted for pupil verdicts on frames with a pupil.
Outcome classify(Verdict verdict, bool gt_present, double overlap_error, double eps_threshold);
Outcome classify(const DetectionResult& det, const std::optional<EllipseParams>& gt, double eps_threshold, int width,
    int height);

double precision(int tp, int fp);
double recall(int tp, int fn);
double f_measure(double precision, double recall);

struct EvalRecord {
    std::string frame_id;
    GtClass gt_class = GtClass::absent;
    Verdict verdict = Verdict::no_pupil;
    double overlap = 0.0;       ///< 0 when there is no detection or no ground truth
    double overlap_error = 1.0; ///< 1 - overlap
    Outcome outcome = Outcome::FN;
    DetectionPath path = DetectionPath::full;
    std::int64_t total_us = 0;
    std::optional<double> cost;
};

struct SweepRow {
    double eps = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

struct EvalReport {
    int frames = 0;
    int tp = 0, fp = 0, tn = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    double eps_threshold = 0.2;
    double mean_overlap = 0.0; ///< over frames with a pupil and a pupil verdict
    std::vector<SweepRow> sweep;
};

/// Counts outcomes at `eps_threshold` and sweeps eps over 0.00, 0.01, ..., 0.20.
EvalReport aggregate(const std::vector<EvalRecord>& records, double eps_threshold);

struct FrameInput {
    std::string id;
    GrayImage image;
    std::optional<EllipseParams> ground_truth;
    GtClass gt_class = GtClass::absent;
};

EvalRecord evaluate_frame(const FrameInput& frame, const Config& cfg, double eps_threshold);

struct CorpusRun {
    std::vector<EvalRecord> records;
    EvalReport report;
};

/// Frames are processed in parallel on up to `jobs` threads; records keep input order.
CorpusRun evaluate_frames(const std::vector<FrameInput>& frames, const Config& cfg, double eps_threshold, int jobs = 1);
CorpusRun run_corpus(const std::vector<SceneSpec>& specs, const Config& cfg, double eps_threshold = 0.2, int jobs = 1);

std::string frame_id(std::size_t index);
std::string records_to_csv(const std::vector<EvalRecord>& records, bool include_timings = true);
std::string report_to_json(const EvalReport& report, const Config& cfg);

// Scene presets ------------------------------------------------------------

SceneSpec random_visible_scene(std::uint64_t seed, int width = 1280, int height = 720);
SceneSpec random_occluded_scene(std::uint64_t seed, double min_occlusion, double max_occlusion, int width = 1280,
    int height = 720);
SceneSpec random_blink_scene(std::uint64_t seed, int width = 1280, int height = 720);

/// 200 frames: 114 visible, 44 occluded (15-45%), 42 blink.
std::vector<SceneSpec> acceptance_corpus(std::uint64_t seed);

std::string scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const std::string& text);

} // namespace pupil
