#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "cli.hpp"
#include "pupil/imaging.hpp"
#include "pupil/synth_eval.hpp"

namespace fs = std::filesystem;
using namespace pupil;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "pupil");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = pupil::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("pupil_cli_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream(path) << text;
}

void write_frame(const std::string& path, const SceneSpec& spec)
{
    const auto bytes = encode_pgm(render(spec).image);
    std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("detect exit codes and outputs")
{
    TempDir dir("detect");
    write_frame(dir / "eye.pgm", random_visible_scene(41, 640, 480));
    write_frame(dir / "blink.pgm", random_blink_scene(42, 640, 480));
    write_frame(dir / "tiny.pgm", SceneSpec{.width = 64, .height = 64, .iris_center = {32, 32}, .iris_radius = 20});

    const Run eye = invoke({"detect", dir / "eye.pgm", "--no-timings", "--overlay", dir / "eye.ppm", "--trace", dir / "eye.json"});
    CHECK(eye.code == 0);
    const auto j = nlohmann::json::parse(eye.out);
    CHECK(j.at("verdict") == "pupil");
    CHECK(j.at("timings_us").at("roi") == 0);
    CHECK(slurp(dir / "eye.ppm").rfind("P6\n640 480\n255\n", 0) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "eye.json")).contains("candidates"));
    CHECK(invoke({"detect", dir / "eye.pgm", "--no-timings"}).out == eye.out);

    CHECK(invoke({"detect", dir / "blink.pgm"}).code == 1);
    const Run tiny = invoke({"detect", dir / "tiny.pgm"});
    CHECK(tiny.code == 2);
    CHECK(tiny.err.rfind("error: ", 0) == 0);
    CHECK(invoke({"detect", dir / "missing.pgm"}).code == 2);
    CHECK(invoke({"detect"}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("flags override the config file")
{
    TempDir dir("config");
    write_frame(dir / "eye.pgm", random_visible_scene(43, 640, 480));
    write_text(dir / "strict.cfg", "candidates.cost_threshold = 0.000001\n");
    CHECK(invoke({"detect", dir / "eye.pgm", "--config", dir / "strict.cfg"}).code == 1);
    CHECK(invoke({"detect", dir / "eye.pgm", "--config", dir / "strict.cfg", "--set", "candidates.cost_threshold=50"}).code == 0);
    CHECK(invoke({"detect", dir / "eye.pgm", "--set", "no.such=1"}).code == 2);
    CHECK(invoke({"detect", dir / "eye.pgm", "--set", "arcs.rmse"}).code == 2);
    CHECK(invoke({"detect", dir / "eye.pgm", "--config", dir / "absent.cfg"}).code == 2);
}

TEST_CASE("synth is deterministic and validates its input")
{
    TempDir dir("synth");
    REQUIRE(invoke({"synth", "--preset", "blink", "--count", "2", "--seed", "5", "--out", dir / "a"}).code == 0);
    REQUIRE(invoke({"synth", "--preset", "blink", "--count", "2", "--seed", "5", "--jobs", "2", "--out", dir / "b"}).code == 0);
    CHECK(slurp(dir / "a/manifest.json") == slurp(dir / "b/manifest.json"));
    CHECK(slurp(dir / "a/frame_0001.pgm") == slurp(dir / "b/frame_0001.pgm"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "a/manifest.json"));
    CHECK(manifest.at("seed") == 5);
    CHECK(manifest.at("frames").size() == 2);
    CHECK(manifest.at("frames")[0].at("ground_truth").is_null());

    auto scene = nlohmann::json::parse(scene_to_json(SceneSpec{}));
    scene["occlusion"] = 2.0;
    write_text(dir / "bad.json", scene.dump());
    CHECK(invoke({"synth", "--spec", dir / "bad.json", "--out", dir / "c"}).code == 2);
    CHECK(invoke({"synth", "--out", dir / "c"}).code == 2);
    CHECK(invoke({"synth", "--preset", "sideways", "--out", dir / "c"}).code == 2);
    CHECK_FALSE(fs::exists(dir / "c/manifest.json"));
}

TEST_CASE("eval writes reports and the threshold moves F monotonically")
{
    TempDir dir("eval");
    REQUIRE(invoke({"synth", "--preset", "occluded", "--count", "3", "--seed", "8", "--out", dir / "frames"}).code == 0);
    const Run strict = invoke({"eval", dir / "frames", "--threshold", "0.02", "--no-timings", "--out", dir / "strict"});
    const Run loose = invoke({"eval", dir / "frames", "--threshold", "0.2", "--no-timings", "--out", dir / "loose"});
    REQUIRE(strict.code == 0);
    REQUIRE(loose.code == 0);
    CHECK(loose.out.rfind("frames 3  TP ", 0) == 0);
    const auto rs = nlohmann::json::parse(slurp(dir / "strict/report.json"));
    const auto rl = nlohmann::json::parse(slurp(dir / "loose/report.json"));
    CHECK(rs.at("f_measure").get<double>() <= rl.at("f_measure").get<double>());
    CHECK(rs.at("sweep") == rl.at("sweep"));
    CHECK(slurp(dir / "loose/records.csv").rfind("frame_id,gt_class,verdict,or,eps_o,class,path,total_us\n", 0) == 0);

    CHECK(invoke({"eval", dir / "frames", "--no-timings", "--out", dir / "again"}).out == loose.out);
    CHECK(slurp(dir / "again/records.csv") == slurp(dir / "loose/records.csv"));

    fs::create_directories(dir / "empty");
    CHECK(invoke({"eval", dir / "empty"}).code == 2);
    write_text(dir / "empty/manifest.json", "{\"frames\": []}");
    CHECK(invoke({"eval", dir / "empty"}).code == 2);
    write_text(dir / "empty/manifest.json", "{\"frames\": [");
    CHECK(invoke({"eval", dir / "empty"}).code == 2);
    CHECK(invoke({"eval", dir / "frames", "--threshold", "1.5"}).code == 2);
}

TEST_CASE("bench")
{
    TempDir dir("bench");
    fs::create_directories(dir / "frames");
    write_frame(dir / "frames/a.pgm", random_visible_scene(51, 640, 480));
    const Run r = invoke({"bench", dir / "frames", "--repetitions", "2", "--json", dir / "bench.json"});
    CHECK(r.code == 0);
    CHECK(r.out.find("total") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "bench.json"));
    CHECK(j.at("repetitions") == 2);
    CHECK(j.at("rows").back().at("path") == "all");
    CHECK(j.at("config").contains("roi.stride"));

    fs::create_directories(dir / "none");
    CHECK(invoke({"bench", dir / "none"}).code == 2);
    CHECK(invoke({"bench", dir / "frames", "--repetitions", "0"}).code == 2);
}
