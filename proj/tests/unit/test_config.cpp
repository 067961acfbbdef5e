#include <cstdio>
#include <fstream>

#include "doctest.h"

#include "pupil/config.hpp"
#include "pupil/types.hpp"

using namespace pupil;

TEST_CASE("defaults")
{
    const Config c;
    CHECK(c.roi.scales == std::vector<int>{150, 200, 250, 300, 350});
    CHECK(c.roi.stride == 4);
    CHECK(c.segments.near_circular_entropy == 2.8);
    CHECK(c.segments.closed_gap == 15.0);
    CHECK(c.arcs.rmse == 2.0);
    CHECK(c.arcs.css_window == 7);
    CHECK(c.arcs.css_sigma == 3.0);
    CHECK(c.candidates.max_arcs == 10);
    CHECK(c.candidates.rmse == 3.0);
    CHECK(c.candidates.cost_threshold == 50.0);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("every key round-trips through set")
{
    const Config base;
    for (const auto& [key, value] : base.entries()) {
        Config c;
        c.set(key, value);
        CHECK_MESSAGE(c.entries() == base.entries(), key);
    }
    CHECK(base.entries().size() == 26);
}

TEST_CASE("set parses typed values")
{
    Config c;
    c.set("roi.scales", " 120, 180 ");
    CHECK(c.roi.scales == std::vector<int>{120, 180});
    c.set("  candidates.cost_threshold ", "42.5");
    CHECK(c.candidates.cost_threshold == 42.5);
    c.set("edges.validate", "false");
    CHECK_FALSE(c.edges.validate);
    c.set("seed", "7");
    CHECK(c.seed == 7u);
    CHECK(c.entries().at("candidates.cost_threshold") == "42.5");

    CHECK_THROWS_AS(c.set("no.such.key", "1"), InvalidArgument);
    CHECK_THROWS_AS(c.set("roi.stride", "4.5"), InvalidArgument);
    CHECK_THROWS_AS(c.set("arcs.rmse", "two"), InvalidArgument);
    CHECK_THROWS_AS(c.set("edges.validate", "maybe"), InvalidArgument);
    CHECK_THROWS_AS(c.set("roi.scales", ""), InvalidArgument);
}

TEST_CASE("text and file loading")
{
    const std::string text = "# tuning\n"
                             "arcs.rmse = 1.5   # tighter\n"
                             "\n"
                             "roi.scales=160,240\n";
    const Config c = load_config_text(text);
    CHECK(c.arcs.rmse == 1.5);
    CHECK(c.roi.scales == std::vector<int>{160, 240});
    CHECK(c.candidates.rmse == 3.0);

    Config base;
    base.candidates.cost_threshold = 10.0;
    CHECK(load_config_text("arcs.rmse = 1.0", base).candidates.cost_threshold == 10.0);

    CHECK_THROWS_AS(load_config_text("arcs.rmse 1.0"), InvalidArgument);
    CHECK_THROWS_AS(load_config_text("bogus = 1"), InvalidArgument);
    CHECK_THROWS_AS(load_config_text("arcs.rmse = -1"), InvalidArgument);

    const std::string path = "test_config_tmp.cfg";
    {
        std::ofstream out(path);
        out << text;
    }
    CHECK(load_config_file(path).entries() == c.entries());
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config_file("does/not/exist.cfg"), InvalidArgument);
}

TEST_CASE("validation")
{
    const auto invalid = [](auto mutate) {
        Config c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), InvalidArgument);
    };
    invalid([](Config& c) { c.roi.scales.clear(); });
    invalid([](Config& c) { c.roi.scales = {150, 0}; });
    invalid([](Config& c) { c.roi.stride = 0; });
    invalid([](Config& c) { c.edges.smooth_sigma = 0; });
    invalid([](Config& c) { c.segments.near_circular_entropy = -2.8; });
    invalid([](Config& c) { c.arcs.min_axis_ratio = 1.5; });
    invalid([](Config& c) { c.candidates.max_arcs = 32; });
    invalid([](Config& c) { c.candidates.cost_threshold = 0; });
}
