#include "pupil/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "pupil/types.hpp"

namespace pupil {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
            throw InvalidArgument("");
        return d;
    } catch (const std::exception&) {
        throw InvalidArgument("config " + key + ": expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw InvalidArgument("config " + key + ": expected an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw InvalidArgument("config " + key + ": expected true/false, got '" + v + "'");
}

std::string fmt_double(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

std::string join_ints(const std::vector<int>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

struct Field {
    std::function<void(Config&, const std::string&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

template <typename Member>
Field real_field(Member member)
{
    return {[member](Config& c, const std::string& k, const std::string& v) { std::invoke(member, c) = parse_double(k, v); },
        [member](const Config& c) { return fmt_double(std::invoke(member, c)); }};
}

template <typename Member>
Field int_field(Member member)
{
    return {[member](Config& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = static_cast<std::remove_reference_t<decltype(std::invoke(member, c))>>(parse_int(k, v));
            },
        [member](const Config& c) { return std::to_string(std::invoke(member, c)); }};
}

const std::map<std::string, Field>& fields()
{
    static const std::map<std::string, Field> table = {
        {"roi.scales",
            {[](Config& c, const std::string& k, const std::string& v) {
                 std::vector<int> scales;
                 std::stringstream ss(v);
                 std::string item;
                 while (std::getline(ss, item, ','))
                     scales.push_back(static_cast<int>(parse_int(k, trim(item))));
                 if (scales.empty())
                     throw InvalidArgument("config roi.scales: empty list");
                 c.roi.scales = std::move(scales);
             },
                [](const Config& c) { return join_ints(c.roi.scales); }}},
        {"roi.stride", int_field([](auto& c) -> auto& { return c.roi.stride; })},
        {"roi.refine_radius", int_field([](auto& c) -> auto& { return c.roi.refine_radius; })},
        {"roi.expand", real_field([](auto& c) -> auto& { return c.roi.expand; })},
        {"edges.smooth_sigma", real_field([](auto& c) -> auto& { return c.edges.smooth_sigma; })},
        {"edges.scan_interval", int_field([](auto& c) -> auto& { return c.edges.scan_interval; })},
        {"edges.gradient_threshold", real_field([](auto& c) -> auto& { return c.edges.gradient_threshold; })},
        {"edges.anchor_threshold", real_field([](auto& c) -> auto& { return c.edges.anchor_threshold; })},
        {"edges.min_segment_length", int_field([](auto& c) -> auto& { return c.edges.min_segment_length; })},
        {"edges.validate",
            {[](Config& c, const std::string& k, const std::string& v) { c.edges.validate = parse_bool(k, v); },
                [](const Config& c) { return std::string(c.edges.validate ? "true" : "false"); }}},
        {"segments.near_circular_entropy", real_field([](auto& c) -> auto& { return c.segments.near_circular_entropy; })},
        {"segments.arc_entropy", real_field([](auto& c) -> auto& { return c.segments.arc_entropy; })},
        {"segments.closed_gap", real_field([](auto& c) -> auto& { return c.segments.closed_gap; })},
        {"segments.near_circular_rmse", real_field([](auto& c) -> auto& { return c.segments.near_circular_rmse; })},
        {"segments.near_circular_min_length", int_field([](auto& c) -> auto& { return c.segments.near_circular_min_length; })},
        {"arcs.min_length", int_field([](auto& c) -> auto& { return c.arcs.min_length; })},
        {"arcs.rmse", real_field([](auto& c) -> auto& { return c.arcs.rmse; })},
        {"arcs.min_axis_ratio", real_field([](auto& c) -> auto& { return c.arcs.min_axis_ratio; })},
        {"arcs.css_window", int_field([](auto& c) -> auto& { return c.arcs.css_window; })},
        {"arcs.css_sigma", real_field([](auto& c) -> auto& { return c.arcs.css_sigma; })},
        {"arcs.corner_angle_deg", real_field([](auto& c) -> auto& { return c.arcs.corner_angle_deg; })},
        {"candidates.max_arcs", int_field([](auto& c) -> auto& { return c.candidates.max_arcs; })},
        {"candidates.rmse", real_field([](auto& c) -> auto& { return c.candidates.rmse; })},
        {"candidates.min_axis_ratio", real_field([](auto& c) -> auto& { return c.candidates.min_axis_ratio; })},
        {"candidates.cost_threshold", real_field([](auto& c) -> auto& { return c.candidates.cost_threshold; })},
        {"seed", int_field([](auto& c) -> auto& { return c.seed; })},
    };
    return table;
}

} // namespace

void Config::set(const std::string& key, const std::string& value)
{
    const auto it = fields().find(trim(key));
    if (it == fields().end())
        throw InvalidArgument("unknown config key '" + key + "'");
    it->second.set(*this, it->first, trim(value));
}

std::map<std::string, std::string> Config::entries() const
{
    std::map<std::string, std::string> out;
    for (const auto& [key, field] : fields())
        out[key] = field.get(*this);
    return out;
}

void Config::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw InvalidArgument(std::string("config: ") + what + " must be positive");
    };
    for (int s : roi.scales)
        require(s > 0, "roi.scales");
    require(!roi.scales.empty(), "roi.scales");
    require(roi.stride > 0, "roi.stride");
    require(roi.refine_radius >= 0, "roi.refine_radius");
    require(roi.expand >= 0.0, "roi.expand");
    require(edges.smooth_sigma > 0.0, "edges.smooth_sigma");
    require(edges.scan_interval > 0, "edges.scan_interval");
    require(edges.gradient_threshold > 0.0, "edges.gradient_threshold");
    require(edges.anchor_threshold >= 0.0, "edges.anchor_threshold");
    require(edges.min_segment_length > 1, "edges.min_segment_length");
    require(segments.near_circular_entropy > 0.0, "segments.near_circular_entropy");
    require(segments.arc_entropy > 0.0, "segments.arc_entropy");
    require(segments.closed_gap > 0.0, "segments.closed_gap");
    require(segments.near_circular_rmse > 0.0, "segments.near_circular_rmse");
    require(segments.near_circular_min_length > 0, "segments.near_circular_min_length");
    require(arcs.min_length >= 5, "arcs.min_length");
    require(arcs.rmse > 0.0, "arcs.rmse");
    require(arcs.css_window > 0, "arcs.css_window");
    require(arcs.css_sigma > 0.0, "arcs.css_sigma");
    require(arcs.corner_angle_deg > 0.0, "arcs.corner_angle_deg");
    require(candidates.max_arcs > 0 && candidates.max_arcs <= 20, "candidates.max_arcs");
    require(candidates.rmse > 0.0, "candidates.rmse");
    require(arcs.min_axis_ratio > 0.0 && arcs.min_axis_ratio <= 1.0, "arcs.min_axis_ratio");
    require(candidates.min_axis_ratio > 0.0 && candidates.min_axis_ratio <= 1.0, "candidates.min_axis_ratio");
    require(candidates.cost_threshold > 0.0, "candidates.cost_threshold");
}

Config load_config_text(const std::string& text, Config base)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        base.set(line.substr(0, eq), line.substr(eq + 1));
    }
    base.validate();
    return base;
}

Config load_config_file(const std::string& path, Config base)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str(), std::move(base));
}

} // namespace pupil
