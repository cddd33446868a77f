#include "etb/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <fmt/format.h>

namespace etb {

namespace {

struct Line {
    int number;
    std::string value;
};

[[noreturn]] void fail(int line, const std::string &what) {
    throw ConfigError(fmt::format("line {}: {}", line, what));
}

double number(const Line &l, std::string_view text) {
    std::string s(text);
    boost::algorithm::trim(s);
    auto parse = [&](std::string_view part) {
        double v = 0.0;
        const auto *end = part.data() + part.size();
        const auto [ptr, ec] = std::from_chars(part.data(), end, v);
        if (ec != std::errc{} || ptr != end || part.empty()) fail(l.number, fmt::format("not a number: '{}'", s));
        return v;
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse(s);
    const double den = parse(std::string_view(s).substr(slash + 1));
    if (den == 0.0) fail(l.number, "division by zero");
    return parse(std::string_view(s).substr(0, slash)) / den;
}

int integer(const Line &l) {
    const double v = number(l, l.value);
    if (v != std::floor(v) || std::abs(v) > 1e15) fail(l.number, fmt::format("expected an integer, got '{}'", l.value));
    return static_cast<int>(v);
}

bool boolean(const Line &l) {
    const std::string v = boost::algorithm::to_lower_copy(l.value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(l.number, fmt::format("expected a boolean, got '{}'", l.value));
}

Point2 point(const Line &l, std::string_view text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::is_any_of(","));
    if (parts.size() != 2) fail(l.number, fmt::format("expected x,y, got '{}'", text));
    return {number(l, parts[0]), number(l, parts[1])};
}

std::vector<Point2> points(const Line &l) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, l.value, boost::is_any_of(";"));
    std::vector<Point2> out;
    for (const auto &p : parts) out.push_back(point(l, p));
    return out;
}

// agent.N.pos -> N, or nullopt for any other key.
std::optional<int> agent_index(const std::string &key, int line) {
    if (!key.starts_with("agent.") || !key.ends_with(".pos")) return std::nullopt;
    const std::string mid = key.substr(6, key.size() - 10);
    int idx = -1;
    const auto [ptr, ec] = std::from_chars(mid.data(), mid.data() + mid.size(), idx);
    if (ec != std::errc{} || ptr != mid.data() + mid.size() || idx < 0) fail(line, fmt::format("bad agent key '{}'", key));
    return idx;
}

RunConfig build(const std::map<std::string, Line> &kv, const std::map<int, Line> &agents,
                const std::filesystem::path &base) {
    RunConfig cfg;
    Scenario &sc = cfg.scenario;
    auto get = [&](const char *key) -> const Line * {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const Line *l = get("region.rect")) {
        std::vector<std::string> parts;
        boost::algorithm::split(parts, l->value, boost::is_any_of(","));
        if (parts.size() != 4) fail(l->number, "region.rect expects x0,y0,x1,y1");
        const double x0 = number(*l, parts[0]), y0 = number(*l, parts[1]);
        const double x1 = number(*l, parts[2]), y1 = number(*l, parts[3]);
        if (!(x1 > x0 && y1 > y0)) fail(l->number, "region.rect needs x1 > x0 and y1 > y0");
        sc.region = SimplePolygon::rectangle(x0, y0, x1, y1);
    }
    if (const Line *l = get("region.vertices")) {
        if (get("region.rect")) fail(l->number, "region.rect and region.vertices are exclusive");
        SimplePolygon poly(points(*l));
        if (poly.size() < 3 || !is_convex(poly)) fail(l->number, "region must be a convex polygon");
        if (signed_area(poly) < 0) std::reverse(poly.vertices.begin(), poly.vertices.end());
        sc.region = poly;
    }

    const Line *kind = get("density.kind");
    const std::string k = kind ? kind->value : "reference";
    const int kline = kind ? kind->number : 0;
    try {
        if (k == "reference") {
            sc.density = DensityField::reference_field();
        } else if (k == "uniform") {
            const Line *v = get("density.value");
            sc.density = DensityField::uniform(v ? number(*v, v->value) : 1.0);
        } else if (k == "exponential") {
            const Line *c = get("density.centers");
            if (!c) fail(kline, "exponential density needs density.centers");
            const Line *s = get("density.scale");
            sc.density = DensityField::exponential_sum(points(*c), s ? number(*s, s->value) : 100.0);
        } else if (k == "grid") {
            const Line *f = get("density.file");
            if (!f) fail(kline, "grid density needs density.file");
            std::filesystem::path p = f->value;
            if (p.is_relative()) p = base / p;
            sc.density = DensityField::load_grid(p);
        } else {
            fail(kline, fmt::format("unknown density kind '{}' (valid: reference, uniform, exponential, grid)", k));
        }
    } catch (const DensityError &e) {
        fail(kline, e.what());
    }

    if (const Line *l = get("scenario.duration")) sc.duration = number(*l, l->value);
    if (const Line *l = get("scenario.dt")) sc.params.dt = number(*l, l->value);
    if (const Line *l = get("scenario.s_max")) sc.params.s_max = number(*l, l->value);
    if (const Line *l = get("scenario.chords")) sc.params.chords = integer(*l);
    if (const Line *l = get("scenario.h_stride")) sc.h_stride = integer(*l);
    if (const Line *l = get("scenario.seed")) sc.seed = static_cast<std::uint64_t>(integer(*l));
    if (const Line *l = get("scenario.eps_move")) sc.params.eps_move = number(*l, l->value);
    if (const Line *l = get("controller.dtb")) sc.params.dtb = number(*l, l->value);
    if (const Line *l = get("controller.tau_d")) sc.params.tau_d = number(*l, l->value);
    try {
        if (const Line *l = get("controller.name")) sc.controller = parse_controller(l->value);
        if (const Line *l = get("controller.compare")) cfg.controllers = parse_controller_list(l->value);
    } catch (const SimError &e) {
        const Line *l = get("controller.compare") ? get("controller.compare") : get("controller.name");
        fail(l->number, e.what());
    }
    if (cfg.controllers.empty()) cfg.controllers = {sc.controller};
    if (const Line *l = get("output.dir")) cfg.out_dir = l->value;
    if (const Line *l = get("output.plots")) cfg.plots = boolean(*l);

    int expect = 0;
    for (const auto &[idx, l] : agents) {
        if (idx != expect) fail(l.number, fmt::format("agent indices must be contiguous from 0; missing agent.{}.pos", expect));
        const Point2 p = point(l, l.value);
        if (!point_in_polygon(p, sc.region)) fail(l.number, fmt::format("agent {} at ({}, {}) is outside the region", idx, p.x, p.y));
        for (std::size_t j = 0; j < sc.initial_positions.size(); ++j) {
            if (sc.initial_positions[j] == p) fail(l.number, fmt::format("agent {} duplicates the position of agent {}", idx, j));
        }
        sc.initial_positions.push_back(p);
        ++expect;
    }
    if (sc.initial_positions.empty()) sc.initial_positions.push_back(mass_centroid(sc.region, DensityField::uniform()).centroid());

    try {
        sc.validate();
    } catch (const SimError &e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig parse(std::istream &in, const std::filesystem::path &base) {
    static const std::set<std::string> known{
        "scenario.duration", "scenario.dt",       "scenario.s_max",   "scenario.chords", "scenario.h_stride",
        "scenario.seed",     "scenario.eps_move", "controller.name",  "controller.compare",
        "controller.dtb",    "controller.tau_d",  "region.rect",      "region.vertices", "density.kind",
        "density.value",     "density.centers",   "density.scale",    "density.file",    "output.dir",
        "output.plots"};
    std::map<std::string, Line> kv;
    std::map<int, Line> agents;
    std::string section, raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
        boost::algorithm::trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) fail(number, fmt::format("malformed section header '{}'", s));
            section = boost::algorithm::trim_copy(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(number, fmt::format("expected key = value, got '{}'", s));
        std::string key = boost::algorithm::trim_copy(s.substr(0, eq));
        std::string value = boost::algorithm::trim_copy(s.substr(eq + 1));
        if (key.empty()) fail(number, "missing key");
        if (value.empty()) fail(number, fmt::format("missing value for '{}'", key));
        if (!section.empty()) key = section + "." + key;
        if (const auto idx = agent_index(key, number)) {
            if (!agents.emplace(*idx, Line{number, value}).second) fail(number, fmt::format("agent {} given twice", *idx));
            continue;
        }
        if (!known.contains(key)) fail(number, fmt::format("unknown key '{}'", key));
        if (!kv.emplace(key, Line{number, value}).second) fail(number, fmt::format("duplicate key '{}'", key));
    }
    return build(kv, agents, base);
}

}  // namespace

std::vector<ControllerKind> parse_controller_list(const std::string &list) {
    std::vector<std::string> names;
    boost::algorithm::split(names, list, boost::is_any_of(","));
    std::vector<ControllerKind> out;
    for (auto &n : names) {
        boost::algorithm::trim(n);
        const ControllerKind k = parse_controller(n);
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
    return out;
}

RunConfig parse_config_text(const std::string &text) {
    std::istringstream in(text);
    return parse(in, std::filesystem::current_path());
}

RunConfig parse_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    return parse(in, path.parent_path());
}

}  // namespace etb
