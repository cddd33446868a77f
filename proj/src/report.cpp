#include "etb/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <boost/algorithm/string.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace etb {

void write_trace_csv(std::ostream &out, const SimTrace &trace) {
    fmt::print(out, "{}\n# controller={}\nt,agent,x,y,speed,broadcast,radius,receivers\n", kTraceHeader,
               controller_name(trace.controller));
    std::string buf;
    for (const StepRecord &s : trace.steps) {
        for (std::size_t i = 0; i < s.positions.size(); ++i) {
            const MessageEvent *ev = nullptr;
            for (const MessageEvent &e : s.events) {
                if (e.sender == static_cast<int>(i) && !e.request) ev = &e;
            }
            buf.clear();
            fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},", s.t, i, s.positions[i].x,
                           s.positions[i].y, i < s.speeds.size() ? s.speeds[i] : 0.0, ev ? 1 : 0,
                           ev ? ev->radius : 0.0);
            if (ev) fmt::format_to(std::back_inserter(buf), "{}", fmt::join(ev->receivers, ";"));
            buf += '\n';
            out << buf;
        }
    }
}

void write_metrics_csv(std::ostream &out, const SimTrace &trace) {
    fmt::print(out, "{}\nt,H,msgs_cum,msgs_step\n", kTraceHeader);
    for (const MetricsRow &r : compute_metrics(trace)) {
        fmt::print(out, "{},{},{},{}\n", r.t, r.H ? fmt::format("{}", *r.H) : "", r.msgs_cum, r.msgs_step);
    }
}

namespace {

std::vector<std::string> csv_fields(const std::string &line) {
    std::vector<std::string> f;
    boost::algorithm::split(f, line, boost::is_any_of(","));
    return f;
}

template <typename T>
T parse_num(const std::string &s, std::size_t line) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ReportError(fmt::format("line {}: bad number '{}'", line, s));
    }
    return v;
}

// Skips the version line, comments and the column header; returns the column header.
std::string read_header(std::istream &in, std::size_t &line) {
    std::string s;
    if (!std::getline(in, s) || s != kTraceHeader) throw ReportError("missing '# etb-trace v1' header");
    line = 1;
    while (std::getline(in, s)) {
        ++line;
        if (!s.starts_with("#")) return s;
    }
    throw ReportError("missing column header");
}

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream &in) {
    std::size_t line = 0;
    if (read_header(in, line) != "t,agent,x,y,speed,broadcast,radius,receivers") {
        throw ReportError("unexpected trace columns");
    }
    std::vector<TraceRow> rows;
    std::string s;
    while (std::getline(in, s)) {
        ++line;
        if (s.empty()) continue;
        const auto f = csv_fields(s);
        if (f.size() != 8) throw ReportError(fmt::format("line {}: expected 8 fields", line));
        TraceRow r;
        r.t = parse_num<double>(f[0], line);
        r.agent = parse_num<int>(f[1], line);
        r.position = {parse_num<double>(f[2], line), parse_num<double>(f[3], line)};
        r.speed = parse_num<double>(f[4], line);
        r.broadcast = parse_num<int>(f[5], line) != 0;
        r.radius = parse_num<double>(f[6], line);
        if (!f[7].empty()) {
            std::vector<std::string> rec;
            boost::algorithm::split(rec, f[7], boost::is_any_of(";"));
            for (const auto &x : rec) r.receivers.push_back(parse_num<int>(x, line));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<MetricsRow> read_metrics_csv(std::istream &in) {
    std::size_t line = 0;
    if (read_header(in, line) != "t,H,msgs_cum,msgs_step") throw ReportError("unexpected metrics columns");
    std::vector<MetricsRow> rows;
    std::string s;
    while (std::getline(in, s)) {
        ++line;
        if (s.empty()) continue;
        const auto f = csv_fields(s);
        if (f.size() != 4) throw ReportError(fmt::format("line {}: expected 4 fields", line));
        MetricsRow r;
        r.t = parse_num<double>(f[0], line);
        if (!f[1].empty()) r.H = parse_num<double>(f[1], line);
        r.msgs_cum = parse_num<long>(f[2], line);
        r.msgs_step = parse_num<long>(f[3], line);
        rows.push_back(r);
    }
    return rows;
}

namespace {

constexpr double kW = 640, kH = 400, kL = 80, kR = 150, kT = 40, kB = 50;
constexpr const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Axis {
    double lo, hi;
    double map(double v, double a, double b) const { return hi > lo ? a + (v - lo) / (hi - lo) * (b - a) : (a + b) / 2; }
};

// Nice tick step covering span in about five ticks.
double tick_step(double span) {
    if (!(span > 0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10 * mag;
}

std::string svg_open(const std::string &title) {
    return fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
                       "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
                       "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       kW, kH, kW / 2, title);
}

}  // namespace

std::string render_line_plot(const PlotSpec &spec) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const Series &s : spec.series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (spec.bars) y0 = std::min(y0, 0.0);
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const Axis ax{x0, x1}, ay{y0, y1};
    const double pl = kL, pr = kW - kR, pt = kT, pb = kH - kB;

    std::string svg = svg_open(spec.title);
    fmt::format_to(std::back_inserter(svg), "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                   pl, pt, pr - pl, pb - pt);
    const double xs = tick_step(x1 - x0), ys = tick_step(y1 - y0);
    for (double v = std::ceil(x0 / xs) * xs; v <= x1 + 1e-9 * xs; v += xs) {
        const double px = ax.map(v, pl, pr);
        fmt::format_to(std::back_inserter(svg),
                       "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>"
                       "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:g}</text>\n",
                       px, pb, pb + 5, pb + 18, v);
    }
    for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-9 * ys; v += ys) {
        const double py = ay.map(v, pb, pt);
        fmt::format_to(std::back_inserter(svg),
                       "<line x1=\"{0}\" y1=\"{2:.2f}\" x2=\"{1}\" y2=\"{2:.2f}\" stroke=\"black\"/>"
                       "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:g}</text>\n",
                       pl - 5, pl, py, pl - 8, py + 4, v);
    }
    fmt::format_to(std::back_inserter(svg), "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (pl + pr) / 2,
                   kH - 12, spec.xlabel);
    fmt::format_to(std::back_inserter(svg),
                   "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                   (pt + pb) / 2, spec.ylabel);

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const Series &s = spec.series[k];
        const char *color = kColors[k % std::size(kColors)];
        if (spec.bars) {
            const double base = ay.map(0.0, pb, pt);
            std::string path;
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (s.y[i] == 0.0) continue;
                const double px = ax.map(s.x[i], pl, pr);
                fmt::format_to(std::back_inserter(path), "M{:.2f} {:.2f}V{:.2f}", px, base, ay.map(s.y[i], pb, pt));
            }
            fmt::format_to(std::back_inserter(svg), "<path d=\"{}\" stroke=\"{}\" stroke-width=\"0.6\" fill=\"none\"/>\n",
                           path, color);
        } else {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                fmt::format_to(std::back_inserter(pts), "{}{:.2f},{:.2f}", i ? " " : "", ax.map(s.x[i], pl, pr),
                               ay.map(s.y[i], pb, pt));
            }
            fmt::format_to(std::back_inserter(svg),
                           "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", pts, color);
        }
        const double ly = pt + 10 + 18.0 * static_cast<double>(k);
        fmt::format_to(std::back_inserter(svg),
                       "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"3\"/>"
                       "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
                       pr + 10, ly, pr + 30, color, pr + 35, ly + 4, s.label);
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_trajectories(const SimTrace &trace, const SimplePolygon &region) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const Point2 &v : region.vertices) {
        x0 = std::min(x0, v.x), x1 = std::max(x1, v.x), y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
    }
    const double side = kH - kT - kB;
    const double scale = side / std::max(x1 - x0, y1 - y0);
    const double ox = (kW - side) / 2;
    auto px = [&](const Point2 &p) { return Point2{ox + (p.x - x0) * scale, kH - kB - (p.y - y0) * scale}; };

    std::string svg = svg_open(fmt::format("Trajectories ({})", controller_name(trace.controller)));
    std::string outline;
    for (const Point2 &v : region.vertices) {
        const Point2 q = px(v);
        fmt::format_to(std::back_inserter(outline), "{}{:.2f},{:.2f}", outline.empty() ? "" : " ", q.x, q.y);
    }
    fmt::format_to(std::back_inserter(svg), "<polygon points=\"{}\" fill=\"none\" stroke=\"black\"/>\n", outline);
    if (trace.steps.empty()) return svg + "</svg>\n";

    const std::size_t n = trace.steps.front().positions.size();
    const std::size_t stride = std::max<std::size_t>(1, trace.steps.size() / 2000);
    for (std::size_t i = 0; i < n; ++i) {
        const char *color = kColors[i % std::size(kColors)];
        std::string pts;
        for (std::size_t k = 0; k < trace.steps.size(); k += stride) {
            const Point2 q = px(trace.steps[k].positions[i]);
            fmt::format_to(std::back_inserter(pts), "{}{:.2f},{:.2f}", pts.empty() ? "" : " ", q.x, q.y);
        }
        const Point2 a = px(trace.steps.front().positions[i]);
        const Point2 b = px(trace.steps.back().positions[i]);
        fmt::format_to(std::back_inserter(pts), " {:.2f},{:.2f}", b.x, b.y);
        fmt::format_to(std::back_inserter(svg),
                       "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"/>\n"
                       "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"none\" stroke=\"{}\"/>\n"
                       "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"7\" height=\"7\" fill=\"{}\"/>\n",
                       pts, color, a.x, a.y, color, b.x - 3.5, b.y - 3.5, color);
    }
    return svg + "</svg>\n";
}

std::vector<PairReduction> pairwise_reductions(const std::vector<SimTrace> &traces) {
    std::vector<PairReduction> out;
    for (const SimTrace &a : traces) {
        for (const SimTrace &b : traces) {
            out.push_back({a.controller, b.controller, a.total_messages, b.total_messages,
                           reduction_percent(a.total_messages, b.total_messages)});
        }
    }
    return out;
}

void write_summary_csv(std::ostream &out, const std::vector<PairReduction> &pairs) {
    fmt::print(out, "controller_a,controller_b,msgs_a,msgs_b,reduction_percent\n");
    for (const PairReduction &p : pairs) {
        fmt::print(out, "{},{},{},{},{:.3f}\n", controller_name(p.a), controller_name(p.b), p.msgs_a, p.msgs_b, p.percent);
    }
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw ReportError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace etb
