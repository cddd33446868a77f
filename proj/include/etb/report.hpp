#ifndef ETB_REPORT_HPP
#define ETB_REPORT_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "etb/sim.hpp"

namespace etb {

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char *kTraceHeader = "# etb-trace v1";

/// One row per (step, agent): t,agent,x,y,speed,broadcast,radius,receivers (receivers are ';' separated).
void write_trace_csv(std::ostream &out, const SimTrace &trace);
/// t,H,msgs_cum,msgs_step; H is blank on unsampled steps.
void write_metrics_csv(std::ostream &out, const SimTrace &trace);

struct TraceRow {
    double t = 0.0;
    int agent = 0;
    Point2 position;
    double speed = 0.0;
    bool broadcast = false;
    double radius = 0.0;
    std::vector<int> receivers;
};

/// Parses a trace CSV back into rows; throws ReportError on schema problems.
std::vector<TraceRow> read_trace_csv(std::istream &in);
std::vector<MetricsRow> read_metrics_csv(std::istream &in);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    /// Draw vertical bars (per-step message counts) instead of polylines.
    bool bars = false;
};

std::string render_line_plot(const PlotSpec &spec);
/// Trajectories with start (circle) and end (square) markers inside the region outline.
std::string render_trajectories(const SimTrace &trace, const SimplePolygon &region);

struct PairReduction {
    ControllerKind a;
    ControllerKind b;
    long msgs_a = 0;
    long msgs_b = 0;
    double percent = 0.0;
};

std::vector<PairReduction> pairwise_reductions(const std::vector<SimTrace> &traces);
void write_summary_csv(std::ostream &out, const std::vector<PairReduction> &pairs);

void write_file(const std::filesystem::path &path, const std::string &content);

}  // namespace etb

#endif  // ETB_REPORT_HPP
