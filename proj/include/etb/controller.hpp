#ifndef ETB_CONTROLLER_HPP
#define ETB_CONTROLLER_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "etb/density.hpp"
#include "etb/partition.hpp"

namespace etb {

class ControllerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Last information one agent holds about another: time, position, speed promise.
struct AgentRecord {
    double time = 0.0;
    Point2 position;
    double speed = 0.0;
};

struct BroadcastMsg {
    int sender = -1;
    AgentRecord record;
    double radius = 0.0;
};

/// Everything the agent computed from one set of uncertainty disks.
struct CellEstimate {
    std::map<int, UncertaintyDisk> disks;
    SimplePolygon guaranteed;
    SimplePolygon dual;
    MassCentroid gc;
    MassCentroid dc;
    double bound = 0.0;
    Point2 target;
    bool move = false;
};

struct ControllerParams {
    double s_max = 0.1;
    double dt = 1.0 / 60.0;
    int chords = kDefaultChords;
    /// Distance to the target below which the agent counts as arrived; s_max * dt / 2 when unset.
    std::optional<double> eps_move;
    /// Variable-speed policy: target moving-state duration and post-stop wait.
    double dtb = 45.0 / 60.0;
    double tau_d = 10.0 / 60.0;

    double epsilon() const { return eps_move.value_or(0.5 * s_max * dt); }
    /// Halving stops here: slower than this an agent cannot cover epsilon() within dtb.
    double beta_min() const { return std::min(1.0, epsilon() / (s_max * dtb)); }
};

/// Read-only world an agent computes in.
struct ControlContext {
    const SimplePolygon &region;
    const DensityField &density;
    ControllerParams params;
    /// Uncertainty radii are capped here (diameter of the region).
    double radius_cap;

    ControlContext(const SimplePolygon &q, const DensityField &phi, ControllerParams p);
};

struct AgentState {
    int id = -1;
    Point2 position;
    double speed = 0.0;
    double beta = 1.0;
    /// Latest record received from each agent.
    std::map<int, AgentRecord> memory;
    /// Records the motion law currently runs on (refreshed at rest, re-check and broadcast).
    std::map<int, AgentRecord> applied;
    AgentRecord self_broadcast;
    std::set<int> potential;
    /// Held-uncertainty growth rate; never decreases between own broadcasts.
    double hold_rate = 0.0;
    double wait_until = 0.0;
    /// Estimate the motion of the last step was based on.
    CellEstimate last;
};

struct ControlDecision {
    Point2 velocity;
    Point2 target;
    std::optional<BroadcastMsg> broadcast;
    double speed_after = 0.0;
    bool new_neighbor = false;
};

/// Initial state: exact records (t = 0, speed 0) for `known`, which becomes the potential set.
AgentState make_agent(int id, std::span<const Point2> positions, const std::set<int> &known);

UncertaintyDisk uncertainty_now(const AgentRecord &record, double now,
                                double cap = std::numeric_limits<double>::infinity());
/// Disk for agent j from a memory map; throws ControllerError "no information" when j is absent.
UncertaintyDisk uncertainty_now(const std::map<int, AgentRecord> &memory, int j, double now,
                                double cap = std::numeric_limits<double>::infinity());
UncertaintyDisk uncertainty_held(const AgentRecord &record, double t_self, double now, double s_ref,
                                 double cap = std::numeric_limits<double>::infinity());

/// 2 cr(dual) (1 - M_gV / M_dgV).
double centroid_bound(const MassCentroid &gc, const MassCentroid &dc, const SimplePolygon &dual);
Point2 target_point(const Point2 &p, const Point2 &gc, const Point2 &dc, double bound);
bool condition_to_move(const Point2 &p, const Point2 &m, double eps);
Point2 control_input(const Point2 &p, const Point2 &m, double speed);
double broadcast_radius(const Point2 &p, const SimplePolygon &dual);

/// Cells, centroids, bound and target for the given disks.
CellEstimate estimate_cell(const Point2 &p, std::map<int, UncertaintyDisk> disks, const ControlContext &ctx);

/// Potential-neighbor filter run after receptions from `senders` at `now`.
std::set<int> update_potential_neighbors(const AgentState &state, std::span<const int> senders, double now,
                                         const ControlContext &ctx);

/// Stores inbox records and returns the ids that sent something.
std::vector<int> absorb_inbox(AgentState &state, std::span<const BroadcastMsg> inbox);

ControlDecision step_constant(AgentState &state, std::span<const BroadcastMsg> inbox, double now,
                              const ControlContext &ctx);
ControlDecision step_variable(AgentState &state, std::span<const BroadcastMsg> inbox, double now,
                              const ControlContext &ctx);

/// Baseline that broadcasts every step; each message carries the sender's position after this
/// step's move, so receivers act on exact current positions.
ControlDecision periodic_step(AgentState &state, std::span<const BroadcastMsg> inbox, double now,
                              const ControlContext &ctx);

struct SelfTriggeredDecision {
    ControlDecision control;
    bool request = false;
};

/// Idealized request/response baseline: `neighbors` are the true Voronoi neighbors.
SelfTriggeredDecision self_triggered_step(AgentState &state, std::span<const BroadcastMsg> responses, double now,
                                          const std::set<int> &neighbors, const ControlContext &ctx);

}  // namespace etb

#endif  // ETB_CONTROLLER_HPP
