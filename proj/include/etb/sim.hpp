#ifndef ETB_SIM_HPP
#define ETB_SIM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etb/controller.hpp"

namespace etb {

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ControllerKind { EtbConstant, EtbVariable, Periodic, SelfTriggered };

std::string_view controller_name(ControllerKind kind);
/// Throws SimError listing the valid names.
ControllerKind parse_controller(std::string_view name);
std::vector<ControllerKind> all_controllers();

struct Scenario {
    SimplePolygon region = SimplePolygon::rectangle(0, 0, 40, 40);
    DensityField density = DensityField::reference_field();
    std::vector<Point2> initial_positions;
    double duration = 600.0;
    ControllerKind controller = ControllerKind::EtbConstant;
    ControllerParams params;
    int h_stride = 60;
    std::uint64_t seed = 0;

    /// Throws SimError on distinctness, containment or timing problems.
    void validate() const;
    std::size_t steps() const;
};

struct MessageEvent {
    int sender = -1;
    double radius = 0.0;
    std::vector<int> receivers;
    /// Self-triggered request; `receivers` are then the responders.
    bool request = false;
    /// Messages this event costs: 1 for a broadcast, 1 + responders for a request.
    int count = 1;
};

struct StepRecord {
    double t = 0.0;
    std::vector<Point2> positions;
    std::vector<double> speeds;
    std::vector<MessageEvent> events;
    long messages = 0;
    std::optional<double> H;
};

struct SimTrace {
    ControllerKind controller = ControllerKind::EtbConstant;
    std::vector<StepRecord> steps;
    long total_messages = 0;
};

/// Per-step view handed to observers after every agent has decided and before anyone moves.
struct StepView {
    std::size_t step = 0;
    double t = 0.0;
    std::span<const AgentState> agents;
    std::span<const Point2> positions;
    std::span<const ControlDecision> decisions;
    std::span<const MessageEvent> events;
};

using Observer = std::function<void(const StepView &)>;

/// Agent i gets j's message iff |p_i - p_j| <= r_j; inboxes are ordered by sender.
std::vector<std::vector<BroadcastMsg>> deliver(std::span<const BroadcastMsg> broadcasts,
                                               std::span<const Point2> positions);

SimTrace run(const Scenario &scenario, const Observer &observer = {});

struct MetricsRow {
    double t = 0.0;
    std::optional<double> H;
    long msgs_cum = 0;
    long msgs_step = 0;
};

std::vector<MetricsRow> compute_metrics(const SimTrace &trace);

/// 100 (1 - a / b).
double reduction_percent(long a, long b);

}  // namespace etb

#endif  // ETB_SIM_HPP
