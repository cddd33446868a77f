#include "etb/sim.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace etb {

namespace {

constexpr std::array<std::pair<ControllerKind, std::string_view>, 4> kNames{{
    {ControllerKind::EtbConstant, "etb-constant"},
    {ControllerKind::EtbVariable, "etb-variable"},
    {ControllerKind::Periodic, "periodic"},
    {ControllerKind::SelfTriggered, "self-triggered"},
}};

// Voronoi neighbors plus their neighbors.
std::vector<std::set<int>> initial_knowledge(std::span<const Point2> positions, const SimplePolygon &region) {
    const auto nb = voronoi_neighbors(positions, region);
    std::vector<std::set<int>> out(nb.size());
    for (std::size_t i = 0; i < nb.size(); ++i) {
        for (int j : nb[i]) {
            out[i].insert(j);
            out[i].insert(nb[static_cast<std::size_t>(j)].begin(), nb[static_cast<std::size_t>(j)].end());
        }
        out[i].erase(static_cast<int>(i));
    }
    return out;
}

}  // namespace

std::string_view controller_name(ControllerKind kind) {
    for (const auto &[k, name] : kNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

ControllerKind parse_controller(std::string_view name) {
    for (const auto &[k, n] : kNames) {
        if (n == name) return k;
    }
    std::string valid;
    for (const auto &[k, n] : kNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw SimError(fmt::format("unknown controller '{}' (valid: {})", name, valid));
}

std::vector<ControllerKind> all_controllers() {
    std::vector<ControllerKind> out;
    for (const auto &[k, n] : kNames) out.push_back(k);
    return out;
}

void Scenario::validate() const {
    if (region.size() < 3 || !is_convex(region)) throw SimError("region must be a convex polygon");
    if (!(params.dt > 0.0)) throw SimError("time step must be positive");
    if (!(duration >= 0.0)) throw SimError("duration must be >= 0");
    if (duration > 0.0 && duration < params.dt) throw SimError("duration must be at least one time step");
    if (!(params.s_max > 0.0)) throw SimError("s_max must be positive");
    if (params.chords < 2) throw SimError("need at least 2 chords");
    if (h_stride < 1) throw SimError("H stride must be >= 1");
    if (initial_positions.empty()) throw SimError("scenario has no agents");
    for (std::size_t i = 0; i < initial_positions.size(); ++i) {
        if (!point_in_polygon(initial_positions[i], region)) {
            throw SimError(fmt::format("agent {} starts outside the region", i));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (initial_positions[i] == initial_positions[j]) {
                throw SimError(fmt::format("agents {} and {} share a position", j, i));
            }
        }
    }
}

std::size_t Scenario::steps() const { return static_cast<std::size_t>(std::llround(duration / params.dt)); }

std::vector<std::vector<BroadcastMsg>> deliver(std::span<const BroadcastMsg> broadcasts,
                                               std::span<const Point2> positions) {
    std::vector<std::vector<BroadcastMsg>> inbox(positions.size());
    std::vector<BroadcastMsg> sorted(broadcasts.begin(), broadcasts.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const BroadcastMsg &a, const BroadcastMsg &b) { return a.sender < b.sender; });
    for (const BroadcastMsg &m : sorted) {
        const Point2 &from = positions[static_cast<std::size_t>(m.sender)];
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (static_cast<int>(i) == m.sender) continue;
            if (dist(positions[i], from) <= m.radius) inbox[i].push_back(m);
        }
    }
    return inbox;
}

SimTrace run(const Scenario &sc, const Observer &observer) {
    sc.validate();
    const std::size_t n = sc.initial_positions.size();
    const std::size_t total = sc.steps();
    const ControlContext ctx(sc.region, sc.density, sc.params);
    const double dt = sc.params.dt;

    std::vector<Point2> pos = sc.initial_positions;
    const auto known = initial_knowledge(pos, sc.region);
    std::vector<AgentState> agents;
    for (std::size_t i = 0; i < n; ++i) agents.push_back(make_agent(static_cast<int>(i), pos, known[i]));

    SimTrace trace;
    trace.controller = sc.controller;
    trace.steps.reserve(total + 1);
    std::vector<std::vector<BroadcastMsg>> inbox(n);
    std::vector<ControlDecision> decisions(n);

    for (std::size_t k = 0; k < total; ++k) {
        const double t = static_cast<double>(k) * dt;
        std::vector<std::vector<BroadcastMsg>> next(n);
        std::vector<MessageEvent> events;
        std::vector<BroadcastMsg> sent;

        std::vector<std::set<int>> oracle;
        if (sc.controller == ControllerKind::SelfTriggered) oracle = voronoi_neighbors(pos, sc.region);

        for (std::size_t i = 0; i < n; ++i) {
            switch (sc.controller) {
            case ControllerKind::EtbConstant: decisions[i] = step_constant(agents[i], inbox[i], t, ctx); break;
            case ControllerKind::EtbVariable: decisions[i] = step_variable(agents[i], inbox[i], t, ctx); break;
            case ControllerKind::Periodic: decisions[i] = periodic_step(agents[i], inbox[i], t, ctx); break;
            case ControllerKind::SelfTriggered: {
                const SelfTriggeredDecision d = self_triggered_step(agents[i], inbox[i], t, oracle[i], ctx);
                decisions[i] = d.control;
                if (d.request) {
                    MessageEvent ev;
                    ev.sender = static_cast<int>(i);
                    ev.request = true;
                    ev.receivers.assign(oracle[i].begin(), oracle[i].end());
                    ev.count = 1 + static_cast<int>(ev.receivers.size());
                    for (int j : ev.receivers) {
                        const AgentRecord r{t, pos[static_cast<std::size_t>(j)], sc.params.s_max};
                        next[i].push_back({j, r, 0.0});
                    }
                    events.push_back(std::move(ev));
                }
                break;
            }
            }
            if (decisions[i].broadcast) sent.push_back(*decisions[i].broadcast);
        }

        const auto delivered = deliver(sent, pos);
        for (const BroadcastMsg &m : sent) {
            MessageEvent ev;
            ev.sender = m.sender;
            ev.radius = m.radius;
            events.push_back(std::move(ev));
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (const BroadcastMsg &m : delivered[i]) {
                next[i].push_back(m);
                for (MessageEvent &ev : events) {
                    if (!ev.request && ev.sender == m.sender) ev.receivers.push_back(static_cast<int>(i));
                }
            }
        }
        std::sort(events.begin(), events.end(),
                  [](const MessageEvent &a, const MessageEvent &b) { return a.sender < b.sender; });

        if (observer) observer(StepView{k, t, agents, pos, decisions, events});

        StepRecord row;
        row.t = t;
        row.positions = pos;
        for (const ControlDecision &d : decisions) row.speeds.push_back(d.speed_after);
        for (const MessageEvent &ev : events) row.messages += ev.count;
        row.events = std::move(events);
        if (k % static_cast<std::size_t>(sc.h_stride) == 0) row.H = objective_H(pos, sc.region, sc.density);
        trace.total_messages += row.messages;
        trace.steps.push_back(std::move(row));

        for (std::size_t i = 0; i < n; ++i) {
            const ControlDecision &d = decisions[i];
            if (d.speed_after <= 0.0) continue;
            const double reach = dist(pos[i], d.target);
            const double len = std::min(d.speed_after * dt, reach);
            pos[i] = len >= reach ? d.target : pos[i] + d.velocity * (len / d.speed_after);
            if (!point_in_polygon(pos[i], sc.region)) {
                throw SimError(fmt::format("containment violation: agent {} left the region at t={}", i, t + dt));
            }
            agents[i].position = pos[i];
        }
        inbox = std::move(next);
    }

    StepRecord last;
    last.t = static_cast<double>(total) * dt;
    last.positions = pos;
    for (const AgentState &a : agents) last.speeds.push_back(total == 0 ? 0.0 : a.speed);
    last.H = objective_H(pos, sc.region, sc.density);
    trace.steps.push_back(std::move(last));
    return trace;
}

std::vector<MetricsRow> compute_metrics(const SimTrace &trace) {
    std::vector<MetricsRow> rows;
    rows.reserve(trace.steps.size());
    long cum = 0;
    for (const StepRecord &s : trace.steps) {
        cum += s.messages;
        rows.push_back({s.t, s.H, cum, s.messages});
    }
    return rows;
}

double reduction_percent(long a, long b) {
    if (b == 0) return 0.0;
    return 100.0 * (1.0 - static_cast<double>(a) / static_cast<double>(b));
}

}  // namespace etb
