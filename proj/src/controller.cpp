#include "etb/controller.hpp"

#include <algorithm>

namespace etb {

namespace {

constexpr double kTimeTol = 1e-9;

// Elapsed times inside the clock tolerance are rounding, not motion.
double grown(double rate, double elapsed) { return elapsed <= kTimeTol ? 0.0 : rate * elapsed; }

double region_diameter(const SimplePolygon &q) {
    double d = 0.0;
    for (const Point2 &a : q.vertices) {
        for (const Point2 &b : q.vertices) d = std::max(d, dist(a, b));
    }
    return d;
}

std::map<int, UncertaintyDisk> fresh_disks(const AgentState &s, double now, const ControlContext &ctx) {
    std::map<int, UncertaintyDisk> out;
    for (int k : s.potential) {
        const auto it = s.applied.find(k);
        if (it != s.applied.end()) out[k] = uncertainty_now(it->second, now, ctx.radius_cap);
    }
    return out;
}

std::map<int, UncertaintyDisk> held_disks(const AgentState &s, double now, double s_ref, const ControlContext &ctx) {
    std::map<int, UncertaintyDisk> out;
    for (int k : s.potential) {
        const auto it = s.applied.find(k);
        if (it != s.applied.end()) {
            out[k] = uncertainty_held(it->second, s.self_broadcast.time, now, s_ref, ctx.radius_cap);
        }
    }
    return out;
}

// Largest promise among the agent and its potential neighbors.
double promised_rate(const AgentState &s, const std::map<int, AgentRecord> &records) {
    double r = s.speed;
    for (int k : s.potential) {
        const auto it = records.find(k);
        if (it != records.end()) r = std::max(r, it->second.speed);
    }
    return r;
}

ControlDecision etb_step(AgentState &s, std::span<const BroadcastMsg> inbox, double now, const ControlContext &ctx,
                         bool variable) {
    const ControllerParams &par = ctx.params;
    ControlDecision out;

    const std::vector<int> senders = absorb_inbox(s, inbox);
    if (!senders.empty()) {
        std::set<int> next = update_potential_neighbors(s, senders, now, ctx);
        for (int k : next) out.new_neighbor = out.new_neighbor || !s.potential.contains(k);
        s.potential = std::move(next);
    }
    if (variable) s.hold_rate = std::max(s.hold_rate, promised_rate(s, s.memory));
    const double s_ref = variable ? s.hold_rate : par.s_max;

    bool broadcast = false;
    CellEstimate est;
    if (s.speed == 0.0) {
        s.applied = s.memory;
        est = estimate_cell(s.position, fresh_disks(s, now, ctx), ctx);
    } else if (out.new_neighbor) {
        // The broadcast for the new neighbor happens now, so this step already
        // runs on the refreshed records.
        broadcast = true;
        s.applied = s.memory;
        est = estimate_cell(s.position, fresh_disks(s, now, ctx), ctx);
    } else {
        est = estimate_cell(s.position, held_disks(s, now, s_ref, ctx), ctx);
    }

    if (s.speed == 0.0) {
        const bool may_start = !variable || now >= s.wait_until - kTimeTol;
        if (may_start && est.move) {
            s.speed = variable ? s.beta * par.s_max : par.s_max;
            broadcast = true;
        }
    } else if (!est.move) {
        s.applied = s.memory;
        est = estimate_cell(s.position, fresh_disks(s, now, ctx), ctx);
        if (variable && now - s.self_broadcast.time < par.dtb) s.beta = std::max(0.5 * s.beta, par.beta_min());
        if (est.move) {
            if (variable) s.speed = s.beta * par.s_max;
        } else {
            s.speed = 0.0;
            if (variable) s.wait_until = now + par.tau_d;
        }
        broadcast = true;
    }
    if (out.new_neighbor) broadcast = true;
    if (variable && s.speed > s.self_broadcast.speed) broadcast = true;

    out.speed_after = s.speed;
    out.target = est.target;
    out.velocity = control_input(s.position, est.target, s.speed);

    if (broadcast) {
        s.self_broadcast = {now, s.position, s.speed};
        s.applied = s.memory;
        s.hold_rate = promised_rate(s, s.applied);
        out.broadcast = BroadcastMsg{s.id, s.self_broadcast, broadcast_radius(s.position, est.dual)};
    }
    if (variable && s.speed != 0.0 && now - s.self_broadcast.time > par.dtb) {
        s.beta = std::min(2.0 * s.beta, 1.0);
        s.speed = s.beta * par.s_max;
    }
    s.last = std::move(est);
    return out;
}

}  // namespace

ControlContext::ControlContext(const SimplePolygon &q, const DensityField &phi, ControllerParams p)
    : region(q), density(phi), params(p), radius_cap(region_diameter(q)) {}

AgentState make_agent(int id, std::span<const Point2> positions, const std::set<int> &known) {
    if (id < 0 || static_cast<std::size_t>(id) >= positions.size()) throw ControllerError("agent id out of range");
    AgentState s;
    s.id = id;
    s.position = positions[static_cast<std::size_t>(id)];
    for (int k : known) {
        if (k == id) continue;
        s.memory[k] = {0.0, positions[static_cast<std::size_t>(k)], 0.0};
        s.potential.insert(k);
    }
    s.applied = s.memory;
    s.self_broadcast = {0.0, s.position, 0.0};
    return s;
}

UncertaintyDisk uncertainty_now(const AgentRecord &record, double now, double cap) {
    if (now < record.time - kTimeTol) throw ControllerError("record is newer than the current time");
    return {record.position, std::min(grown(record.speed, now - record.time), cap)};
}

UncertaintyDisk uncertainty_now(const std::map<int, AgentRecord> &memory, int j, double now, double cap) {
    const auto it = memory.find(j);
    if (it == memory.end()) throw ControllerError("no information");
    return uncertainty_now(it->second, now, cap);
}

UncertaintyDisk uncertainty_held(const AgentRecord &record, double t_self, double now, double s_ref, double cap) {
    if (t_self < record.time - kTimeTol || now < t_self - kTimeTol) {
        throw ControllerError("held uncertainty needs record time <= own broadcast time <= now");
    }
    const double r = grown(s_ref, now - t_self) + grown(record.speed, t_self - record.time);
    return {record.position, std::min(r, cap)};
}

double centroid_bound(const MassCentroid &gc, const MassCentroid &dc, const SimplePolygon &dual) {
    if (dc.empty()) throw ControllerError("degenerate dual cell");
    const double ratio = std::clamp(gc.mass() / dc.mass(), 0.0, 1.0);
    if (ratio == 1.0) return 0.0;
    return 2.0 * min_enclosing_circle(dual.vertices).radius * (1.0 - ratio);
}

Point2 target_point(const Point2 &p, const Point2 &gc, const Point2 &dc, double bound) {
    // Quadrature noise can leave the two centroids a hair further apart than the bound allows.
    const double half = 0.5 * dist(gc, dc);
    if (half > bound && half - bound <= 1e-6) bound = half;
    return project_onto_lens(p, gc, dc, bound);
}

bool condition_to_move(const Point2 &p, const Point2 &m, double eps) { return dist(p, m) > eps; }

Point2 control_input(const Point2 &p, const Point2 &m, double speed) {
    if (speed == 0.0) return {};
    const double d = dist(p, m);
    if (d == 0.0) throw ControllerError("moving agent has no direction");
    return (m - p) * (speed / d);
}

double broadcast_radius(const Point2 &p, const SimplePolygon &dual) { return exclusion_radius(p, dual); }

constexpr double kQuadratureSlack = 1e-4;

CellEstimate estimate_cell(const Point2 &p, std::map<int, UncertaintyDisk> disks, const ControlContext &ctx) {
    CellEstimate e;
    e.disks = std::move(disks);
    std::vector<UncertaintyDisk> others;
    others.reserve(e.disks.size());
    for (const auto &[k, d] : e.disks) others.push_back(d);
    e.guaranteed = guaranteed_cell(p, others, ctx.region, ctx.params.chords);
    e.dual = dual_guaranteed_cell(p, others, ctx.region, ctx.params.chords);
    e.dc = mass_centroid(e.dual, ctx.density);
    e.gc = mass_centroid(e.guaranteed, ctx.density);
    e.bound = centroid_bound(e.gc, e.dc, e.dual);
    const Point2 g = e.gc.empty() ? e.dc.centroid() : e.gc.centroid();
    // When the two cells differ by a sliver thinner than the quadrature resolves, the mass ratio
    // says nothing; let the bound cover the centroid gap instead.
    const double gap = 0.5 * dist(g, e.dc.centroid());
    if (gap > e.bound && gap - e.bound <= kQuadratureSlack * min_enclosing_circle(e.dual.vertices).radius) e.bound = gap;
    e.target = target_point(p, g, e.dc.centroid(), e.bound);
    e.move = condition_to_move(p, e.target, ctx.params.epsilon());
    return e;
}

std::set<int> update_potential_neighbors(const AgentState &state, std::span<const int> senders, double now,
                                         const ControlContext &ctx) {
    std::set<int> candidates = state.potential;
    bool fresh_sender = false;
    for (int j : senders) {
        if (j == state.id) continue;
        fresh_sender = fresh_sender || !state.potential.contains(j);
        candidates.insert(j);
    }
    const UncertaintyDisk own = fresh_sender ? UncertaintyDisk::exact(state.position)
                                             : uncertainty_now(state.self_broadcast, now, ctx.radius_cap);

    std::vector<int> ids;
    std::vector<UncertaintyDisk> disks;
    for (int k : candidates) {
        const auto it = state.memory.find(k);
        if (it == state.memory.end()) continue;
        ids.push_back(k);
        disks.push_back(uncertainty_now(it->second, now, ctx.radius_cap));
    }
    const SimplePolygon mine = dual_guaranteed_cell(own, disks, ctx.region, ctx.params.chords);

    std::set<int> kept;
    std::vector<UncertaintyDisk> rest;
    for (std::size_t a = 0; a < ids.size(); ++a) {
        rest.assign(1, own);
        for (std::size_t b = 0; b < ids.size(); ++b) {
            if (b != a) rest.push_back(disks[b]);
        }
        const SimplePolygon theirs = dual_guaranteed_cell(disks[a], rest, ctx.region, ctx.params.chords);
        if (convex_hulls_intersect(mine, theirs)) kept.insert(ids[a]);
    }
    return kept;
}

std::vector<int> absorb_inbox(AgentState &state, std::span<const BroadcastMsg> inbox) {
    std::vector<int> senders;
    for (const BroadcastMsg &m : inbox) {
        if (m.sender == state.id) continue;
        auto [it, inserted] = state.memory.try_emplace(m.sender, m.record);
        if (!inserted && m.record.time >= it->second.time) it->second = m.record;
        senders.push_back(m.sender);
    }
    std::sort(senders.begin(), senders.end());
    senders.erase(std::unique(senders.begin(), senders.end()), senders.end());
    return senders;
}

ControlDecision step_constant(AgentState &state, std::span<const BroadcastMsg> inbox, double now,
                              const ControlContext &ctx) {
    return etb_step(state, inbox, now, ctx, false);
}

ControlDecision step_variable(AgentState &state, std::span<const BroadcastMsg> inbox, double now,
                              const ControlContext &ctx) {
    return etb_step(state, inbox, now, ctx, true);
}

ControlDecision periodic_step(AgentState &state, std::span<const BroadcastMsg> inbox, double now,
                              const ControlContext &ctx) {
    const std::vector<int> senders = absorb_inbox(state, inbox);
    if (!senders.empty()) state.potential = std::set<int>(senders.begin(), senders.end());
    state.applied = state.memory;

    CellEstimate est = estimate_cell(state.position, fresh_disks(state, now, ctx), ctx);
    ControlDecision out;
    state.speed = est.move ? ctx.params.s_max : 0.0;
    out.speed_after = state.speed;
    out.target = est.target;
    out.velocity = control_input(state.position, est.target, state.speed);
    // Announce where this step's motion ends, stamped with the arrival time, so
    // receivers hold zero-age positions. Same arithmetic as the engine's move.
    Point2 next = state.position;
    if (state.speed > 0.0) {
        const double reach = dist(state.position, est.target);
        const double len = std::min(state.speed * ctx.params.dt, reach);
        next = len >= reach ? est.target : state.position + out.velocity * (len / state.speed);
    }
    state.self_broadcast = {now + ctx.params.dt, next, state.speed};
    out.broadcast = BroadcastMsg{state.id, state.self_broadcast, broadcast_radius(state.position, est.dual)};
    state.last = std::move(est);
    return out;
}

SelfTriggeredDecision self_triggered_step(AgentState &state, std::span<const BroadcastMsg> responses, double now,
                                          const std::set<int> &neighbors, const ControlContext &ctx) {
    absorb_inbox(state, responses);
    state.potential = neighbors;
    state.potential.erase(state.id);

    // No promises here: every neighbor may have moved at full speed since its last report.
    bool missing = false;
    std::map<int, UncertaintyDisk> disks;
    for (int k : state.potential) {
        const auto it = state.memory.find(k);
        if (it == state.memory.end()) {
            missing = true;
            continue;
        }
        AgentRecord worst = it->second;
        worst.speed = ctx.params.s_max;
        disks[k] = uncertainty_now(worst, now, ctx.radius_cap);
    }
    state.applied = state.memory;

    SelfTriggeredDecision out;
    CellEstimate est = estimate_cell(state.position, std::move(disks), ctx);
    const bool go = est.move && !missing;
    state.speed = go ? ctx.params.s_max : 0.0;
    out.request = !go && (missing || est.bound > ctx.params.epsilon());
    out.control.speed_after = state.speed;
    out.control.target = est.target;
    out.control.velocity = control_input(state.position, est.target, state.speed);
    state.last = std::move(est);
    return out;
}

}  // namespace etb
