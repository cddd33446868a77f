#include <doctest.h>

#include <map>
#include <sstream>

#include "etb/checks.hpp"
#include "etb/sim.hpp"

using namespace etb;

namespace {

std::vector<Point2> reference_positions() {
    return {{11.8, 36.3}, {1.1, 6.0}, {11.7, 20.1}, {15.3, 5.5}, {11.6, 1.0}, {7.5, 9.1}, {17.0, 15.3}, {13.5, 6.3}};
}

Scenario reference(ControllerKind k, double duration = 600.0) {
    Scenario sc;
    sc.initial_positions = reference_positions();
    sc.controller = k;
    sc.duration = duration;
    return sc;
}

// Full-length reference runs are expensive; compute each once.
const SimTrace &full_run(ControllerKind k) {
    static std::map<ControllerKind, SimTrace> cache;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, run(reference(k))).first;
    return it->second;
}

std::string trace_bytes(const SimTrace &t) {
    std::ostringstream out;
    write_trace_csv(out, t);
    write_metrics_csv(out, t);
    return out.str();
}

long msgs_until(const SimTrace &t, double until) {
    long n = 0;
    for (const auto &s : t.steps) {
        if (s.t < until) n += s.messages;
    }
    return n;
}

}  // namespace

TEST_CASE("deliver examples") {
    const std::vector<Point2> pos{{0, 0}, {3, 4}, {10, 0}};
    SUBCASE("tiny radius reaches nobody") {
        const std::vector<BroadcastMsg> b{{0, {}, 1e-9}, {2, {}, 1e-9}};
        for (const auto &in : deliver(b, pos)) CHECK(in.empty());
    }
    SUBCASE("diameter radius reaches everyone else") {
        const std::vector<BroadcastMsg> b{{1, {}, 40 * std::sqrt(2.0)}};
        const auto in = deliver(b, pos);
        CHECK(in[0].size() == 1);
        CHECK(in[1].empty());
        CHECK(in[2].size() == 1);
    }
    SUBCASE("closed ball at the exact distance") {
        const std::vector<BroadcastMsg> b{{0, {}, 5.0}};
        const auto in = deliver(b, pos);
        CHECK(in[1].size() == 1);
        CHECK(in[2].empty());
    }
    SUBCASE("inbox ordered by sender") {
        const std::vector<BroadcastMsg> b{{2, {}, 100}, {1, {}, 100}};
        const auto in = deliver(b, pos);
        REQUIRE(in[0].size() == 2);
        CHECK(in[0][0].sender == 1);
        CHECK(in[0][1].sender == 2);
    }
}

TEST_CASE("scenario validation") {
    Scenario sc = reference(ControllerKind::EtbConstant, 1.0);
    CHECK_NOTHROW(sc.validate());
    sc.initial_positions.push_back(sc.initial_positions[0]);
    CHECK_THROWS_AS(sc.validate(), SimError);
    sc = reference(ControllerKind::EtbConstant, 1.0);
    sc.initial_positions.push_back({41, 3});
    CHECK_THROWS_AS(sc.validate(), SimError);
    sc = reference(ControllerKind::EtbConstant, 0.001);
    CHECK_THROWS_AS(sc.validate(), SimError);
    sc = reference(ControllerKind::EtbConstant, 1.0);
    sc.params.dt = 0.0;
    CHECK_THROWS_AS(sc.validate(), SimError);
    CHECK_THROWS_WITH_AS(parse_controller("nope"),
                         "unknown controller 'nope' (valid: etb-constant, etb-variable, periodic, self-triggered)",
                         SimError);
}

TEST_CASE("zero duration gives the initial row only") {
    const SimTrace t = run(reference(ControllerKind::EtbVariable, 0.0));
    REQUIRE(t.steps.size() == 1);
    CHECK(t.steps[0].t == 0.0);
    CHECK(t.steps[0].H.has_value());
    CHECK(t.total_messages == 0);
}

TEST_CASE("single agent settles at the region centroid") {
    Scenario sc;
    sc.initial_positions = {{3, 35}};
    sc.duration = 600.0;
    const SimTrace t = run(sc);
    const Point2 c = mass_centroid(sc.region, sc.density).centroid();
    CHECK(dist(t.steps.back().positions[0], c) <= sc.params.epsilon() + 1e-9);
}

TEST_CASE("runs are deterministic and share H(0)") {
    std::optional<double> h0;
    for (ControllerKind k : all_controllers()) {
        const Scenario sc = reference(k, 10.0);
        const SimTrace a = run(sc), b = run(sc);
        CHECK(trace_bytes(a) == trace_bytes(b));
        if (!h0) h0 = a.steps.front().H;
        CHECK(*a.steps.front().H == *h0);
    }
}

TEST_CASE("metrics, conservation and H sampling") {
    const Scenario sc = reference(ControllerKind::EtbConstant, 10.0);
    const SimTrace t = run(sc);
    const auto rows = compute_metrics(t);
    REQUIRE(rows.size() == sc.steps() + 1);
    long sum = 0;
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        long step = 0;
        for (const auto &e : t.steps[k].events) step += e.count;
        CHECK(step == t.steps[k].messages);
        sum += step;
        CHECK(rows[k].msgs_cum == sum);
        CHECK(t.steps[k].H.has_value() == (k % 60 == 0 || k + 1 == t.steps.size()));
    }
    CHECK(sum == t.total_messages);
    CHECK(reduction_percent(t.total_messages, t.total_messages) == 0.0);
    CHECK(reduction_percent(25, 100) == doctest::Approx(75.0));

    const auto steps = to_steps(t);
    CHECK(check_delivery(steps).ok());
    CHECK(check_in_region(steps, sc.region).ok());
}

TEST_CASE("periodic baseline sends one message per agent per step") {
    const SimTrace &t = full_run(ControllerKind::Periodic);
    CHECK(t.total_messages == 8L * 36000L);
}

TEST_CASE("every controller lowers H") {
    for (ControllerKind k : all_controllers()) {
        const SimTrace &t = full_run(k);
        CHECK(*t.steps.back().H < *t.steps.front().H);
    }
}

TEST_CASE("etb controllers reach the periodic baseline's H") {
    const double hp = *full_run(ControllerKind::Periodic).steps.back().H;
    for (ControllerKind k : {ControllerKind::EtbConstant, ControllerKind::EtbVariable}) {
        const double h = *full_run(k).steps.back().H;
        CHECK(std::abs(h - hp) <= 0.05 * hp);
    }
}

TEST_CASE("self-triggered traffic overtakes periodic between 150 s and 600 s") {
    const SimTrace &st = full_run(ControllerKind::SelfTriggered);
    const SimTrace &pe = full_run(ControllerKind::Periodic);
    REQUIRE(st.steps.size() == pe.steps.size());
    long a = 0, b = 0;
    std::optional<double> crossing;
    for (std::size_t k = 0; k < st.steps.size(); ++k) {
        a += st.steps[k].messages;
        b += pe.steps[k].messages;
        if (!crossing && a > b) crossing = st.steps[k].t;
    }
    REQUIRE(crossing.has_value());
    MESSAGE("crossing at t = " << *crossing);
    CHECK(*crossing >= 150.0);
    CHECK(*crossing <= 600.0);
    CHECK(msgs_until(st, 300.0) > msgs_until(pe, 300.0));
}

TEST_CASE("communication reductions against the baselines") {
    const long pe = full_run(ControllerKind::Periodic).total_messages;
    const long st = full_run(ControllerKind::SelfTriggered).total_messages;
    const long c = full_run(ControllerKind::EtbConstant).total_messages;
    const long v = full_run(ControllerKind::EtbVariable).total_messages;
    MESSAGE("messages: periodic " << pe << ", self-triggered " << st << ", constant " << c << ", variable " << v);
    const double rc = reduction_percent(c, pe);
    CHECK(rc >= 50.0);
    CHECK(rc <= 75.0);
    CHECK(reduction_percent(v, pe) >= 90.0);
    CHECK(reduction_percent(v, st) >= 90.0);
    CHECK(pe > c);
    CHECK(c > v);
}

TEST_CASE("variable speed leaves quiet stretches late in the run") {
    const SimTrace &t = full_run(ControllerKind::EtbVariable);
    std::size_t longest = 0, run_len = 0;
    for (const auto &s : t.steps) {
        if (s.t < 300.0) continue;
        run_len = s.messages == 0 ? run_len + 1 : 0;
        longest = std::max(longest, run_len);
    }
    MESSAGE("longest silent stretch after 300 s: " << longest << " steps");
    CHECK(longest >= 60);
}
