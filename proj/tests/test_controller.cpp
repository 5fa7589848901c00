#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "vfp/algebra.hpp"
#include "vfp/controller.hpp"
#include "vfp/environment.hpp"

using namespace vfp;

namespace {

ControllerConfig base_cfg(long horizon) {
    ControllerConfig cfg;
    cfg.mode = ControllerMode::base;
    cfg.horizon = horizon;
    return cfg;
}

ControllerConfig fast_cfg(long horizon, double rho = 1.05) {
    ControllerConfig cfg;
    cfg.mode = ControllerMode::fast;
    cfg.rho = rho;
    cfg.horizon = horizon;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(base_cfg(10).validate());
    ControllerConfig bad = fast_cfg(10, 1.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = base_cfg(0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = base_cfg(10);
    bad.exploration_floor = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("update schedule enumeration") {
    // independent re-enumeration of ceil(rho^k)
    auto expect = [](double rho, long horizon) {
        std::vector<long> out;
        for (int k = 0;; ++k) {
            long t = static_cast<long>(std::ceil(std::pow(rho, k)));
            if (t > horizon) break;
            if (out.empty() || out.back() != t) out.push_back(t);
        }
        return out;
    };
    for (double rho : {1.05, 1.1, 1.5, 2.0}) {
        for (long horizon : {10L, 1000L, 10000L}) {
            CHECK(update_slots(rho, horizon) == expect(rho, horizon));
        }
    }
    CHECK(update_slots(1.05, 10000).size() == 147);  // frozen from the enumeration
    CHECK_THROWS_AS(update_slots(1.0, 100), std::invalid_argument);
}

TEST_CASE("forced exploration") {
    ControllerConfig cfg = base_cfg(100);

    SUBCASE("identity at the end of the horizon") {
        oracles::TestRng rng(1);
        Policy p = oracles::random_policy(4, 3, rng);
        Policy q = apply_forced_exploration(p, 100, cfg);
        CHECK(q.p == p.p);  // bit-identical
    }
    SUBCASE("worked example") {
        Policy p(3, 1);
        p.at(0, 0) = 1.0;
        Policy q = apply_forced_exploration(p, 0, cfg);  // eps = 0.01
        CHECK(q.at(0, 0) == doctest::Approx(1.0 / 1.02).epsilon(1e-12));
        CHECK(q.at(1, 0) == doctest::Approx(0.01 / 1.02).epsilon(1e-12));
        CHECK(q.at(2, 0) == doctest::Approx(0.01 / 1.02).epsilon(1e-12));
    }
    SUBCASE("columns stay stochastic and floored") {
        oracles::TestRng rng(2);
        for (int rep = 0; rep < 200; ++rep) {
            int n = rng.uniform_int(2, 9), m = rng.uniform_int(1, 4);
            Policy p = oracles::random_policy(n, m, rng);
            // plant some hard zeros
            for (int j = 0; j < m; ++j) {
                int i = rng.uniform_int(0, n - 1);
                double x = p.at(i, j);
                p.at(i, j) = 0.0;
                p.at((i + 1) % n, j) += x;
            }
            long t = rng.uniform_int(0, 100);
            Policy q = apply_forced_exploration(p, t, cfg);
            double eps = 0.01 * (1.0 - t / 100.0);
            for (int j = 0; j < m; ++j) {
                CHECK(std::fabs(q.column_sum(j) - 1.0) < 1e-12);
                for (int i = 0; i < n; ++i) {
                    double floor_value = std::min(eps, p.at(i, j)) / (1.0 + n * eps);
                    CHECK(q.at(i, j) >= floor_value - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("draw_node") {
    ControllerConfig cfg = base_cfg(100000);
    SUBCASE("degenerate column is deterministic once exploration ends") {
        Policy p(3, 1);
        p.at(0, 0) = 1.0;
        for (long s = 0; s < 50; ++s) CHECK(draw_node(p, 0, 100000, cfg, 7) == 0);
    }
    SUBCASE("frequencies follow the column") {
        Policy p(4, 1, 0.25);
        std::vector<long> counts(4, 0);
        const long draws = 40000;
        for (long s = 1; s <= draws; ++s) ++counts[draw_node(p, 0, s, cfg, 99)];
        for (int i = 0; i < 4; ++i)
            CHECK(std::fabs(counts[i] / static_cast<double>(draws) - 0.25) < 0.02);
    }
    SUBCASE("broken column is rejected") {
        Policy p(3, 1, 0.1);
        CHECK_THROWS_AS(draw_node(p, 0, 1, cfg, 1), std::logic_error);
    }
}

TEST_CASE("first slot rejects everything") {
    ProblemInstance inst = sample_instance(4, 2, 2, 0.1, 11);
    Controller ctrl(inst.capacity, inst.n_classes, base_cfg(100), 5);
    CHECK(ctrl.maybe_update(1));
    for (int j = 0; j < inst.n_classes; ++j)
        CHECK(ctrl.policy().at(inst.fictitious_node(), j) == 1.0);
    CHECK(ctrl.lp_solves() == 0);
}

TEST_CASE("null-class arrivals are no-ops on the sink") {
    ProblemInstance inst = sample_instance(3, 2, 1, 0.1, 12);
    inst.arrival_prob = {0.0, 0.0, 1.0};
    inst.validate();
    Environment env({inst, 3, 20});
    Controller ctrl(inst.capacity, inst.n_classes, base_cfg(20), 3);
    for (long t = 1; t <= 20; ++t) {
        ctrl.maybe_update(t);
        SlotObservation obs = env.step_arrival();
        int node = ctrl.decide(obs);
        CHECK(node == inst.fictitious_node());
        double cost = env.submit_placement(node);
        CHECK(cost == 0.0);
        ctrl.record(obs, node, cost);
    }
    CHECK(ctrl.observations().n_class()[inst.null_class()] == 20.0);
}

TEST_CASE("base mode solves the LP every slot after the first") {
    ProblemInstance inst = sample_instance(3, 2, 1, 0.1, 13);
    Environment env({inst, 4, 50});
    Controller ctrl(inst.capacity, inst.n_classes, base_cfg(50), 4);
    for (long t = 1; t <= 50; ++t) {
        CHECK(ctrl.maybe_update(t));
        SlotObservation obs = env.step_arrival();
        int node = ctrl.decide(obs);
        ctrl.record(obs, node, env.submit_placement(node));
    }
    CHECK(ctrl.lp_solves() == 49);  // slot 1 installs the reject-all policy
}

TEST_CASE("fast mode freezes the policy between update slots") {
    ProblemInstance inst = sample_instance(4, 2, 2, 0.1, 14);
    const long T = 2000;
    Environment env({inst, 5, T});
    Controller ctrl(inst.capacity, inst.n_classes, fast_cfg(T), 5);
    std::vector<long> schedule = update_slots(1.05, T);
    std::size_t next = 0;
    Policy frozen;
    for (long t = 1; t <= T; ++t) {
        bool updated = ctrl.maybe_update(t);
        bool expected = next < schedule.size() && schedule[next] == t;
        CHECK(updated == expected);
        if (expected) {
            ++next;
            frozen = ctrl.policy();
        } else {
            CHECK(ctrl.policy().p == frozen.p);  // bit-identical between updates
        }
        SlotObservation obs = env.step_arrival();
        int node = ctrl.decide(obs);
        ctrl.record(obs, node, env.submit_placement(node));
    }
    CHECK(next == schedule.size());
    CHECK(ctrl.lp_solves() == static_cast<long>(schedule.size()) - 1);
    CHECK(ctrl.lp_solves() <=
          static_cast<long>(std::ceil(std::log(static_cast<double>(T)) / std::log(1.05))) + 1);
}

TEST_CASE("base policy equals a from-scratch bounds+LP recomputation") {
    ProblemInstance inst = sample_instance(4, 2, 2, 0.1, 15);
    const long T = 300;
    Environment env({inst, 6, T});
    ControllerConfig cfg = base_cfg(T);
    cfg.forced_exploration = false;
    Controller ctrl(inst.capacity, inst.n_classes, cfg, 6);

    ObservationState shadow(inst.capacity, inst.n_classes,
                            default_kappa_scale(inst.capacity));
    for (long t = 1; t <= T; ++t) {
        ctrl.maybe_update(t);
        if (t >= 2) {
            ConfidenceBounds b = shadow.bounds();
            PlacementLpResult ref =
                solve_placement_lp(b.cost_lower, b.lambda_lower, b.kappa_upper);
            REQUIRE(ref.converged);
            CHECK(ctrl.policy().p == ref.policy.p);  // exact pipeline equality
        }
        SlotObservation obs = env.step_arrival();
        int node = ctrl.decide(obs);
        double cost = env.submit_placement(node);
        ctrl.record(obs, node, cost);
        shadow.record_slot(obs, node, cost);
    }
}

TEST_CASE("fast policies subsample the base sequence under a shared trace") {
    ProblemInstance inst = sample_instance(4, 2, 2, 0.1, 16);
    const long T = 1500;
    Environment env({inst, 7, T});
    Controller base(inst.capacity, inst.n_classes, base_cfg(T), 7);
    Controller fast(inst.capacity, inst.n_classes, fast_cfg(T), 7);
    for (long t = 1; t <= T; ++t) {
        base.maybe_update(t);
        bool updated = fast.maybe_update(t);
        if (updated) CHECK(fast.policy().p == base.policy().p);
        // identical forced decisions for both controllers
        SlotObservation obs = env.step_arrival();
        int node = static_cast<int>(t % inst.n_nodes);
        double cost = env.submit_placement(node);
        base.record(obs, node, cost);
        fast.record(obs, node, cost);
    }
}

TEST_CASE("every computed policy is feasible for the bounds it used") {
    ProblemInstance inst = sample_instance(5, 3, 2, 0.1, 17);
    const long T = 400;
    Environment env({inst, 8, T});
    Controller ctrl(inst.capacity, inst.n_classes, base_cfg(T), 8);
    for (long t = 1; t <= T; ++t) {
        ctrl.maybe_update(t);
        if (t >= 2) {
            ConfidenceBounds b = ctrl.observations().bounds();
            CHECK(max_constraint(ctrl.policy(), b.kappa_upper) <= 1.0 + 1e-6);
        }
        SlotObservation obs = env.step_arrival();
        int node = ctrl.decide(obs);
        ctrl.record(obs, node, env.submit_placement(node));
    }
}

TEST_CASE("LP pivot cap falls back to the previous policy") {
    ProblemInstance inst = sample_instance(4, 2, 2, 0.1, 18);
    ControllerConfig cfg = base_cfg(50);
    cfg.lp_pivot_cap = 1;  // nothing real can solve in one pivot
    Environment env({inst, 9, 50});
    Controller ctrl(inst.capacity, inst.n_classes, cfg, 9);
    for (long t = 1; t <= 50; ++t) {
        ctrl.maybe_update(t);
        // the reject-all policy from slot 1 must survive every failed solve
        for (int j = 0; j < inst.n_classes; ++j)
            CHECK(ctrl.policy().at(inst.fictitious_node(), j) == 1.0);
        SlotObservation obs = env.step_arrival();
        int node = ctrl.decide(obs);
        ctrl.record(obs, node, env.submit_placement(node));
    }
    CHECK(ctrl.lp_failures() == 49);
}

TEST_CASE("played policy applies the exploration floor") {
    ProblemInstance inst = sample_instance(3, 1, 1, 0.1, 19);
    ControllerConfig cfg = base_cfg(1000);
    Controller ctrl(inst.capacity, inst.n_classes, cfg, 10);
    ctrl.maybe_update(1);
    Policy played = ctrl.played_policy(1);
    // reject-all plus the floor on everything else
    double eps = 0.01 * (1.0 - 1.0 / 1000.0);
    for (int j = 0; j < inst.n_classes; ++j) {
        CHECK(std::fabs(played.column_sum(j) - 1.0) < 1e-12);
        for (int i = 0; i + 1 < inst.n_nodes; ++i)
            CHECK(played.at(i, j) == doctest::Approx(eps / (1.0 + 3 * eps)).epsilon(1e-9));
    }
}
