#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vfp/environment.hpp"

using namespace vfp;

TEST_CASE("sample_instance builds the fictitious node and null class") {
    ProblemInstance inst = sample_instance(10, 3, 2, 0.1, 42);
    CHECK(inst.n_nodes == 11);
    CHECK(inst.n_classes == 4);
    const int sink = inst.fictitious_node();
    for (int j = 0; j < 3; ++j) CHECK(inst.cost_mean.at(sink, j) == 1.0);
    CHECK(inst.cost_mean.at(sink, inst.null_class()) == 0.0);
    for (int k = 0; k < 2; ++k) CHECK(inst.capacity.at(sink, k) == kInfiniteCapacity);
    for (int i = 0; i < 10; ++i)
        for (int k = 0; k < 2; ++k) CHECK(inst.capacity.at(i, k) == 0.1);
    for (int j = 0; j < 4; ++j) CHECK(inst.arrival_prob[j] == doctest::Approx(0.25));
    CHECK_NOTHROW(inst.validate());
}

TEST_CASE("sample_instance is deterministic in the seed") {
    ProblemInstance a = sample_instance(5, 2, 2, 0.1, 1234);
    ProblemInstance b = sample_instance(5, 2, 2, 0.1, 1234);
    CHECK(a.cost_mean.v == b.cost_mean.v);
    CHECK(a.demand_mean.v == b.demand_mean.v);
    ProblemInstance c = sample_instance(5, 2, 2, 0.1, 1235);
    CHECK(a.cost_mean.v != c.cost_mean.v);
}

TEST_CASE("sample_instance rejects bad arguments") {
    CHECK_THROWS_AS(sample_instance(0, 2, 2, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_instance(2, 0, 2, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_instance(2, 2, 0, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_instance(2, 2, 2, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_instance(2, 2, 2, -1.0, 1), std::invalid_argument);
}

TEST_CASE("sampled means are uniform on [0,1]") {
    // law-of-large-numbers check over ~1e5 demand means
    double sum = 0.0;
    long count = 0;
    for (int s = 0; s < 90; ++s) {
        ProblemInstance inst = sample_instance(24, 23, 2, 0.1, 1000 + s);
        for (int i = 0; i < inst.real_nodes(); ++i)
            for (int j = 0; j < inst.real_classes(); ++j)
                for (int k = 0; k < 2; ++k) {
                    sum += inst.demand_mean.at(i, j, k);
                    ++count;
                }
    }
    CHECK(count >= 99000);
    double mean = sum / count;
    CHECK(mean > 0.49);
    CHECK(mean < 0.51);
}

TEST_CASE("arrival frequencies follow lambda") {
    ProblemInstance inst = sample_instance(3, 3, 1, 0.1, 77);
    inst.arrival_prob = {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0};  // no empty slots
    inst.validate();
    const long T = 30000;
    Environment env({inst, 555, T});
    std::vector<long> counts(inst.n_classes, 0);
    for (long t = 0; t < T; ++t) {
        SlotObservation obs = env.step_arrival();
        ++counts[obs.arrived_class];
        env.submit_placement(0);
    }
    CHECK(counts[inst.null_class()] == 0);
    for (int j = 0; j < 3; ++j) {
        double freq = static_cast<double>(counts[j]) / T;
        CHECK(std::fabs(freq - 1.0 / 3) < 0.02);
    }
}

TEST_CASE("point mass on the null class yields empty slots") {
    ProblemInstance inst = sample_instance(2, 2, 2, 0.1, 3);
    inst.arrival_prob = {0.0, 0.0, 1.0};
    inst.validate();
    Environment env({inst, 9, 50});
    for (int t = 0; t < 50; ++t) {
        SlotObservation obs = env.step_arrival();
        CHECK(obs.arrived_class == inst.null_class());
        for (double d : obs.demands.v) CHECK(d == 0.0);
        CHECK(env.submit_placement(1) == 0.0);
    }
}

TEST_CASE("unit demand means realize as all-ones for real arrivals") {
    ProblemInstance inst = sample_instance(3, 2, 2, 0.1, 4);
    for (int i = 0; i < inst.real_nodes(); ++i)
        for (int j = 0; j < inst.real_classes(); ++j)
            for (int k = 0; k < 2; ++k) inst.demand_mean.at(i, j, k) = 1.0;
    inst.validate();
    Environment env({inst, 10, 200});
    for (int t = 0; t < 200; ++t) {
        SlotObservation obs = env.step_arrival();
        if (obs.arrived_class != inst.null_class())
            for (int i = 0; i < inst.real_nodes(); ++i)
                for (int k = 0; k < 2; ++k) CHECK(obs.demands.at(i, k) == 1.0);
        env.submit_placement(0);
    }
}

TEST_CASE("placement costs") {
    ProblemInstance inst = sample_instance(3, 1, 1, 0.1, 21);
    inst.arrival_prob = {1.0, 0.0};  // class 0 every slot
    inst.cost_mean.at(0, 0) = 0.3;
    inst.validate();
    const int sink = inst.fictitious_node();

    SUBCASE("fictitious node always costs 1") {
        Environment env({inst, 5, 100});
        for (int t = 0; t < 100; ++t) {
            env.step_arrival();
            CHECK(env.submit_placement(sink) == 1.0);
        }
    }
    SUBCASE("Bernoulli mean matches over many slots") {
        const long T = 10000;
        Environment env({inst, 6, T});
        double sum = 0.0;
        for (long t = 0; t < T; ++t) {
            env.step_arrival();
            sum += env.submit_placement(0);
        }
        double mean = sum / T;
        CHECK(mean > 0.28);
        CHECK(mean < 0.32);
    }
}

TEST_CASE("environment protocol errors") {
    ProblemInstance inst = sample_instance(2, 1, 1, 0.1, 8);
    Environment env({inst, 1, 2});
    CHECK_THROWS_AS(env.submit_placement(0), std::logic_error);  // nothing pending
    env.step_arrival();
    CHECK_THROWS_AS(env.step_arrival(), std::logic_error);  // placement still pending
    CHECK_THROWS_AS(env.submit_placement(99), std::out_of_range);
    env.submit_placement(0);
    CHECK_THROWS_AS(env.submit_placement(0), std::logic_error);  // double submission
    env.step_arrival();
    env.submit_placement(1);
    CHECK_THROWS_AS(env.step_arrival(), std::logic_error);  // past horizon
}

TEST_CASE("trace is a pure function of config and placements") {
    ProblemInstance inst = sample_instance(4, 2, 2, 0.1, 31);
    for (int pass = 0; pass < 2; ++pass) {
        Environment a({inst, 71, 300});
        Environment b({inst, 71, 300});
        for (int t = 1; t <= 300; ++t) {
            SlotObservation oa = a.step_arrival();
            SlotObservation ob = b.step_arrival();
            CHECK(oa.arrived_class == ob.arrived_class);
            CHECK(oa.demands.v == ob.demands.v);
            int node = t % inst.n_nodes;
            CHECK(a.submit_placement(node) == b.submit_placement(node));
        }
    }
}

TEST_CASE("cost draws are independent of the placement history") {
    // Two environments with the same seed but different early decisions must
    // agree on the realized cost whenever they later place on the same node.
    ProblemInstance inst = sample_instance(3, 1, 2, 0.1, 12);
    inst.arrival_prob = {1.0, 0.0};
    inst.validate();
    Environment a({inst, 44, 50});
    Environment b({inst, 44, 50});
    for (int t = 1; t <= 50; ++t) {
        a.step_arrival();
        b.step_arrival();
        if (t < 25) {
            a.submit_placement(0);
            b.submit_placement(1);  // histories diverge
        } else {
            CHECK(a.submit_placement(0) == b.submit_placement(0));
        }
    }
}
