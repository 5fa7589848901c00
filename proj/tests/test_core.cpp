#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "vfp/algebra.hpp"
#include "vfp/environment.hpp"

using namespace vfp;

TEST_CASE("objective_f basics") {
    SUBCASE("all mass on a zero-cost node") {
        Policy p = Policy::point_mass(3, 2, 1);
        Mat c(3, 2, 0.7);
        c.at(1, 0) = c.at(1, 1) = 0.0;
        CHECK(objective_f(p, c, {0.5, 0.5}) == 0.0);
    }
    SUBCASE("single cell") {
        Policy p(1, 1, 1.0);
        Mat c(1, 1, 0.3);
        CHECK(objective_f(p, c, {1.0}) == doctest::Approx(0.3).epsilon(1e-14));
    }
    SUBCASE("random instances match a naive triple loop") {
        oracles::TestRng rng(5);
        for (int rep = 0; rep < 50; ++rep) {
            int n = rng.uniform_int(1, 6), m = rng.uniform_int(1, 5);
            Policy p = oracles::random_policy(n, m, rng);
            Mat c(n, m);
            for (auto& x : c.v) x = rng.uniform();
            std::vector<double> lam(m);
            for (auto& x : lam) x = rng.uniform();
            CHECK(std::fabs(objective_f(p, c, lam) - oracles::naive_objective(p, c, lam)) <
                  1e-12);
        }
    }
    SUBCASE("dimension mismatch") {
        Policy p(2, 2, 0.5);
        Mat c(3, 2, 0.1);
        CHECK_THROWS_AS(objective_f(p, c, {0.5, 0.5}), std::invalid_argument);
        Mat c2(2, 2, 0.1);
        CHECK_THROWS_AS(objective_f(p, c2, {1.0}), std::invalid_argument);
    }
}

TEST_CASE("objective_f is linear in the policy") {
    oracles::TestRng rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        int n = rng.uniform_int(2, 6), m = rng.uniform_int(1, 4);
        Policy p = oracles::random_policy(n, m, rng);
        Policy q = oracles::random_policy(n, m, rng);
        Mat c(n, m);
        for (auto& x : c.v) x = rng.uniform();
        std::vector<double> lam(m, 1.0 / m);
        double alpha = rng.uniform();
        Policy mix(n, m);
        for (std::size_t s = 0; s < mix.p.size(); ++s)
            mix.p[s] = alpha * p.p[s] + (1 - alpha) * q.p[s];
        double lhs = objective_f(mix, c, lam);
        double rhs = alpha * objective_f(p, c, lam) + (1 - alpha) * objective_f(q, c, lam);
        CHECK(std::fabs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("objective_f stays within [0,1] for [0,1] costs") {
    oracles::TestRng rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        int n = rng.uniform_int(2, 8), m = rng.uniform_int(1, 5);
        Policy p = oracles::random_policy(n, m, rng);
        Mat c(n, m);
        for (auto& x : c.v) x = rng.uniform();
        std::vector<double> lam(m);
        double sum = 0;
        for (auto& x : lam) sum += (x = rng.uniform());
        for (auto& x : lam) x /= sum;
        double f = objective_f(p, c, lam);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-12);
    }
}

TEST_CASE("constraint_g basics") {
    SUBCASE("zero tensor") {
        oracles::TestRng rng(1);
        Policy p = oracles::random_policy(3, 2, rng);
        KappaTensor kappa(3, 2, 2);
        Mat g = constraint_g(p, kappa);
        for (double x : g.v) CHECK(x == 0.0);
        CHECK(max_constraint(p, kappa) == 0.0);
    }
    SUBCASE("single product") {
        Policy p(1, 1, 0.5);
        KappaTensor kappa(1, 1, 1);
        kappa.at(0, 0, 0) = 2.0;
        Mat g = constraint_g(p, kappa);
        CHECK(g.at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(max_constraint(p, kappa) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("random instances match a naive loop") {
        oracles::TestRng rng(13);
        for (int rep = 0; rep < 50; ++rep) {
            int n = rng.uniform_int(1, 5), m = rng.uniform_int(1, 4), k = rng.uniform_int(1, 3);
            Policy p = oracles::random_policy(n, m, rng);
            KappaTensor kappa(n, m, k);
            for (auto& x : kappa.v) x = rng.uniform(0.0, 3.0);
            Mat g = constraint_g(p, kappa);
            Mat ref = oracles::naive_constraint(p, kappa);
            for (std::size_t s = 0; s < g.v.size(); ++s) CHECK(std::fabs(g.v[s] - ref.v[s]) < 1e-12);
        }
    }
}

TEST_CASE("max_constraint reduces over constraint_g") {
    oracles::TestRng rng(17);
    for (int rep = 0; rep < 30; ++rep) {
        int n = rng.uniform_int(2, 6), m = rng.uniform_int(1, 4), k = rng.uniform_int(1, 3);
        Policy p = oracles::random_policy(n, m, rng);
        KappaTensor kappa(n, m, k);
        for (auto& x : kappa.v) x = rng.uniform(0.0, 3.0);
        // sink row is zero by construction in real instances
        for (int kk = 0; kk < k; ++kk)
            for (int j = 0; j < m; ++j) kappa.at(n - 1, j, kk) = 0.0;
        Mat g = constraint_g(p, kappa);
        double expect = 0.0;
        for (int i = 0; i < n; ++i)
            for (int kk = 0; kk < k; ++kk) expect = std::max(expect, g.at(i, kk));
        CHECK(max_constraint(p, kappa) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("build_kappa maps infinite capacity to exactly zero") {
    ProblemInstance inst = sample_instance(4, 2, 2, 0.1, 99);
    KappaTensor kappa = build_kappa(inst);
    const int sink = inst.fictitious_node();
    for (int j = 0; j < inst.n_classes; ++j)
        for (int k = 0; k < inst.n_resources; ++k) CHECK(kappa.at(sink, j, k) == 0.0);
    for (int i = 0; i < inst.real_nodes(); ++i)
        for (int j = 0; j < inst.n_classes; ++j)
            for (int k = 0; k < inst.n_resources; ++k)
                CHECK(kappa.at(i, j, k) ==
                      doctest::Approx(inst.arrival_prob[j] * inst.demand_mean.at(i, j, k) / 0.1)
                          .epsilon(1e-14));
    SUBCASE("fictitious row of g vanishes for any policy") {
        oracles::TestRng rng(3);
        for (int rep = 0; rep < 10; ++rep) {
            Policy p = oracles::random_policy(inst.n_nodes, inst.n_classes, rng);
            Mat g = constraint_g(p, kappa);
            for (int k = 0; k < inst.n_resources; ++k) CHECK(g.at(sink, k) == 0.0);
        }
    }
}

TEST_CASE("ProblemInstance validation catches broken invariants") {
    ProblemInstance inst = sample_instance(3, 2, 2, 0.1, 7);
    CHECK_NOTHROW(inst.validate());

    SUBCASE("arrival probabilities must sum to one") {
        inst.arrival_prob[0] += 1e-6;
        CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    }
    SUBCASE("fictitious node needs infinite capacity") {
        inst.capacity.at(inst.fictitious_node(), 0) = 5.0;
        CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    }
    SUBCASE("fictitious node cost pinned to 1") {
        inst.cost_mean.at(inst.fictitious_node(), 0) = 0.5;
        CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    }
    SUBCASE("null class must be free") {
        inst.cost_mean.at(0, inst.null_class()) = 0.2;
        CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    }
    SUBCASE("means confined to [0,1]") {
        inst.cost_mean.at(0, 0) = 1.5;
        CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    }
    SUBCASE("finite capacities must be positive") {
        inst.capacity.at(0, 0) = 0.0;
        CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    }
}
