#pragma once

#include <cstdint>
#include <optional>

#include "vfp/types.hpp"

namespace vfp {

// One slot as seen by the controller: the arrived class and the realized
// demands of every node for that class, revealed before placement. The cost
// of the chosen node is only revealed by Environment::submit_placement.
struct SlotObservation {
    long slot = 0;       // 1-based
    int arrived_class = 0;
    Mat demands;         // N x K realized A_{i,j(t),k}(t), zeros on a null-class slot
};

struct EnvironmentConfig {
    ProblemInstance instance;
    std::uint64_t seed = 0;
    long horizon = 1;
};

// Seeded simulator. The whole trace is a pure function of the config; the
// placement sequence only selects which cost realizations are revealed.
class Environment {
public:
    explicit Environment(EnvironmentConfig cfg);

    const ProblemInstance& instance() const { return cfg_.instance; }
    long horizon() const { return cfg_.horizon; }
    long current_slot() const { return slot_; }

    // Advances to the next slot and draws its arrival and demands.
    // Throws std::logic_error past the horizon or with a placement pending.
    SlotObservation step_arrival();

    // Reveals the Bernoulli cost of placing the pending arrival on `node`.
    // Null-class slots always cost 0. Throws std::logic_error without a
    // pending arrival or on double submission, std::out_of_range on a bad
    // node index.
    double submit_placement(int node);

private:
    EnvironmentConfig cfg_;
    long slot_ = 0;
    bool pending_ = false;
    int pending_class_ = 0;
};

// Builds an instance with `n_real_nodes + 1` nodes and `n_real_classes + 1`
// classes: real cost/demand means Uniform[0,1] from the seed, all real
// capacities beta_value, uniform arrivals over all classes including the
// null one. Throws std::invalid_argument on non-positive dimensions or beta.
ProblemInstance sample_instance(int n_real_nodes, int n_real_classes, int n_resources,
                                double beta_value, std::uint64_t seed);

}  // namespace vfp
