#pragma once

#include <cstdint>

#include "vfp/estimation.hpp"
#include "vfp/lp_solver.hpp"

namespace vfp {

enum class ControllerMode { base, fast };

struct ControllerConfig {
    ControllerMode mode = ControllerMode::base;
    double rho = 1.05;                // fast-mode geometric update ratio, > 1
    double exploration_floor = 1e-3;  // entries below this are raised to eps(t)
    double exploration_eps0 = 0.01;   // eps(t) = eps0 * (1 - t/T)
    bool forced_exploration = true;
    long horizon = 1;     // T
    double kappa_scale = 0.0;  // <= 0: 1/min finite capacity
    long lp_pivot_cap = 0;     // <= 0: solver default

    void validate() const;  // throws std::invalid_argument
};

// Per-column floor-and-renormalize: entries below the floor are raised to
// eps(t) = eps0 * (1 - t/T), then the column is rescaled to sum 1. Columns
// with nothing raised are returned bit-identical.
Policy apply_forced_exploration(const Policy& p, long t, const ControllerConfig& cfg);

// Draws a node from column `cls` of p after the exploration adjustment for
// slot t. Throws std::logic_error if the raw column does not sum to 1
// within 1e-6. Deterministic in (seed, slot).
int draw_node(const Policy& p, int cls, long slot, const ControllerConfig& cfg,
              std::uint64_t seed);

// Update slots of the fast schedule: deduplicated { ceil(rho^k) : k >= 0 }
// intersected with [1, horizon].
std::vector<long> update_slots(double rho, long horizon);

// The decision loop: keeps the observation statistics, recomputes
// KL bounds + LP on its update schedule (every slot in base mode), and
// draws placements from the exploration-adjusted policy.
class Controller {
public:
    Controller(const Mat& capacity, int n_classes, ControllerConfig cfg, std::uint64_t seed);

    // Steps 1-4 for slot t. Returns true when the policy was recomputed.
    // Slot 1 installs the reject-everything policy without an LP solve
    // (there is no history to bound yet, and rejecting is always feasible).
    // A solver that hits its pivot cap leaves the previous policy in place.
    bool maybe_update(long t);

    // Step 5: draw a node from the adjusted column of the arrived class.
    // Null-class arrivals map to the rejection sink as a no-op. Throws
    // std::logic_error if the column does not sum to 1 within 1e-6.
    int decide(const SlotObservation& obs);

    // Step 1 bookkeeping, every slot in both modes.
    void record(const SlotObservation& obs, int chosen_node, double realized_cost);

    const Policy& policy() const { return policy_; }  // pre-adjustment
    Policy played_policy(long t) const;               // what decide() draws from
    const ObservationState& observations() const { return obs_; }
    const ControllerConfig& config() const { return cfg_; }
    long lp_solves() const { return lp_solves_; }
    long lp_failures() const { return lp_failures_; }

private:
    void recompute_policy(long t);

    ControllerConfig cfg_;
    std::uint64_t seed_;
    int n_nodes_, n_classes_;
    ObservationState obs_;
    Policy policy_;
    ConfidenceBounds bounds_;  // workspace
    long next_update_ = 1;
    int schedule_k_ = 0;
    long lp_solves_ = 0;
    long lp_failures_ = 0;
};

}  // namespace vfp
