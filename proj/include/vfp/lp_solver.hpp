#pragma once

#include <utility>
#include <vector>

#include "json.hpp"
#include "vfp/types.hpp"

namespace vfp {

// Dense tableau simplex for  max c'x  s.t.  Ax <= b, x >= 0.
// Deterministic: Dantzig entering rule with variable-id tie-breaking,
// switching to Bland's rule after 10*rows degenerate pivots. Phase 1 runs
// only when some b_i < 0. Feasibility and reduced-cost tolerance 1e-9.
class DenseSimplex {
public:
    enum class Status { optimal, iteration_limit, unbounded, infeasible };

    // primal feasibility and reduced-cost optimality tolerance
    static constexpr double kTolerance = 1e-9;

    struct Result {
        Status status = Status::optimal;
        double objective = 0.0;
        std::vector<double> x;  // best feasible vertex found, also on iteration_limit
        long pivots = 0;
    };

    Result maximize(const Mat& a, const std::vector<double>& b, const std::vector<double>& c,
                    long pivot_cap);

private:
    void pivot(int r, int s);
    // Runs pivots against objective row `obj_row`, ignoring columns whose
    // variable id equals skip_id. Returns Status::optimal when no entering
    // column remains.
    Status run(int obj_row, int skip_id, long pivot_cap);

    double* row(int i) { return tableau_.data() + static_cast<std::size_t>(i) * width_; }

    int m_ = 0, n_ = 0, width_ = 0;
    std::vector<double> tableau_;  // (m+2) x (n+2)
    std::vector<int> nonbasic_, basic_;
    bool bland_ = false;
    long degenerate_ = 0, pivots_ = 0;
};

struct PlacementLpResult {
    Policy policy;
    double objective = 0.0;
    bool converged = false;
    long pivots = 0;
};

// Minimizes f(p, c_eff, lam_eff) over column-stochastic policies subject to
// g_{i,k}(p, kappa_eff) <= 1. The last node is the always-feasible rejection
// sink: its kappa row must be zero (std::invalid_argument otherwise) and the
// column-sum equalities are substituted into its variables, so the LP is
// feasible by construction. Among equally optimal vertices, mass is drained
// from the sink onto the lowest-indexed real node wherever that is
// cost-neutral and keeps every constraint satisfied.
// converged == false after the pivot cap; the result still carries the best
// feasible vertex and callers are expected to fall back to their previous
// policy.
PlacementLpResult solve_placement_lp(const Mat& c_eff, const std::vector<double>& lam_eff,
                                     const KappaTensor& kappa_eff, long pivot_cap = 0);

// Optimal static policy and its expected per-slot cost under the true
// parameters. Throws std::runtime_error if the solver fails to converge.
std::pair<Policy, double> oracle_policy(const ProblemInstance& inst);

// Debug dump of the LP as assembled for the solver.
nlohmann::json lp_debug_json(const Mat& c_eff, const std::vector<double>& lam_eff,
                             const KappaTensor& kappa_eff);

}  // namespace vfp
