#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vfp/controller.hpp"
#include "vfp/environment.hpp"

namespace vfp {

struct ExperimentConfig {
    int n_real_nodes = 10;
    int n_real_classes = 3;
    int n_resources = 2;
    double beta = 0.1;
    long horizon = 10000;
    int runs = 50;
    // Run r simulates with base_seed + r on an instance drawn from
    // instance_seed + r, so different algorithms face identical instances
    // and identical arrival/cost randomness.
    std::uint64_t base_seed = 12345;
    std::uint64_t instance_seed = 67890;
    ControllerMode mode = ControllerMode::base;
    double rho = 1.05;
    bool forced_exploration = true;
    double kappa_scale = 0.0;  // <= 0: auto
    long lp_pivot_cap = 0;
    std::vector<double> lambda_override;  // full length M when nonempty
    double slot_duration_s = 0.01;
    int downsample = 0;  // 0: auto (10 when horizon >= 1e4, else 1)
    int threads = 0;     // 0: hardware concurrency
    bool debug_dump_state = false;

    int effective_downsample() const;
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

// Per-slot series plus per-run scalars for one seeded run. Series are kept
// at full horizon length; downsampling applies only when writing files.
struct RunTrace {
    int run = 0;
    std::vector<double> rel_gap;
    std::vector<double> max_cons;    // against the true kappa
    std::vector<double> cum_regret;  // policy regret: sum of f(played) - f*
    double f_star = 0.0;
    bool gap_is_absolute = false;  // set when f* < 1e-12 forced absolute gaps
    long lp_solves = 0;
    long lp_failures = 0;
    double tau_mean_ms = 0.0, tau_min_ms = 0.0, tau_max_ms = 0.0;
    double total_wall_s = 0.0;
    double realized_cost_sum = 0.0;  // realized-cost regret reference
    nlohmann::json state_dump;       // final ObservationState when debug_dump_state
    bool failed = false;             // run aborted; `error` carries the reason
    std::string error;
};

struct Aggregates {
    std::vector<double> gap_mean, gap_min, gap_max;
    std::vector<double> cons_mean, cons_min, cons_max;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RunTrace> runs;
    Aggregates agg;
};

// (f(p, c, lambda) - f*) / f* under the true parameters. Falls back to the
// absolute gap (setting *absolute) when f* < 1e-12.
double relative_gap(const Policy& p, const ProblemInstance& inst, double f_star,
                    bool* absolute = nullptr);

// Closed-form R(T)/T ceiling of the regret theorem, evaluated with
// real-entity counts.
double theorem_bound(int n, int m, int k, long horizon);

// R independent seeded runs (parallel across a worker pool) with
// elementwise mean/min/max bands. A failing run stops the experiment early;
// its error is captured on the trace and the completed runs are preserved,
// so callers can still write partial results. Aggregates cover completed
// runs only; `failures()` below tells them apart.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Runs that failed (or never started after an abort), in run order.
std::vector<int> failed_runs(const ExperimentResult& res);

// Writes runs.csv, aggregates.csv, timing.csv and summary.json under
// out_dir (created if missing). Byte-deterministic for a fixed result.
void write_outputs(const ExperimentResult& res, const std::string& out_dir);

}  // namespace vfp
