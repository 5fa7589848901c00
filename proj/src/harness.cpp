#include "vfp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "vfp/algebra.hpp"
#include "vfp/rng.hpp"

namespace vfp {

int ExperimentConfig::effective_downsample() const {
    if (downsample > 0) return downsample;
    return horizon >= 10000 ? 10 : 1;
}

nlohmann::json ExperimentConfig::to_json() const {
    return nlohmann::json{{"nodes", n_real_nodes},
                          {"classes", n_real_classes},
                          {"resources", n_resources},
                          {"beta", beta},
                          {"horizon", horizon},
                          {"runs", runs},
                          {"seed", base_seed},
                          {"instance_seed", instance_seed},
                          {"mode", mode == ControllerMode::base ? "base" : "fast"},
                          {"rho", rho},
                          {"forced_exploration", forced_exploration},
                          {"kappa_scale", kappa_scale},
                          {"lp_pivot_cap", lp_pivot_cap},
                          {"lambda", lambda_override},
                          {"slot_duration_s", slot_duration_s},
                          {"downsample", downsample},
                          {"threads", threads},
                          {"debug_dump_state", debug_dump_state}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.n_real_nodes = j.value("nodes", c.n_real_nodes);
    c.n_real_classes = j.value("classes", c.n_real_classes);
    c.n_resources = j.value("resources", c.n_resources);
    c.beta = j.value("beta", c.beta);
    c.horizon = j.value("horizon", c.horizon);
    c.runs = j.value("runs", c.runs);
    c.base_seed = j.value("seed", c.base_seed);
    c.instance_seed = j.value("instance_seed", c.instance_seed);
    if (j.contains("mode")) {
        std::string m = j.at("mode").get<std::string>();
        if (m == "base")
            c.mode = ControllerMode::base;
        else if (m == "fast")
            c.mode = ControllerMode::fast;
        else
            throw std::invalid_argument("config: mode must be \"base\" or \"fast\"");
    }
    c.rho = j.value("rho", c.rho);
    c.forced_exploration = j.value("forced_exploration", c.forced_exploration);
    c.kappa_scale = j.value("kappa_scale", c.kappa_scale);
    c.lp_pivot_cap = j.value("lp_pivot_cap", c.lp_pivot_cap);
    if (j.contains("lambda")) c.lambda_override = j.at("lambda").get<std::vector<double>>();
    c.slot_duration_s = j.value("slot_duration_s", c.slot_duration_s);
    c.downsample = j.value("downsample", c.downsample);
    c.threads = j.value("threads", c.threads);
    c.debug_dump_state = j.value("debug_dump_state", c.debug_dump_state);
    return c;
}

double relative_gap(const Policy& p, const ProblemInstance& inst, double f_star,
                    bool* absolute) {
    double f = objective_f(p, inst.cost_mean, inst.arrival_prob);
    if (f_star < 1e-12) {
        if (absolute) *absolute = true;
        return f - f_star;
    }
    if (absolute) *absolute = false;
    return (f - f_star) / f_star;
}

double theorem_bound(int n, int m, int k, long horizon) {
    if (n < 1 || m < 1 || k < 1 || horizon < 1)
        throw std::invalid_argument("theorem_bound: arguments must be positive");
    double t = static_cast<double>(horizon);
    double ln_t = std::log(t);
    double nm = static_cast<double>(n) * m;
    return nm / t * (2.0 * (std::sqrt(2.0) + 1.0) * std::sqrt(t * ln_t) +
                     6.0 * k * (1.0 + ln_t));
}

namespace {

ControllerConfig controller_config(const ExperimentConfig& cfg) {
    ControllerConfig cc;
    cc.mode = cfg.mode;
    cc.rho = cfg.rho;
    cc.forced_exploration = cfg.forced_exploration;
    cc.horizon = cfg.horizon;
    cc.kappa_scale = cfg.kappa_scale;
    cc.lp_pivot_cap = cfg.lp_pivot_cap;
    return cc;
}

RunTrace simulate_run(const ExperimentConfig& cfg, int run_idx) {
    using clock = std::chrono::steady_clock;
    const auto run_start = clock::now();

    ProblemInstance inst =
        sample_instance(cfg.n_real_nodes, cfg.n_real_classes, cfg.n_resources, cfg.beta,
                        cfg.instance_seed + run_idx);
    if (!cfg.lambda_override.empty()) {
        if (static_cast<int>(cfg.lambda_override.size()) != inst.n_classes)
            throw std::invalid_argument("lambda override must cover every class");
        inst.arrival_prob = cfg.lambda_override;
        inst.validate();
    }
    inst.slot_duration_s = cfg.slot_duration_s;
    const KappaTensor kappa_true = build_kappa(inst);

    auto [p_star, f_star] = oracle_policy(inst);

    Environment env({inst, cfg.base_seed + run_idx, cfg.horizon});
    Controller ctrl(inst.capacity, inst.n_classes, controller_config(cfg),
                    cfg.base_seed + run_idx);

    RunTrace trace;
    trace.run = run_idx;
    trace.f_star = f_star;
    trace.rel_gap.resize(cfg.horizon);
    trace.max_cons.resize(cfg.horizon);
    trace.cum_regret.resize(cfg.horizon);

    double regret = 0.0;
    double tau_total = 0.0;
    double tau_min = std::numeric_limits<double>::infinity();
    double tau_max = 0.0;
    for (long t = 1; t <= cfg.horizon; ++t) {
        const auto upd_start = clock::now();
        ctrl.maybe_update(t);
        const auto upd_end = clock::now();
        double tau_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(upd_end -
                                                                                  upd_start)
                .count();
        tau_total += tau_ms;
        tau_min = std::min(tau_min, tau_ms);
        tau_max = std::max(tau_max, tau_ms);

        Policy played = ctrl.played_policy(t);
        bool absolute = false;
        double f_played = objective_f(played, inst.cost_mean, inst.arrival_prob);
        double gap;
        if (f_star < 1e-12) {
            absolute = true;
            gap = f_played - f_star;
        } else {
            gap = (f_played - f_star) / f_star;
        }
        trace.gap_is_absolute = trace.gap_is_absolute || absolute;
        regret += f_played - f_star;

        trace.rel_gap[t - 1] = gap;
        trace.max_cons[t - 1] = max_constraint(played, kappa_true);
        trace.cum_regret[t - 1] = regret;

        SlotObservation obs = env.step_arrival();
        int node = ctrl.decide(obs);
        double cost = env.submit_placement(node);
        ctrl.record(obs, node, cost);
        trace.realized_cost_sum += cost;
    }

    trace.lp_solves = ctrl.lp_solves();
    trace.lp_failures = ctrl.lp_failures();
    if (cfg.debug_dump_state) trace.state_dump = ctrl.observations().to_json();
    trace.tau_mean_ms = tau_total / static_cast<double>(cfg.horizon);
    trace.tau_min_ms = tau_min;
    trace.tau_max_ms = tau_max;
    trace.total_wall_s =
        std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - run_start)
            .count();
    return trace;
}

Aggregates aggregate(const std::vector<RunTrace>& runs, long horizon) {
    Aggregates agg;
    agg.gap_mean.assign(horizon, 0.0);
    agg.gap_min.assign(horizon, std::numeric_limits<double>::infinity());
    agg.gap_max.assign(horizon, -std::numeric_limits<double>::infinity());
    agg.cons_mean.assign(horizon, 0.0);
    agg.cons_min.assign(horizon, std::numeric_limits<double>::infinity());
    agg.cons_max.assign(horizon, -std::numeric_limits<double>::infinity());
    long completed = 0;
    for (const RunTrace& tr : runs)
        if (!tr.failed) ++completed;
    if (completed == 0) return agg;
    const double inv_r = 1.0 / static_cast<double>(completed);
    for (const RunTrace& tr : runs) {
        if (tr.failed) continue;
        for (long s = 0; s < horizon; ++s) {
            agg.gap_mean[s] += tr.rel_gap[s] * inv_r;
            agg.gap_min[s] = std::min(agg.gap_min[s], tr.rel_gap[s]);
            agg.gap_max[s] = std::max(agg.gap_max[s], tr.rel_gap[s]);
            agg.cons_mean[s] += tr.max_cons[s] * inv_r;
            agg.cons_min[s] = std::min(agg.cons_min[s], tr.max_cons[s]);
            agg.cons_max[s] = std::max(agg.cons_max[s], tr.max_cons[s]);
        }
    }
    return agg;
}

}  // namespace

std::vector<int> failed_runs(const ExperimentResult& res) {
    std::vector<int> out;
    for (const RunTrace& tr : res.runs)
        if (tr.failed) out.push_back(tr.run);
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("run_experiment: runs must be >= 1");

    ExperimentResult res;
    res.config = cfg;
    res.runs.resize(cfg.runs);
    for (int r = 0; r < cfg.runs; ++r) res.runs[r].run = r;

    int workers = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, cfg.runs);

    std::atomic<int> next{0};
    std::atomic<bool> abort{false};
    auto work = [&] {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= cfg.runs) return;
            if (abort.load()) {
                res.runs[r].failed = true;
                res.runs[r].error = "skipped after an earlier run failed";
                continue;
            }
            try {
                res.runs[r] = simulate_run(cfg, r);
            } catch (const std::exception& e) {
                res.runs[r].run = r;
                res.runs[r].failed = true;
                res.runs[r].error = e.what();
                abort.store(true);
                std::fprintf(stderr, "vfp: run %d failed: %s\n", r, e.what());
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    res.agg = aggregate(res.runs, cfg.horizon);
    return res;
}

namespace {

void fmt(std::string& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    out += buf;
}

bool emit_slot(long t, long horizon, int step) { return t % step == 0 || t == horizon; }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
}

}  // namespace

void write_outputs(const ExperimentResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const ExperimentConfig& cfg = res.config;
    fs::path dir(out_dir);
    fs::create_directories(dir);
    const int step = cfg.effective_downsample();

    std::string runs_csv = "slot,run,rel_gap,max_constraint,cum_regret\n";
    for (const RunTrace& tr : res.runs) {
        if (tr.failed) continue;
        for (long t = 1; t <= cfg.horizon; ++t) {
            if (!emit_slot(t, cfg.horizon, step)) continue;
            runs_csv += std::to_string(t);
            runs_csv += ',';
            runs_csv += std::to_string(tr.run);
            runs_csv += ',';
            fmt(runs_csv, tr.rel_gap[t - 1]);
            runs_csv += ',';
            fmt(runs_csv, tr.max_cons[t - 1]);
            runs_csv += ',';
            fmt(runs_csv, tr.cum_regret[t - 1]);
            runs_csv += '\n';
        }
    }
    write_file(dir / "runs.csv", runs_csv);

    std::string agg_csv = "slot,gap_mean,gap_min,gap_max,cons_mean,cons_min,cons_max\n";
    for (long t = 1; t <= cfg.horizon; ++t) {
        if (!emit_slot(t, cfg.horizon, step)) continue;
        agg_csv += std::to_string(t);
        for (const std::vector<double>* col :
             {&res.agg.gap_mean, &res.agg.gap_min, &res.agg.gap_max, &res.agg.cons_mean,
              &res.agg.cons_min, &res.agg.cons_max}) {
            agg_csv += ',';
            fmt(agg_csv, (*col)[t - 1]);
        }
        agg_csv += '\n';
    }
    write_file(dir / "aggregates.csv", agg_csv);

    // Across-run statistics of the per-run mean update time, Table-style.
    double tau_mean = 0.0;
    double tau_min = std::numeric_limits<double>::infinity();
    double tau_max = 0.0;
    long lp_solves = 0;
    long completed = 0;
    for (const RunTrace& tr : res.runs)
        if (!tr.failed) ++completed;
    for (const RunTrace& tr : res.runs) {
        if (tr.failed) continue;
        tau_mean += tr.tau_mean_ms / static_cast<double>(std::max(completed, 1L));
        tau_min = std::min(tau_min, tr.tau_mean_ms);
        tau_max = std::max(tau_max, tr.tau_mean_ms);
        lp_solves = std::max(lp_solves, tr.lp_solves);
    }
    std::string timing_csv = "algo,tau_mean_ms,tau_min_ms,tau_max_ms,lp_solves\n";
    timing_csv += cfg.mode == ControllerMode::base ? "base" : "fast";
    timing_csv += ',';
    fmt(timing_csv, tau_mean);
    timing_csv += ',';
    fmt(timing_csv, tau_min);
    timing_csv += ',';
    fmt(timing_csv, tau_max);
    timing_csv += ',';
    timing_csv += std::to_string(lp_solves);
    timing_csv += '\n';
    write_file(dir / "timing.csv", timing_csv);

    const long horizon = cfg.horizon;
    double final_gap_mean = res.agg.gap_mean[horizon - 1];
    double violation_fraction = 0.0;
    double regret_rate_max = 0.0;
    nlohmann::json per_run = nlohmann::json::array();
    for (const RunTrace& tr : res.runs) {
        if (tr.failed) {
            per_run.push_back({{"run", tr.run}, {"failed", true}, {"error", tr.error}});
            continue;
        }
        long violations = 0;
        for (double g : tr.max_cons)
            if (g > 1.0) ++violations;
        violation_fraction += static_cast<double>(violations) / static_cast<double>(horizon) /
                              std::max(completed, 1L);
        double rate = tr.cum_regret[horizon - 1] / static_cast<double>(horizon);
        regret_rate_max = std::max(regret_rate_max, rate);
        per_run.push_back({{"run", tr.run},
                           {"f_star", tr.f_star},
                           {"final_gap", tr.rel_gap[horizon - 1]},
                           {"gap_is_absolute", tr.gap_is_absolute},
                           {"regret_per_slot", rate},
                           {"realized_regret",
                            tr.realized_cost_sum - tr.f_star * static_cast<double>(horizon)},
                           {"violation_slots", violations},
                           {"lp_solves", tr.lp_solves},
                           {"lp_failures", tr.lp_failures},
                           {"tau_mean_ms", tr.tau_mean_ms},
                           {"total_wall_s", tr.total_wall_s}});
    }
    if (cfg.debug_dump_state) {
        for (const RunTrace& tr : res.runs)
            if (!tr.state_dump.is_null())
                write_file(dir / ("state_run" + std::to_string(tr.run) + ".json"),
                           tr.state_dump.dump(2) + "\n");
    }

    nlohmann::json summary = {
        {"config", cfg.to_json()},
        {"completed_runs", completed},
        {"failed_runs", failed_runs(res)},
        {"final_gap_mean", final_gap_mean},
        {"final_gap_min", res.agg.gap_min[horizon - 1]},
        {"final_gap_max", res.agg.gap_max[horizon - 1]},
        {"violation_fraction", violation_fraction},
        {"regret_per_slot_max", regret_rate_max},
        {"theorem_bound",
         theorem_bound(cfg.n_real_nodes, cfg.n_real_classes, cfg.n_resources, horizon)},
        {"tau_mean_ms", tau_mean},
        {"tau_min_ms", tau_min},
        {"tau_max_ms", tau_max},
        {"lp_solves", lp_solves},
        {"runs", per_run},
    };
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace vfp
