// Command-line driver: single experiments, size and rho sweeps, the oracle
// solver, and a timing-only bench mode. CSV/JSON outputs are written under
// --out; see README.md for the schemas.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vfp/algebra.hpp"
#include "vfp/harness.hpp"
#include "vfp/kernels.hpp"
#include "vfp/lp_solver.hpp"

namespace {

struct CliOptions {
    vfp::ExperimentConfig cfg;
    std::string out = "results";
    std::string config_path;
};

void add_common_flags(CLI::App* app, CliOptions& opt) {
    app->add_option("--config", opt.config_path, "JSON config file (flags override it)");
    app->add_option("--nodes", opt.cfg.n_real_nodes, "real nodes (fictitious one added)");
    app->add_option("--classes", opt.cfg.n_real_classes, "real classes (null one added)");
    app->add_option("--resources", opt.cfg.n_resources, "resource types");
    app->add_option("--beta", opt.cfg.beta, "per-slot capacity of every real node");
    app->add_option("--horizon", opt.cfg.horizon, "time slots T");
    app->add_option("--runs", opt.cfg.runs, "independent runs");
    app->add_option(
           "--mode",
           [&opt](const std::vector<std::string>& v) {
               if (v[0] == "base")
                   opt.cfg.mode = vfp::ControllerMode::base;
               else if (v[0] == "fast")
                   opt.cfg.mode = vfp::ControllerMode::fast;
               else
                   return false;
               return true;
           },
           "base|fast")
        ->type_name("TEXT");
    app->add_option("--seed", opt.cfg.base_seed, "base seed (run r adds r)");
    app->add_option("--instance-seed", opt.cfg.instance_seed, "instance seed (run r adds r)");
    app->add_option("--downsample", opt.cfg.downsample, "emit every s-th slot (0 = auto)");
    app->add_option("--threads", opt.cfg.threads, "worker threads (0 = hardware)");
    app->add_option("--out", opt.out, "output directory");
    app->add_flag("--dump-state", opt.cfg.debug_dump_state,
                  "write final controller statistics per run");
}

// JSON config file first, then every explicitly passed flag on top.
void load_config_file(CLI::App* app, CliOptions& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream f(opt.config_path);
    if (!f) throw std::runtime_error("cannot open config file " + opt.config_path);
    nlohmann::json j;
    f >> j;
    vfp::ExperimentConfig from_flags = opt.cfg;
    opt.cfg = vfp::ExperimentConfig::from_json(j);
    auto passed = [app](const std::string& name) {
        const CLI::Option* o = app->get_option_no_throw(name);
        return o && o->count() > 0;
    };
    if (passed("--nodes")) opt.cfg.n_real_nodes = from_flags.n_real_nodes;
    if (passed("--classes")) opt.cfg.n_real_classes = from_flags.n_real_classes;
    if (passed("--resources")) opt.cfg.n_resources = from_flags.n_resources;
    if (passed("--beta")) opt.cfg.beta = from_flags.beta;
    if (passed("--horizon")) opt.cfg.horizon = from_flags.horizon;
    if (passed("--runs")) opt.cfg.runs = from_flags.runs;
    if (passed("--mode")) opt.cfg.mode = from_flags.mode;
    if (passed("--rho")) opt.cfg.rho = from_flags.rho;
    if (passed("--seed")) opt.cfg.base_seed = from_flags.base_seed;
    if (passed("--instance-seed")) opt.cfg.instance_seed = from_flags.instance_seed;
    if (passed("--downsample")) opt.cfg.downsample = from_flags.downsample;
    if (passed("--threads")) opt.cfg.threads = from_flags.threads;
    if (passed("--dump-state")) opt.cfg.debug_dump_state = from_flags.debug_dump_state;
}

void report(const vfp::ExperimentResult& res) {
    const auto& cfg = res.config;
    double tau_mean = 0.0;
    long solves = 0;
    for (const auto& tr : res.runs) {
        tau_mean += tr.tau_mean_ms / res.runs.size();
        solves = std::max(solves, tr.lp_solves);
    }
    std::printf(
        "%s N=%d+1 M=%d+1 K=%d T=%ld runs=%d: final gap mean=%.4f  tau=%.4f ms  "
        "lp_solves=%ld\n",
        cfg.mode == vfp::ControllerMode::base ? "base" : "fast", cfg.n_real_nodes,
        cfg.n_real_classes, cfg.n_resources, cfg.horizon, cfg.runs,
        res.agg.gap_mean[cfg.horizon - 1], tau_mean, solves);
}

int cmd_run(CliOptions& opt) {
    vfp::ExperimentResult res = vfp::run_experiment(opt.cfg);
    report(res);
    vfp::write_outputs(res, opt.out);
    std::printf("wrote %s/{runs,aggregates,timing}.csv and summary.json\n", opt.out.c_str());
    auto failed = vfp::failed_runs(res);
    if (!failed.empty()) {
        std::fprintf(stderr, "vfp: %zu run(s) failed; partial results written\n",
                     failed.size());
        return 1;
    }
    return 0;
}

void tau_stats(const vfp::ExperimentResult& res, double& mean, double& lo, double& hi) {
    mean = 0.0;
    lo = 1e300;
    hi = 0.0;
    for (const auto& tr : res.runs) {
        mean += tr.tau_mean_ms / res.runs.size();
        lo = std::min(lo, tr.tau_mean_ms);
        hi = std::max(hi, tr.tau_mean_ms);
    }
}

int cmd_sweep_sizes(CliOptions& opt) {
    const std::vector<std::pair<int, int>> sizes = {{10, 3}, {20, 5}, {50, 8}, {100, 10}};
    std::string table = "nodes,classes,tau_mean_ms,tau_min_ms,tau_max_ms,final_gap_mean\n";
    for (auto [n, m] : sizes) {
        vfp::ExperimentConfig cfg = opt.cfg;
        cfg.n_real_nodes = n;
        cfg.n_real_classes = m;
        cfg.mode = vfp::ControllerMode::fast;
        vfp::ExperimentResult res = vfp::run_experiment(cfg);
        report(res);
        vfp::write_outputs(res,
                           opt.out + "/size_" + std::to_string(n) + "x" + std::to_string(m));
        double mean, lo, hi;
        tau_stats(res, mean, lo, hi);
        char line[160];
        std::snprintf(line, sizeof line, "%d,%d,%.6g,%.6g,%.6g,%.6g\n", n, m, mean, lo, hi,
                      res.agg.gap_mean[cfg.horizon - 1]);
        table += line;
    }
    std::filesystem::create_directories(opt.out);
    std::ofstream(opt.out + "/sizes_timing.csv", std::ios::binary) << table;
    std::printf("wrote %s/sizes_timing.csv\n", opt.out.c_str());
    return 0;
}

int cmd_sweep_rho(CliOptions& opt) {
    const std::vector<double> rhos = {1.05, 1.1, 1.2, 1.5};
    std::string table = "rho,tau_mean_ms,tau_min_ms,tau_max_ms,final_gap_mean,band\n";
    for (double rho : rhos) {
        vfp::ExperimentConfig cfg = opt.cfg;
        cfg.mode = vfp::ControllerMode::fast;
        cfg.rho = rho;
        vfp::ExperimentResult res = vfp::run_experiment(cfg);
        report(res);
        char name[32];
        std::snprintf(name, sizeof name, "rho_%.2f", rho);
        vfp::write_outputs(res, opt.out + "/" + name);
        double mean, lo, hi;
        tau_stats(res, mean, lo, hi);
        double band = res.agg.gap_max[cfg.horizon - 1] - res.agg.gap_min[cfg.horizon - 1];
        char line[160];
        std::snprintf(line, sizeof line, "%.4g,%.6g,%.6g,%.6g,%.6g,%.6g\n", rho, mean, lo, hi,
                      res.agg.gap_mean[cfg.horizon - 1], band);
        table += line;
    }
    std::filesystem::create_directories(opt.out);
    std::ofstream(opt.out + "/rho_timing.csv", std::ios::binary) << table;
    std::printf("wrote %s/rho_timing.csv\n", opt.out.c_str());
    return 0;
}

int cmd_oracle(CliOptions& opt, bool dump_lp) {
    vfp::ProblemInstance inst =
        vfp::sample_instance(opt.cfg.n_real_nodes, opt.cfg.n_real_classes, opt.cfg.n_resources,
                             opt.cfg.beta, opt.cfg.instance_seed);
    if (!opt.cfg.lambda_override.empty()) {
        inst.arrival_prob = opt.cfg.lambda_override;
        inst.validate();
    }
    auto [p_star, f_star] = vfp::oracle_policy(inst);
    nlohmann::json out = {
        {"f_star", f_star},
        {"max_constraint", vfp::max_constraint(p_star, vfp::build_kappa(inst))},
        {"n_nodes", p_star.n_nodes},
        {"n_classes", p_star.n_classes},
        {"policy", p_star.p},
    };
    if (dump_lp)
        out["lp"] = vfp::lp_debug_json(inst.cost_mean, inst.arrival_prob, vfp::build_kappa(inst));
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

int cmd_bench(CliOptions& opt) {
    vfp::ExperimentResult res = vfp::run_experiment(opt.cfg);
    report(res);
    double mean, lo, hi;
    tau_stats(res, mean, lo, hi);
    std::printf("tau per slot: mean %.6g ms, min %.6g ms, max %.6g ms over %d runs\n", mean,
                lo, hi, opt.cfg.runs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Online-learning placement of virtual functions under per-node resource "
        "constraints"};
    app.require_subcommand(1);

    CliOptions opt;
    bool sweep_sizes = false, sweep_rho = false, dump_lp = false;

    CLI::App* run = app.add_subcommand("run", "one experiment (base or fast controller)");
    add_common_flags(run, opt);
    run->add_option("--rho", opt.cfg.rho, "fast-mode update ratio");

    // On the sweep subcommand --rho selects the rho grid instead of taking
    // a value; the grid is fixed to {1.05, 1.1, 1.2, 1.5}.
    CLI::App* sweep = app.add_subcommand("sweep", "problem-size or rho sweeps");
    add_common_flags(sweep, opt);
    sweep->add_flag("--sizes", sweep_sizes, "sweep (N,M) over the size presets");
    sweep->add_flag("--rho", sweep_rho, "sweep rho over {1.05, 1.1, 1.2, 1.5}");

    CLI::App* oracle = app.add_subcommand("oracle", "print p* and f* for an instance");
    add_common_flags(oracle, opt);
    oracle->add_flag("--dump-lp", dump_lp, "include the assembled LP in the output");

    CLI::App* bench = app.add_subcommand("bench", "timing only, no result files");
    add_common_flags(bench, opt);
    bench->add_option("--rho", opt.cfg.rho, "fast-mode update ratio");

    CLI11_PARSE(app, argc, argv);

    std::fprintf(stderr, "vfp: kernels=%s\n", vfp::kernels::active().name);
    try {
        if (run->parsed()) {
            load_config_file(run, opt);
            return cmd_run(opt);
        }
        if (sweep->parsed()) {
            load_config_file(sweep, opt);
            if (sweep_sizes == sweep_rho) {
                std::fprintf(stderr, "sweep: pass exactly one of --sizes / --rho\n");
                return 2;
            }
            return sweep_sizes ? cmd_sweep_sizes(opt) : cmd_sweep_rho(opt);
        }
        if (oracle->parsed()) {
            load_config_file(oracle, opt);
            return cmd_oracle(opt, dump_lp);
        }
        if (bench->parsed()) {
            load_config_file(bench, opt);
            return cmd_bench(opt);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "vfp: %s\n", e.what());
        return 1;
    }
    return 0;
}
