#include "vfp/controller.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "vfp/rng.hpp"

namespace vfp {

void ControllerConfig::validate() const {
    if (mode == ControllerMode::fast && !(rho > 1.0))
        throw std::invalid_argument("ControllerConfig: rho must be > 1");
    if (!(exploration_floor > 0.0 && exploration_floor < 1.0))
        throw std::invalid_argument("ControllerConfig: exploration_floor must be in (0,1)");
    if (exploration_eps0 < 0.0)
        throw std::invalid_argument("ControllerConfig: exploration_eps0 must be >= 0");
    if (horizon < 1) throw std::invalid_argument("ControllerConfig: horizon must be >= 1");
}

Policy apply_forced_exploration(const Policy& p, long t, const ControllerConfig& cfg) {
    double eps = cfg.exploration_eps0 *
                 (1.0 - static_cast<double>(t) / static_cast<double>(cfg.horizon));
    if (eps < 0.0) eps = 0.0;
    Policy out = p;
    for (int j = 0; j < p.n_classes; ++j) {
        double sum = 0.0;
        bool raised = false;
        for (int i = 0; i < p.n_nodes; ++i) {
            double x = out.at(i, j);
            if (x < cfg.exploration_floor && x < eps) {
                x = eps;
                raised = true;
            }
            out.at(i, j) = x;
            sum += x;
        }
        if (raised && sum > 0.0) {
            double inv = 1.0 / sum;
            for (int i = 0; i < p.n_nodes; ++i) out.at(i, j) *= inv;
        }
    }
    return out;
}

std::vector<long> update_slots(double rho, long horizon) {
    if (!(rho > 1.0)) throw std::invalid_argument("update_slots: rho must be > 1");
    std::vector<long> slots;
    for (int k = 0;; ++k) {
        long t = static_cast<long>(std::ceil(std::pow(rho, k)));
        if (t > horizon) break;
        if (slots.empty() || slots.back() != t) slots.push_back(t);
    }
    return slots;
}

Controller::Controller(const Mat& capacity, int n_classes, ControllerConfig cfg,
                       std::uint64_t seed)
    : cfg_(cfg),
      seed_(seed),
      n_nodes_(capacity.rows),
      n_classes_(n_classes),
      obs_(capacity, n_classes,
           cfg.kappa_scale > 0.0 ? cfg.kappa_scale : default_kappa_scale(capacity)),
      policy_(Policy::point_mass(capacity.rows, n_classes, capacity.rows - 1)) {
    cfg_.validate();
    if (cfg_.exploration_floor >= 1.0 / n_nodes_)
        throw std::invalid_argument("Controller: exploration_floor must be below 1/N");
}

void Controller::recompute_policy(long t) {
    obs_.bounds_into(bounds_);
    ++lp_solves_;
    PlacementLpResult res = solve_placement_lp(bounds_.cost_lower, bounds_.lambda_lower,
                                               bounds_.kappa_upper, cfg_.lp_pivot_cap);
    if (!res.converged) {
        ++lp_failures_;
        std::fprintf(stderr, "vfp: LP hit pivot cap at slot %ld, keeping previous policy\n", t);
        return;
    }
    policy_ = std::move(res.policy);
}

bool Controller::maybe_update(long t) {
    if (cfg_.mode == ControllerMode::fast) {
        if (t != next_update_) return false;
        do {
            ++schedule_k_;
            next_update_ = static_cast<long>(std::ceil(std::pow(cfg_.rho, schedule_k_)));
        } while (next_update_ <= t);
    }
    if (t == 1) {
        policy_ = Policy::point_mass(n_nodes_, n_classes_, n_nodes_ - 1);
        return true;
    }
    recompute_policy(t);
    return true;
}

int draw_node(const Policy& p, int cls, long slot, const ControllerConfig& cfg,
              std::uint64_t seed) {
    if (std::fabs(p.column_sum(cls) - 1.0) > 1e-6)
        throw std::logic_error("draw_node: policy column does not sum to 1");

    double eps = 0.0;
    if (cfg.forced_exploration) {
        eps = cfg.exploration_eps0 *
              (1.0 - static_cast<double>(slot) / static_cast<double>(cfg.horizon));
        if (eps < 0.0) eps = 0.0;
    }
    double adj_sum = 0.0;
    for (int i = 0; i < p.n_nodes; ++i) {
        double x = p.at(i, cls);
        if (x < cfg.exploration_floor && x < eps) x = eps;
        adj_sum += x;
    }

    double u = rng::uniform(seed, slot, rng::kStreamDecide, 0) * adj_sum;
    double acc = 0.0;
    for (int i = 0; i < p.n_nodes; ++i) {
        double x = p.at(i, cls);
        if (x < cfg.exploration_floor && x < eps) x = eps;
        acc += x;
        if (u < acc) return i;
    }
    return p.n_nodes - 1;
}

int Controller::decide(const SlotObservation& obs) {
    int j = obs.arrived_class;
    if (j < 0 || j >= n_classes_) throw std::out_of_range("Controller: class out of range");
    if (j == n_classes_ - 1) return n_nodes_ - 1;  // no-op on the rejection sink
    return draw_node(policy_, j, obs.slot, cfg_, seed_);
}

void Controller::record(const SlotObservation& obs, int chosen_node, double realized_cost) {
    obs_.record_slot(obs, chosen_node, realized_cost);
}

Policy Controller::played_policy(long t) const {
    if (!cfg_.forced_exploration) return policy_;
    return apply_forced_exploration(policy_, t, cfg_);
}

}  // namespace vfp
