#include "vfp/environment.hpp"

#include <stdexcept>

#include "vfp/rng.hpp"

namespace vfp {

Environment::Environment(EnvironmentConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.horizon < 1) throw std::invalid_argument("Environment: horizon must be >= 1");
    cfg_.instance.validate();
}

SlotObservation Environment::step_arrival() {
    if (pending_) throw std::logic_error("Environment: previous slot not yet placed");
    if (slot_ >= cfg_.horizon) throw std::logic_error("Environment: stepped past horizon");
    ++slot_;

    const ProblemInstance& inst = cfg_.instance;
    SlotObservation obs;
    obs.slot = slot_;
    obs.demands = Mat(inst.n_nodes, inst.n_resources);

    double u = rng::uniform(cfg_.seed, slot_, rng::kStreamArrival, 0);
    int cls = inst.n_classes - 1;
    double acc = 0.0;
    for (int j = 0; j < inst.n_classes; ++j) {
        acc += inst.arrival_prob[j];
        if (u < acc) {
            cls = j;
            break;
        }
    }
    obs.arrived_class = cls;

    if (cls != inst.null_class()) {
        for (int i = 0; i < inst.n_nodes; ++i) {
            for (int k = 0; k < inst.n_resources; ++k) {
                double a = inst.demand_mean.at(i, cls, k);
                obs.demands.at(i, k) =
                    rng::bernoulli(a, cfg_.seed, slot_, rng::kStreamDemand,
                                   static_cast<std::uint64_t>(i) * inst.n_resources + k)
                        ? 1.0
                        : 0.0;
            }
        }
    }

    pending_ = true;
    pending_class_ = cls;
    return obs;
}

double Environment::submit_placement(int node) {
    if (!pending_) throw std::logic_error("Environment: no pending arrival to place");
    const ProblemInstance& inst = cfg_.instance;
    if (node < 0 || node >= inst.n_nodes)
        throw std::out_of_range("Environment: node index out of range");
    pending_ = false;
    if (pending_class_ == inst.null_class()) return 0.0;
    double c = inst.cost_mean.at(node, pending_class_);
    return rng::bernoulli(c, cfg_.seed, slot_, rng::kStreamCost, 0) ? 1.0 : 0.0;
}

ProblemInstance sample_instance(int n_real_nodes, int n_real_classes, int n_resources,
                                double beta_value, std::uint64_t seed) {
    if (n_real_nodes < 1 || n_real_classes < 1 || n_resources < 1)
        throw std::invalid_argument("sample_instance: dimensions must be positive");
    if (beta_value <= 0.0) throw std::invalid_argument("sample_instance: beta must be positive");

    ProblemInstance inst;
    inst.n_nodes = n_real_nodes + 1;
    inst.n_classes = n_real_classes + 1;
    inst.n_resources = n_resources;
    inst.cost_mean = Mat(inst.n_nodes, inst.n_classes);
    inst.demand_mean = Tensor3(inst.n_nodes, inst.n_classes, n_resources);
    inst.capacity = Mat(inst.n_nodes, n_resources);
    inst.arrival_prob.assign(inst.n_classes, 1.0 / inst.n_classes);

    const int fict = inst.fictitious_node();
    const int null_cls = inst.null_class();
    for (int i = 0; i < inst.n_nodes; ++i) {
        for (int j = 0; j < inst.n_classes; ++j) {
            double c = 0.0;
            if (j != null_cls) {
                if (i == fict)
                    c = 1.0;
                else
                    c = rng::uniform(seed, 0, rng::kStreamInstanceCost,
                                     static_cast<std::uint64_t>(i) * inst.n_classes + j);
            }
            inst.cost_mean.at(i, j) = c;
            for (int k = 0; k < n_resources; ++k) {
                double a = 0.0;
                if (j != null_cls && i != fict)
                    a = rng::uniform(
                        seed, 0, rng::kStreamInstanceDemand,
                        (static_cast<std::uint64_t>(i) * inst.n_classes + j) * n_resources + k);
                inst.demand_mean.at(i, j, k) = a;
            }
        }
        for (int k = 0; k < n_resources; ++k)
            inst.capacity.at(i, k) = i == fict ? kInfiniteCapacity : beta_value;
    }
    inst.validate();
    return inst;
}

}  // namespace vfp
