#include "vfp/algebra.hpp"

#include <cmath>
#include <stdexcept>

#include "vfp/kernels.hpp"

namespace vfp {

double objective_f(const Policy& p, const Mat& cost, const std::vector<double>& lambda) {
    if (cost.rows != p.n_nodes || cost.cols != p.n_classes ||
        static_cast<int>(lambda.size()) != p.n_classes)
        throw std::invalid_argument("objective_f: dimension mismatch");
    return kernels::active().weighted_dot(p.p.data(), cost.v.data(), lambda.data(),
                                          p.n_nodes, p.n_classes);
}

void constraint_g_into(const Policy& p, const KappaTensor& kappa, Mat& out) {
    if (kappa.n_nodes != p.n_nodes || kappa.n_classes != p.n_classes)
        throw std::invalid_argument("constraint_g: dimension mismatch");
    if (out.rows != kappa.n_nodes || out.cols != kappa.n_resources)
        out = Mat(kappa.n_nodes, kappa.n_resources);
    const auto& K = kernels::active();
    for (int i = 0; i < kappa.n_nodes; ++i) {
        const double* prow = p.p.data() + static_cast<std::size_t>(i) * p.n_classes;
        for (int k = 0; k < kappa.n_resources; ++k)
            out.at(i, k) = K.dot(prow, kappa.slice(i, k), kappa.n_classes);
    }
}

Mat constraint_g(const Policy& p, const KappaTensor& kappa) {
    Mat out;
    constraint_g_into(p, kappa, out);
    return out;
}

// The rejection sink's kappa row is identically zero in every valid tensor,
// so reducing over all nodes equals the max over real nodes.
double max_constraint(const Policy& p, const KappaTensor& kappa) {
    if (kappa.n_nodes != p.n_nodes || kappa.n_classes != p.n_classes)
        throw std::invalid_argument("max_constraint: dimension mismatch");
    const auto& K = kernels::active();
    double best = 0.0;
    for (int i = 0; i < kappa.n_nodes; ++i) {
        const double* prow = p.p.data() + static_cast<std::size_t>(i) * p.n_classes;
        for (int k = 0; k < kappa.n_resources; ++k) {
            double g = K.dot(prow, kappa.slice(i, k), kappa.n_classes);
            if (g > best) best = g;
        }
    }
    return best;
}

KappaTensor build_kappa(const ProblemInstance& inst) {
    KappaTensor kappa(inst.n_nodes, inst.n_classes, inst.n_resources);
    for (int i = 0; i < inst.n_nodes; ++i) {
        for (int k = 0; k < inst.n_resources; ++k) {
            double beta = inst.capacity.at(i, k);
            double* out = kappa.slice(i, k);
            for (int j = 0; j < inst.n_classes; ++j) {
                out[j] = std::isinf(beta)
                             ? 0.0
                             : inst.arrival_prob[j] * inst.demand_mean.at(i, j, k) / beta;
            }
        }
    }
    return kappa;
}

}  // namespace vfp
