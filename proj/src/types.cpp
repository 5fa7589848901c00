#include "vfp/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vfp {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("ProblemInstance: " + what);
}

}  // namespace

void ProblemInstance::validate() const {
    require(n_nodes >= 2, "need at least one real node plus the fictitious node");
    require(n_classes >= 2, "need at least one real class plus the null class");
    require(n_resources >= 1, "need at least one resource");
    require(cost_mean.rows == n_nodes && cost_mean.cols == n_classes, "cost_mean shape");
    require(capacity.rows == n_nodes && capacity.cols == n_resources, "capacity shape");
    require(demand_mean.n_nodes == n_nodes && demand_mean.n_classes == n_classes &&
                demand_mean.n_resources == n_resources,
            "demand_mean shape");
    require(static_cast<int>(arrival_prob.size()) == n_classes, "arrival_prob length");

    double lam_sum = 0.0;
    for (double lj : arrival_prob) {
        require(lj >= 0.0 && lj <= 1.0, "arrival probability outside [0,1]");
        lam_sum += lj;
    }
    require(std::fabs(lam_sum - 1.0) <= 1e-12, "arrival probabilities must sum to 1");

    const int fict = fictitious_node();
    const int null_cls = null_class();
    for (int i = 0; i < n_nodes; ++i) {
        for (int j = 0; j < n_classes; ++j) {
            double c = cost_mean.at(i, j);
            require(c >= 0.0 && c <= 1.0, "cost mean outside [0,1]");
            if (j == null_cls) {
                // The null class costs nothing anywhere, including on the
                // fictitious node (a no-arrival slot never pays anything).
                require(c == 0.0, "null class must have zero cost");
            } else if (i == fict) {
                require(c == 1.0, "fictitious node must have cost 1 for real classes");
            }
            for (int k = 0; k < n_resources; ++k) {
                double a = demand_mean.at(i, j, k);
                require(a >= 0.0 && a <= 1.0, "demand mean outside [0,1]");
                if (j == null_cls) require(a == 0.0, "null class must have zero demand");
            }
        }
        for (int k = 0; k < n_resources; ++k) {
            double beta = capacity.at(i, k);
            if (i == fict) {
                require(beta == kInfiniteCapacity, "fictitious node capacity must be infinite");
            } else {
                require(std::isfinite(beta) && beta > 0.0, "finite capacities must be positive");
            }
        }
    }
}

double Policy::column_sum(int cls) const {
    double s = 0.0;
    for (int i = 0; i < n_nodes; ++i) s += at(i, cls);
    return s;
}

bool Policy::column_stochastic(double tol) const {
    for (int j = 0; j < n_classes; ++j) {
        if (std::fabs(column_sum(j) - 1.0) > tol) return false;
        for (int i = 0; i < n_nodes; ++i) {
            double x = at(i, j);
            if (x < -tol || x > 1.0 + tol) return false;
        }
    }
    return true;
}

Policy Policy::point_mass(int n, int m, int node) {
    Policy pol(n, m);
    for (int j = 0; j < m; ++j) pol.at(node, j) = 1.0;
    return pol;
}

}  // namespace vfp
