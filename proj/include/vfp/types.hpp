#pragma once

#include <limits>
#include <vector>

namespace vfp {

constexpr double kInfiniteCapacity = std::numeric_limits<double>::infinity();

// Dense row-major matrix, sized once at construction.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
    std::size_t size() const { return v.size(); }
};

// node x resource x class tensor. The class index is contiguous so the
// per-(node, resource) slice feeds the dot kernel directly.
struct Tensor3 {
    int n_nodes = 0, n_classes = 0, n_resources = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(int n, int m, int k, double fill = 0.0)
        : n_nodes(n),
          n_classes(m),
          n_resources(k),
          v(static_cast<std::size_t>(n) * m * k, fill) {}

    std::size_t index(int node, int cls, int res) const {
        return (static_cast<std::size_t>(node) * n_resources + res) * n_classes + cls;
    }
    double& at(int node, int cls, int res) { return v[index(node, cls, res)]; }
    double at(int node, int cls, int res) const { return v[index(node, cls, res)]; }
    // contiguous slice over classes for a fixed (node, resource)
    double* slice(int node, int res) {
        return v.data() + (static_cast<std::size_t>(node) * n_resources + res) * n_classes;
    }
    const double* slice(int node, int res) const {
        return v.data() + (static_cast<std::size_t>(node) * n_resources + res) * n_classes;
    }
    std::size_t size() const { return v.size(); }
};

// Normalized expected load lambda_j * a_{i,j,k} / beta_{i,k}; zero on the
// fictitious node.
using KappaTensor = Tensor3;

// Ground-truth parameters, hidden from the controller. The last node is the
// fictitious rejection sink (infinite capacity, cost 1); the last class is
// the null class (no arrival; zero cost and demand everywhere, including on
// the fictitious node).
struct ProblemInstance {
    int n_nodes = 0;      // N, including the fictitious node
    int n_classes = 0;    // M, including the null class
    int n_resources = 0;  // K
    Mat cost_mean;        // N x M
    Tensor3 demand_mean;  // mean A_{i,j,k}; fictitious-node entries are 0
    Mat capacity;         // N x K
    std::vector<double> arrival_prob;  // M, sums to 1
    double slot_duration_s = 0.01;

    int fictitious_node() const { return n_nodes - 1; }
    int null_class() const { return n_classes - 1; }
    int real_nodes() const { return n_nodes - 1; }
    int real_classes() const { return n_classes - 1; }

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

// Column-stochastic placement distribution: p(i, j) is the probability of
// node i given an arrival of class j.
struct Policy {
    int n_nodes = 0, n_classes = 0;
    std::vector<double> p;  // row-major N x M

    Policy() = default;
    Policy(int n, int m, double fill = 0.0)
        : n_nodes(n), n_classes(m), p(static_cast<std::size_t>(n) * m, fill) {}

    double& at(int node, int cls) { return p[static_cast<std::size_t>(node) * n_classes + cls]; }
    double at(int node, int cls) const {
        return p[static_cast<std::size_t>(node) * n_classes + cls];
    }
    double column_sum(int cls) const;
    bool column_stochastic(double tol = 1e-9) const;

    // All mass on one node for every class.
    static Policy point_mass(int n, int m, int node);
};

}  // namespace vfp
