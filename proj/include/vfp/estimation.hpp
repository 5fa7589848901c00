#pragma once

#include <vector>

#include "json.hpp"
#include "vfp/environment.hpp"
#include "vfp/types.hpp"

namespace vfp {

// Bernoulli relative entropy D(mu, gamma) with 0*log(0) := 0.
// Throws std::domain_error unless gamma is in (0,1) and mu in [0,1].
double kl_bernoulli(double mu, double gamma);

// Tightest KL confidence bounds at absolute tolerance 1e-9:
//   lower: min { g in [0, mu_hat] : n_samples * D(mu_hat, g) <= ln t }
//   upper: max { g in [mu_hat, 1] : n_samples * D(mu_hat, g) <= ln t }
// n_samples = 0 gives the maximally optimistic 0 (resp. pessimistic 1);
// t = 1 gives mu_hat. Throws std::invalid_argument for t < 1.
double lower_confidence(double mu_hat, double n_samples, double t);
double upper_confidence(double mu_hat, double n_samples, double t);

struct Estimates {
    std::vector<double> lambda_hat;  // M
    Mat cost_hat;                    // N x M, 0 where never placed
    Tensor3 kappa_hat_scaled;        // demand statistic in [0,1] (divide-by-kappa_scale units)
    double kappa_scale = 1.0;
};

struct ConfidenceBounds {
    std::vector<double> lambda_lower;  // M
    Mat cost_lower;                    // N x M
    KappaTensor kappa_upper;           // unscaled units, in [0, kappa_scale]
};

// The controller's sufficient statistics. Capacities are known to the
// controller, so the state owns the 1/beta factors it needs; cost and
// demand MEANS never enter here.
//
// The per-slot demand increment A/beta can exceed 1 (beta = 0.1 with
// Bernoulli demands gives A/beta = 10), while the KL machinery needs a
// [0,1]-valued statistic. Increments are therefore divided by kappa_scale
// (1/min real beta by default) and the upper bound is multiplied back when
// the bounds are assembled.
class ObservationState {
public:
    ObservationState(const Mat& capacity, int n_classes, double kappa_scale);

    // Folds one slot in: the arrival count, the chosen cell's cost, and the
    // scaled demand increment of every (node, resource) cell of the arrived
    // class. Throws std::logic_error if obs is not the next unrecorded slot.
    void record_slot(const SlotObservation& obs, int chosen_node, double realized_cost);

    // Step-2 estimates; requires slots_elapsed() >= 1.
    Estimates estimates() const;

    // Step-3 confidence bounds at t = slots_elapsed + 1. The fictitious
    // node's kappa_upper row is forced to 0 and the null class's cost_lower
    // column to 0. Requires slots_elapsed() >= 1.
    ConfidenceBounds bounds() const;
    void bounds_into(ConfidenceBounds& out) const;

    long slots_elapsed() const { return slots_elapsed_; }
    double kappa_scale() const { return kappa_scale_; }
    int n_nodes() const { return n_nodes_; }
    int n_classes() const { return n_classes_; }
    int n_resources() const { return n_resources_; }
    const Mat& n_place() const { return n_place_; }
    const std::vector<double>& n_class() const { return n_class_; }
    const Mat& cost_sum() const { return cost_sum_; }
    const Tensor3& demand_sum_scaled() const { return demand_sum_scaled_; }

    nlohmann::json to_json() const;

private:
    int n_nodes_, n_classes_, n_resources_;
    double kappa_scale_;
    Mat increment_factor_;        // 1/(beta * kappa_scale), 0 where beta is infinite
    Mat n_place_;                 // N x M placement counts
    std::vector<double> n_class_; // M arrival counts
    Mat cost_sum_;                // N x M observed cost sums
    Tensor3 demand_sum_scaled_;   // accumulated scaled demand, all nodes
    long slots_elapsed_ = 0;
};

// kappa_scale that keeps every scaled increment in [0,1]: 1/min finite
// capacity, floored at 1.
double default_kappa_scale(const Mat& capacity);

}  // namespace vfp
