#include "vfp/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vfp/kernels.hpp"

namespace vfp {

double kl_bernoulli(double mu, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("kl_bernoulli: gamma must lie strictly inside (0,1)");
    if (!(mu >= 0.0 && mu <= 1.0))
        throw std::domain_error("kl_bernoulli: mu must lie in [0,1]");
    double d = 0.0;
    if (mu > 0.0) d += mu * std::log(mu / gamma);
    if (mu < 1.0) d += (1.0 - mu) * std::log((1.0 - mu) / (1.0 - gamma));
    return d;
}

namespace {

double checked_ln_t(double t) {
    if (!(t >= 1.0)) throw std::invalid_argument("confidence bound: t must be >= 1");
    return std::log(t);
}

}  // namespace

double lower_confidence(double mu_hat, double n_samples, double t) {
    double out;
    kernels::scalar().kl_lower(&mu_hat, &n_samples, 0, checked_ln_t(t), &out, 1);
    return out;
}

double upper_confidence(double mu_hat, double n_samples, double t) {
    double out;
    kernels::scalar().kl_upper(&mu_hat, &n_samples, 0, checked_ln_t(t), &out, 1);
    return out;
}

double default_kappa_scale(const Mat& capacity) {
    double min_beta = kInfiniteCapacity;
    for (double b : capacity.v)
        if (std::isfinite(b) && b < min_beta) min_beta = b;
    if (!std::isfinite(min_beta)) return 1.0;
    return std::max(1.0, 1.0 / min_beta);
}

ObservationState::ObservationState(const Mat& capacity, int n_classes, double kappa_scale)
    : n_nodes_(capacity.rows),
      n_classes_(n_classes),
      n_resources_(capacity.cols),
      kappa_scale_(kappa_scale),
      increment_factor_(capacity.rows, capacity.cols),
      n_place_(capacity.rows, n_classes),
      n_class_(n_classes, 0.0),
      cost_sum_(capacity.rows, n_classes),
      demand_sum_scaled_(capacity.rows, n_classes, capacity.cols) {
    if (kappa_scale_ <= 0.0)
        throw std::invalid_argument("ObservationState: kappa_scale must be positive");
    for (int i = 0; i < n_nodes_; ++i)
        for (int k = 0; k < n_resources_; ++k) {
            double beta = capacity.at(i, k);
            increment_factor_.at(i, k) = std::isfinite(beta) ? 1.0 / (beta * kappa_scale_) : 0.0;
        }
}

void ObservationState::record_slot(const SlotObservation& obs, int chosen_node,
                                   double realized_cost) {
    if (obs.slot != slots_elapsed_ + 1)
        throw std::logic_error("ObservationState: slot recorded out of order");
    if (chosen_node < 0 || chosen_node >= n_nodes_)
        throw std::out_of_range("ObservationState: chosen node out of range");
    int j = obs.arrived_class;
    if (j < 0 || j >= n_classes_)
        throw std::out_of_range("ObservationState: class out of range");

    n_class_[j] += 1.0;
    n_place_.at(chosen_node, j) += 1.0;
    cost_sum_.at(chosen_node, j) += realized_cost;
    for (int i = 0; i < n_nodes_; ++i)
        for (int k = 0; k < n_resources_; ++k) {
            double inc = obs.demands.at(i, k) * increment_factor_.at(i, k);
            demand_sum_scaled_.at(i, j, k) += std::min(inc, 1.0);
        }
    ++slots_elapsed_;
}

Estimates ObservationState::estimates() const {
    if (slots_elapsed_ < 1)
        throw std::logic_error("ObservationState: estimates need at least one recorded slot");
    const double inv_t1 = 1.0 / static_cast<double>(slots_elapsed_);

    Estimates est;
    est.kappa_scale = kappa_scale_;
    est.lambda_hat.resize(n_classes_);
    for (int j = 0; j < n_classes_; ++j)
        est.lambda_hat[j] = std::clamp(n_class_[j] * inv_t1, 0.0, 1.0);

    est.cost_hat = Mat(n_nodes_, n_classes_);
    for (int i = 0; i < n_nodes_; ++i)
        for (int j = 0; j < n_classes_; ++j) {
            double n = n_place_.at(i, j);
            est.cost_hat.at(i, j) =
                n > 0.0 ? std::clamp(cost_sum_.at(i, j) / n, 0.0, 1.0) : 0.0;
        }

    est.kappa_hat_scaled = Tensor3(n_nodes_, n_classes_, n_resources_);
    for (std::size_t c = 0; c < demand_sum_scaled_.size(); ++c)
        est.kappa_hat_scaled.v[c] = std::clamp(demand_sum_scaled_.v[c] * inv_t1, 0.0, 1.0);
    return est;
}

void ObservationState::bounds_into(ConfidenceBounds& out) const {
    Estimates est = estimates();
    const double t = static_cast<double>(slots_elapsed_ + 1);
    const double ln_t = std::log(t);
    const auto& K = kernels::active();

    out.lambda_lower.resize(n_classes_);
    K.kl_lower(est.lambda_hat.data(), &t, 0, ln_t, out.lambda_lower.data(), n_classes_);

    if (out.cost_lower.rows != n_nodes_ || out.cost_lower.cols != n_classes_)
        out.cost_lower = Mat(n_nodes_, n_classes_);
    K.kl_lower(est.cost_hat.v.data(), n_place_.v.data(), 1, ln_t, out.cost_lower.v.data(),
               est.cost_hat.size());

    if (out.kappa_upper.n_nodes != n_nodes_ || out.kappa_upper.n_classes != n_classes_ ||
        out.kappa_upper.n_resources != n_resources_)
        out.kappa_upper = Tensor3(n_nodes_, n_classes_, n_resources_);
    K.kl_upper(est.kappa_hat_scaled.v.data(), &t, 0, ln_t, out.kappa_upper.v.data(),
               est.kappa_hat_scaled.size());
    K.scale(out.kappa_upper.v.data(), kappa_scale_, out.kappa_upper.size());

    // rejection sink never consumes resources; a no-arrival slot never pays
    for (int k = 0; k < n_resources_; ++k) {
        double* s = out.kappa_upper.slice(n_nodes_ - 1, k);
        std::fill(s, s + n_classes_, 0.0);
    }
    for (int i = 0; i < n_nodes_; ++i) out.cost_lower.at(i, n_classes_ - 1) = 0.0;
}

ConfidenceBounds ObservationState::bounds() const {
    ConfidenceBounds out;
    bounds_into(out);
    return out;
}

nlohmann::json ObservationState::to_json() const {
    return nlohmann::json{{"n_nodes", n_nodes_},
                          {"n_classes", n_classes_},
                          {"n_resources", n_resources_},
                          {"kappa_scale", kappa_scale_},
                          {"slots_elapsed", slots_elapsed_},
                          {"n_class", n_class_},
                          {"n_place", n_place_.v},
                          {"cost_sum", cost_sum_.v},
                          {"demand_sum_scaled", demand_sum_scaled_.v}};
}

}  // namespace vfp
