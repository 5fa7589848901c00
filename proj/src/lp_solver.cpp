#include "vfp/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vfp/algebra.hpp"
#include "vfp/kernels.hpp"

namespace vfp {
namespace {

constexpr double kEps = DenseSimplex::kTolerance;
constexpr int kArtificialId = -1;
constexpr int kNoSkip = -2;

}  // namespace

void DenseSimplex::pivot(int r, int s) {
    const auto& K = kernels::active();
    double* pr = row(r);
    const double inv = 1.0 / pr[s];
    for (int i = 0; i < m_ + 2; ++i) {
        if (i == r) continue;
        double* ri = row(i);
        const double factor = ri[s] * inv;
        if (factor != 0.0) {
            K.axpy(ri, pr, -factor, width_);
            ri[s] = pr[s] * factor;  // restore; rescaled to -old/pivot below
        }
    }
    K.scale(pr, inv, width_);
    for (int i = 0; i < m_ + 2; ++i)
        if (i != r) row(i)[s] *= -inv;
    pr[s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
    ++pivots_;
}

DenseSimplex::Status DenseSimplex::run(int obj_row, int skip_id, long pivot_cap) {
    for (;;) {
        if (pivots_ >= pivot_cap) return Status::iteration_limit;
        const double* obj = row(obj_row);

        int s = -1;
        if (!bland_) {
            for (int j = 0; j <= n_; ++j) {
                if (nonbasic_[j] == skip_id) continue;
                if (s == -1 || obj[j] < obj[s] ||
                    (obj[j] == obj[s] && nonbasic_[j] < nonbasic_[s]))
                    s = j;
            }
            if (s == -1 || obj[s] >= -kEps) return Status::optimal;
        } else {
            for (int j = 0; j <= n_; ++j) {
                if (nonbasic_[j] == skip_id || obj[j] >= -kEps) continue;
                if (s == -1 || nonbasic_[j] < nonbasic_[s]) s = j;
            }
            if (s == -1) return Status::optimal;
        }

        int r = -1;
        for (int i = 0; i < m_; ++i) {
            const double* ri = row(i);
            if (ri[s] <= kEps) continue;
            if (r == -1) {
                r = i;
                continue;
            }
            const double* rr = row(r);
            double lhs = ri[n_ + 1] * rr[s];
            double rhs = rr[n_ + 1] * ri[s];
            if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
        }
        if (r == -1) return Status::unbounded;

        if (row(r)[n_ + 1] <= kEps) {
            if (++degenerate_ > 10L * m_) bland_ = true;
        }
        pivot(r, s);
    }
}

DenseSimplex::Result DenseSimplex::maximize(const Mat& a, const std::vector<double>& b,
                                            const std::vector<double>& c, long pivot_cap) {
    m_ = static_cast<int>(b.size());
    n_ = static_cast<int>(c.size());
    if (a.rows != m_ || a.cols != n_)
        throw std::invalid_argument("DenseSimplex: shape mismatch");
    width_ = n_ + 2;
    tableau_.assign(static_cast<std::size_t>(m_ + 2) * width_, 0.0);
    nonbasic_.resize(n_ + 1);
    basic_.resize(m_);
    bland_ = false;
    degenerate_ = pivots_ = 0;

    for (int i = 0; i < m_; ++i) {
        double* ri = row(i);
        for (int j = 0; j < n_; ++j) ri[j] = a.at(i, j);
        ri[n_] = -1.0;  // artificial column
        ri[n_ + 1] = b[i];
        basic_[i] = n_ + i;
    }
    for (int j = 0; j < n_; ++j) {
        nonbasic_[j] = j;
        row(m_)[j] = -c[j];
    }
    nonbasic_[n_] = kArtificialId;
    row(m_ + 1)[n_] = 1.0;

    Result res;
    int worst = 0;
    for (int i = 1; i < m_; ++i)
        if (row(i)[n_ + 1] < row(worst)[n_ + 1]) worst = i;
    if (m_ > 0 && row(worst)[n_ + 1] < -kEps) {
        pivot(worst, n_);
        Status st = run(m_ + 1, kNoSkip, pivot_cap);
        if (st == Status::iteration_limit) {
            res.status = st;
            res.x.assign(n_, 0.0);
            res.pivots = pivots_;
            return res;
        }
        if (row(m_ + 1)[n_ + 1] < -kEps) {
            res.status = Status::infeasible;
            res.x.assign(n_, 0.0);
            res.pivots = pivots_;
            return res;
        }
        for (int i = 0; i < m_; ++i) {
            if (basic_[i] != kArtificialId) continue;
            int s = 0;
            const double* ri = row(i);
            for (int j = 1; j <= n_; ++j)
                if (ri[j] < ri[s] || (ri[j] == ri[s] && nonbasic_[j] < nonbasic_[s])) s = j;
            pivot(i, s);
        }
    }

    res.status = run(m_, kArtificialId, pivot_cap);
    if (res.status == Status::unbounded) {
        res.x.assign(n_, 0.0);
        res.pivots = pivots_;
        return res;
    }
    res.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
        if (basic_[i] >= 0 && basic_[i] < n_) res.x[basic_[i]] = row(i)[n_ + 1];
    res.objective = row(m_)[n_ + 1];
    res.pivots = pivots_;
    return res;
}

namespace {

struct PlacementLpShape {
    int n_nodes, n_classes, n_resources;
    int n_vars, n_rows;
};

PlacementLpShape check_shapes(const Mat& c_eff, const std::vector<double>& lam_eff,
                              const KappaTensor& kappa_eff) {
    PlacementLpShape s{};
    s.n_nodes = c_eff.rows;
    s.n_classes = c_eff.cols;
    s.n_resources = kappa_eff.n_resources;
    if (s.n_nodes < 2 || s.n_classes < 1)
        throw std::invalid_argument("placement LP: need at least two nodes and one class");
    if (kappa_eff.n_nodes != s.n_nodes || kappa_eff.n_classes != s.n_classes ||
        static_cast<int>(lam_eff.size()) != s.n_classes)
        throw std::invalid_argument("placement LP: dimension mismatch");
    for (int k = 0; k < s.n_resources; ++k) {
        const double* slice = kappa_eff.slice(s.n_nodes - 1, k);
        for (int j = 0; j < s.n_classes; ++j)
            if (slice[j] != 0.0)
                throw std::invalid_argument("placement LP: rejection-sink kappa row must be 0");
    }
    s.n_vars = (s.n_nodes - 1) * s.n_classes;
    s.n_rows = (s.n_nodes - 1) * s.n_resources + s.n_classes;
    return s;
}

// max sum lam_j (c_sink,j - c_ij) x_ij  over x >= 0, with the sink mass
// substituted out: resource rows for each real node plus one column-sum row
// per class keeping the sink mass nonnegative.
void assemble(const PlacementLpShape& s, const Mat& c_eff, const std::vector<double>& lam_eff,
              const KappaTensor& kappa_eff, Mat& a, std::vector<double>& b,
              std::vector<double>& obj) {
    const int sink = s.n_nodes - 1;
    a = Mat(s.n_rows, s.n_vars);
    b.assign(s.n_rows, 1.0);
    obj.assign(s.n_vars, 0.0);
    for (int i = 0; i < sink; ++i)
        for (int j = 0; j < s.n_classes; ++j)
            obj[i * s.n_classes + j] = lam_eff[j] * (c_eff.at(sink, j) - c_eff.at(i, j));
    int r = 0;
    for (int i = 0; i < sink; ++i)
        for (int k = 0; k < s.n_resources; ++k, ++r) {
            const double* slice = kappa_eff.slice(i, k);
            double* arow = a.row(r);
            for (int j = 0; j < s.n_classes; ++j) arow[i * s.n_classes + j] = slice[j];
        }
    for (int j = 0; j < s.n_classes; ++j, ++r) {
        double* arow = a.row(r);
        for (int i = 0; i < sink; ++i) arow[i * s.n_classes + j] = 1.0;
    }
}

// Deterministic tie-breaking between equally optimal vertices: push sink
// mass onto the lowest-indexed real node whose move is cost-neutral and
// consumes no constraint slack at all. Moves that would eat capacity are
// left alone; the objective is flat across the tie, so spending slack on it
// can only displace mass the solver actually priced.
void drain_sink(const PlacementLpShape& s, const Mat& c_eff, const std::vector<double>& lam_eff,
                const KappaTensor& kappa_eff, Policy& p) {
    const int sink = s.n_nodes - 1;
    for (int j = 0; j < s.n_classes; ++j) {
        if (p.at(sink, j) <= 1e-15) continue;
        for (int i = 0; i < sink; ++i) {
            if (lam_eff[j] * (c_eff.at(i, j) - c_eff.at(sink, j)) > 1e-12) continue;
            bool free_move = true;
            for (int k = 0; k < s.n_resources; ++k)
                if (kappa_eff.at(i, j, k) != 0.0) {
                    free_move = false;
                    break;
                }
            if (!free_move) continue;
            p.at(i, j) += p.at(sink, j);
            p.at(sink, j) = 0.0;
            break;
        }
    }
}

}  // namespace

PlacementLpResult solve_placement_lp(const Mat& c_eff, const std::vector<double>& lam_eff,
                                     const KappaTensor& kappa_eff, long pivot_cap) {
    PlacementLpShape s = check_shapes(c_eff, lam_eff, kappa_eff);
    if (pivot_cap <= 0) pivot_cap = 50L * (s.n_rows + s.n_vars) + 200;

    Mat a;
    std::vector<double> b, obj;
    assemble(s, c_eff, lam_eff, kappa_eff, a, b, obj);

    DenseSimplex simplex;
    DenseSimplex::Result lp = simplex.maximize(a, b, obj, pivot_cap);
    if (lp.status == DenseSimplex::Status::unbounded ||
        lp.status == DenseSimplex::Status::infeasible)
        throw std::logic_error("placement LP: solver reported an impossible status");

    PlacementLpResult out;
    out.converged = lp.status == DenseSimplex::Status::optimal;
    out.pivots = lp.pivots;
    const int sink = s.n_nodes - 1;
    out.policy = Policy(s.n_nodes, s.n_classes);
    for (int j = 0; j < s.n_classes; ++j) {
        double col = 0.0;
        for (int i = 0; i < sink; ++i) {
            double x = std::clamp(lp.x[i * s.n_classes + j], 0.0, 1.0);
            out.policy.at(i, j) = x;
            col += x;
        }
        out.policy.at(sink, j) = std::clamp(1.0 - col, 0.0, 1.0);
    }
    drain_sink(s, c_eff, lam_eff, kappa_eff, out.policy);
    out.objective = objective_f(out.policy, c_eff, lam_eff);
    return out;
}

std::pair<Policy, double> oracle_policy(const ProblemInstance& inst) {
    PlacementLpResult res =
        solve_placement_lp(inst.cost_mean, inst.arrival_prob, build_kappa(inst));
    if (!res.converged)
        throw std::runtime_error("oracle_policy: simplex did not converge");
    return {std::move(res.policy), res.objective};
}

nlohmann::json lp_debug_json(const Mat& c_eff, const std::vector<double>& lam_eff,
                             const KappaTensor& kappa_eff) {
    PlacementLpShape s = check_shapes(c_eff, lam_eff, kappa_eff);
    Mat a;
    std::vector<double> b, obj;
    assemble(s, c_eff, lam_eff, kappa_eff, a, b, obj);
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < s.n_rows; ++r)
        rows.push_back(std::vector<double>(a.row(r), a.row(r) + s.n_vars));
    return nlohmann::json{{"n_nodes", s.n_nodes},
                          {"n_classes", s.n_classes},
                          {"n_resources", s.n_resources},
                          {"tolerance", DenseSimplex::kTolerance},
                          {"maximize", obj},
                          {"rows", rows},
                          {"rhs", b}};
}

}  // namespace vfp
