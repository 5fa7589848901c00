#pragma once

#include "vfp/types.hpp"

namespace vfp {

// f(p, c, lambda) = sum_{i,j} p_{i,j} * lambda_j * c_{i,j}
double objective_f(const Policy& p, const Mat& cost, const std::vector<double>& lambda);

// g_{i,k}(p, kappa) = sum_j p_{i,j} * kappa_{i,j,k}, as an N x K matrix.
Mat constraint_g(const Policy& p, const KappaTensor& kappa);
void constraint_g_into(const Policy& p, const KappaTensor& kappa, Mat& out);

// max over nodes and resources of g_{i,k}; equals the max over real nodes
// since the sink's kappa row is zero in every valid tensor.
double max_constraint(const Policy& p, const KappaTensor& kappa);

// kappa_{i,j,k} = lambda_j * a_{i,j,k} / beta_{i,k}, exactly 0 where the
// capacity is infinite.
KappaTensor build_kappa(const ProblemInstance& inst);

}  // namespace vfp
