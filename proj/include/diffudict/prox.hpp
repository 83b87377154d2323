#pragma once

#include <Eigen/Dense>
#include <vector>

#include "diffudict/shard.hpp"
#include "diffudict/task.hpp"

namespace diffudict {

// Entrywise shrinkage (|x_n| - lambda)_+ sign(x_n). lambda must be >= 0.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double lambda);

// One-sided variant (x_n - lambda)_+ used under nonnegativity.
Eigen::VectorXd soft_threshold_plus(const Eigen::VectorXd& x, double lambda);

// Convex conjugate of the coefficient penalty evaluated at z, i.e. the
// supremum of z'y - penalty(y) over y (restricted to y >= 0 when the
// penalty is one-sided). Closed form built from the matching shrinkage.
double coeff_conjugate(const Eigen::VectorXd& z, const CoeffRegularizer& reg);

struct ConjugateValue {
  double value = 0.0;
  bool in_domain = true;  // false once the supremum is +infinity
};

// Convex conjugate of the residual loss at nu together with a domain flag:
// quadratic -> |nu|^2/2 everywhere; Huber -> (eta/2)|nu|^2 on the unit
// inf-norm ball, out of domain outside it (value still reports the formula).
ConjugateValue residual_conjugate(const Eigen::VectorXd& nu, const ResidualKind& kind);

// Gradient of the residual loss at u. For Huber this is the clipped scaled
// residual, entrywise u_m/eta on |u_m| < eta and sign(u_m) beyond.
Eigen::VectorXd residual_grad(const Eigen::VectorXd& u, const ResidualKind& kind);

// Euclidean projection onto the unit inf-norm ball (entrywise clamp).
Eigen::VectorXd project_inf_ball(const Eigen::VectorXd& nu);

// Column-wise projection onto the dictionary constraint set: clip negative
// entries first when required, then rescale any column with |.|_2 > 1 to
// unit norm. Columns already feasible pass through unchanged (bit-exact);
// a column that clips to zero stays zero.
Eigen::MatrixXd project_dictionary_columns(const Eigen::MatrixXd& w,
                                           const ConstraintSet& constraint);

// Entrywise soft threshold on a matrix, the prox of theta * sum |w_ij|.
Eigen::MatrixXd prox_matrix_l1(const Eigen::MatrixXd& w, double theta);

// Value of the primal objective: residual loss of x - sum_k W_k y_k plus the
// coefficient penalties. Returns +infinity when a nonneg task sees a negative
// coefficient.
double primal_objective(const Eigen::VectorXd& x, const std::vector<DictionaryShard>& shards,
                        const std::vector<Eigen::VectorXd>& coeffs, const TaskSpec& task);

// Scalar residual loss applied entrywise and summed; exposed for reuse by
// the objective and the tests.
double residual_loss(const Eigen::VectorXd& u, const ResidualKind& kind);

}  // namespace diffudict
