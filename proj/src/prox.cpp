#include "diffudict/prox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "diffudict/errors.hpp"

namespace diffudict {

namespace {

void check_lambda(double lambda, const char* who) {
  if (!(lambda >= 0.0)) throw std::invalid_argument(std::string(who) + ": lambda must be >= 0");
}

}  // namespace

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double lambda) {
  check_lambda(lambda, "soft_threshold");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double mag = std::abs(x[n]) - lambda;
    out[n] = mag > 0.0 ? std::copysign(mag, x[n]) : 0.0;
  }
  return out;
}

Eigen::VectorXd soft_threshold_plus(const Eigen::VectorXd& x, double lambda) {
  check_lambda(lambda, "soft_threshold_plus");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double mag = x[n] - lambda;
    out[n] = mag > 0.0 ? mag : 0.0;
  }
  return out;
}

double coeff_conjugate(const Eigen::VectorXd& z, const CoeffRegularizer& reg) {
  if (!(reg.gamma >= 0.0) || !(reg.delta > 0.0))
    throw std::invalid_argument("coeff_conjugate: need gamma >= 0 and delta > 0");
  const double ratio = reg.gamma / reg.delta;
  const Eigen::VectorXd scaled = z / reg.delta;
  const Eigen::VectorXd t =
      reg.nonneg ? soft_threshold_plus(scaled, ratio) : soft_threshold(scaled, ratio);
  // Closed form of sup_y z'y - penalty(y): the supremum is attained at the
  // shrinkage of z/delta, and expanding the penalty there gives this value.
  return -reg.gamma * t.lpNorm<1>() - 0.5 * reg.delta * t.squaredNorm() +
         reg.delta * scaled.dot(t);
}

ConjugateValue residual_conjugate(const Eigen::VectorXd& nu, const ResidualKind& kind) {
  if (!kind.is_huber()) return ConjugateValue{0.5 * nu.squaredNorm(), true};
  if (!(kind.eta > 0.0)) throw std::invalid_argument("residual_conjugate: eta must be > 0");
  // The conjugate is finite only on the unit inf-norm ball; a 1e-12 slack
  // absorbs roundoff at the boundary, where projected iterates live.
  const bool in_domain = nu.size() == 0 || nu.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-12;
  return ConjugateValue{0.5 * kind.eta * nu.squaredNorm(), in_domain};
}

Eigen::VectorXd residual_grad(const Eigen::VectorXd& u, const ResidualKind& kind) {
  if (!kind.is_huber()) return u;
  if (!(kind.eta > 0.0)) throw std::invalid_argument("residual_grad: eta must be > 0");
  Eigen::VectorXd out(u.size());
  for (Eigen::Index m = 0; m < u.size(); ++m) {
    const double v = u[m];
    out[m] = std::abs(v) < kind.eta ? v / kind.eta : (v > 0.0 ? 1.0 : -1.0);
  }
  return out;
}

Eigen::VectorXd project_inf_ball(const Eigen::VectorXd& nu) {
  return nu.cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::MatrixXd project_dictionary_columns(const Eigen::MatrixXd& w,
                                           const ConstraintSet& constraint) {
  Eigen::MatrixXd out = w;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (constraint.nonneg()) {
      for (Eigen::Index i = 0; i < out.rows(); ++i)
        if (out(i, j) < 0.0) out(i, j) = 0.0;
    }
    // Rescale only columns that violate the ball so feasible ones pass
    // through bit-exactly; a fully clipped column stays zero.
    const double norm = out.col(j).norm();
    if (norm > 1.0) out.col(j) /= norm;
  }
  return out;
}

Eigen::MatrixXd prox_matrix_l1(const Eigen::MatrixXd& w, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("prox_matrix_l1: theta must be >= 0");
  Eigen::MatrixXd out(w.rows(), w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      const double v = w(i, j);
      const double mag = std::abs(v) - theta;
      out(i, j) = mag > 0.0 ? std::copysign(mag, v) : 0.0;
    }
  }
  return out;
}

double residual_loss(const Eigen::VectorXd& u, const ResidualKind& kind) {
  if (!kind.is_huber()) return 0.5 * u.squaredNorm();
  if (!(kind.eta > 0.0)) throw std::invalid_argument("residual_loss: eta must be > 0");
  double total = 0.0;
  for (Eigen::Index m = 0; m < u.size(); ++m) {
    const double a = std::abs(u[m]);
    total += a < kind.eta ? a * a / (2.0 * kind.eta) : a - 0.5 * kind.eta;
  }
  return total;
}

double primal_objective(const Eigen::VectorXd& x, const std::vector<DictionaryShard>& shards,
                        const std::vector<Eigen::VectorXd>& coeffs, const TaskSpec& task) {
  task.validate();
  if (coeffs.size() != shards.size())
    throw ShapeError("primal_objective: one coefficient block per shard required");
  Eigen::VectorXd u = x;
  double penalty = 0.0;
  for (std::size_t k = 0; k < shards.size(); ++k) {
    const DictionaryShard& shard = shards[k];
    const Eigen::VectorXd& y = coeffs[k];
    if (shard.height() != x.size())
      throw ShapeError("primal_objective: shard height does not match the signal");
    if (y.size() != shard.width())
      throw ShapeError("primal_objective: coefficient block does not match the shard width");
    if (task.coeff_reg.nonneg && (y.array() < 0.0).any())
      return std::numeric_limits<double>::infinity();
    u -= shard.atoms * y;
    penalty += task.coeff_reg.gamma * y.lpNorm<1>() + 0.5 * task.coeff_reg.delta * y.squaredNorm();
  }
  return residual_loss(u, task.residual) + penalty;
}

bool shard_feasible(const DictionaryShard& shard, const ConstraintSet& constraint) {
  for (Eigen::Index j = 0; j < shard.atoms.cols(); ++j) {
    if (constraint.nonneg() && (shard.atoms.col(j).array() < 0.0).any()) return false;
    if (shard.atoms.col(j).norm() > 1.0 + 1e-12) return false;
  }
  return true;
}

int max_shard_width(const std::vector<DictionaryShard>& shards) {
  int n_max = 0;
  for (const DictionaryShard& shard : shards) n_max = std::max(n_max, shard.width());
  return n_max;
}

}  // namespace diffudict
