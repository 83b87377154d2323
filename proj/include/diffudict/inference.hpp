#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "diffudict/network.hpp"
#include "diffudict/shard.hpp"
#include "diffudict/task.hpp"

namespace diffudict {

// Per-agent dual iterates after a diffusion run.
struct DualState {
  std::vector<Eigen::VectorXd> iterate;      // nu_k after the last round
  std::vector<Eigen::VectorXd> intermediate; // psi_k from the last adapt step
  int rounds_used = 0;
};

// Everything a caller usually wants from one inference call.
struct InferenceOutcome {
  std::vector<Eigen::VectorXd> dual;    // per-agent nu estimates
  std::vector<Eigen::VectorXd> coeffs;  // per-agent coefficient blocks
  std::optional<Eigen::VectorXd> reconstruction;  // only for quadratic tasks
  double dual_cost = 0.0;  // -sum_k J_k, each J_k at that agent's own nu
  int rounds_used = 0;
};

// Local dual cost of one agent: (1/n_agents) * f*(nu) + h*(W_k' nu) minus
// the informed agents' share of nu'x. Throws DomainError when nu is outside
// the conjugate domain.
double local_dual_cost(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                       const Eigen::VectorXd& x, const TaskSpec& task, int n_agents,
                       int informed_count, bool is_informed);

// Gradient of the local dual cost at nu (same domain rule).
Eigen::VectorXd local_dual_grad(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                                const Eigen::VectorXd& x, const TaskSpec& task, int n_agents,
                                int informed_count, bool is_informed);

struct DiffusionOptions {
  double mu = 0.0;   // adapt step; validated against step_size_bound
  int rounds = 500;  // fixed budget
  std::optional<double> rtol;  // early stop on max_k relative iterate change
  bool allow_unsafe_mu = false;
  // Called after every combination round with the fresh iterates.
  std::function<void(int round, const std::vector<Eigen::VectorXd>&)> on_round;
};

// Adapt-then-combine diffusion for one signal x: every agent takes a local
// gradient step from its own iterate, neighbors' intermediates are averaged
// with the combination weights, and (for bounded conjugate domains) the
// average is projected back. All iterates start at zero.
DualState diffusion_solve(const Network& net, const std::vector<DictionaryShard>& shards,
                          const Eigen::VectorXd& x, const TaskSpec& task,
                          const DiffusionOptions& opt);

// Largest safe adapt step for the task family: 1/(1 + n_max/delta) under the
// quadratic loss and 1/(eta + n_max/delta) under Huber.
double step_size_bound(const TaskSpec& task, int n_max);

// Coefficient block of one agent from its dual estimate: the matching
// shrinkage of W_k' nu / delta.
Eigen::VectorXd recover_coefficients(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                                     const TaskSpec& task);

// Signal estimate x - nu; only the quadratic loss admits this closed form,
// anything else throws UnsupportedRecoveryError.
Eigen::VectorXd recover_signal(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                               const TaskSpec& task);

// Scalar diffusion that drives every agent's estimate toward the average of
// the local costs, negated: local_costs[k] are the J_k values, the limit is
// -mean(J). mu_g must lie in (0, 1]. Estimates start at zero.
std::vector<double> dual_value_consensus(const Network& net,
                                         const std::vector<double>& local_costs, double mu_g,
                                         int rounds);

// Diffusion followed by per-agent recovery; reconstruction uses the mean of
// the per-agent duals and is present only for quadratic tasks.
InferenceOutcome run_inference(const Network& net, const std::vector<DictionaryShard>& shards,
                               const Eigen::VectorXd& x, const TaskSpec& task,
                               const DiffusionOptions& opt);

struct OracleSolution {
  Eigen::VectorXd nu;
  std::vector<Eigen::VectorXd> coeffs;
  double primal = 0.0;
  double dual = 0.0;
  int iterations = 0;
};

// Reference solver: projected gradient descent with backtracking on the full
// negated dual, run to a relative iterate change below rtol. Monotone by
// construction; throws ConvergenceError past 10^6 iterations.
OracleSolution centralized_inference_oracle(const std::vector<DictionaryShard>& shards,
                                            const Eigen::VectorXd& x, const TaskSpec& task,
                                            double rtol = 1e-12);

// 10 log10(|ref|^2 / |est - ref|^2); +infinity when est equals ref.
double snr_db(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate);

}  // namespace diffudict
