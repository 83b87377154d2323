#include "diffudict/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "diffudict/errors.hpp"
#include "diffudict/parallel.hpp"
#include "diffudict/prox.hpp"

namespace diffudict {

namespace {

void check_instance(const std::vector<DictionaryShard>& shards, const Eigen::VectorXd& x,
                    const TaskSpec& task) {
  task.validate();
  if (shards.empty()) throw ShapeError("inference: at least one shard required");
  for (std::size_t k = 0; k < shards.size(); ++k)
    if (shards[k].height() != x.size())
      throw ShapeError("inference: shard height does not match the signal");
}

void check_local_args(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                      const Eigen::VectorXd& x, const TaskSpec& task, int n_agents,
                      int informed_count) {
  task.validate();
  if (n_agents < 1) throw std::invalid_argument("local dual: n_agents must be >= 1");
  if (informed_count < 1 || informed_count > n_agents)
    throw std::invalid_argument("local dual: informed_count must be in [1, n_agents]");
  if (shard.height() != x.size() || nu.size() != x.size())
    throw ShapeError("local dual: shard, signal and dual variable sizes must agree");
}

void check_domain(const Eigen::VectorXd& nu, const TaskSpec& task) {
  if (!residual_conjugate(nu, task.residual).in_domain)
    throw DomainError("local dual: nu lies outside the conjugate domain");
}

}  // namespace

double local_dual_cost(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                       const Eigen::VectorXd& x, const TaskSpec& task, int n_agents,
                       int informed_count, bool is_informed) {
  check_local_args(shard, nu, x, task, n_agents, informed_count);
  const ConjugateValue fstar = residual_conjugate(nu, task.residual);
  if (!fstar.in_domain) throw DomainError("local dual: nu lies outside the conjugate domain");
  double value = fstar.value / n_agents +
                 coeff_conjugate(shard.atoms.transpose() * nu, task.coeff_reg);
  if (is_informed) value -= nu.dot(x) / informed_count;
  return value;
}

Eigen::VectorXd local_dual_grad(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                                const Eigen::VectorXd& x, const TaskSpec& task, int n_agents,
                                int informed_count, bool is_informed) {
  check_local_args(shard, nu, x, task, n_agents, informed_count);
  check_domain(nu, task);
  const double fstar_scale = task.residual.is_huber() ? task.residual.eta : 1.0;
  Eigen::VectorXd grad = (fstar_scale / n_agents) * nu;
  // d/dnu h*(W' nu) = W * shrinkage(W' nu / delta), the recovered block.
  grad.noalias() += shard.atoms * recover_coefficients(shard, nu, task);
  if (is_informed) grad -= x / informed_count;
  return grad;
}

double step_size_bound(const TaskSpec& task, int n_max) {
  task.validate();
  if (n_max < 0) throw std::invalid_argument("step_size_bound: n_max must be >= 0");
  const double curvature = task.residual.is_huber() ? task.residual.eta : 1.0;
  return 1.0 / (curvature + static_cast<double>(n_max) / task.coeff_reg.delta);
}

Eigen::VectorXd recover_coefficients(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                                     const TaskSpec& task) {
  task.validate();
  if (shard.height() != nu.size())
    throw ShapeError("recover_coefficients: shard height does not match nu");
  const Eigen::VectorXd z = shard.atoms.transpose() * nu;
  const CoeffRegularizer& reg = task.coeff_reg;
  return (reg.nonneg ? soft_threshold_plus(z, reg.gamma) : soft_threshold(z, reg.gamma)) /
         reg.delta;
}

Eigen::VectorXd recover_signal(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                               const TaskSpec& task) {
  task.validate();
  if (x.size() != nu.size()) throw ShapeError("recover_signal: x and nu sizes must agree");
  if (task.residual.is_huber())
    throw UnsupportedRecoveryError(
        "recover_signal: no closed-form signal estimate under the huber loss");
  return x - nu;
}

DualState diffusion_solve(const Network& net, const std::vector<DictionaryShard>& shards,
                          const Eigen::VectorXd& x, const TaskSpec& task,
                          const DiffusionOptions& opt) {
  check_instance(shards, x, task);
  if (static_cast<int>(shards.size()) != net.n_agents)
    throw ShapeError("diffusion_solve: one shard per agent required");
  for (int k = 0; k < net.n_agents; ++k)
    if (shards[static_cast<std::size_t>(k)].agent_id != k)
      throw std::invalid_argument("diffusion_solve: shard agent_id must match its slot");
  if (!(opt.mu > 0.0)) throw std::invalid_argument("diffusion_solve: mu must be > 0");
  const double bound = step_size_bound(task, max_shard_width(shards));
  if (!opt.allow_unsafe_mu && !(opt.mu < bound))
    throw std::invalid_argument("diffusion_solve: mu must be strictly below the stable bound");
  if (opt.rounds < 0) throw std::invalid_argument("diffusion_solve: rounds must be >= 0");
  if (opt.rtol && !(*opt.rtol > 0.0))
    throw std::invalid_argument("diffusion_solve: rtol must be > 0");

  const int n = net.n_agents;
  const bool bounded_domain = task.residual.is_huber();
  DualState state;
  state.iterate.assign(static_cast<std::size_t>(n), Eigen::VectorXd::Zero(x.size()));
  state.intermediate = state.iterate;

  for (int round = 1; round <= opt.rounds; ++round) {
    // Adapt: every agent steps from its own iterate with its own gradient.
    parallel_for(n, [&](std::int64_t k) {
      const std::size_t i = static_cast<std::size_t>(k);
      state.intermediate[i] =
          state.iterate[i] - opt.mu * local_dual_grad(shards[i], state.iterate[i], x, task, n,
                                                      net.informed_count(),
                                                      net.is_informed(static_cast<int>(k)));
    });
    // Combine the snapshot of intermediates, then project if the conjugate
    // domain is bounded.
    std::vector<Eigen::VectorXd> next = sync_round(state.intermediate, net.combine);
    if (bounded_domain)
      for (Eigen::VectorXd& v : next) v = project_inf_ball(v);

    double max_rel_change = 0.0;
    if (opt.rtol) {
      for (int k = 0; k < n; ++k) {
        const std::size_t i = static_cast<std::size_t>(k);
        const double change = (next[i] - state.iterate[i]).norm() /
                              std::max(1.0, next[i].norm());
        max_rel_change = std::max(max_rel_change, change);
      }
    }
    state.iterate = std::move(next);
    state.rounds_used = round;
    if (opt.on_round) opt.on_round(round, state.iterate);
    if (opt.rtol && max_rel_change < *opt.rtol) break;
  }
  return state;
}

std::vector<double> dual_value_consensus(const Network& net,
                                         const std::vector<double>& local_costs, double mu_g,
                                         int rounds) {
  if (static_cast<int>(local_costs.size()) != net.n_agents)
    throw ShapeError("dual_value_consensus: one cost per agent required");
  if (!(mu_g > 0.0 && mu_g <= 1.0))
    throw std::invalid_argument("dual_value_consensus: mu_g must be in (0, 1]");
  if (rounds < 0) throw std::invalid_argument("dual_value_consensus: rounds must be >= 0");

  std::vector<double> estimate(local_costs.size(), 0.0);
  std::vector<double> step(local_costs.size(), 0.0);
  for (int round = 0; round < rounds; ++round) {
    for (std::size_t k = 0; k < estimate.size(); ++k)
      step[k] = (1.0 - mu_g) * estimate[k] - mu_g * local_costs[k];
    estimate = sync_round(step, net.combine);
  }
  return estimate;
}

InferenceOutcome run_inference(const Network& net, const std::vector<DictionaryShard>& shards,
                               const Eigen::VectorXd& x, const TaskSpec& task,
                               const DiffusionOptions& opt) {
  DualState state = diffusion_solve(net, shards, x, task, opt);
  InferenceOutcome out;
  out.dual = state.iterate;
  out.rounds_used = state.rounds_used;
  out.coeffs.reserve(shards.size());
  double cost_sum = 0.0;
  for (std::size_t k = 0; k < shards.size(); ++k) {
    out.coeffs.push_back(recover_coefficients(shards[k], out.dual[k], task));
    cost_sum += local_dual_cost(shards[k], out.dual[k], x, task, net.n_agents,
                                net.informed_count(), net.is_informed(static_cast<int>(k)));
  }
  out.dual_cost = -cost_sum;
  if (!task.residual.is_huber()) {
    Eigen::VectorXd mean_nu = Eigen::VectorXd::Zero(x.size());
    for (const Eigen::VectorXd& nu : out.dual) mean_nu += nu;
    mean_nu /= static_cast<double>(out.dual.size());
    out.reconstruction = recover_signal(x, mean_nu, task);
  }
  return out;
}

OracleSolution centralized_inference_oracle(const std::vector<DictionaryShard>& shards,
                                            const Eigen::VectorXd& x, const TaskSpec& task,
                                            double rtol) {
  check_instance(shards, x, task);
  if (!(rtol > 0.0)) throw std::invalid_argument("oracle: rtol must be > 0");
  const bool bounded_domain = task.residual.is_huber();

  const auto objective = [&](const Eigen::VectorXd& nu) {
    double value = residual_conjugate(nu, task.residual).value - nu.dot(x);
    for (const DictionaryShard& shard : shards)
      value += coeff_conjugate(shard.atoms.transpose() * nu, task.coeff_reg);
    return value;
  };
  const auto gradient = [&](const Eigen::VectorXd& nu) {
    Eigen::VectorXd g = (task.residual.is_huber() ? task.residual.eta : 1.0) * nu - x;
    for (const DictionaryShard& shard : shards)
      g.noalias() += shard.atoms * recover_coefficients(shard, nu, task);
    return g;
  };

  Eigen::VectorXd nu = Eigen::VectorXd::Zero(x.size());
  double value = objective(nu);
  double alpha = 1.0;
  const long max_iterations = 1000000;
  long it = 0;
  bool converged = false;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd g = gradient(nu);
    Eigen::VectorXd cand;
    double cand_value = 0.0;
    bool moved = false;
    while (true) {
      cand = nu - alpha * g;
      if (bounded_domain) cand = project_inf_ball(cand);
      cand_value = objective(cand);
      const Eigen::VectorXd d = cand - nu;
      // Quadratic upper-bound test; passing it guarantees descent.
      if (cand_value <= value + g.dot(d) + d.squaredNorm() / (2.0 * alpha)) {
        moved = true;
        break;
      }
      alpha *= 0.5;
      if (alpha < 1e-18) break;
    }
    if (!moved) {
      // Step collapsed to roundoff; keep the last iterate (still monotone).
      converged = true;
      break;
    }
    const double change = (cand - nu).norm();
    nu = cand;
    value = cand_value;
    alpha = std::min(alpha * 1.5, 1e8);
    if (change <= rtol * std::max(1.0, nu.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("oracle: no convergence within 1e6 iterations");

  OracleSolution sol;
  sol.nu = nu;
  sol.iterations = static_cast<int>(it + 1);
  sol.coeffs.reserve(shards.size());
  for (const DictionaryShard& shard : shards)
    sol.coeffs.push_back(recover_coefficients(shard, nu, task));
  sol.primal = primal_objective(x, shards, sol.coeffs, task);
  sol.dual = -value;
  return sol;
}

double snr_db(const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate) {
  if (reference.size() != estimate.size())
    throw ShapeError("snr_db: reference and estimate sizes must agree");
  const double err = (estimate - reference).squaredNorm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(reference.squaredNorm() / err);
}

}  // namespace diffudict
