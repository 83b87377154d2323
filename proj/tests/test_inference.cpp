#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "diffudict/errors.hpp"
#include "diffudict/experiments.hpp"
#include "diffudict/inference.hpp"
#include "diffudict/learner.hpp"
#include "diffudict/network.hpp"
#include "diffudict/prox.hpp"
#include "diffudict/shard.hpp"
#include "diffudict/task.hpp"
#include "doctest.h"
#include "oracles.hpp"

using diffudict::CombinationRule;
using diffudict::DictionaryShard;
using diffudict::DiffusionOptions;
using diffudict::Network;
using diffudict::TaskSpec;

namespace {

Network single_agent_net() {
  return Network::make(Eigen::MatrixXi::Ones(1, 1), {0}, CombinationRule::Uniform);
}

// Interior dual point for the task: away from the Huber ball boundary and,
// with overwhelming probability, away from the shrinkage kinks.
Eigen::VectorXd random_interior_nu(std::mt19937_64& rng, int m, const TaskSpec& task) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd nu(m);
  for (int i = 0; i < m; ++i) nu[i] = gauss(rng);
  if (task.residual.is_huber()) {
    const double peak = nu.lpNorm<Eigen::Infinity>();
    if (peak > 0.9) nu *= 0.9 / peak;
  }
  return nu;
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("local dual cost pins the one-agent example") {
  DictionaryShard shard{0, Eigen::MatrixXd::Ones(1, 1)};
  const TaskSpec task = TaskSpec::sparse_svd(1.0, 1.0);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
  const Eigen::VectorXd nu = Eigen::VectorXd::Constant(1, 2.0);
  // Quadratic conjugate 2, coefficient conjugate 0.5, informed term -4.
  CHECK(diffudict::local_dual_cost(shard, nu, x, task, 1, 1, true) ==
        doctest::Approx(-1.5).epsilon(1e-14));
  // At zero every term vanishes.
  CHECK(diffudict::local_dual_cost(shard, Eigen::VectorXd::Zero(1), x, task, 1, 1, true) == 0.0);
}

TEST_CASE("local dual cost matches the grid conjugates on random instances") {
  std::mt19937_64 rng(301);
  for (int trial = 0; trial < 30; ++trial) {
    const bool huber = trial % 2 == 1;
    const oracles::SmallInstance inst = oracles::make_small_instance(rng, 2, 2, huber);
    const int n_agents = static_cast<int>(inst.shards.size());
    const Eigen::VectorXd nu = random_interior_nu(rng, static_cast<int>(inst.x.size()), inst.task);

    double total = 0.0;
    for (int k = 0; k < n_agents; ++k) {
      const DictionaryShard& shard = inst.shards[static_cast<std::size_t>(k)];
      const bool informed = k == 0;
      const double got =
          diffudict::local_dual_cost(shard, nu, inst.x, inst.task, n_agents, 1, informed);
      const double fstar = oracles::residual_conjugate_sup(nu, huber, inst.task.residual.eta);
      const double hstar =
          oracles::coeff_conjugate_sup(shard.atoms.transpose() * nu, inst.task.coeff_reg.gamma,
                                       inst.task.coeff_reg.delta, inst.task.coeff_reg.nonneg);
      const double want = fstar / n_agents + hstar - (informed ? nu.dot(inst.x) : 0.0);
      CHECK(std::abs(got - want) <= 1e-4 * std::max(1.0, std::abs(want)));
      total += got;
    }

    // Summed over agents the informed terms recombine into the full
    // negated dual, so the oracle's optimum certifies the sum.
    const diffudict::OracleSolution sol =
        diffudict::centralized_inference_oracle(inst.shards, inst.x, inst.task, 1e-13);
    double at_opt = 0.0;
    for (int k = 0; k < n_agents; ++k)
      at_opt += diffudict::local_dual_cost(inst.shards[static_cast<std::size_t>(k)], sol.nu,
                                           inst.x, inst.task, n_agents, 1, k == 0);
    CHECK(std::abs(at_opt + sol.dual) <= 1e-8 * std::max(1.0, std::abs(sol.dual)));
  }
}

TEST_CASE("local dual cost rejects bad arguments and boundary violations") {
  DictionaryShard shard{0, Eigen::MatrixXd::Identity(2, 2)};
  const TaskSpec huber = TaskSpec::nmf_huber(0.1, 0.5, 0.2);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd outside(2);
  outside << 1.5, 0.0;
  CHECK_THROWS_AS(diffudict::local_dual_cost(shard, outside, x, huber, 1, 1, true),
                  diffudict::DomainError);
  CHECK_THROWS_AS(diffudict::local_dual_grad(shard, outside, x, huber, 1, 1, true),
                  diffudict::DomainError);

  const TaskSpec quad = TaskSpec::sparse_svd(0.1, 0.5);
  const Eigen::VectorXd nu = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(diffudict::local_dual_cost(shard, nu, x, quad, 0, 0, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(diffudict::local_dual_cost(shard, nu, x, quad, 2, 0, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(diffudict::local_dual_cost(shard, nu, x, quad, 2, 3, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      diffudict::local_dual_cost(shard, Eigen::VectorXd::Zero(3), x, quad, 1, 1, true),
      diffudict::ShapeError);
}

TEST_CASE("local dual gradient pins the closed forms at zero") {
  std::mt19937_64 rng(302);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x(3);
  for (int i = 0; i < 3; ++i) x[i] = gauss(rng);

  const std::vector<DictionaryShard> shards =
      diffudict::initialize_shards(3, {2}, TaskSpec::sparse_svd(0.3, 0.5), 11);
  const Eigen::VectorXd at_zero = diffudict::local_dual_grad(
      shards[0], Eigen::VectorXd::Zero(3), x, TaskSpec::sparse_svd(0.3, 0.5), 4, 2, true);
  // Conjugate gradients vanish at zero, leaving the informed share -x/2.
  CHECK((at_zero + x / 2.0).lpNorm<Eigen::Infinity>() <= 1e-15);

  // A zero shard contributes nothing; the Huber conjugate term is eta*nu/N.
  DictionaryShard zero_shard{0, Eigen::MatrixXd::Zero(3, 2)};
  Eigen::VectorXd nu(3);
  nu << 0.4, -0.2, 0.9;
  const TaskSpec huber = TaskSpec::nmf_huber(0.1, 0.5, 0.2);
  const Eigen::VectorXd grad =
      diffudict::local_dual_grad(zero_shard, nu, x, huber, 5, 1, false);
  CHECK((grad - 0.2 * nu / 5.0).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("local dual gradient matches finite differences") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    const bool huber = trial % 2 == 1;
    const oracles::SmallInstance inst = oracles::make_small_instance(rng, 4, 3, huber);
    const int n_agents = static_cast<int>(inst.shards.size());
    const Eigen::VectorXd nu = random_interior_nu(rng, static_cast<int>(inst.x.size()), inst.task);
    for (int k = 0; k < n_agents; ++k) {
      const DictionaryShard& shard = inst.shards[static_cast<std::size_t>(k)];
      const bool informed = k == 0;
      const Eigen::VectorXd grad =
          diffudict::local_dual_grad(shard, nu, inst.x, inst.task, n_agents, 1, informed);
      const Eigen::VectorXd fd = oracles::fd_gradient(
          [&](const Eigen::VectorXd& p) {
            return diffudict::local_dual_cost(shard, p, inst.x, inst.task, n_agents, 1, informed);
          },
          nu);
      CHECK((grad - fd).lpNorm<Eigen::Infinity>() <=
            1e-5 * std::max(1.0, grad.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("step size bound freezes the stability constants") {
  CHECK(diffudict::step_size_bound(TaskSpec::sparse_svd(0.05, 0.1), 10) ==
        doctest::Approx(1.0 / 101.0).epsilon(1e-15));
  CHECK(diffudict::step_size_bound(TaskSpec::nmf_huber(0.05, 0.1, 0.2), 10) ==
        doctest::Approx(1.0 / 100.2).epsilon(1e-15));
  CHECK(diffudict::step_size_bound(TaskSpec::sparse_svd(0.1, 1.0), 1) == 0.5);
  CHECK(diffudict::step_size_bound(TaskSpec::sparse_svd(0.1, 1.0), 0) == 1.0);
  CHECK_THROWS_AS(diffudict::step_size_bound(TaskSpec::sparse_svd(0.1, 1.0), -1),
                  std::invalid_argument);
}

TEST_CASE("one-agent diffusion is projected gradient descent, bit for bit") {
  std::mt19937_64 rng(304);
  for (const bool huber : {false, true}) {
    const TaskSpec task =
        huber ? TaskSpec::nmf_huber(0.2, 0.4, 0.3) : TaskSpec::sparse_svd(0.2, 0.4);
    const std::vector<DictionaryShard> shards = diffudict::initialize_shards(3, {2}, task, 21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = gauss(rng);

    DiffusionOptions opt;
    opt.mu = 0.8 * diffudict::step_size_bound(task, 2);
    opt.rounds = 60;
    const diffudict::DualState state =
        diffudict::diffusion_solve(single_agent_net(), shards, x, task, opt);

    Eigen::VectorXd nu = Eigen::VectorXd::Zero(3);
    for (int round = 0; round < 60; ++round) {
      nu = nu - opt.mu * diffudict::local_dual_grad(shards[0], nu, x, task, 1, 1, true);
      if (huber) nu = diffudict::project_inf_ball(nu);
    }
    CHECK(state.iterate[0] == nu);
    CHECK(state.rounds_used == 60);
  }
}

TEST_CASE("diffusion holds the zero fixed point") {
  const diffudict::DeskInstance desk = diffudict::make_desk_instance({});
  DiffusionOptions opt;
  opt.mu = 0.5 * desk.mu_bound;
  opt.rounds = 20;
  const diffudict::DualState state = diffudict::diffusion_solve(
      desk.net, desk.shards, Eigen::VectorXd::Zero(desk.x.size()), desk.task, opt);
  for (const Eigen::VectorXd& nu : state.iterate) CHECK(nu.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("diffusion validates its options") {
  const diffudict::DeskInstance desk = diffudict::make_desk_instance({});
  DiffusionOptions opt;
  opt.rounds = 5;

  opt.mu = 0.0;
  CHECK_THROWS_AS(diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt),
                  std::invalid_argument);
  opt.mu = desk.mu_bound;  // the bound itself is already unstable territory
  CHECK_THROWS_AS(diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt),
                  std::invalid_argument);
  opt.allow_unsafe_mu = true;
  CHECK_NOTHROW(diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt));
  opt.allow_unsafe_mu = false;

  opt.mu = 0.5 * desk.mu_bound;
  opt.rounds = -1;
  CHECK_THROWS_AS(diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt),
                  std::invalid_argument);
  opt.rounds = 5;
  opt.rtol = 0.0;
  CHECK_THROWS_AS(diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt),
                  std::invalid_argument);
  opt.rtol.reset();

  std::vector<DictionaryShard> swapped = desk.shards;
  std::swap(swapped[0], swapped[1]);
  CHECK_THROWS_AS(diffudict::diffusion_solve(desk.net, swapped, desk.x, desk.task, opt),
                  std::invalid_argument);
  std::vector<DictionaryShard> short_list(desk.shards.begin(), desk.shards.end() - 1);
  CHECK_THROWS_AS(diffudict::diffusion_solve(desk.net, short_list, desk.x, desk.task, opt),
                  diffudict::ShapeError);
}

TEST_CASE("huber iterates never leave the dual ball") {
  std::mt19937_64 rng(305);
  const TaskSpec task = TaskSpec::nmf_huber(0.05, 0.1, 0.2);
  const std::vector<DictionaryShard> shards =
      diffudict::initialize_shards(6, {1, 2, 1, 1}, task, 31);
  const Eigen::MatrixXi adj = diffudict::random_connected_graph(4, 0.5, 17);
  const Network net = Network::make(adj, {0, 1, 2, 3}, CombinationRule::Metropolis);
  std::normal_distribution<double> gauss(0.0, 2.0);
  Eigen::VectorXd x(6);
  for (int i = 0; i < 6; ++i) x[i] = gauss(rng);

  DiffusionOptions opt;
  opt.mu = 0.9 * diffudict::step_size_bound(task, 2);
  opt.rounds = 400;
  bool inside = true;
  opt.on_round = [&](int, const std::vector<Eigen::VectorXd>& iterates) {
    for (const Eigen::VectorXd& nu : iterates)
      if (nu.lpNorm<Eigen::Infinity>() > 1.0) inside = false;
  };
  diffudict::diffusion_solve(net, shards, x, task, opt);
  CHECK(inside);
}

TEST_CASE("rtol stops the diffusion early and deterministically") {
  const diffudict::DeskInstance desk = diffudict::make_desk_instance({});
  DiffusionOptions opt;
  opt.mu = 0.8 * desk.mu_bound;
  opt.rounds = 100000;
  opt.rtol = 1e-9;
  const diffudict::DualState first =
      diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt);
  CHECK(first.rounds_used < 100000);

  const diffudict::DualState again =
      diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt);
  CHECK(again.rounds_used == first.rounds_used);
  for (int k = 0; k < desk.net.n_agents; ++k)
    CHECK(again.iterate[static_cast<std::size_t>(k)] ==
          first.iterate[static_cast<std::size_t>(k)]);
}

TEST_CASE("coefficient recovery pins the shrinkage example") {
  DictionaryShard shard{0, Eigen::MatrixXd::Identity(3, 3)};
  Eigen::VectorXd nu(3);
  nu << 2.0, 0.5, -3.0;
  Eigen::VectorXd plain(3), nonneg(3);
  plain << 1.0, 0.0, -2.0;
  nonneg << 1.0, 0.0, 0.0;
  CHECK(diffudict::recover_coefficients(shard, nu, TaskSpec::sparse_svd(1.0, 1.0)) == plain);
  CHECK(diffudict::recover_coefficients(shard, nu, TaskSpec::nmf(1.0, 1.0)) == nonneg);
  CHECK_THROWS_AS(
      diffudict::recover_coefficients(shard, Eigen::VectorXd::Zero(2), TaskSpec::nmf(1.0, 1.0)),
      diffudict::ShapeError);
}

TEST_CASE("recovered coefficients attain the conjugate supremum") {
  std::mt19937_64 rng(306);
  for (int trial = 0; trial < 40; ++trial) {
    const oracles::SmallInstance inst = oracles::make_small_instance(rng, 3, 2, trial % 2 == 1);
    const Eigen::VectorXd nu = random_interior_nu(rng, static_cast<int>(inst.x.size()), inst.task);
    for (const DictionaryShard& shard : inst.shards) {
      const Eigen::VectorXd y = diffudict::recover_coefficients(shard, nu, inst.task);
      const Eigen::VectorXd z = shard.atoms.transpose() * nu;
      double penalty = inst.task.coeff_reg.gamma * y.lpNorm<1>() +
                       0.5 * inst.task.coeff_reg.delta * y.squaredNorm();
      const double attained = z.dot(y) - penalty;
      const double closed = diffudict::coeff_conjugate(z, inst.task.coeff_reg);
      const double grid = oracles::coeff_conjugate_sup(z, inst.task.coeff_reg.gamma,
                                                       inst.task.coeff_reg.delta,
                                                       inst.task.coeff_reg.nonneg);
      CHECK(std::abs(attained - closed) <= 1e-8 * std::max(1.0, std::abs(closed)));
      CHECK(std::abs(attained - grid) <= 1e-4 * std::max(1.0, std::abs(attained)));
      if (inst.task.coeff_reg.nonneg) CHECK(y.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("signal recovery is the residual shift, quadratic only") {
  Eigen::VectorXd x(2), nu(2);
  x << 1.0, -2.0;
  nu << 0.25, 0.5;
  const Eigen::VectorXd rec =
      diffudict::recover_signal(x, nu, TaskSpec::sparse_svd(0.1, 0.5));
  CHECK(rec == (x - nu).eval());
  CHECK_THROWS_AS(diffudict::recover_signal(x, nu, TaskSpec::nmf_huber(0.1, 0.5, 0.2)),
                  diffudict::UnsupportedRecoveryError);
  CHECK_THROWS_AS(
      diffudict::recover_signal(x, Eigen::VectorXd::Zero(3), TaskSpec::sparse_svd(0.1, 0.5)),
      diffudict::ShapeError);
}

TEST_CASE("dual value consensus settles on the negated mean cost") {
  const Network full = Network::make(Eigen::MatrixXi::Ones(3, 3), {0, 1, 2},
                                     CombinationRule::Uniform);
  const std::vector<double> costs = {1.0, 2.0, 3.0};
  const std::vector<double> est = diffudict::dual_value_consensus(full, costs, 0.5, 100);
  for (double e : est) CHECK(e == doctest::Approx(-2.0).epsilon(1e-8));

  // Full step on uniform weights lands on the exact mean in one round.
  const std::vector<double> one_shot = diffudict::dual_value_consensus(full, costs, 1.0, 1);
  for (double e : one_shot) CHECK(e == doctest::Approx(-2.0).epsilon(1e-15));

  // Ten agents, random costs, uniform averaging: everyone is within 1e-8 of
  // the closed-form mean after 100 rounds.
  std::mt19937_64 rng(308);
  std::normal_distribution<double> gauss(0.0, 3.0);
  const Network wide = Network::make(Eigen::MatrixXi::Ones(10, 10),
                                     {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, CombinationRule::Uniform);
  std::vector<double> random_costs(10);
  double mean_cost = 0.0;
  for (double& c : random_costs) {
    c = gauss(rng);
    mean_cost += c;
  }
  mean_cost /= 10.0;
  const std::vector<double> wide_est =
      diffudict::dual_value_consensus(wide, random_costs, 0.5, 100);
  for (double e : wide_est) CHECK(std::abs(e + mean_cost) <= 1e-8);

  // On a sparse topology the recursion's fixed point keeps the network mean
  // exactly at -mean(J) while individual agents sit O(mu_g) away, shrinking
  // linearly as mu_g does.
  Eigen::MatrixXi path(3, 3);
  path << 1, 1, 0, 1, 1, 1, 0, 1, 1;
  const Network chain = Network::make(path, {1}, CombinationRule::Metropolis);
  double worst_coarse = 0.0, worst_fine = 0.0;
  for (const double mu_g : {0.05, 0.025}) {
    const std::vector<double> sparse = diffudict::dual_value_consensus(chain, costs, mu_g, 4000);
    const double mean = (sparse[0] + sparse[1] + sparse[2]) / 3.0;
    CHECK(mean == doctest::Approx(-2.0).epsilon(1e-12));
    double worst = 0.0;
    for (double e : sparse) worst = std::max(worst, std::abs(e + 2.0));
    CHECK(worst <= 3.0 * mu_g);
    (mu_g == 0.05 ? worst_coarse : worst_fine) = worst;
  }
  CHECK(worst_fine <= 0.6 * worst_coarse);

  CHECK_THROWS_AS(diffudict::dual_value_consensus(full, costs, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(diffudict::dual_value_consensus(full, costs, 1.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(diffudict::dual_value_consensus(full, {1.0}, 0.5, 10), diffudict::ShapeError);
}

TEST_CASE("the centralized oracle certifies strong duality") {
  std::mt19937_64 rng(307);
  const oracles::SmallInstance zero_case = oracles::make_small_instance(rng, 4, 3, false);
  const diffudict::OracleSolution at_zero = diffudict::centralized_inference_oracle(
      zero_case.shards, Eigen::VectorXd::Zero(zero_case.x.size()), zero_case.task);
  CHECK(at_zero.nu.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(std::abs(at_zero.primal) <= 1e-12);
  CHECK(std::abs(at_zero.dual) <= 1e-12);

  for (int trial = 0; trial < 30; ++trial) {
    const bool huber = trial % 2 == 1;
    const oracles::SmallInstance inst = oracles::make_small_instance(rng, 5, 4, huber);
    const diffudict::OracleSolution sol =
        diffudict::centralized_inference_oracle(inst.shards, inst.x, inst.task, 1e-13);
    CHECK(std::abs(sol.primal - sol.dual) <= 1e-6 * std::max(1.0, std::abs(sol.primal)));
    CHECK(sol.coeffs.size() == inst.shards.size());

    // Stationarity: the optimal dual equals the residual gradient at the
    // recovered primal point.
    Eigen::VectorXd residual = inst.x;
    for (std::size_t k = 0; k < inst.shards.size(); ++k)
      residual -= inst.shards[k].atoms * sol.coeffs[k];
    const Eigen::VectorXd mapped = diffudict::residual_grad(residual, inst.task.residual);
    CHECK((sol.nu - mapped).lpNorm<Eigen::Infinity>() <= 1e-5);
  }
}

TEST_CASE("snr freezes the decibel convention") {
  Eigen::VectorXd ref(2), est(2);
  ref << 1.0, 0.0;
  est << 1.01, 0.0;
  CHECK(diffudict::snr_db(ref, ref) == std::numeric_limits<double>::infinity());
  CHECK(diffudict::snr_db(ref, est) == doctest::Approx(40.0).epsilon(1e-12));
  CHECK_THROWS_AS(diffudict::snr_db(ref, Eigen::VectorXd::Zero(3)), diffudict::ShapeError);
}

TEST_CASE("uniform-desk diffusion agrees across agents and nears the oracle") {
  const diffudict::DeskInstance desk = diffudict::make_desk_instance({});
  DiffusionOptions opt;
  opt.mu = 0.8 * desk.mu_bound;
  opt.rounds = 1500;
  const diffudict::DualState state =
      diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(desk.x.size());
  for (const Eigen::VectorXd& nu : state.iterate) mean += nu;
  mean /= static_cast<double>(state.iterate.size());
  for (const Eigen::VectorXd& nu : state.iterate)
    CHECK((nu - mean).lpNorm<Eigen::Infinity>() <= 1e-12);

  const diffudict::OracleSolution sol =
      diffudict::centralized_inference_oracle(desk.shards, desk.x, desk.task, 1e-13);
  CHECK(diffudict::snr_db(sol.nu, state.iterate[0]) >= 40.0);
}

TEST_CASE("run_inference bundles recovery per task family") {
  const diffudict::DeskInstance desk = diffudict::make_desk_instance({});
  DiffusionOptions opt;
  opt.mu = 0.8 * desk.mu_bound;
  opt.rounds = 300;
  const diffudict::InferenceOutcome quad =
      diffudict::run_inference(desk.net, desk.shards, desk.x, desk.task, opt);
  CHECK(quad.reconstruction.has_value());
  CHECK(quad.dual.size() == desk.shards.size());
  CHECK(quad.coeffs.size() == desk.shards.size());
  for (std::size_t k = 0; k < desk.shards.size(); ++k)
    CHECK(quad.coeffs[k].size() == desk.shards[k].width());
  CHECK(std::isfinite(quad.dual_cost));
  CHECK(quad.rounds_used == 300);

  // Same network, Huber task: coefficients still come back, the closed-form
  // reconstruction does not.
  const TaskSpec huber = TaskSpec::nmf_huber(0.05, 0.1, 0.2);
  std::vector<int> widths(static_cast<std::size_t>(desk.net.n_agents), 1);
  const std::vector<DictionaryShard> shards =
      diffudict::initialize_shards(static_cast<int>(desk.x.size()), widths, huber, 41);
  DiffusionOptions hopt;
  hopt.mu = 0.8 * diffudict::step_size_bound(huber, 1);
  hopt.rounds = 200;
  const diffudict::InferenceOutcome hub =
      diffudict::run_inference(desk.net, shards, desk.x, huber, hopt);
  CHECK_FALSE(hub.reconstruction.has_value());
}

}  // TEST_SUITE("inference")
