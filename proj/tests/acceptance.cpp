// End-to-end acceptance checks. Every test case prints exactly one
// "[PASS] criterion N: ..." or "[FAIL] criterion N: ..." line; the ctest
// wrappers match on that line, so keep the format stable.
#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "diffudict/bicluster.hpp"
#include "diffudict/experiments.hpp"
#include "diffudict/inference.hpp"
#include "diffudict/learner.hpp"
#include "diffudict/network.hpp"
#include "diffudict/novelty.hpp"
#include "diffudict/prox.hpp"
#include "diffudict/roc.hpp"
#include "diffudict/task.hpp"
#include "doctest.h"
#include "oracles.hpp"

using diffudict::DictionaryShard;
using diffudict::TaskSpec;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(int criterion, bool ok, const char* fmt, ...) {
  std::printf("[%s] criterion %d: ", ok ? "PASS" : "FAIL", criterion);
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

// Shared instance suite for the duality and stationarity criteria.
struct SolvedInstance {
  oracles::SmallInstance inst;
  diffudict::OracleSolution sol;
};

const std::vector<SolvedInstance>& instance_suite() {
  static const std::vector<SolvedInstance> suite = [] {
    std::vector<SolvedInstance> built;
    std::mt19937_64 rng(9001);
    built.reserve(100);
    for (int trial = 0; trial < 100; ++trial) {
      SolvedInstance s{oracles::make_small_instance(rng, 10, 6, trial % 2 == 1), {}};
      s.sol = diffudict::centralized_inference_oracle(s.inst.shards, s.inst.x, s.inst.task,
                                                      1e-12);
      built.push_back(std::move(s));
    }
    return built;
  }();
  return suite;
}

double best_cosine_assignment(const Eigen::MatrixXd& learned, const Eigen::MatrixXd& reference,
                              std::vector<double>* matched = nullptr) {
  std::array<int, 3> perm = {0, 1, 2};
  double best_worst = -1.0;
  std::vector<double> best(3, 0.0);
  do {
    double worst = 2.0;
    std::vector<double> cos(3, 0.0);
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd a = learned.col(perm[static_cast<std::size_t>(k)]);
      const Eigen::VectorXd b = reference.col(k);
      const double denom = a.norm() * b.norm();
      cos[static_cast<std::size_t>(k)] = denom > 0.0 ? std::abs(a.dot(b)) / denom : 0.0;
      worst = std::min(worst, cos[static_cast<std::size_t>(k)]);
    }
    if (worst > best_worst) {
      best_worst = worst;
      best = cos;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (matched) *matched = best;
  return best_worst;
}

}  // namespace

TEST_CASE("criterion 1: dual estimates reach 40 dB against the oracle inside the round budget") {
  const auto start = std::chrono::steady_clock::now();
  diffudict::BenchConfig cfg;  // 20-dim signal, 10 single-atom agents
  const diffudict::BenchResult result = diffudict::run_bench(cfg);
  const double elapsed = seconds_since(start);

  const bool reached = result.first_round_at_40db >= 1 && result.first_round_at_40db <= 1000;
  const bool ok = reached && elapsed < 5.0;
  report(1, ok, "median snr hits 40 db at round %d of 1000 (final %.1f db, %.2f s)",
         result.first_round_at_40db, result.final_median_snr_db, elapsed);
  CHECK(ok);
}

TEST_CASE("criterion 2: primal and dual optima coincide on 100 random instances") {
  const auto start = std::chrono::steady_clock::now();
  double worst_gap = 0.0;
  for (const SolvedInstance& s : instance_suite()) {
    const double gap =
        std::abs(s.sol.primal - s.sol.dual) / std::max(1.0, std::abs(s.sol.primal));
    worst_gap = std::max(worst_gap, gap);
  }
  const double elapsed = seconds_since(start);
  const bool ok = worst_gap <= 1e-6 && elapsed < 10.0;
  report(2, ok, "worst relative duality gap %.3e over 100 instances (%.2f s)", worst_gap,
         elapsed);
  CHECK(ok);
}

TEST_CASE("criterion 3: the optimal dual equals the residual gradient at the primal solution") {
  double worst = 0.0;
  for (const SolvedInstance& s : instance_suite()) {
    Eigen::VectorXd residual = s.inst.x;
    for (std::size_t k = 0; k < s.inst.shards.size(); ++k)
      residual -= s.inst.shards[k].atoms * s.sol.coeffs[k];
    const Eigen::VectorXd mapped = diffudict::residual_grad(residual, s.inst.task.residual);
    worst = std::max(worst, (s.sol.nu - mapped).lpNorm<Eigen::Infinity>());
  }
  const bool ok = worst <= 1e-5;
  report(3, ok, "worst stationarity residual %.3e over 100 instances", worst);
  CHECK(ok);
}

TEST_CASE("criterion 4: closed-form conjugates match grid suprema and Fenchel-Young") {
  std::mt19937_64 rng(9002);
  std::uniform_real_distribution<double> z_draw(-5.0, 5.0);
  std::uniform_real_distribution<double> gamma_draw(0.01, 2.0);
  std::uniform_real_distribution<double> delta_draw(0.05, 2.0);
  std::uniform_real_distribution<double> eta_draw(0.1, 0.6);
  std::normal_distribution<double> gauss(0.0, 1.5);

  double worst_grid = 0.0;
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 1 + trial % 2;
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z[i] = z_draw(rng);
    const double gamma = gamma_draw(rng);
    const double delta = delta_draw(rng);
    const bool nonneg = trial % 3 == 0;
    const diffudict::CoeffRegularizer reg =
        nonneg ? diffudict::CoeffRegularizer::nonneg_elastic_net(gamma, delta)
               : diffudict::CoeffRegularizer::elastic_net(gamma, delta);
    const double closed = diffudict::coeff_conjugate(z, reg);
    const double grid = oracles::coeff_conjugate_sup(z, gamma, delta, nonneg);
    worst_grid = std::max(worst_grid,
                          std::abs(closed - grid) / std::max(1.0, std::abs(closed)));
  }
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 1 + trial % 2;
    const bool huber = trial % 2 == 0;
    const double eta = eta_draw(rng);
    const diffudict::ResidualKind kind =
        huber ? diffudict::ResidualKind::huber(eta) : diffudict::ResidualKind::quadratic();
    Eigen::VectorXd nu(d);
    for (int i = 0; i < d; ++i) nu[i] = huber ? std::tanh(gauss(rng)) * 0.999 : gauss(rng);
    const diffudict::ConjugateValue closed = diffudict::residual_conjugate(nu, kind);
    const double grid = oracles::residual_conjugate_sup(nu, huber, eta);
    worst_grid = std::max(worst_grid, std::abs(closed.value - grid) /
                                          std::max(1.0, std::abs(closed.value)));
  }

  // Equality f(x) + f*(grad f(x)) = <grad f(x), x> certifies both closed
  // forms at once.
  double worst_fy = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const bool huber = trial % 2 == 0;
    const double eta = eta_draw(rng);
    const diffudict::ResidualKind kind =
        huber ? diffudict::ResidualKind::huber(eta) : diffudict::ResidualKind::quadratic();
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = gauss(rng);
    const Eigen::VectorXd nu = diffudict::residual_grad(x, kind);
    const diffudict::ConjugateValue fstar = diffudict::residual_conjugate(nu, kind);
    const double gap =
        std::abs(diffudict::residual_loss(x, kind) + fstar.value - nu.dot(x));
    worst_fy = std::max(worst_fy, gap);
    if (!fstar.in_domain) worst_fy = 1.0;
  }
  const bool ok = worst_grid <= 1e-4 && worst_fy <= 1e-8;
  report(4, ok, "worst grid deviation %.3e, worst Fenchel-Young gap %.3e", worst_grid,
         worst_fy);
  CHECK(ok);
}

TEST_CASE("criterion 5: analytic dual gradients match finite differences at 500 points") {
  std::mt19937_64 rng(9003);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  int points = 0;
  while (points < 500) {
    const oracles::SmallInstance inst =
        oracles::make_small_instance(rng, 6, 4, points % 2 == 1);
    const int m = static_cast<int>(inst.x.size());
    const int n_agents = static_cast<int>(inst.shards.size());
    for (int draw = 0; draw < 5 && points < 500; ++draw, ++points) {
      Eigen::VectorXd nu(m);
      for (int i = 0; i < m; ++i) nu[i] = gauss(rng);
      if (inst.task.residual.is_huber()) {
        const double peak = nu.lpNorm<Eigen::Infinity>();
        if (peak > 0.9) nu *= 0.9 / peak;
      }
      const std::size_t k = static_cast<std::size_t>(points) % inst.shards.size();
      const bool informed = points % 3 != 0;
      const Eigen::VectorXd grad = diffudict::local_dual_grad(inst.shards[k], nu, inst.x,
                                                              inst.task, n_agents, 1, informed);
      const Eigen::VectorXd fd = oracles::fd_gradient(
          [&](const Eigen::VectorXd& p) {
            return diffudict::local_dual_cost(inst.shards[k], p, inst.x, inst.task, n_agents, 1,
                                              informed);
          },
          nu);
      worst = std::max(worst, (grad - fd).lpNorm<Eigen::Infinity>() /
                                  std::max(1.0, grad.lpNorm<Eigen::Infinity>()));
    }
  }
  const bool ok = worst <= 1e-5;
  report(5, ok, "worst relative gradient error %.3e over 500 interior points", worst);
  CHECK(ok);
}

TEST_CASE("criterion 6: halving the step quarters the steady-state squared error") {
  diffudict::DeskConfig desk_cfg;
  desk_cfg.rule = diffudict::CombinationRule::Metropolis;
  const diffudict::DeskInstance desk = diffudict::make_desk_instance(desk_cfg);
  const diffudict::OracleSolution sol =
      diffudict::centralized_inference_oracle(desk.shards, desk.x, desk.task, 1e-13);

  const auto steady_error = [&](double mu_frac) {
    diffudict::DiffusionOptions opt;
    opt.mu = mu_frac * desk.mu_bound;
    opt.rounds = 20000;
    const diffudict::DualState state =
        diffudict::diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt);
    double total = 0.0;
    for (const Eigen::VectorXd& nu : state.iterate) total += (nu - sol.nu).squaredNorm();
    return total / static_cast<double>(state.iterate.size());
  };

  const double coarse = steady_error(0.25);
  const double fine = steady_error(0.125);
  const double ratio = coarse / fine;
  const bool ok = ratio >= 2.5 && ratio <= 6.0;
  report(6, ok, "squared steady-state error shrinks %.2fx when the step halves", ratio);
  CHECK(ok);
}

TEST_CASE("criterion 7: combination weights stay doubly stochastic and mean-preserving") {
  std::mt19937_64 rng(9004);
  std::normal_distribution<double> gauss(0.0, 2.0);
  double worst_sum = 0.0, worst_mean = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 49);
    const Eigen::MatrixXi adj = diffudict::random_connected_graph(n, 0.3, rng());
    const diffudict::CombinationMatrix a = diffudict::metropolis_matrix(adj);
    for (int i = 0; i < n; ++i) {
      worst_sum = std::max(worst_sum, std::abs(a.weights.row(i).sum() - 1.0));
      worst_sum = std::max(worst_sum, std::abs(a.weights.col(i).sum() - 1.0));
    }

    std::vector<Eigen::VectorXd> states(static_cast<std::size_t>(n));
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    for (auto& s : states) {
      s.resize(3);
      for (int i = 0; i < 3; ++i) s[i] = gauss(rng);
      mean += s;
    }
    mean /= static_cast<double>(n);
    const std::vector<Eigen::VectorXd> next = diffudict::sync_round(states, a);
    Eigen::VectorXd after = Eigen::VectorXd::Zero(3);
    for (const auto& s : next) after += s;
    after /= static_cast<double>(n);
    worst_mean = std::max(worst_mean, (after - mean).lpNorm<Eigen::Infinity>());
  }
  const bool ok = worst_sum <= 1e-12 && worst_mean <= 1e-12;
  report(7, ok, "worst stochasticity defect %.2e, worst mean drift %.2e over 100 graphs",
         worst_sum, worst_mean);
  CHECK(ok);
}

TEST_CASE("criterion 8: novelty scores separate fresh topics from learned ones") {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::vector<int>> schedule =
      diffudict::default_topic_schedule(9, 8, {1, 2, 5, 6, 8});
  const std::vector<diffudict::LabeledBlock> stream =
      diffudict::synthetic_topic_stream(200, 8, schedule, 60, 0.02, 424242);

  diffudict::NoveltyConfig cfg;  // defaults: 10 agents, 5 added per step
  const diffudict::NoveltyOutcome outcome = diffudict::novelty_pipeline(stream, cfg, 31337);

  bool ok = outcome.evaluated.size() == 5;
  double min_auc = 1.0;
  std::vector<double> pooled_scores;
  std::vector<std::uint8_t> pooled_labels;
  for (const diffudict::NoveltyStepReport& report_s : outcome.evaluated) {
    min_auc = std::min(min_auc, report_s.roc.auc);
    pooled_scores.insert(pooled_scores.end(), report_s.scores.begin(), report_s.scores.end());
    pooled_labels.insert(pooled_labels.end(), report_s.labels.begin(), report_s.labels.end());
  }
  ok = ok && min_auc >= 0.9;

  // Shuffled labels must drag the same scores down to chance level.
  std::mt19937_64 shuffle_rng(777);
  std::shuffle(pooled_labels.begin(), pooled_labels.end(), shuffle_rng);
  const double control_auc = diffudict::roc_and_auc(pooled_scores, pooled_labels).auc;
  ok = ok && control_auc >= 0.4 && control_auc <= 0.6;

  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 120.0;
  report(8, ok, "min per-step auc %.3f over %zu steps, shuffled-label auc %.3f (%.1f s)",
         min_auc, outcome.evaluated.size(), control_auc, elapsed);
  CHECK(ok);
}

TEST_CASE("criterion 9: online factors match the planted model and the batch baseline") {
  const auto start = std::chrono::steady_clock::now();
  const diffudict::BiclusterSynthetic data =
      diffudict::synthetic_bicluster_data(56, 2000, 0.02, 5150);

  diffudict::BiclusterConfig cfg;  // three single-atom agents
  const diffudict::BiclusterOnlineResult online = diffudict::bicluster_online(data.x, cfg, 616);

  Eigen::MatrixXd learned(56, 3);
  for (int k = 0; k < 3; ++k) learned.col(k) = online.shards[static_cast<std::size_t>(k)].atoms;
  const double planted_cos = best_cosine_assignment(learned, data.planted_atoms);

  const std::vector<diffudict::BatchFactor> batch = diffudict::bicluster_batch(
      data.x, 0.3, 0.05, 3);
  Eigen::MatrixXd batch_atoms(56, 3);
  for (int k = 0; k < 3; ++k) batch_atoms.col(k) = batch[static_cast<std::size_t>(k)].w;
  const double batch_cos = best_cosine_assignment(batch_atoms, learned);

  const std::vector<int> labels = diffudict::kmeans_labels(learned, 4, 99);
  const double purity = diffudict::cluster_purity(labels, data.group);

  const double elapsed = seconds_since(start);
  const bool ok =
      planted_cos >= 0.9 && batch_cos >= 0.85 && purity >= 0.95 && elapsed < 60.0;
  report(9, ok, "planted cosine %.3f, batch-online cosine %.3f, group purity %.3f (%.1f s)",
         planted_cos, batch_cos, purity, elapsed);
  CHECK(ok);
}

TEST_CASE("criterion 10: every pipeline keeps its dictionary constraints, exactly") {
  long violations = 0;
  std::size_t shards_checked = 0;
  bool all_feasible = true;

  // Online learning on a planted stream.
  {
    const TaskSpec task = TaskSpec::sparse_svd(0.05, 0.1);
    std::vector<DictionaryShard> shards =
        diffudict::initialize_shards(12, {1, 1, 1, 1}, task, 5);
    std::vector<int> everyone = {0, 1, 2, 3};
    const diffudict::Network net = diffudict::Network::make(
        Eigen::MatrixXi::Ones(4, 4), everyone, diffudict::CombinationRule::Uniform);
    std::mt19937_64 rng(9005);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::VectorXd> stream(200, Eigen::VectorXd(12));
    for (auto& x : stream) {
      for (int i = 0; i < 12; ++i) x[i] = gauss(rng);
      x /= x.norm();
    }
    diffudict::LearnerConfig lc;
    lc.mu = 0.8 * diffudict::step_size_bound(task, 1);
    lc.mu_w = 0.1;
    const diffudict::LearnResult run = diffudict::learn_online(net, shards, stream, task, lc);
    violations += run.feasibility_violations;
    for (const DictionaryShard& shard : run.shards) {
      all_feasible = all_feasible && diffudict::shard_feasible(shard, task.constraint);
      ++shards_checked;
    }
  }

  // Streaming novelty detection with network growth.
  {
    const std::vector<diffudict::LabeledBlock> stream = diffudict::synthetic_topic_stream(
        36, 5, diffudict::default_topic_schedule(5, 5, {1, 3}), 12, 0.02, 9006);
    diffudict::NoveltyConfig cfg;
    cfg.initial_agents = 6;
    cfg.atoms_added_per_step = 2;
    cfg.inference_rounds = 300;
    const diffudict::NoveltyOutcome outcome = diffudict::novelty_pipeline(stream, cfg, 9007);
    violations += outcome.feasibility_violations;
    const TaskSpec task = cfg.task();
    for (const DictionaryShard& shard : outcome.shards) {
      all_feasible = all_feasible && diffudict::shard_feasible(shard, task.constraint);
      ++shards_checked;
    }
  }

  // Online biclustering.
  {
    const diffudict::BiclusterSynthetic data =
        diffudict::synthetic_bicluster_data(24, 400, 0.02, 9008);
    diffudict::BiclusterConfig cfg;
    const diffudict::BiclusterOnlineResult online =
        diffudict::bicluster_online(data.x, cfg, 9009);
    violations += online.feasibility_violations;
    for (const DictionaryShard& shard : online.shards) {
      all_feasible = all_feasible && diffudict::shard_feasible(shard, cfg.task().constraint);
      ++shards_checked;
    }
  }

  const bool ok = violations == 0 && all_feasible;
  report(10, ok, "%ld recorded violations, %zu final shards all feasible", violations,
         shards_checked);
  CHECK(ok);
}
