#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "diffudict/config.hpp"
#include "diffudict/inference.hpp"
#include "diffudict/network.hpp"
#include "diffudict/shard.hpp"
#include "diffudict/task.hpp"

namespace diffudict {

// Small reference instance used by the benchmark command and the tuning
// tests: M-dimensional signal drawn as a sparse unit-norm combination of the
// dictionary atoms plus noise, one atom per agent, quadratic loss with a
// sparse elastic-net penalty, everyone informed. Uniform combination runs
// all-to-all averaging (bias-free); Metropolis draws a random connected
// topology with edge_prob.
struct DeskConfig {
  int m = 20;
  int n_agents = 10;
  double gamma = 0.05;
  double delta = 0.1;
  CombinationRule rule = CombinationRule::Uniform;
  double edge_prob = 0.5;
  std::uint64_t graph_seed = 7;
  std::uint64_t instance_seed = 1234;
};

struct DeskInstance {
  Network net;
  std::vector<DictionaryShard> shards;
  Eigen::VectorXd x;
  TaskSpec task;
  double mu_bound = 0.0;
};

DeskInstance make_desk_instance(const DeskConfig& cfg);

struct BenchConfig {
  DeskConfig desk;
  double mu_frac = 0.8;  // fraction of the stable step bound
  int rounds = 1000;
};

struct BenchResult {
  std::vector<double> median_snr_db;     // per round, vs the oracle dual
  std::vector<double> disagreement;      // per round, mean |nu_k - mean nu|
  double final_median_snr_db = 0.0;
  int first_round_at_40db = -1;  // -1 when never reached
  double mu = 0.0;
  OracleSolution oracle;
};

// Runs diffusion on the desk instance and tracks the per-round median SNR of
// the agents' duals against the centralized reference.
BenchResult run_bench(const BenchConfig& cfg);

// Entry point behind the CLI: dispatches one named experiment with its
// configuration and writes the artifacts into out_dir. Commands: infer,
// learn, novelty, bicluster, bench. Throws ConfigError for bad input.
void run_experiment(const std::string& command, const Config& cfg,
                    const std::filesystem::path& out_dir);

}  // namespace diffudict
