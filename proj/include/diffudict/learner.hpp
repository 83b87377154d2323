#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "diffudict/inference.hpp"
#include "diffudict/network.hpp"
#include "diffudict/shard.hpp"
#include "diffudict/task.hpp"

namespace diffudict {

struct LearnerConfig {
  double mu = 0.0;            // dual adapt step per sample
  int inference_rounds = 500; // diffusion budget per sample
  double mu_w = 0.0;          // dictionary step; ignored when schedule is on
  bool reciprocal_mu_w = false;  // mu_w(s) = 1/s over the 1-based sample index
  std::optional<double> rtol = 1e-10;  // early stop inside each inference
  bool allow_unsafe_mu = false;
  bool trace = false;  // record per-sample dual cost and agreement
  // Observer called per sample with the duals and coefficients that feed the
  // update, before the update itself.
  std::function<void(std::size_t t, const std::vector<Eigen::VectorXd>& nu,
                     const std::vector<Eigen::VectorXd>& y)>
      on_sample;
};

// One projected proximal dictionary update for one agent: ascend the local
// dual coupling mu_w * nu * y', apply the prox of the dictionary penalty,
// then project back onto the constraint set. mu_w = 0 returns the shard
// bit-identical.
DictionaryShard dictionary_step(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                                const Eigen::VectorXd& y, double mu_w, const TaskSpec& task);

struct LearnResult {
  std::vector<DictionaryShard> shards;
  // Per-sample -sum_k J_k at each agent's own dual estimate (when traced).
  std::vector<double> dual_cost_trace;
  // Per-sample mean over agents of the dual disagreement |nu_k - mean nu|.
  std::vector<double> disagreement_trace;
  long feasibility_violations = 0;  // shards failing their constraint post-update
};

// Single pass over the sample stream: inference on each sample with the
// current shards, then one dictionary step per agent from its own dual
// estimate and coefficients. Samples are visited in order.
LearnResult learn_online(const Network& net, std::vector<DictionaryShard> shards,
                         const std::vector<Eigen::VectorXd>& stream, const TaskSpec& task,
                         const LearnerConfig& cfg);

// Seeded random feasible shards: standard normal atoms for plain unit
// columns, uniform [0, 1) for nonneg ones, both projected onto the
// constraint set. widths[k] is the atom count of agent k.
std::vector<DictionaryShard> initialize_shards(int m, const std::vector<int>& widths,
                                               const TaskSpec& task, std::uint64_t seed);

// Plain-text checkpoint: header "M K N", then one "agent_id col_index
// <M floats>" row per atom, columns in owner order.
void save_shards(const std::vector<DictionaryShard>& shards, const std::filesystem::path& path);
std::vector<DictionaryShard> load_shards(const std::filesystem::path& path);

}  // namespace diffudict
