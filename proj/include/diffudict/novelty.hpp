#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "diffudict/network.hpp"
#include "diffudict/roc.hpp"
#include "diffudict/shard.hpp"
#include "diffudict/task.hpp"

namespace diffudict {

// One block of streamed documents with per-document ground truth.
struct LabeledBlock {
  Eigen::MatrixXd docs;             // M x T_s, unit l2 columns
  std::vector<std::uint8_t> novel;  // 1 when the topic is unseen so far
  std::vector<int> topic;           // generating topic id per document
};

// Seeded synthetic corpus: each topic is a sparse nonnegative unit vector on
// its own contiguous support stripe, so disjoint topics give orthogonal
// documents at zero noise. Block s draws documents round-robin from
// topics_per_step[s] (order shuffled), adds sparse nonnegative noise and
// renormalizes. A document is novel when its topic appears in no earlier
// block, so the per-block novel count is fixed by the schedule.
std::vector<LabeledBlock> synthetic_topic_stream(int m, int n_topics,
                                                 const std::vector<std::vector<int>>& topics_per_step,
                                                 int samples_per_step, double noise,
                                                 std::uint64_t seed);

// The schedule used by the novelty experiment: blocks.size() = steps, three
// active topics per block, one fresh topic introduced at each listed step.
std::vector<std::vector<int>> default_topic_schedule(int steps, int n_topics,
                                                     const std::vector<int>& new_topic_steps);

struct NoveltyConfig {
  // Task (Huber residual with nonneg elastic net).
  double gamma = 0.05;
  double delta = 0.1;
  double eta = 0.2;
  // Inference.
  double mu = 0.05;
  int inference_rounds = 300;
  double rtol = 1e-8;
  // Dual-value consensus.
  double mu_g = 0.5;
  int consensus_rounds = 200;
  // Topology and growth.
  int initial_agents = 10;
  int atoms_added_per_step = 5;
  double edge_prob = 0.3;
  // Decision threshold used for the headline classification.
  double chi = 0.1;

  TaskSpec task() const;
};

// Novelty score of one document: run inference, evaluate every agent's local
// dual cost at its own estimate, then average them by scalar consensus. The
// k-th entry is agent k's estimate of -mean(J), i.e. 1/N times the attained
// dual value.
std::vector<double> novelty_score(const Network& net,
                                  const std::vector<DictionaryShard>& shards,
                                  const Eigen::VectorXd& doc, const TaskSpec& task,
                                  const NoveltyConfig& cfg);

struct NoveltyStepReport {
  int block = 0;                // index into the stream
  std::vector<double> scores;   // network-mean score per document
  std::vector<std::uint8_t> labels;
  RocResult roc;
};

struct NoveltyOutcome {
  std::vector<NoveltyStepReport> evaluated;  // blocks with both classes
  std::vector<DictionaryShard> shards;
  Eigen::MatrixXi adjacency;  // final grown topology
  long feasibility_violations = 0;
  int final_agents = 0;
};

// Full streaming experiment: per block, score all documents against the
// current dictionary (ROC per block wherever both classes appear), learn on
// the block with the step-decayed dictionary step mu_w(s) = 1/s, then grow
// the network by fresh single-atom agents and recompute the combination
// weights. Scoring of a block is read-only and may run documents in
// parallel; learning stays sequential.
NoveltyOutcome novelty_pipeline(const std::vector<LabeledBlock>& stream,
                                const NoveltyConfig& cfg, std::uint64_t seed);

}  // namespace diffudict
