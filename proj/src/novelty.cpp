#include "diffudict/novelty.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "diffudict/errors.hpp"
#include "diffudict/inference.hpp"
#include "diffudict/learner.hpp"
#include "diffudict/parallel.hpp"
#include "diffudict/prox.hpp"

namespace diffudict {

TaskSpec NoveltyConfig::task() const { return TaskSpec::nmf_huber(gamma, delta, eta); }

std::vector<LabeledBlock> synthetic_topic_stream(
    int m, int n_topics, const std::vector<std::vector<int>>& topics_per_step,
    int samples_per_step, double noise, std::uint64_t seed) {
  if (n_topics < 1) throw std::invalid_argument("topic_stream: n_topics must be >= 1");
  if (m < n_topics) throw std::invalid_argument("topic_stream: need m >= n_topics");
  if (samples_per_step < 1)
    throw std::invalid_argument("topic_stream: samples_per_step must be >= 1");
  if (!(noise >= 0.0)) throw std::invalid_argument("topic_stream: noise must be >= 0");
  if (topics_per_step.empty()) throw std::invalid_argument("topic_stream: empty schedule");
  for (const std::vector<int>& block : topics_per_step) {
    if (block.empty()) throw std::invalid_argument("topic_stream: empty block in schedule");
    for (int j : block)
      if (j < 0 || j >= n_topics)
        throw std::invalid_argument("topic_stream: topic id out of range");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(0.3, 1.0);
  std::uniform_real_distribution<double> amp(0.8, 1.2);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // One contiguous support stripe per topic keeps distinct topics disjoint.
  const int stripe = m / n_topics;
  Eigen::MatrixXd topics = Eigen::MatrixXd::Zero(m, n_topics);
  for (int j = 0; j < n_topics; ++j) {
    for (int i = j * stripe; i < (j + 1) * stripe; ++i) topics(i, j) = mass(rng);
    topics.col(j).normalize();
  }

  const int n_noise = std::max(1, m / 20);
  std::uniform_int_distribution<int> pick_row(0, m - 1);

  std::vector<LabeledBlock> stream;
  stream.reserve(topics_per_step.size());
  std::set<int> seen;
  for (const std::vector<int>& active : topics_per_step) {
    LabeledBlock block;
    block.docs.resize(m, samples_per_step);
    block.topic.resize(static_cast<std::size_t>(samples_per_step));
    block.novel.resize(static_cast<std::size_t>(samples_per_step));

    // Round-robin over the active topics, then shuffle the order, so the
    // per-block composition is fixed by the schedule alone.
    std::vector<int> assignment(static_cast<std::size_t>(samples_per_step));
    for (int t = 0; t < samples_per_step; ++t)
      assignment[static_cast<std::size_t>(t)] =
          active[static_cast<std::size_t>(t) % active.size()];
    std::shuffle(assignment.begin(), assignment.end(), rng);

    for (int t = 0; t < samples_per_step; ++t) {
      const int topic = assignment[static_cast<std::size_t>(t)];
      Eigen::VectorXd doc = amp(rng) * topics.col(topic);
      if (noise > 0.0) {
        for (int r = 0; r < n_noise; ++r) doc[pick_row(rng)] += noise * std::abs(gauss(rng));
      }
      doc.normalize();
      block.docs.col(t) = doc;
      block.topic[static_cast<std::size_t>(t)] = topic;
      block.novel[static_cast<std::size_t>(t)] = seen.count(topic) == 0 ? 1 : 0;
    }
    seen.insert(active.begin(), active.end());
    stream.push_back(std::move(block));
  }
  return stream;
}

std::vector<std::vector<int>> default_topic_schedule(int steps, int n_topics,
                                                     const std::vector<int>& new_topic_steps) {
  if (steps < 1) throw std::invalid_argument("topic_schedule: steps must be >= 1");
  if (n_topics < 3) throw std::invalid_argument("topic_schedule: need at least 3 topics");
  for (int s : new_topic_steps)
    if (s < 1 || s >= steps)
      throw std::invalid_argument("topic_schedule: new-topic steps must lie in [1, steps)");
  if (static_cast<int>(new_topic_steps.size()) + 3 > n_topics)
    throw std::invalid_argument("topic_schedule: not enough topics for the requested steps");

  std::vector<std::vector<int>> schedule;
  schedule.reserve(static_cast<std::size_t>(steps));
  schedule.push_back({0, 1, 2});
  int next = 3;
  for (int s = 1; s < steps; ++s) {
    std::vector<int> block;
    const int known = next;
    if (std::find(new_topic_steps.begin(), new_topic_steps.end(), s) != new_topic_steps.end())
      block.push_back(next++);
    // Fill with distinct previously seen topics, rotating with the step.
    for (int i = 0; static_cast<int>(block.size()) < 3; ++i)
      block.push_back((s + i) % known);
    schedule.push_back(std::move(block));
  }
  return schedule;
}

std::vector<double> novelty_score(const Network& net,
                                  const std::vector<DictionaryShard>& shards,
                                  const Eigen::VectorXd& doc, const TaskSpec& task,
                                  const NoveltyConfig& cfg) {
  DiffusionOptions opt;
  opt.mu = cfg.mu;
  opt.rounds = cfg.inference_rounds;
  opt.rtol = cfg.rtol;
  const DualState state = diffusion_solve(net, shards, doc, task, opt);
  std::vector<double> local_costs(shards.size());
  for (std::size_t k = 0; k < shards.size(); ++k)
    local_costs[k] = local_dual_cost(shards[k], state.iterate[k], doc, task, net.n_agents,
                                     net.informed_count(), net.is_informed(static_cast<int>(k)));
  return dual_value_consensus(net, local_costs, cfg.mu_g, cfg.consensus_rounds);
}

namespace {

std::vector<int> all_agents(int n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) ids[static_cast<std::size_t>(k)] = k;
  return ids;
}

// Fresh single-atom agents joined to the existing topology: each new agent
// wires to every current node with the usual edge probability and falls back
// to one uniformly drawn neighbor if the coin never landed, which keeps the
// grown graph connected.
Eigen::MatrixXi grow_adjacency(const Eigen::MatrixXi& adj, int extra, double edge_prob,
                               std::mt19937_64& rng) {
  const int old_n = static_cast<int>(adj.rows());
  const int n = old_n + extra;
  Eigen::MatrixXi grown = Eigen::MatrixXi::Identity(n, n);
  grown.topLeftCorner(old_n, old_n) = adj;
  std::bernoulli_distribution coin(edge_prob);
  for (int v = old_n; v < n; ++v) {
    bool attached = false;
    for (int u = 0; u < v; ++u) {
      if (coin(rng)) {
        grown(u, v) = grown(v, u) = 1;
        attached = true;
      }
    }
    if (!attached) {
      std::uniform_int_distribution<int> pick(0, v - 1);
      const int u = pick(rng);
      grown(u, v) = grown(v, u) = 1;
    }
  }
  return grown;
}

}  // namespace

NoveltyOutcome novelty_pipeline(const std::vector<LabeledBlock>& stream,
                                const NoveltyConfig& cfg, std::uint64_t seed) {
  if (stream.empty()) throw std::invalid_argument("novelty_pipeline: empty stream");
  const TaskSpec task = cfg.task();
  task.validate();
  const int m = static_cast<int>(stream.front().docs.rows());
  for (const LabeledBlock& block : stream) {
    if (block.docs.rows() != m) throw ShapeError("novelty_pipeline: inconsistent doc height");
    if (block.novel.size() != static_cast<std::size_t>(block.docs.cols()))
      throw ShapeError("novelty_pipeline: one label per document required");
  }
  if (cfg.initial_agents < 1)
    throw std::invalid_argument("novelty_pipeline: initial_agents must be >= 1");
  if (cfg.atoms_added_per_step < 0)
    throw std::invalid_argument("novelty_pipeline: atoms_added_per_step must be >= 0");

  std::mt19937_64 rng(seed);
  Eigen::MatrixXi adjacency = random_connected_graph(cfg.initial_agents, cfg.edge_prob, rng());
  Network net = Network::make(adjacency, all_agents(cfg.initial_agents),
                              CombinationRule::Metropolis);
  std::vector<DictionaryShard> shards = initialize_shards(
      m, std::vector<int>(static_cast<std::size_t>(cfg.initial_agents), 1), task, rng());

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  NoveltyOutcome outcome;
  for (std::size_t s = 0; s < stream.size(); ++s) {
    const LabeledBlock& block = stream[s];
    const int n_docs = static_cast<int>(block.docs.cols());

    bool has_novel = false, has_known = false;
    for (std::uint8_t l : block.novel) (l ? has_novel : has_known) = true;

    if (has_novel && has_known) {
      // Scoring is read-only on the dictionary, so documents can fan out.
      std::vector<double> scores(static_cast<std::size_t>(n_docs), 0.0);
      parallel_for(n_docs, [&](std::int64_t d) {
        const std::vector<double> per_agent =
            novelty_score(net, shards, block.docs.col(d), task, cfg);
        double mean = 0.0;
        for (double g : per_agent) mean += g;
        scores[static_cast<std::size_t>(d)] = mean / static_cast<double>(per_agent.size());
      });
      NoveltyStepReport report;
      report.block = static_cast<int>(s);
      report.scores = scores;
      report.labels = block.novel;
      report.roc = roc_and_auc(scores, block.novel);
      outcome.evaluated.push_back(std::move(report));
    }

    LearnerConfig lc;
    lc.mu = cfg.mu;
    lc.inference_rounds = cfg.inference_rounds;
    lc.rtol = cfg.rtol;
    lc.mu_w = 1.0 / static_cast<double>(s + 1);
    std::vector<Eigen::VectorXd> samples;
    samples.reserve(static_cast<std::size_t>(n_docs));
    for (int t = 0; t < n_docs; ++t) samples.push_back(block.docs.col(t));
    LearnResult learned = learn_online(net, std::move(shards), samples, task, lc);
    shards = std::move(learned.shards);
    outcome.feasibility_violations += learned.feasibility_violations;

    if (s + 1 < stream.size() && cfg.atoms_added_per_step > 0) {
      adjacency = grow_adjacency(adjacency, cfg.atoms_added_per_step, cfg.edge_prob, rng);
      const int n = static_cast<int>(adjacency.rows());
      net = Network::make(adjacency, all_agents(n), CombinationRule::Metropolis);
      for (int k = static_cast<int>(shards.size()); k < n; ++k) {
        Eigen::MatrixXd atom(m, 1);
        for (int i = 0; i < m; ++i) atom(i, 0) = task.constraint.nonneg() ? unit(rng) : gauss(rng);
        shards.push_back(
            DictionaryShard{k, project_dictionary_columns(atom, task.constraint)});
      }
    }
  }
  outcome.shards = std::move(shards);
  outcome.adjacency = adjacency;
  outcome.final_agents = static_cast<int>(outcome.shards.size());
  return outcome;
}

}  // namespace diffudict
