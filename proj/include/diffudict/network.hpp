#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace diffudict {

// Combination weights: entry (l, k) is the weight agent k puts on the state
// received from agent l. Columns sum to one and the support matches the
// adjacency (self-loops included).
struct CombinationMatrix {
  Eigen::MatrixXd weights;

  int size() const { return static_cast<int>(weights.rows()); }
  // Row and column sums both within tol of one, all entries nonnegative.
  bool doubly_stochastic(double tol = 1e-12) const;
};

enum class CombinationRule { Metropolis, Uniform };

// Static topology plus the combination weights and the informed set.
// Adjacency is symmetric 0/1 with a true diagonal; the graph is connected.
struct Network {
  int n_agents = 0;
  Eigen::MatrixXi adjacency;
  std::vector<std::vector<int>> neighbors;  // ascending ids, self included
  std::vector<int> informed;                // ascending agent ids, nonempty
  CombinationMatrix combine;

  // Validates every structural invariant and derives the neighbor lists.
  static Network make(const Eigen::MatrixXi& adjacency, std::vector<int> informed,
                      const CombinationMatrix& combine);
  static Network make(const Eigen::MatrixXi& adjacency, std::vector<int> informed,
                      CombinationRule rule);

  bool is_informed(int agent) const;
  int informed_count() const { return static_cast<int>(informed.size()); }
};

// Erdos-Renyi draw conditioned on connectivity: resamples up to 10^4 times
// and throws ConvergenceError after that. Self-loops are always present.
// Identical (n, edge_prob, seed) produce identical graphs.
Eigen::MatrixXi random_connected_graph(int n, double edge_prob, std::uint64_t seed);

bool graph_connected(const Eigen::MatrixXi& adjacency);

// Metropolis-Hastings weights on the given adjacency: off-diagonal entries
// 1/max(deg_k, deg_l) for neighbors (degrees count the self-loop), diagonal
// takes the residual mass. Symmetric and doubly stochastic by construction.
CombinationMatrix metropolis_matrix(const Eigen::MatrixXi& adjacency);

// Uniform all-to-all averaging weights 1/n, for fully connected topologies.
CombinationMatrix uniform_matrix(int n);

// One synchronous combination round over vector states: every agent k
// receives sum_l a_lk * states[l] computed from the pre-round snapshot, with
// the sum taken over neighbors in ascending id order. The result does not
// depend on how the work is scheduled.
std::vector<Eigen::VectorXd> sync_round(const std::vector<Eigen::VectorXd>& states,
                                        const CombinationMatrix& combine);

// Same contract for scalar states.
std::vector<double> sync_round(const std::vector<double>& states,
                               const CombinationMatrix& combine);

// Edge-list text exchange: one "u v" pair per line, 0-indexed, undirected
// edges with u < v and self-loops implied. Node count is the header line.
void save_edge_list(const Eigen::MatrixXi& adjacency, const std::filesystem::path& path);
Eigen::MatrixXi load_edge_list(const std::filesystem::path& path);

// Plain CSV dump of the combination weights for offline inspection.
void save_combination_csv(const CombinationMatrix& combine, const std::filesystem::path& path);

}  // namespace diffudict
