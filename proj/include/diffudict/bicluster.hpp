#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "diffudict/shard.hpp"
#include "diffudict/task.hpp"

namespace diffudict {

struct BiclusterConfig {
  int n_factors = 3;
  double gamma = 0.5;
  double delta = 0.05;
  double beta = 0.01;   // dictionary l1 weight
  double mu_nu = 0.04;  // dual adapt step
  int inference_rounds = 600;
  double rtol = 1e-9;
  double mu_w = 0.01;
  bool allow_unsafe_mu = false;

  TaskSpec task() const;  // quadratic loss, plain elastic net, l1 dictionary
};

struct BiclusterOnlineResult {
  std::vector<DictionaryShard> shards;  // one column factor per agent
  Eigen::MatrixXd loadings;             // n_factors x T, coefficient per sample
  long feasibility_violations = 0;
};

// Streams the columns of X once through the online learner with one
// single-atom agent per factor on a fully connected uniform topology.
// loadings(k, t) is the coefficient agent k assigned to column t during the
// pass (with the dictionary it had at that moment).
BiclusterOnlineResult bicluster_online(const Eigen::MatrixXd& x, const BiclusterConfig& cfg,
                                       std::uint64_t seed);

struct BatchFactor {
  Eigen::VectorXd w;  // unit row factor (zero when flagged)
  double s = 0.0;     // scale w' X y of the converged pair
  Eigen::VectorXd y;  // scaled column loading s * y_unit, as deflated
  bool flagged_zero = false;
  int iterations = 0;
};

// Deflation baseline: per factor, seed with the leading singular pair, then
// alternate soft-thresholded power steps (threshold lambda on the loading,
// beta on the factor, each renormalized) until the factor moves less than
// 1e-10 in inf norm; subtract w y' and continue. A factor killed by the
// thresholds, or a zero residual matrix, yields a zero factor flagged.
std::vector<BatchFactor> bicluster_batch(const Eigen::MatrixXd& x, double lambda, double beta,
                                         int n_factors);

struct BiclusterSynthetic {
  Eigen::MatrixXd x;                 // m x t data matrix
  Eigen::MatrixXd planted_atoms;     // m x 3, disjoint nonneg row supports
  Eigen::MatrixXd planted_loadings;  // 3 x t, sparse mixed-sign rows
  std::vector<int> group;            // per-row group in {0,1,2,3}
};

// Planted rank-3 instance on m rows split into four equal groups: group k<3
// carries factor k alone and the last group carries none, so the rows'
// 3-dimensional factor profiles separate into four point clouds.
BiclusterSynthetic synthetic_bicluster_data(int m, int t, double noise, std::uint64_t seed);

// Plain seeded k-means (20 restarts, Lloyd iterations) over the rows of
// points; returns one label per row.
std::vector<int> kmeans_labels(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

// Best-permutation matching accuracy between two labelings with at most
// four distinct classes each.
double cluster_purity(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace diffudict
