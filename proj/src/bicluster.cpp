#include "diffudict/bicluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <Eigen/SVD>

#include "diffudict/errors.hpp"
#include "diffudict/learner.hpp"
#include "diffudict/network.hpp"
#include "diffudict/prox.hpp"

namespace diffudict {

TaskSpec BiclusterConfig::task() const { return TaskSpec::bi_clustering(gamma, delta, beta); }

BiclusterOnlineResult bicluster_online(const Eigen::MatrixXd& x, const BiclusterConfig& cfg,
                                       std::uint64_t seed) {
  if (cfg.n_factors < 1) throw std::invalid_argument("bicluster_online: n_factors must be >= 1");
  if (x.rows() < 1 || x.cols() < 1) throw ShapeError("bicluster_online: empty data matrix");
  const TaskSpec task = cfg.task();

  const int n = cfg.n_factors;
  const Eigen::MatrixXi adjacency = Eigen::MatrixXi::Ones(n, n);
  std::vector<int> informed(static_cast<std::size_t>(n));
  std::iota(informed.begin(), informed.end(), 0);
  const Network net = Network::make(adjacency, informed, CombinationRule::Uniform);

  std::vector<DictionaryShard> shards = initialize_shards(
      static_cast<int>(x.rows()), std::vector<int>(static_cast<std::size_t>(n), 1), task, seed);

  BiclusterOnlineResult result;
  result.loadings.resize(n, x.cols());

  LearnerConfig lc;
  lc.mu = cfg.mu_nu;
  lc.inference_rounds = cfg.inference_rounds;
  lc.rtol = cfg.rtol;
  lc.mu_w = cfg.mu_w;
  lc.allow_unsafe_mu = cfg.allow_unsafe_mu;
  lc.on_sample = [&](std::size_t t, const std::vector<Eigen::VectorXd>&,
                     const std::vector<Eigen::VectorXd>& y) {
    for (int k = 0; k < n; ++k)
      result.loadings(k, static_cast<Eigen::Index>(t)) = y[static_cast<std::size_t>(k)][0];
  };

  std::vector<Eigen::VectorXd> samples;
  samples.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index t = 0; t < x.cols(); ++t) samples.push_back(x.col(t));

  LearnResult learned = learn_online(net, std::move(shards), samples, task, lc);
  result.shards = std::move(learned.shards);
  result.feasibility_violations = learned.feasibility_violations;
  return result;
}

std::vector<BatchFactor> bicluster_batch(const Eigen::MatrixXd& x, double lambda, double beta,
                                         int n_factors) {
  if (n_factors < 1) throw std::invalid_argument("bicluster_batch: n_factors must be >= 1");
  if (!(lambda >= 0.0) || !(beta >= 0.0))
    throw std::invalid_argument("bicluster_batch: thresholds must be >= 0");
  if (x.rows() < 1 || x.cols() < 1) throw ShapeError("bicluster_batch: empty data matrix");

  Eigen::MatrixXd residual = x;
  std::vector<BatchFactor> factors;
  factors.reserve(static_cast<std::size_t>(n_factors));

  for (int f = 0; f < n_factors; ++f) {
    BatchFactor factor;
    factor.w = Eigen::VectorXd::Zero(x.rows());
    factor.y = Eigen::VectorXd::Zero(x.cols());

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()[0] == 0.0) {
      factor.flagged_zero = true;
      factors.push_back(std::move(factor));
      continue;
    }

    Eigen::VectorXd w = svd.matrixU().col(0);
    Eigen::VectorXd y_unit;
    bool killed = false;
    for (int it = 0; it < 100000; ++it) {
      Eigen::VectorXd y_shrunk = soft_threshold(residual.transpose() * w, lambda);
      const double y_norm = y_shrunk.norm();
      if (y_norm == 0.0) {
        killed = true;
        break;
      }
      y_unit = y_shrunk / y_norm;
      Eigen::VectorXd w_shrunk = soft_threshold(residual * y_unit, beta);
      const double w_norm = w_shrunk.norm();
      if (w_norm == 0.0) {
        killed = true;
        break;
      }
      w_shrunk /= w_norm;
      const double change = (w_shrunk - w).lpNorm<Eigen::Infinity>();
      w = std::move(w_shrunk);
      factor.iterations = it + 1;
      if (change < 1e-10) break;
      if (it + 1 == 100000)
        throw ConvergenceError("bicluster_batch: factor iteration did not settle");
    }
    if (killed) {
      factor.flagged_zero = true;
      factors.push_back(std::move(factor));
      continue;
    }

    factor.w = w;
    factor.s = w.dot(residual * y_unit);
    factor.y = factor.s * y_unit;
    residual.noalias() -= factor.w * factor.y.transpose();
    factors.push_back(std::move(factor));
  }
  return factors;
}

BiclusterSynthetic synthetic_bicluster_data(int m, int t, double noise, std::uint64_t seed) {
  if (m < 8 || m % 4 != 0)
    throw std::invalid_argument("synthetic_bicluster_data: m must be a multiple of 4, >= 8");
  if (t < 1) throw std::invalid_argument("synthetic_bicluster_data: t must be >= 1");
  if (!(noise >= 0.0)) throw std::invalid_argument("synthetic_bicluster_data: noise must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(0.5, 1.0);
  std::uniform_real_distribution<double> magnitude(1.0, 2.0);
  std::bernoulli_distribution active(0.4);
  std::bernoulli_distribution flip(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  BiclusterSynthetic data;
  const int group_size = m / 4;
  data.group.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) data.group[static_cast<std::size_t>(i)] = i / group_size;

  data.planted_atoms = Eigen::MatrixXd::Zero(m, 3);
  for (int k = 0; k < 3; ++k) {
    for (int i = k * group_size; i < (k + 1) * group_size; ++i)
      data.planted_atoms(i, k) = mass(rng);
    data.planted_atoms.col(k).normalize();
  }

  // Distinct row scales keep the three factors' energies well separated.
  const double scales[3] = {3.0, 2.0, 1.4};
  data.planted_loadings = Eigen::MatrixXd::Zero(3, t);
  for (int j = 0; j < t; ++j)
    for (int k = 0; k < 3; ++k)
      if (active(rng))
        data.planted_loadings(k, j) = (flip(rng) ? 1.0 : -1.0) * scales[k] * magnitude(rng);

  data.x = data.planted_atoms * data.planted_loadings;
  if (noise > 0.0)
    for (int j = 0; j < t; ++j)
      for (int i = 0; i < m; ++i) data.x(i, j) += noise * gauss(rng);
  return data;
}

std::vector<int> kmeans_labels(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans_labels: need 1 <= k <= n");

  std::mt19937_64 rng(seed);
  std::vector<int> best_labels(static_cast<std::size_t>(n), 0);
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < 20; ++restart) {
    // Distinct random rows as initial centers.
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd centers(k, points.cols());
    for (int c = 0; c < k; ++c) centers.row(c) = points.row(perm[static_cast<std::size_t>(c)]);

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (int sweep = 0; sweep < 100; ++sweep) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double best = (points.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d = (points.row(i) - centers.row(c)).squaredNorm();
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        if (labels[static_cast<std::size_t>(i)] != arg) {
          labels[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      for (int c = 0; c < k; ++c) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(points.cols());
        int count = 0;
        for (int i = 0; i < n; ++i)
          if (labels[static_cast<std::size_t>(i)] == c) {
            mean += points.row(i);
            ++count;
          }
        if (count > 0) {
          centers.row(c) = mean / count;
        } else {
          // Re-seed an empty cluster at the point farthest from its center.
          int far = 0;
          double far_d = -1.0;
          for (int i = 0; i < n; ++i) {
            const int l = labels[static_cast<std::size_t>(i)];
            const double d = (points.row(i) - centers.row(l)).squaredNorm();
            if (d > far_d) {
              far_d = d;
              far = i;
            }
          }
          centers.row(c) = points.row(far);
        }
      }
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i)
      inertia += (points.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

double cluster_purity(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw ShapeError("cluster_purity: labelings must be nonempty and equal length");
  const std::set<int> pred_ids(predicted.begin(), predicted.end());
  const std::set<int> true_ids(truth.begin(), truth.end());
  if (pred_ids.size() > 4 || true_ids.size() > 4)
    throw std::invalid_argument("cluster_purity: supports at most four classes");

  // Pad the smaller side so a full permutation sweep covers injections.
  std::vector<int> pred_list(pred_ids.begin(), pred_ids.end());
  std::vector<int> true_list(true_ids.begin(), true_ids.end());
  const std::size_t width = std::max(pred_list.size(), true_list.size());
  while (true_list.size() < width) true_list.push_back(-1 - static_cast<int>(true_list.size()));

  std::sort(true_list.begin(), true_list.end());
  double best = 0.0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const auto at = std::find(pred_list.begin(), pred_list.end(), predicted[i]);
      const std::size_t slot = static_cast<std::size_t>(at - pred_list.begin());
      if (slot < true_list.size() && true_list[slot] == truth[i]) ++hits;
    }
    best = std::max(best, static_cast<double>(hits) / static_cast<double>(predicted.size()));
  } while (std::next_permutation(true_list.begin(), true_list.end()));
  return best;
}

}  // namespace diffudict
