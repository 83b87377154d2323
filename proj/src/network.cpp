#include "diffudict/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>

#include "diffudict/errors.hpp"
#include "diffudict/numfmt.hpp"
#include "diffudict/parallel.hpp"

namespace diffudict {

namespace {

void check_adjacency(const Eigen::MatrixXi& adj) {
  const Eigen::Index n = adj.rows();
  if (n == 0 || adj.cols() != n) throw ShapeError("network: adjacency must be square, n >= 1");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adj(i, i) != 1) throw std::invalid_argument("network: every agent needs a self-loop");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adj(i, j) != 0 && adj(i, j) != 1)
        throw std::invalid_argument("network: adjacency entries must be 0/1");
      if (adj(i, j) != adj(j, i)) throw std::invalid_argument("network: adjacency must be symmetric");
    }
  }
  if (!graph_connected(adj)) throw std::invalid_argument("network: graph must be connected");
}

}  // namespace

bool CombinationMatrix::doubly_stochastic(double tol) const {
  const Eigen::Index n = weights.rows();
  if (n == 0 || weights.cols() != n) return false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (weights(i, j) < -tol) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(weights.row(i).sum() - 1.0) > tol) return false;
    if (std::abs(weights.col(i).sum() - 1.0) > tol) return false;
  }
  return true;
}

bool graph_connected(const Eigen::MatrixXi& adj) {
  const Eigen::Index n = adj.rows();
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<Eigen::Index> queue{0};
  seen[0] = 1;
  Eigen::Index reached = 1;
  while (!queue.empty()) {
    const Eigen::Index u = queue.front();
    queue.pop_front();
    for (Eigen::Index v = 0; v < n; ++v) {
      if (adj(u, v) == 1 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == n;
}

Network Network::make(const Eigen::MatrixXi& adjacency, std::vector<int> informed,
                      const CombinationMatrix& combine) {
  check_adjacency(adjacency);
  const int n = static_cast<int>(adjacency.rows());

  std::sort(informed.begin(), informed.end());
  informed.erase(std::unique(informed.begin(), informed.end()), informed.end());
  if (informed.empty()) throw std::invalid_argument("network: informed set must be nonempty");
  if (informed.front() < 0 || informed.back() >= n)
    throw std::invalid_argument("network: informed agent id out of range");

  if (combine.size() != n) throw ShapeError("network: combination matrix size mismatch");
  if (!combine.doubly_stochastic(1e-12))
    throw std::invalid_argument("network: combination matrix must be doubly stochastic");
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      if (combine.weights(l, k) != 0.0 && adjacency(l, k) == 0)
        throw std::invalid_argument("network: combination weight on a missing edge");

  Network net;
  net.n_agents = n;
  net.adjacency = adjacency;
  net.informed = std::move(informed);
  net.combine = combine;
  net.neighbors.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (adjacency(l, k) == 1) net.neighbors[static_cast<std::size_t>(k)].push_back(l);
  return net;
}

Network Network::make(const Eigen::MatrixXi& adjacency, std::vector<int> informed,
                      CombinationRule rule) {
  if (rule == CombinationRule::Uniform) {
    const Eigen::Index n = adjacency.rows();
    if ((adjacency.array() != 1).any())
      throw std::invalid_argument("network: uniform weights need a fully connected graph");
    return make(adjacency, std::move(informed), uniform_matrix(static_cast<int>(n)));
  }
  return make(adjacency, std::move(informed), metropolis_matrix(adjacency));
}

bool Network::is_informed(int agent) const {
  return std::binary_search(informed.begin(), informed.end(), agent);
}

Eigen::MatrixXi random_connected_graph(int n, double edge_prob, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_connected_graph: n must be >= 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw std::invalid_argument("random_connected_graph: edge_prob must be in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Eigen::MatrixXi adj = Eigen::MatrixXi::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (coin(rng)) adj(i, j) = adj(j, i) = 1;
    if (graph_connected(adj)) return adj;
  }
  throw ConvergenceError("random_connected_graph: no connected draw in 10000 attempts");
}

CombinationMatrix metropolis_matrix(const Eigen::MatrixXi& adjacency) {
  check_adjacency(adjacency);
  const Eigen::Index n = adjacency.rows();
  Eigen::VectorXd degree(n);
  for (Eigen::Index k = 0; k < n; ++k) degree[k] = adjacency.col(k).sum();

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double off = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k || adjacency(l, k) == 0) continue;
      a(l, k) = 1.0 / std::max(degree[l], degree[k]);
      off += a(l, k);
    }
    a(k, k) = 1.0 - off;
  }
  return CombinationMatrix{std::move(a)};
}

CombinationMatrix uniform_matrix(int n) {
  if (n < 1) throw std::invalid_argument("uniform_matrix: n must be >= 1");
  return CombinationMatrix{Eigen::MatrixXd::Constant(n, n, 1.0 / n)};
}

std::vector<Eigen::VectorXd> sync_round(const std::vector<Eigen::VectorXd>& states,
                                        const CombinationMatrix& combine) {
  const int n = combine.size();
  if (static_cast<int>(states.size()) != n)
    throw ShapeError("sync_round: one state per agent required");
  const Eigen::Index dim = states.empty() ? 0 : states.front().size();
  for (const Eigen::VectorXd& s : states)
    if (s.size() != dim) throw ShapeError("sync_round: states must share one dimension");

  std::vector<Eigen::VectorXd> out(states.size());
  parallel_for(n, [&](std::int64_t k) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    for (int l = 0; l < n; ++l) {
      const double w = combine.weights(l, k);
      if (w != 0.0) acc += w * states[static_cast<std::size_t>(l)];
    }
    out[static_cast<std::size_t>(k)] = std::move(acc);
  });
  return out;
}

std::vector<double> sync_round(const std::vector<double>& states,
                               const CombinationMatrix& combine) {
  const int n = combine.size();
  if (static_cast<int>(states.size()) != n)
    throw ShapeError("sync_round: one state per agent required");
  std::vector<double> out(states.size(), 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
      const double w = combine.weights(l, k);
      if (w != 0.0) acc += w * states[static_cast<std::size_t>(l)];
    }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

void save_edge_list(const Eigen::MatrixXi& adjacency, const std::filesystem::path& path) {
  check_adjacency(adjacency);
  std::ofstream out(path);
  if (!out) throw ParseError("save_edge_list: cannot open " + path.string());
  const Eigen::Index n = adjacency.rows();
  out << n << "\n";
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (adjacency(i, j) == 1) out << i << " " << j << "\n";
}

Eigen::MatrixXi load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_edge_list: cannot open " + path.string());
  std::string line;
  int line_no = 0;
  long n = -1;
  Eigen::MatrixXi adj;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    if (n < 0) {
      if (!(row >> n) || n < 1)
        throw ParseError("load_edge_list: line 1: expected the agent count");
      adj = Eigen::MatrixXi::Identity(n, n);
      continue;
    }
    long u = 0, v = 0;
    if (!(row >> u >> v))
      throw ParseError("load_edge_list: line " + std::to_string(line_no) + ": expected 'u v'");
    std::string rest;
    if (row >> rest)
      throw ParseError("load_edge_list: line " + std::to_string(line_no) + ": trailing tokens");
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw ParseError("load_edge_list: line " + std::to_string(line_no) + ": id out of range");
    adj(u, v) = adj(v, u) = 1;
  }
  if (n < 0) throw ParseError("load_edge_list: empty file");
  return adj;
}

void save_combination_csv(const CombinationMatrix& combine, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("save_combination_csv: cannot open " + path.string());
  const Eigen::Index n = combine.weights.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) out << ",";
      out << fmt_g17(combine.weights(i, j));
    }
    out << "\n";
  }
}

}  // namespace diffudict
