#include "diffudict/learner.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "diffudict/errors.hpp"
#include "diffudict/numfmt.hpp"
#include "diffudict/prox.hpp"

namespace diffudict {

DictionaryShard dictionary_step(const DictionaryShard& shard, const Eigen::VectorXd& nu,
                                const Eigen::VectorXd& y, double mu_w, const TaskSpec& task) {
  task.validate();
  if (nu.size() != shard.height())
    throw ShapeError("dictionary_step: nu does not match the shard height");
  if (y.size() != shard.width())
    throw ShapeError("dictionary_step: y does not match the shard width");
  if (!(mu_w >= 0.0)) throw std::invalid_argument("dictionary_step: mu_w must be >= 0");
  if (mu_w == 0.0) return shard;

  Eigen::MatrixXd updated = shard.atoms;
  updated.noalias() += mu_w * nu * y.transpose();
  if (task.dict_reg.kind == DictRegularizer::Kind::L1Sum)
    updated = prox_matrix_l1(updated, mu_w * task.dict_reg.beta);
  return DictionaryShard{shard.agent_id,
                         project_dictionary_columns(updated, task.constraint)};
}

LearnResult learn_online(const Network& net, std::vector<DictionaryShard> shards,
                         const std::vector<Eigen::VectorXd>& stream, const TaskSpec& task,
                         const LearnerConfig& cfg) {
  task.validate();
  if (!cfg.reciprocal_mu_w && !(cfg.mu_w >= 0.0))
    throw std::invalid_argument("learn_online: mu_w must be >= 0");

  DiffusionOptions opt;
  opt.mu = cfg.mu;
  opt.rounds = cfg.inference_rounds;
  opt.rtol = cfg.rtol;
  opt.allow_unsafe_mu = cfg.allow_unsafe_mu;

  LearnResult result;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const Eigen::VectorXd& x = stream[t];
    const DualState state = diffusion_solve(net, shards, x, task, opt);
    const double mu_w = cfg.reciprocal_mu_w ? 1.0 / static_cast<double>(t + 1) : cfg.mu_w;

    if (cfg.trace) {
      double cost_sum = 0.0;
      Eigen::VectorXd mean_nu = Eigen::VectorXd::Zero(x.size());
      for (std::size_t k = 0; k < shards.size(); ++k) {
        cost_sum += local_dual_cost(shards[k], state.iterate[k], x, task, net.n_agents,
                                    net.informed_count(), net.is_informed(static_cast<int>(k)));
        mean_nu += state.iterate[k];
      }
      mean_nu /= static_cast<double>(shards.size());
      double disagreement = 0.0;
      for (const Eigen::VectorXd& nu : state.iterate)
        disagreement += (nu - mean_nu).norm();
      result.dual_cost_trace.push_back(-cost_sum);
      result.disagreement_trace.push_back(disagreement / static_cast<double>(shards.size()));
    }

    std::vector<Eigen::VectorXd> coeffs(shards.size());
    for (std::size_t k = 0; k < shards.size(); ++k)
      coeffs[k] = recover_coefficients(shards[k], state.iterate[k], task);
    if (cfg.on_sample) cfg.on_sample(t, state.iterate, coeffs);
    for (std::size_t k = 0; k < shards.size(); ++k) {
      shards[k] = dictionary_step(shards[k], state.iterate[k], coeffs[k], mu_w, task);
      if (!shard_feasible(shards[k], task.constraint)) ++result.feasibility_violations;
    }
  }
  result.shards = std::move(shards);
  return result;
}

std::vector<DictionaryShard> initialize_shards(int m, const std::vector<int>& widths,
                                               const TaskSpec& task, std::uint64_t seed) {
  task.validate();
  if (m < 1) throw std::invalid_argument("initialize_shards: m must be >= 1");
  if (widths.empty()) throw std::invalid_argument("initialize_shards: need at least one agent");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<DictionaryShard> shards;
  shards.reserve(widths.size());
  for (std::size_t k = 0; k < widths.size(); ++k) {
    if (widths[k] < 0) throw std::invalid_argument("initialize_shards: widths must be >= 0");
    Eigen::MatrixXd atoms(m, widths[k]);
    for (Eigen::Index j = 0; j < atoms.cols(); ++j)
      for (Eigen::Index i = 0; i < atoms.rows(); ++i)
        atoms(i, j) = task.constraint.nonneg() ? unit(rng) : gauss(rng);
    shards.push_back(DictionaryShard{static_cast<int>(k),
                                     project_dictionary_columns(atoms, task.constraint)});
  }
  return shards;
}

void save_shards(const std::vector<DictionaryShard>& shards, const std::filesystem::path& path) {
  if (shards.empty()) throw std::invalid_argument("save_shards: nothing to save");
  const int m = shards.front().height();
  int total = 0;
  for (const DictionaryShard& shard : shards) {
    if (shard.height() != m) throw ShapeError("save_shards: shard heights must agree");
    total += shard.width();
  }
  std::ofstream out(path);
  if (!out) throw ParseError("save_shards: cannot open " + path.string());
  out << m << " " << total << " " << shards.size() << "\n";
  for (const DictionaryShard& shard : shards) {
    for (int j = 0; j < shard.width(); ++j) {
      out << shard.agent_id << " " << j;
      for (int i = 0; i < m; ++i) out << " " << fmt_g17(shard.atoms(i, j));
      out << "\n";
    }
  }
}

std::vector<DictionaryShard> load_shards(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_shards: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("load_shards: line 1: missing header");
  std::istringstream header(line);
  long m = 0, total = 0, n_agents = 0;
  if (!(header >> m >> total >> n_agents) || m < 1 || total < 0 || n_agents < 1)
    throw ParseError("load_shards: line 1: expected header 'M K N'");

  std::vector<std::vector<Eigen::VectorXd>> columns(static_cast<std::size_t>(n_agents));
  int line_no = 1;
  long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    long agent = 0, col = 0;
    if (!(row >> agent >> col))
      throw ParseError("load_shards: line " + std::to_string(line_no) +
                       ": expected 'agent_id col_index ...'");
    if (agent < 0 || agent >= n_agents)
      throw ParseError("load_shards: line " + std::to_string(line_no) + ": agent id out of range");
    std::vector<Eigen::VectorXd>& cols = columns[static_cast<std::size_t>(agent)];
    if (col != static_cast<long>(cols.size()))
      throw ParseError("load_shards: line " + std::to_string(line_no) +
                       ": columns must appear in order");
    Eigen::VectorXd atom(m);
    for (long i = 0; i < m; ++i) {
      if (!(row >> atom[i]))
        throw ParseError("load_shards: line " + std::to_string(line_no) +
                         ": expected " + std::to_string(m) + " values");
      if (!std::isfinite(atom[i]))
        throw ParseError("load_shards: line " + std::to_string(line_no) + ": non-finite value");
    }
    std::string rest;
    if (row >> rest)
      throw ParseError("load_shards: line " + std::to_string(line_no) + ": trailing tokens");
    cols.push_back(std::move(atom));
    ++seen;
  }
  if (seen != total)
    throw ParseError("load_shards: atom rows do not match the header count");

  std::vector<DictionaryShard> shards;
  shards.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    Eigen::MatrixXd atoms(m, static_cast<Eigen::Index>(columns[k].size()));
    for (Eigen::Index j = 0; j < atoms.cols(); ++j)
      atoms.col(j) = columns[k][static_cast<std::size_t>(j)];
    shards.push_back(DictionaryShard{static_cast<int>(k), std::move(atoms)});
  }
  return shards;
}

}  // namespace diffudict
