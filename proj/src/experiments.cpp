#include "diffudict/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "diffudict/bicluster.hpp"
#include "diffudict/errors.hpp"
#include "diffudict/io.hpp"
#include "diffudict/learner.hpp"
#include "diffudict/novelty.hpp"
#include "diffudict/numfmt.hpp"
#include "diffudict/prox.hpp"

namespace diffudict {

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean_disagreement(const std::vector<Eigen::VectorXd>& duals) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(duals.front().size());
  for (const Eigen::VectorXd& nu : duals) mean += nu;
  mean /= static_cast<double>(duals.size());
  double total = 0.0;
  for (const Eigen::VectorXd& nu : duals) total += (nu - mean).norm();
  return total / static_cast<double>(duals.size());
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream cells(text);
  std::string token;
  while (std::getline(cells, token, ',')) {
    try {
      out.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw ConfigError("config: bad integer list entry '" + token + "'");
    }
  }
  return out;
}

std::vector<int> all_ids(int n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) ids[static_cast<std::size_t>(k)] = k;
  return ids;
}

TaskSpec task_from_config(const Config& cfg) {
  const std::string preset = cfg.get_string("task.preset", "sparse_svd");
  if (preset == "sparse_svd")
    return TaskSpec::sparse_svd(cfg.get_double("task.gamma", 0.05),
                                cfg.get_double("task.delta", 0.1));
  if (preset == "biclustering")
    return TaskSpec::bi_clustering(cfg.get_double("task.gamma", 0.5),
                                   cfg.get_double("task.delta", 0.05),
                                   cfg.get_double("task.beta", 0.01));
  if (preset == "nmf")
    return TaskSpec::nmf(cfg.get_double("task.gamma", 0.05), cfg.get_double("task.delta", 0.1));
  if (preset == "nmf_huber")
    return TaskSpec::nmf_huber(cfg.get_double("task.gamma", 0.05),
                               cfg.get_double("task.delta", 0.1),
                               cfg.get_double("task.eta", 0.2));
  throw ConfigError("config: unknown task.preset '" + preset + "'");
}

// Greedy-free exhaustive alignment of up to 8 learned columns to reference
// columns by absolute cosine; returns the permutation and its cosines.
std::pair<std::vector<int>, std::vector<double>> align_columns(const Eigen::MatrixXd& learned,
                                                               const Eigen::MatrixXd& reference) {
  const int k = static_cast<int>(reference.cols());
  std::vector<int> perm(static_cast<std::size_t>(learned.cols()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm(perm.begin(), perm.begin() + k);
  double best_total = -1.0;
  std::vector<int> choose(perm);
  std::sort(choose.begin(), choose.end());
  // Permute learned columns over reference slots; k is tiny here.
  std::vector<int> current;
  do {
    current.assign(choose.begin(), choose.begin() + k);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXd& ref = reference.col(j);
      const Eigen::VectorXd& col = learned.col(current[static_cast<std::size_t>(j)]);
      const double denom = ref.norm() * col.norm();
      total += denom > 0.0 ? std::abs(ref.dot(col)) / denom : 0.0;
    }
    if (total > best_total) {
      best_total = total;
      best_perm = current;
    }
  } while (std::next_permutation(choose.begin(), choose.end()));

  std::vector<double> cosines(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd& ref = reference.col(j);
    const Eigen::VectorXd& col = learned.col(best_perm[static_cast<std::size_t>(j)]);
    const double denom = ref.norm() * col.norm();
    cosines[static_cast<std::size_t>(j)] = denom > 0.0 ? std::abs(ref.dot(col)) / denom : 0.0;
  }
  return {best_perm, cosines};
}

void run_bench_command(const Config& cfg, const std::filesystem::path& out_dir) {
  BenchConfig bc;
  bc.desk.m = cfg.get_int("bench.m", 20);
  bc.desk.n_agents = cfg.get_int("bench.agents", 10);
  bc.desk.gamma = cfg.get_double("task.gamma", 0.05);
  bc.desk.delta = cfg.get_double("task.delta", 0.1);
  const std::string rule = cfg.get_string("bench.rule", "uniform");
  if (rule == "metropolis") bc.desk.rule = CombinationRule::Metropolis;
  else if (rule != "uniform") throw ConfigError("config: bench.rule must be uniform or metropolis");
  bc.desk.edge_prob = cfg.get_double("bench.edge_prob", 0.5);
  bc.desk.graph_seed = cfg.get_uint64("bench.graph_seed", 7);
  bc.desk.instance_seed = cfg.get_uint64("seed", 1234);
  bc.mu_frac = cfg.get_double("bench.mu_frac", 0.8);
  bc.rounds = cfg.get_int("bench.rounds", 1000);

  const BenchResult result = run_bench(bc);

  CsvWriter trace(out_dir / "bench_trace.csv", {"round", "median_snr_db", "disagreement"});
  for (std::size_t i = 0; i < result.median_snr_db.size(); ++i)
    trace.row({static_cast<double>(i + 1), result.median_snr_db[i], result.disagreement[i]});

  CsvWriter summary(out_dir / "bench_summary.csv",
                    {"mu", "mu_bound", "rounds", "first_round_at_40db", "final_median_snr_db",
                     "oracle_iterations"});
  summary.row({result.mu, step_size_bound(TaskSpec::sparse_svd(bc.desk.gamma, bc.desk.delta), 1),
               static_cast<double>(bc.rounds), static_cast<double>(result.first_round_at_40db),
               result.final_median_snr_db, static_cast<double>(result.oracle.iterations)});

  if (cfg.get_bool("output.svg", false)) {
    SvgPlot plot(640, 400, "median dual SNR per round");
    std::vector<double> xs(result.median_snr_db.size());
    std::iota(xs.begin(), xs.end(), 1.0);
    plot.polyline(xs, result.median_snr_db, "steelblue");
    plot.save(out_dir / "bench_trace.svg");
  }
}

void run_infer_command(const Config& cfg, const std::filesystem::path& out_dir) {
  TaskSpec task = task_from_config(cfg);
  std::vector<DictionaryShard> shards;
  Eigen::VectorXd x;

  if (cfg.has("data.matrix")) {
    const std::string format = cfg.get_string("data.format", "csv");
    const Eigen::MatrixXd data = load_matrix(
        cfg.require_string("data.matrix"),
        format == "triplet" ? MatrixFormat::CoordinateTriplet : MatrixFormat::DenseCsv);
    const int column = cfg.get_int("data.column", 0);
    if (column < 0 || column >= data.cols())
      throw ConfigError("config: data.column out of range");
    x = data.col(column);
    if (!cfg.has("data.shards")) throw ConfigError("config: data.shards required with data.matrix");
    shards = load_shards(cfg.require_string("data.shards"));
    for (const DictionaryShard& shard : shards)
      if (shard.height() != x.size())
        throw ConfigError("config: shard checkpoint does not match the data height");
  } else {
    DeskConfig dc;
    dc.m = cfg.get_int("infer.m", 20);
    dc.n_agents = cfg.get_int("infer.agents", 10);
    dc.gamma = cfg.get_double("task.gamma", 0.05);
    dc.delta = cfg.get_double("task.delta", 0.1);
    dc.edge_prob = cfg.get_double("network.edge_prob", 0.5);
    dc.graph_seed = cfg.get_uint64("network.seed", 7);
    dc.instance_seed = cfg.get_uint64("seed", 1234);
    DeskInstance desk = make_desk_instance(dc);
    shards = std::move(desk.shards);
    x = desk.x;
    task = desk.task;
  }

  const int n = static_cast<int>(shards.size());
  const Eigen::MatrixXi adjacency =
      random_connected_graph(n, cfg.get_double("network.edge_prob", 0.5),
                             cfg.get_uint64("network.seed", 7));
  const std::string rule = cfg.get_string("network.rule", "metropolis");
  const Network net =
      rule == "uniform"
          ? Network::make(Eigen::MatrixXi::Ones(n, n), all_ids(n), CombinationRule::Uniform)
          : Network::make(adjacency, all_ids(n), CombinationRule::Metropolis);

  const double bound = step_size_bound(task, max_shard_width(shards));
  DiffusionOptions opt;
  opt.mu = cfg.has("infer.mu") ? cfg.require_double("infer.mu")
                               : cfg.get_double("infer.mu_frac", 0.8) * bound;
  opt.rounds = cfg.get_int("infer.rounds", 1000);
  opt.allow_unsafe_mu = cfg.get_bool("infer.allow_unsafe_mu", false);
  const double rtol = cfg.get_double("infer.rtol", 0.0);
  if (rtol > 0.0) opt.rtol = rtol;

  const OracleSolution oracle = centralized_inference_oracle(shards, x, task, 1e-13);

  std::vector<double> median_trace, disagreement_trace;
  opt.on_round = [&](int, const std::vector<Eigen::VectorXd>& duals) {
    std::vector<double> snrs;
    snrs.reserve(duals.size());
    for (const Eigen::VectorXd& nu : duals) snrs.push_back(snr_db(oracle.nu, nu));
    median_trace.push_back(median(std::move(snrs)));
    disagreement_trace.push_back(mean_disagreement(duals));
  };
  const InferenceOutcome outcome = run_inference(net, shards, x, task, opt);

  CsvWriter trace(out_dir / "infer_trace.csv", {"round", "median_snr_db", "disagreement"});
  for (std::size_t i = 0; i < median_trace.size(); ++i)
    trace.row({static_cast<double>(i + 1), median_trace[i], disagreement_trace[i]});

  CsvWriter summary(out_dir / "infer_summary.csv",
                    {"rounds_used", "dual_cost", "oracle_dual", "oracle_primal", "duality_gap",
                     "final_median_snr_db"});
  summary.row({static_cast<double>(outcome.rounds_used), outcome.dual_cost, oracle.dual,
               oracle.primal, oracle.primal - oracle.dual,
               median_trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : median_trace.back()});

  if (cfg.get_bool("output.svg", false)) {
    SvgPlot plot(640, 400, "median dual SNR per round");
    std::vector<double> xs(median_trace.size());
    std::iota(xs.begin(), xs.end(), 1.0);
    plot.polyline(xs, median_trace, "steelblue");
    plot.save(out_dir / "infer_trace.svg");
  }
}

void run_learn_command(const Config& cfg, const std::filesystem::path& out_dir) {
  const TaskSpec task = task_from_config(cfg);
  const std::uint64_t seed = cfg.get_uint64("seed", 42);

  std::vector<Eigen::VectorXd> stream;
  std::vector<Eigen::VectorXd> references;  // clean signals when planted
  int m = 0;
  int atoms = cfg.get_int("learn.atoms", 4);
  const int agents = cfg.get_int("learn.agents", 4);

  if (cfg.has("data.matrix")) {
    const std::string format = cfg.get_string("data.format", "csv");
    Eigen::MatrixXd data = load_matrix(
        cfg.require_string("data.matrix"),
        format == "triplet" ? MatrixFormat::CoordinateTriplet : MatrixFormat::DenseCsv);
    const std::string norm = cfg.get_string("data.normalize", "none");
    if (norm == "l2") data = normalize_columns(data, ColumnNorm::L2);
    else if (norm == "l1") data = normalize_columns(data, ColumnNorm::L1);
    else if (norm != "none") throw ConfigError("config: data.normalize must be l1, l2 or none");
    m = static_cast<int>(data.rows());
    for (Eigen::Index t = 0; t < data.cols(); ++t) {
      stream.push_back(data.col(t));
      references.push_back(data.col(t));
    }
  } else {
    // Planted model: random feasible dictionary, sparse coefficients.
    m = cfg.get_int("learn.m", 16);
    const int samples = cfg.get_int("learn.samples", 500);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd planted(m, atoms);
    for (int j = 0; j < atoms; ++j)
      for (int i = 0; i < m; ++i)
        planted(i, j) = task.constraint.nonneg() ? unit(rng) : gauss(rng);
    planted = project_dictionary_columns(planted, task.constraint);
    std::uniform_int_distribution<int> pick(0, atoms - 1);
    std::uniform_real_distribution<double> amp(0.5, 1.5);
    for (int t = 0; t < samples; ++t) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(atoms);
      const int active = 1 + (t % 2);  // alternate one and two active atoms
      for (int a = 0; a < active; ++a) y[pick(rng)] += amp(rng);
      stream.push_back(planted * y);
      references.push_back(stream.back());
    }
  }

  if (agents < 1) throw ConfigError("config: learn.agents must be >= 1");
  atoms = std::max(atoms, agents);
  std::vector<int> widths(static_cast<std::size_t>(agents), atoms / agents);
  for (int r = 0; r < atoms % agents; ++r) ++widths[static_cast<std::size_t>(r)];

  const Eigen::MatrixXi adjacency = random_connected_graph(
      agents, cfg.get_double("network.edge_prob", 0.5), cfg.get_uint64("network.seed", 7));
  const Network net = Network::make(adjacency, all_ids(agents), CombinationRule::Metropolis);
  std::vector<DictionaryShard> shards = initialize_shards(m, widths, task, seed + 1);

  LearnerConfig lc;
  const double bound = step_size_bound(task, max_shard_width(shards));
  lc.mu = cfg.has("learn.mu") ? cfg.require_double("learn.mu")
                              : cfg.get_double("learn.mu_frac", 0.8) * bound;
  lc.inference_rounds = cfg.get_int("learn.rounds", 500);
  lc.mu_w = cfg.get_double("learn.mu_w", 0.05);
  lc.reciprocal_mu_w = cfg.get_bool("learn.reciprocal_mu_w", false);
  lc.allow_unsafe_mu = cfg.get_bool("learn.allow_unsafe_mu", false);
  lc.trace = true;
  const double rtol = cfg.get_double("learn.rtol", 1e-10);
  if (rtol > 0.0) lc.rtol = rtol;
  else lc.rtol.reset();

  // Reconstruction SNR per sample against the reference signal (the clean
  // planted signal, or the sample itself for file data). Quadratic only.
  std::vector<double> snr_trace;
  if (!task.residual.is_huber()) {
    lc.on_sample = [&](std::size_t t, const std::vector<Eigen::VectorXd>& duals,
                       const std::vector<Eigen::VectorXd>&) {
      Eigen::VectorXd mean_nu = Eigen::VectorXd::Zero(stream[t].size());
      for (const Eigen::VectorXd& nu : duals) mean_nu += nu;
      mean_nu /= static_cast<double>(duals.size());
      snr_trace.push_back(snr_db(references[t], stream[t] - mean_nu));
    };
  }

  const LearnResult result = learn_online(net, std::move(shards), stream, task, lc);

  save_shards(result.shards, out_dir / "shards.txt");
  CsvWriter trace(out_dir / "learn_trace.csv", {"t", "dual_cost", "mean_snr_db"});
  for (std::size_t t = 0; t < result.dual_cost_trace.size(); ++t)
    trace.row({static_cast<double>(t), result.dual_cost_trace[t],
               t < snr_trace.size() ? snr_trace[t] : std::numeric_limits<double>::quiet_NaN()});

  CsvWriter summary(out_dir / "learn_summary.csv",
                    {"samples", "agents", "atoms", "mu", "feasibility_violations"});
  summary.row({static_cast<double>(stream.size()), static_cast<double>(agents),
               static_cast<double>(atoms), lc.mu,
               static_cast<double>(result.feasibility_violations)});
}

void run_novelty_command(const Config& cfg, const std::filesystem::path& out_dir) {
  NoveltyConfig nc;
  nc.gamma = cfg.get_double("task.gamma", 0.05);
  nc.delta = cfg.get_double("task.delta", 0.1);
  nc.eta = cfg.get_double("task.eta", 0.2);
  nc.mu = cfg.get_double("novelty.mu", 0.05);
  nc.inference_rounds = cfg.get_int("novelty.rounds", 300);
  nc.rtol = cfg.get_double("novelty.rtol", 1e-8);
  nc.mu_g = cfg.get_double("novelty.mu_g", 0.5);
  nc.consensus_rounds = cfg.get_int("novelty.consensus_rounds", 200);
  nc.initial_agents = cfg.get_int("novelty.initial_agents", 10);
  nc.atoms_added_per_step = cfg.get_int("novelty.atoms_added_per_step", 5);
  nc.edge_prob = cfg.get_double("network.edge_prob", 0.3);
  nc.chi = cfg.get_double("novelty.chi", 0.1);

  const int steps = cfg.get_int("novelty.steps", 9);
  const int topics = cfg.get_int("novelty.topics", 8);
  const int m = cfg.get_int("novelty.m", 200);
  const int samples = cfg.get_int("novelty.samples_per_step", 60);
  const double noise = cfg.get_double("novelty.noise", 0.05);
  const std::uint64_t seed = cfg.get_uint64("seed", 42);
  std::vector<int> new_steps = parse_int_list(cfg.get_string("novelty.new_steps", "1,2,5,6,8"));

  const std::vector<std::vector<int>> schedule = default_topic_schedule(steps, topics, new_steps);
  const std::vector<LabeledBlock> stream =
      synthetic_topic_stream(m, topics, schedule, samples, noise, seed);
  const NoveltyOutcome outcome = novelty_pipeline(stream, nc, seed + 1);

  CsvWriter summary(out_dir / "novelty_summary.csv", {"block", "auc", "novel", "docs"});
  for (const NoveltyStepReport& report : outcome.evaluated) {
    double novel = 0.0;
    for (std::uint8_t l : report.labels) novel += l;
    summary.row({static_cast<double>(report.block), report.roc.auc, novel,
                 static_cast<double>(report.labels.size())});
  }

  CsvWriter scores(out_dir / "novelty_scores.csv", {"block", "doc", "score", "novel"});
  for (const NoveltyStepReport& report : outcome.evaluated)
    for (std::size_t d = 0; d < report.scores.size(); ++d)
      scores.row({static_cast<double>(report.block), static_cast<double>(d), report.scores[d],
                  static_cast<double>(report.labels[d])});

  for (const NoveltyStepReport& report : outcome.evaluated) {
    CsvWriter roc(out_dir / ("novelty_roc_" + std::to_string(report.block) + ".csv"),
                  {"threshold", "fpr", "tpr"});
    for (std::size_t i = 0; i < report.roc.thresholds.size(); ++i)
      roc.row({report.roc.thresholds[i], report.roc.fpr[i], report.roc.tpr[i]});
  }

  CsvWriter meta(out_dir / "novelty_meta.csv",
                 {"final_agents", "feasibility_violations", "evaluated_blocks"});
  meta.row({static_cast<double>(outcome.final_agents),
            static_cast<double>(outcome.feasibility_violations),
            static_cast<double>(outcome.evaluated.size())});

  if (cfg.get_bool("output.svg", false) && !outcome.evaluated.empty()) {
    SvgPlot plot(480, 480, "ROC per evaluated block");
    const std::vector<std::string> colors = {"steelblue", "crimson", "seagreen", "darkorange",
                                             "purple"};
    for (std::size_t i = 0; i < outcome.evaluated.size(); ++i) {
      std::vector<double> fpr = {0.0}, tpr = {0.0};
      fpr.insert(fpr.end(), outcome.evaluated[i].roc.fpr.begin(),
                 outcome.evaluated[i].roc.fpr.end());
      tpr.insert(tpr.end(), outcome.evaluated[i].roc.tpr.begin(),
                 outcome.evaluated[i].roc.tpr.end());
      plot.polyline(fpr, tpr, colors[i % colors.size()]);
    }
    plot.save(out_dir / "novelty_roc.svg");
  }
}

void run_bicluster_command(const Config& cfg, const std::filesystem::path& out_dir) {
  BiclusterConfig bc;
  bc.n_factors = cfg.get_int("bicluster.factors", 3);
  bc.gamma = cfg.get_double("task.gamma", 0.5);
  bc.delta = cfg.get_double("task.delta", 0.05);
  bc.beta = cfg.get_double("task.beta", 0.01);
  bc.mu_nu = cfg.get_double("bicluster.mu_nu", 0.04);
  bc.inference_rounds = cfg.get_int("bicluster.rounds", 600);
  bc.rtol = cfg.get_double("bicluster.rtol", 1e-9);
  bc.mu_w = cfg.get_double("bicluster.mu_w", 0.01);
  bc.allow_unsafe_mu = cfg.get_bool("bicluster.allow_unsafe_mu", false);
  const std::uint64_t seed = cfg.get_uint64("seed", 42);
  const double batch_lambda = cfg.get_double("bicluster.batch_lambda", 0.3);
  const double batch_beta = cfg.get_double("bicluster.batch_beta", 0.05);

  Eigen::MatrixXd x;
  bool planted = false;
  BiclusterSynthetic synth;
  if (cfg.has("data.matrix")) {
    const std::string format = cfg.get_string("data.format", "csv");
    x = load_matrix(cfg.require_string("data.matrix"),
                    format == "triplet" ? MatrixFormat::CoordinateTriplet
                                        : MatrixFormat::DenseCsv);
  } else {
    synth = synthetic_bicluster_data(cfg.get_int("bicluster.m", 56),
                                     cfg.get_int("bicluster.t", 2000),
                                     cfg.get_double("bicluster.noise", 0.02), seed);
    x = synth.x;
    planted = true;
  }

  const BiclusterOnlineResult online = bicluster_online(x, bc, seed + 1);
  const std::vector<BatchFactor> batch = bicluster_batch(x, batch_lambda, batch_beta,
                                                         bc.n_factors);

  Eigen::MatrixXd online_atoms(x.rows(), bc.n_factors);
  for (int k = 0; k < bc.n_factors; ++k)
    online_atoms.col(k) = online.shards[static_cast<std::size_t>(k)].atoms.col(0);
  Eigen::MatrixXd batch_atoms(x.rows(), bc.n_factors);
  for (int k = 0; k < bc.n_factors; ++k) batch_atoms.col(k) = batch[static_cast<std::size_t>(k)].w;

  CsvWriter atoms_csv(out_dir / "bicluster_atoms.csv", [&] {
    std::vector<std::string> header = {"row"};
    for (int k = 0; k < bc.n_factors; ++k) header.push_back("online_w" + std::to_string(k));
    for (int k = 0; k < bc.n_factors; ++k) header.push_back("batch_w" + std::to_string(k));
    return header;
  }());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> row = {static_cast<double>(i)};
    for (int k = 0; k < bc.n_factors; ++k) row.push_back(online_atoms(i, k));
    for (int k = 0; k < bc.n_factors; ++k) row.push_back(batch_atoms(i, k));
    atoms_csv.row(row);
  }

  const auto [batch_perm, batch_cos] = align_columns(batch_atoms, online_atoms);
  CsvWriter summary(out_dir / "bicluster_summary.csv",
                    {"factor", "batch_vs_online_cos", "planted_vs_online_cos", "batch_scale"});
  std::vector<double> planted_cos(static_cast<std::size_t>(bc.n_factors),
                                  std::numeric_limits<double>::quiet_NaN());
  if (planted && bc.n_factors == 3)
    planted_cos = align_columns(online_atoms, synth.planted_atoms).second;
  for (int k = 0; k < bc.n_factors; ++k)
    summary.row({static_cast<double>(k), batch_cos[static_cast<std::size_t>(k)],
                 planted_cos[static_cast<std::size_t>(k)],
                 batch[static_cast<std::size_t>(batch_perm[static_cast<std::size_t>(k)])].s});

  double purity = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> labels;
  if (planted) {
    labels = kmeans_labels(online_atoms, 4, seed + 2);
    purity = cluster_purity(labels, synth.group);
  }
  CsvWriter metrics(out_dir / "bicluster_metrics.csv",
                    {"purity", "feasibility_violations", "samples"});
  metrics.row({purity, static_cast<double>(online.feasibility_violations),
               static_cast<double>(x.cols())});

  if (cfg.get_bool("output.svg", false) && planted) {
    SvgPlot plot(480, 480, "row profiles, leading two factors");
    const std::vector<std::string> colors = {"steelblue", "crimson", "seagreen", "darkorange"};
    for (int g = 0; g < 4; ++g) {
      std::vector<double> xs, ys;
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (synth.group[static_cast<std::size_t>(i)] == g) {
          xs.push_back(online_atoms(i, 0));
          ys.push_back(online_atoms(i, 1));
        }
      plot.scatter(xs, ys, colors[static_cast<std::size_t>(g)]);
    }
    plot.save(out_dir / "bicluster_profiles.svg");
  }
}

}  // namespace

DeskInstance make_desk_instance(const DeskConfig& cfg) {
  DeskInstance desk{Network{}, {}, Eigen::VectorXd(), TaskSpec::sparse_svd(cfg.gamma, cfg.delta),
                    0.0};
  if (cfg.rule == CombinationRule::Uniform) {
    desk.net = Network::make(Eigen::MatrixXi::Ones(cfg.n_agents, cfg.n_agents),
                             all_ids(cfg.n_agents), CombinationRule::Uniform);
  } else {
    const Eigen::MatrixXi adjacency =
        random_connected_graph(cfg.n_agents, cfg.edge_prob, cfg.graph_seed);
    desk.net = Network::make(adjacency, all_ids(cfg.n_agents), CombinationRule::Metropolis);
  }
  desk.shards = initialize_shards(
      cfg.m, std::vector<int>(static_cast<std::size_t>(cfg.n_agents), 1), desk.task,
      cfg.instance_seed);

  // Training-style sample: two random atoms with order-one amplitudes plus
  // dense noise, scaled to unit norm.
  std::mt19937_64 rng(cfg.instance_seed + 1);
  std::uniform_int_distribution<int> pick(0, cfg.n_agents - 1);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  desk.x = Eigen::VectorXd::Zero(cfg.m);
  for (int a = 0; a < 2; ++a)
    desk.x += amp(rng) * desk.shards[static_cast<std::size_t>(pick(rng))].atoms.col(0);
  for (int i = 0; i < cfg.m; ++i) desk.x[i] += 0.05 * gauss(rng);
  desk.x /= desk.x.norm();
  desk.mu_bound = step_size_bound(desk.task, 1);
  return desk;
}

BenchResult run_bench(const BenchConfig& cfg) {
  const DeskInstance desk = make_desk_instance(cfg.desk);
  BenchResult result;
  result.mu = cfg.mu_frac * desk.mu_bound;
  result.oracle = centralized_inference_oracle(desk.shards, desk.x, desk.task, 1e-13);

  DiffusionOptions opt;
  opt.mu = result.mu;
  opt.rounds = cfg.rounds;
  opt.on_round = [&](int, const std::vector<Eigen::VectorXd>& duals) {
    std::vector<double> snrs;
    snrs.reserve(duals.size());
    for (const Eigen::VectorXd& nu : duals) snrs.push_back(snr_db(result.oracle.nu, nu));
    result.median_snr_db.push_back(median(std::move(snrs)));
    result.disagreement.push_back(mean_disagreement(duals));
  };
  diffusion_solve(desk.net, desk.shards, desk.x, desk.task, opt);

  result.final_median_snr_db =
      result.median_snr_db.empty() ? 0.0 : result.median_snr_db.back();
  for (std::size_t i = 0; i < result.median_snr_db.size(); ++i) {
    if (result.median_snr_db[i] >= 40.0) {
      result.first_round_at_40db = static_cast<int>(i + 1);
      break;
    }
  }
  return result;
}

void run_experiment(const std::string& command, const Config& cfg,
                    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (command == "bench") return run_bench_command(cfg, out_dir);
  if (command == "infer") return run_infer_command(cfg, out_dir);
  if (command == "learn") return run_learn_command(cfg, out_dir);
  if (command == "novelty") return run_novelty_command(cfg, out_dir);
  if (command == "bicluster") return run_bicluster_command(cfg, out_dir);
  throw ConfigError("unknown command '" + command +
                    "' (expected infer, learn, novelty, bicluster or bench)");
}

}  // namespace diffudict
