#include "mmcs/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mmcs/errors.hpp"
#include "mmcs/parallel.hpp"
#include "mmcs/rng.hpp"

namespace mmcs {

FeatureVector make_features(const MeasurementVector& m, const QosRequirement& qos) {
  const int n = m.n_mmaps();
  const int beams = m.n_beams();
  FeatureVector x(n * beams + 5);
  int at = 0;
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < beams; ++b) x[at++] = m.snr_db(i, b);
  x[at++] = m.lb_snr_db;
  x[at++] = qos.packets;
  x[at++] = qos.deadline_slots;
  x[at++] = m.user_pos.x();
  x[at++] = m.user_pos.y();
  return x;
}

Realization generate_realization(const ExperimentParams& params, std::uint64_t seed,
                                 int realization_id) {
  params.qos.validate();
  params.costs.validate();
  const int k = params.qos.deadline_slots;
  if (params.duration_slots % k != 0)
    throw InputError("generate: realization duration must be divisible by K");
  const int n_windows = params.duration_slots / k;

  SceneConfig config = params.scene;
  config.seed = seed;
  Scene scene = build_scene(config);
  if (params.costs.links() != scene.n_links())
    throw InputError("generate: cost vector does not match link count");

  Realization out;
  out.seed = seed;
  out.user_class = config.user_class;
  out.duration_slots = params.duration_slots;
  out.windows.reserve(n_windows);
  for (int w = 0; w < n_windows; ++w) {
    EpisodeRecord ep;
    ep.realization_id = realization_id;
    ep.window_index = w;
    ep.m = align_and_measure(scene, params.radio, static_cast<std::int64_t>(w) * k);
    ep.g = realize_channel(scene, k, params.slot_s, params.radio, params.gamma_db);
    ep.x = make_features(ep.m, params.qos);
    ep.label = label_sample(ep.g, params.qos, params.costs).class_index;
    out.windows.push_back(std::move(ep));
  }
  return out;
}

std::vector<Realization> generate_realizations(const ExperimentParams& params,
                                               std::uint64_t base_seed, int count, int workers) {
  std::vector<Realization> out(count);
  parallel_for(count, workers <= 0 ? default_workers() : workers, [&](std::size_t r) {
    out[r] = generate_realization(params, derive_seed(base_seed, r), static_cast<int>(r));
  });
  return out;
}

std::vector<TrainingSample> collect_samples(const std::vector<Realization>& realizations) {
  std::vector<TrainingSample> samples;
  for (const auto& real : realizations)
    for (const auto& w : real.windows) samples.push_back({w.x, w.label});
  return samples;
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::genie: return "genie";
    case PolicyKind::greedy: return "greedy";
    case PolicyKind::min_multi_x: return "min_multi_x";
    case PolicyKind::forest: return "forest";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& s) {
  if (s == "genie") return PolicyKind::genie;
  if (s == "greedy") return PolicyKind::greedy;
  if (s == "min_multi_x" || s == "min-multi-x") return PolicyKind::min_multi_x;
  if (s == "forest") return PolicyKind::forest;
  throw InputError("unknown policy: " + s);
}

KpiReport compute_kpis(const std::vector<ScheduleResult>& results) {
  if (results.empty()) throw InputError("compute_kpis: empty input");
  KpiReport r;
  r.episodes = results.size();
  std::size_t completed = 0;
  long long failures = 0, transmissions = 0, lb = 0;
  double cost = 0.0;
  for (const auto& s : results) {
    if (s.feasible) ++completed;
    failures += s.failures;
    transmissions += s.transmissions;
    lb += s.lb_transmissions;
    cost += s.cost;
  }
  r.completed_fraction = static_cast<double>(completed) / results.size();
  if (transmissions > 0) {
    r.failed_fraction = static_cast<double>(failures) / transmissions;
    r.lb_fraction = static_cast<double>(lb) / transmissions;
  }
  r.mean_cost = cost / results.size();
  return r;
}

PolicyEval evaluate_policy(PolicyKind kind, const std::vector<Realization>& test,
                           const QosRequirement& qos, const CostVector& costs,
                           const Forest* forest, double beta) {
  if (kind == PolicyKind::forest && forest == nullptr)
    throw InputError("evaluate_policy: forest policy requires a trained model");

  PolicyEval out;
  std::size_t genie_infeasible = 0;
  for (const auto& real : test) {
    for (const auto& w : real.windows) {
      const LinkCombination all = LinkCombination::all(w.g.links());
      const ScheduleResult genie = genie_solve(w.g, qos, costs);
      if (!genie.feasible) ++genie_infeasible;
      ScheduleResult r;
      switch (kind) {
        case PolicyKind::genie:
          r = genie;
          break;
        case PolicyKind::greedy:
          r = greedy_multi_x(w.g, qos, costs);
          break;
        case PolicyKind::min_multi_x:
          r = execute_policy(min_multi_x(w.m, qos), w.g, qos, costs);
          break;
        case PolicyKind::forest:
          r = execute_policy(decide(predict_proba(*forest, w.x), beta, all), w.g, qos, costs);
          break;
      }
      out.episodes.push_back(std::move(r));
    }
  }
  if (out.episodes.empty()) throw InputError("evaluate_policy: empty test set");
  out.kpis = compute_kpis(out.episodes);
  out.kpis.genie_infeasible = genie_infeasible;
  return out;
}

std::vector<KpiReport> sweep_beta(const Forest& forest, const std::vector<Realization>& test,
                                  const std::vector<double>& betas, const QosRequirement& qos,
                                  const CostVector& costs) {
  if (!std::is_sorted(betas.begin(), betas.end()))
    throw InputError("sweep_beta: betas must be sorted ascending");
  std::vector<KpiReport> out;
  out.reserve(betas.size());
  for (double beta : betas)
    out.push_back(evaluate_policy(PolicyKind::forest, test, qos, costs, &forest, beta).kpis);
  return out;
}

std::vector<TrainingSweepCell> sweep_training(const ForestParams& base_params,
                                              const std::vector<std::size_t>& train_sizes,
                                              const std::vector<int>& tree_counts,
                                              const std::vector<TrainingSample>& train,
                                              const std::vector<Realization>& test,
                                              const QosRequirement& qos, const CostVector& costs,
                                              std::uint64_t shuffle_seed, int workers) {
  for (std::size_t size : train_sizes)
    if (size > train.size()) throw InputError("sweep_training: train size exceeds pool");

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(shuffle_seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<TrainingSweepCell> out;
  for (std::size_t size : train_sizes) {
    std::vector<TrainingSample> subset;
    subset.reserve(size);
    for (std::size_t i = 0; i < size; ++i) subset.push_back(train[order[i]]);
    for (int trees : tree_counts) {
      ForestParams params = base_params;
      params.trees = trees;
      const Forest forest = train_forest(subset, params, workers);
      TrainingSweepCell cell;
      cell.train_size = size;
      cell.trees = trees;
      cell.report = evaluate_policy(PolicyKind::forest, test, qos, costs, &forest, 0.0).kpis;
      out.push_back(std::move(cell));
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Files

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const std::vector<TrainingSample>& samples,
                       int n_mmaps, int n_beams) {
  if (samples.empty()) throw InputError("dataset csv: no samples");
  const Eigen::Index dim = samples.front().x.size();
  if (dim != static_cast<Eigen::Index>(n_mmaps) * n_beams + 5)
    throw InputError("dataset csv: feature dimension does not match N*M+5");
  for (int i = 1; i <= n_mmaps; ++i)
    for (int b = 0; b < n_beams; ++b) out << "snr_ap" << i << "_b" << b << ',';
  out << "lb_snr,qos_d,qos_k,user_x,user_y,label\n";
  for (const auto& s : samples) {
    for (Eigen::Index f = 0; f < dim; ++f) out << fmt(s.x[f]) << ',';
    out << s.label << '\n';
  }
}

void write_dataset_csv(const std::string& path, const std::vector<TrainingSample>& samples,
                       int n_mmaps, int n_beams) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_dataset_csv(f, samples, n_mmaps, n_beams);
}

DatasetFile read_dataset_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InputError("dataset csv: empty file");
  const auto cols = split_line(header, ',');
  if (cols.size() < 6 || cols.back() != "label")
    throw InputError("dataset csv: malformed header");

  DatasetFile ds;
  for (const auto& c : cols) {
    int ap = 0, beam = 0;
    if (std::sscanf(c.c_str(), "snr_ap%d_b%d", &ap, &beam) == 2) {
      ds.n_mmaps = std::max(ds.n_mmaps, ap);
      ds.n_beams = std::max(ds.n_beams, beam + 1);
    }
  }
  const std::size_t dim = cols.size() - 1;
  if (dim != static_cast<std::size_t>(ds.n_mmaps) * ds.n_beams + 5)
    throw InputError("dataset csv: header does not describe N*M+5 features");

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line, ',');
    if (cells.size() != dim + 1) throw InputError("dataset csv: ragged row");
    TrainingSample s;
    s.x.resize(dim);
    for (std::size_t f = 0; f < dim; ++f) s.x[f] = std::stod(cells[f]);
    s.label = std::stoi(cells.back());
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw InputError("dataset csv: no samples");
  return ds;
}

DatasetFile read_dataset_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  return read_dataset_csv(f);
}

namespace {

nlohmann::ordered_json kpi_to_json(const KpiReport& r) {
  nlohmann::ordered_json j;
  j["episodes"] = r.episodes;
  j["completed_fraction"] = r.completed_fraction;
  if (r.failed_fraction)
    j["failed_fraction"] = *r.failed_fraction;
  else
    j["failed_fraction"] = nullptr;
  if (r.lb_fraction)
    j["lb_fraction"] = *r.lb_fraction;
  else
    j["lb_fraction"] = nullptr;
  j["mean_cost"] = r.mean_cost;
  j["genie_infeasible"] = r.genie_infeasible;
  return j;
}

}  // namespace

void write_kpi_csv(std::ostream& out, const std::vector<KpiRow>& rows) {
  out << "policy,beta,episodes,completed_fraction,failed_fraction,lb_fraction,mean_cost,"
         "genie_infeasible\n";
  for (const auto& row : rows) {
    out << row.policy << ',' << (row.beta ? fmt(*row.beta) : std::string()) << ','
        << row.report.episodes << ',' << fmt(row.report.completed_fraction) << ','
        << fmt_opt(row.report.failed_fraction) << ',' << fmt_opt(row.report.lb_fraction) << ','
        << fmt(row.report.mean_cost) << ',' << row.report.genie_infeasible << '\n';
  }
}

void write_kpi_csv(const std::string& path, const std::vector<KpiRow>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_kpi_csv(f, rows);
}

std::string kpi_rows_to_json(const std::vector<KpiRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["policy"] = row.policy;
    if (row.beta)
      j["beta"] = *row.beta;
    else
      j["beta"] = nullptr;
    j["kpis"] = kpi_to_json(row.report);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

void write_training_sweep_csv(std::ostream& out, const std::vector<TrainingSweepCell>& cells) {
  out << "train_size,trees,episodes,completed_fraction,failed_fraction,lb_fraction,mean_cost\n";
  for (const auto& c : cells) {
    out << c.train_size << ',' << c.trees << ',' << c.report.episodes << ','
        << fmt(c.report.completed_fraction) << ',' << fmt_opt(c.report.failed_fraction) << ','
        << fmt_opt(c.report.lb_fraction) << ',' << fmt(c.report.mean_cost) << '\n';
  }
}

void write_training_sweep_csv(const std::string& path,
                              const std::vector<TrainingSweepCell>& cells) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_training_sweep_csv(f, cells);
}

}  // namespace mmcs
