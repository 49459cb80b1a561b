// mmcs: scene simulation, dataset generation, forest training, policy
// evaluation and sweeps, driven by a JSON config with flag overrides.
//
// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 invalid input.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmcs/config.hpp"
#include "mmcs/errors.hpp"
#include "mmcs/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInput = 4;

struct Overrides {
  std::optional<int> qos_d, qos_k, train_realizations, test_realizations, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scale;
  std::optional<std::vector<double>> betas;
  std::optional<int> trees;
};

void apply(mmcs::RunConfig& cfg, const Overrides& o) {
  if (o.qos_d) cfg.qos.packets = *o.qos_d;
  if (o.qos_k) cfg.qos.deadline_slots = *o.qos_k;
  if (o.train_realizations) cfg.train_realizations = *o.train_realizations;
  if (o.test_realizations) cfg.test_realizations = *o.test_realizations;
  if (o.workers) cfg.workers = *o.workers;
  if (o.seed) {
    cfg.train_seed = *o.seed;
    cfg.test_seed = *o.seed + 1000;
    cfg.forest.seed = cfg.forest_seed = *o.seed + 2000;
    cfg.shuffle_seed = *o.seed + 3000;
  }
  if (o.scale == std::string("paper")) {
    cfg.scale = "paper";
    cfg.train_realizations = 500;
    cfg.test_realizations = 10;
  } else if (o.scale == std::string("desk")) {
    cfg.scale = "desk";
  }
  if (o.betas) cfg.betas = *o.betas;
  if (o.trees) cfg.forest.trees = *o.trees;
  cfg.validate();
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path run_dir(const mmcs::RunConfig& cfg, const std::string& explicit_out) {
  if (!explicit_out.empty()) return explicit_out;
  return fs::path(cfg.output_dir) / (timestamp_utc() + "-" + mmcs::config_hash(cfg));
}

std::uint64_t fnv1a_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw mmcs::IoError("cannot open: " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!f) break;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw mmcs::IoError("cannot open for writing: " + path.string());
  f << text;
}

int cmd_generate(const mmcs::RunConfig& cfg, const std::string& out) {
  const fs::path dir = run_dir(cfg, out);
  fs::create_directories(dir);

  const auto params = cfg.experiment();
  const auto realizations =
      mmcs::generate_realizations(params, cfg.train_seed, cfg.train_realizations, cfg.workers);
  const auto samples = mmcs::collect_samples(realizations);

  const fs::path dataset = dir / "dataset.csv";
  mmcs::write_dataset_csv(dataset.string(), samples,
                          static_cast<int>(cfg.scene.mmaps.size()), cfg.scene.codebook.beams);

  ordered_json manifest;
  manifest["tool"] = std::string("mmcs ") + mmcs::kVersion;
  manifest["config_hash"] = mmcs::config_hash(cfg);
  manifest["config"] = mmcs::run_config_to_json(cfg);
  manifest["dataset"] = {{"file", "dataset.csv"},
                         {"samples", samples.size()},
                         {"features", samples.empty() ? 0 : samples.front().x.size()},
                         {"fnv1a64", hex64(fnv1a_file(dataset))}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "wrote " << dataset.string() << " (" << samples.size() << " samples)\n";
  std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
  return kExitOk;
}

int cmd_train(const mmcs::RunConfig& cfg, const std::string& dataset_path,
              const std::string& out) {
  const fs::path dir = run_dir(cfg, out);
  fs::create_directories(dir);

  const mmcs::DatasetFile ds = mmcs::read_dataset_csv(dataset_path);
  if (ds.n_mmaps != static_cast<int>(cfg.scene.mmaps.size()) ||
      ds.n_beams != cfg.scene.codebook.beams)
    throw mmcs::InputError("train: dataset N*M does not match the configured scene");

  const auto t0 = std::chrono::steady_clock::now();
  const mmcs::Forest forest = mmcs::train_forest(ds.samples, cfg.forest, cfg.workers);
  const auto t1 = std::chrono::steady_clock::now();

  const fs::path model = dir / "model.bin";
  mmcs::save_forest(forest, model.string());

  std::size_t correct = 0;
  std::map<int, std::size_t> class_counts;
  for (const auto& s : ds.samples) {
    ++class_counts[s.label];
    if (mmcs::predict_proba(forest, s.x).argmax == s.label) ++correct;
  }
  ordered_json report;
  report["model"] = "model.bin";
  report["trees"] = forest.trees.size();
  report["features"] = forest.n_features;
  report["classes"] = forest.n_classes;
  report["samples"] = ds.samples.size();
  report["training_accuracy"] = static_cast<double>(correct) / ds.samples.size();
  ordered_json counts = ordered_json::object();
  for (const auto& [cls, n] : class_counts) counts[std::to_string(cls)] = n;
  report["class_counts"] = counts;
  report["wall_time_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  write_text(dir / "training_report.json", report.dump(2) + "\n");

  std::cout << "wrote " << model.string() << " (" << forest.trees.size() << " trees, accuracy "
            << static_cast<double>(correct) / ds.samples.size() << ")\n";
  return kExitOk;
}

std::vector<mmcs::KpiRow> evaluate_rows(const mmcs::RunConfig& cfg,
                                        const std::vector<std::string>& policies,
                                        const mmcs::Forest* forest) {
  const auto params = cfg.experiment();
  const auto test =
      mmcs::generate_realizations(params, cfg.test_seed, cfg.test_realizations, cfg.workers);
  const auto costs = cfg.costs();

  std::vector<mmcs::KpiRow> rows;
  for (const auto& name : policies) {
    const mmcs::PolicyKind kind = mmcs::policy_from_string(name);
    if (kind == mmcs::PolicyKind::forest) {
      for (double beta : cfg.betas) {
        auto eval = mmcs::evaluate_policy(kind, test, cfg.qos, costs, forest, beta);
        rows.push_back({"forest", beta, eval.kpis});
      }
    } else {
      auto eval = mmcs::evaluate_policy(kind, test, cfg.qos, costs);
      rows.push_back({to_string(kind), std::nullopt, eval.kpis});
    }
  }
  return rows;
}

int cmd_evaluate(const mmcs::RunConfig& cfg, const std::string& model_path,
                 const std::string& policies_csv, const std::string& out) {
  std::vector<std::string> policies;
  std::stringstream ss(policies_csv);
  std::string p;
  while (std::getline(ss, p, ',')) policies.push_back(p);

  std::optional<mmcs::Forest> forest;
  for (const auto& name : policies) {
    if (mmcs::policy_from_string(name) == mmcs::PolicyKind::forest) {
      if (model_path.empty()) throw mmcs::InputError("evaluate: forest policy requires --model");
      forest = mmcs::load_forest(model_path);
    }
  }

  const fs::path dir = run_dir(cfg, out);
  fs::create_directories(dir);
  const auto rows = evaluate_rows(cfg, policies, forest ? &*forest : nullptr);
  mmcs::write_kpi_csv((dir / "kpi.csv").string(), rows);
  write_text(dir / "kpi.json", mmcs::kpi_rows_to_json(rows) + "\n");
  std::cout << "wrote " << (dir / "kpi.csv").string() << " and kpi.json (" << rows.size()
            << " rows)\n";
  return kExitOk;
}

int cmd_sweep(const mmcs::RunConfig& cfg, const std::string& model_path, const std::string& kind,
              const std::string& dataset_path, const std::string& out) {
  const fs::path dir = run_dir(cfg, out);
  fs::create_directories(dir);
  const auto params = cfg.experiment();
  const auto costs = cfg.costs();
  const auto test =
      mmcs::generate_realizations(params, cfg.test_seed, cfg.test_realizations, cfg.workers);

  if (kind == "beta") {
    if (model_path.empty()) throw mmcs::InputError("sweep beta: --model is required");
    const mmcs::Forest forest = mmcs::load_forest(model_path);
    const auto reports = mmcs::sweep_beta(forest, test, cfg.betas, cfg.qos, costs);
    std::vector<mmcs::KpiRow> rows;
    for (std::size_t i = 0; i < reports.size(); ++i)
      rows.push_back({"forest", cfg.betas[i], reports[i]});
    mmcs::write_kpi_csv((dir / "sweep_beta.csv").string(), rows);
    std::cout << "wrote " << (dir / "sweep_beta.csv").string() << "\n";
    return kExitOk;
  }
  if (kind == "training") {
    if (dataset_path.empty()) throw mmcs::InputError("sweep training: --dataset is required");
    const mmcs::DatasetFile ds = mmcs::read_dataset_csv(dataset_path);
    const auto cells =
        mmcs::sweep_training(cfg.forest, cfg.sweep_train_sizes, cfg.sweep_tree_counts,
                             ds.samples, test, cfg.qos, costs, cfg.shuffle_seed, cfg.workers);
    mmcs::write_training_sweep_csv((dir / "sweep_training.csv").string(), cells);
    std::cout << "wrote " << (dir / "sweep_training.csv").string() << "\n";
    return kExitOk;
  }
  throw mmcs::InputError("sweep: kind must be beta or training");
}

int cmd_inspect(const std::string& dataset_path, const std::string& model_path) {
  if (!dataset_path.empty()) {
    const mmcs::DatasetFile ds = mmcs::read_dataset_csv(dataset_path);
    std::map<int, std::size_t> hist;
    for (const auto& s : ds.samples) ++hist[s.label];
    std::cout << "dataset " << dataset_path << "\n"
              << "  samples:  " << ds.samples.size() << "\n"
              << "  features: " << ds.samples.front().x.size() << " (N=" << ds.n_mmaps
              << ", M=" << ds.n_beams << ")\n"
              << "  labels:\n";
    for (const auto& [cls, n] : hist) std::cout << "    class " << cls << ": " << n << "\n";
  }
  if (!model_path.empty()) {
    const mmcs::Forest f = mmcs::load_forest(model_path);
    std::size_t nodes = 0, leaves = 0;
    for (const auto& t : f.trees) {
      nodes += t.nodes.size();
      for (const auto& n : t.nodes) leaves += n.is_leaf() ? 1 : 0;
    }
    std::cout << "model " << model_path << "\n"
              << "  trees:    " << f.trees.size() << "\n"
              << "  features: " << f.n_features << "\n"
              << "  classes:  " << f.n_classes << "\n"
              << "  nodes:    " << nodes << " (" << leaves << " leaves)\n"
              << "  params:   max_depth=" << f.params.max_depth
              << " max_leaves=" << f.params.max_leaves
              << " features_per_split=" << f.params.features_per_split
              << " bootstrap=" << (f.params.bootstrap ? "true" : "false")
              << " seed=" << f.params.seed << "\n";
  }
  if (dataset_path.empty() && model_path.empty())
    throw mmcs::InputError("inspect: pass --dataset and/or --model");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mm-wave multi-connectivity link-scheduling lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("mmcs ") + mmcs::kVersion);

  std::string config_path, out_dir, dataset_path, model_path;
  std::string policies = "genie,greedy,min_multi_x,forest";
  std::string sweep_kind = "beta";
  Overrides ov;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* opt = sub->add_option("-c,--config", config_path, "run config JSON");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: <output_dir>/<ts>-<hash>)");
    sub->add_option("--workers", ov.workers, "worker threads (default: logical cores)");
    sub->add_option("--seed", ov.seed, "override all seeds from one base value");
    sub->add_option("--d", ov.qos_d, "QoS packets D");
    sub->add_option("--k", ov.qos_k, "QoS deadline K (slots)");
    sub->add_option("--train-realizations", ov.train_realizations, "");
    sub->add_option("--test-realizations", ov.test_realizations, "");
    sub->add_option("--scale", ov.scale, "desk | paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    sub->add_option("--betas", ov.betas, "fallback thresholds");
    sub->add_option("--trees", ov.trees, "forest size");
  };

  auto* generate = app.add_subcommand("generate", "simulate realizations and write the dataset");
  add_common(generate);

  auto* train = app.add_subcommand("train", "train the scheduling forest on a dataset");
  add_common(train);
  train->add_option("--dataset", dataset_path, "dataset CSV")->required()->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "run policies on the test set and report KPIs");
  add_common(evaluate);
  evaluate->add_option("--model", model_path, "trained model file");
  evaluate->add_option("--policies", policies, "comma list: genie,greedy,min_multi_x,forest");

  auto* sweep = app.add_subcommand("sweep", "beta or training-size/forest-size sweep");
  add_common(sweep);
  sweep->add_option("--kind", sweep_kind, "beta | training")
      ->check(CLI::IsMember({"beta", "training"}));
  sweep->add_option("--model", model_path, "trained model file (beta sweep)");
  sweep->add_option("--dataset", dataset_path, "training pool CSV (training sweep)");

  auto* inspect = app.add_subcommand("inspect", "print a dataset or model summary");
  inspect->add_option("--dataset", dataset_path, "dataset CSV");
  inspect->add_option("--model", model_path, "model file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (inspect->parsed()) return cmd_inspect(dataset_path, model_path);

    mmcs::RunConfig cfg = mmcs::load_run_config(config_path);
    apply(cfg, ov);
    if (generate->parsed()) return cmd_generate(cfg, out_dir);
    if (train->parsed()) return cmd_train(cfg, dataset_path, out_dir);
    if (evaluate->parsed()) return cmd_evaluate(cfg, model_path, policies, out_dir);
    if (sweep->parsed()) return cmd_sweep(cfg, model_path, sweep_kind, dataset_path, out_dir);
    return kExitConfig;
  } catch (const mmcs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mmcs::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const mmcs::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
