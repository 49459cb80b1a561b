#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmcs/pipeline.hpp"

namespace mmcs {

SceneConfig scene_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json scene_config_to_json(const SceneConfig& c);
SceneConfig load_scene_config(const std::string& path);

struct RunConfig {
  std::string scene_path;  // empty when the scene was given inline
  SceneConfig scene;
  QosRequirement qos{100, 50};
  double lb_cost = 100.0;
  double mm_cost = 1.0;
  RadioParams radio;
  double gamma_db = 10.0;
  double slot_ms = 1.0;
  std::string scale = "desk";  // desk | paper
  int train_realizations = 50;
  int test_realizations = 10;
  int duration_slots = 10000;
  ForestParams forest;
  std::vector<double> betas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::uint64_t train_seed = 1;
  std::uint64_t test_seed = 1001;
  std::uint64_t forest_seed = 7;
  std::uint64_t shuffle_seed = 3;
  std::vector<std::size_t> sweep_train_sizes{1000, 5000, 10000};
  std::vector<int> sweep_tree_counts{10, 50, 200};
  int workers = 0;  // 0 = logical cores
  std::string output_dir = "runs";

  void validate() const;  // throws ConfigError

  CostVector costs() const {
    return CostVector::uniform(static_cast<int>(scene.mmaps.size()) + 1, lb_cost, mm_cost);
  }

  ExperimentParams experiment() const {
    ExperimentParams p;
    p.scene = scene;
    p.radio = radio;
    p.qos = qos;
    p.costs = costs();
    p.gamma_db = gamma_db;
    p.slot_s = slot_ms / 1000.0;
    p.duration_slots = duration_slots;
    return p;
  }
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir = "");
nlohmann::ordered_json run_config_to_json(const RunConfig& c);
RunConfig load_run_config(const std::string& path);

// FNV-1a 64 over the canonical (key-sorted) serialization; hex string.
std::string config_hash(const RunConfig& c);

}  // namespace mmcs
