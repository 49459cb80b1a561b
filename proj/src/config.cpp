#include "mmcs/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mmcs/errors.hpp"

namespace mmcs {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

Vec3 vec3_of(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + ": expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

SceneConfig scene_config_from_json(const json& j) {
  SceneConfig c;
  try {
    const auto& area = j.at("area");
    if (!area.is_array() || area.size() != 4)
      throw ConfigError("area: expected [xmin, ymin, xmax, ymax]");
    c.area = Rect{area[0].get<double>(), area[1].get<double>(), area[2].get<double>(),
                  area[3].get<double>()};

    for (const auto& ap : j.at("mmaps")) {
      MmApSite site;
      site.position = vec3_of(ap.at("position"), "mmap.position");
      site.boresight_deg = get_or(ap, "boresight_deg", 0.0);
      site.codebook_id = get_or(ap, "codebook_id", 0);
      c.mmaps.push_back(site);
    }
    c.lb_pos = vec3_of(j.at("lb_bs").at("position"), "lb_bs.position");

    if (j.contains("codebook")) {
      const auto& cb = j.at("codebook");
      c.codebook.beams = get_or(cb, "beams", 19);
      c.codebook.step_deg = get_or(cb, "step_deg", 10.0);
      c.codebook.peak_gain_db = get_or(cb, "peak_gain_db", 18.0);
      c.codebook.floor_gain_db = get_or(cb, "floor_gain_db", -10.0);
      c.codebook.downtilt_deg = get_or(cb, "downtilt_deg", 8.0);
    }

    for (const auto& b : get_or(j, "fixed_obstacles", json::array())) {
      const Vec3 lo = vec3_of(b.at("min"), "fixed_obstacle.min");
      const Vec3 hi = vec3_of(b.at("max"), "fixed_obstacle.max");
      c.fixed_obstacles.emplace_back(lo, hi);
    }

    if (j.contains("densities")) {
      const auto& d = j.at("densities");
      c.pedestrian_density = get_or(d, "pedestrian", 0.0);
      c.small_vehicle_density = get_or(d, "small_vehicle", 0.0);
      c.large_vehicle_density = get_or(d, "large_vehicle", 0.0);
    }

    auto parse_lanes = [](const json& arr, const char* what) {
      std::vector<VehicleLane> lanes;
      for (const auto& l : arr) {
        VehicleLane lane;
        const auto& r = l.at("rect");
        if (!r.is_array() || r.size() != 4)
          throw ConfigError(std::string(what) + ".rect: expected [xmin, ymin, xmax, ymax]");
        lane.rect = Rect{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                         r[3].get<double>()};
        const std::string axis = get_or<std::string>(l, "axis", "x");
        if (axis != "x" && axis != "y")
          throw ConfigError(std::string(what) + ".axis: expected x or y");
        lane.axis = axis == "x" ? 0 : 1;
        lanes.push_back(lane);
      }
      return lanes;
    };
    c.vehicle_lanes = parse_lanes(get_or(j, "vehicle_lanes", json::array()), "vehicle_lane");

    if (j.contains("user")) {
      const auto& u = j.at("user");
      c.user_class = user_class_from_string(get_or<std::string>(u, "class", "pedestrian"));
      c.user_height = get_or(u, "height", 1.5);
      if (u.contains("start")) {
        const auto& s = u.at("start");
        if (!s.is_array() || s.size() != 2) throw ConfigError("user.start: expected [x, y]");
        c.user_start = Vec2(s[0].get<double>(), s[1].get<double>());
      }
      if (u.contains("heading_deg")) c.user_heading_deg = u.at("heading_deg").get<double>();
      c.user_lanes = parse_lanes(get_or(u, "lanes", json::array()), "user.lane");
    }
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scene config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json scene_config_to_json(const SceneConfig& c) {
  nlohmann::ordered_json j;
  j["area"] = {c.area.xmin, c.area.ymin, c.area.xmax, c.area.ymax};
  j["mmaps"] = nlohmann::ordered_json::array();
  for (const auto& ap : c.mmaps) {
    nlohmann::ordered_json a;
    a["position"] = {ap.position.x(), ap.position.y(), ap.position.z()};
    a["boresight_deg"] = ap.boresight_deg;
    a["codebook_id"] = ap.codebook_id;
    j["mmaps"].push_back(std::move(a));
  }
  j["lb_bs"]["position"] = {c.lb_pos.x(), c.lb_pos.y(), c.lb_pos.z()};
  j["codebook"] = {{"beams", c.codebook.beams},
                   {"step_deg", c.codebook.step_deg},
                   {"peak_gain_db", c.codebook.peak_gain_db},
                   {"floor_gain_db", c.codebook.floor_gain_db},
                   {"downtilt_deg", c.codebook.downtilt_deg}};
  j["fixed_obstacles"] = nlohmann::ordered_json::array();
  for (const auto& b : c.fixed_obstacles) {
    nlohmann::ordered_json box;
    box["min"] = {b.min().x(), b.min().y(), b.min().z()};
    box["max"] = {b.max().x(), b.max().y(), b.max().z()};
    j["fixed_obstacles"].push_back(std::move(box));
  }
  j["densities"] = {{"pedestrian", c.pedestrian_density},
                    {"small_vehicle", c.small_vehicle_density},
                    {"large_vehicle", c.large_vehicle_density}};
  auto lanes_to_json = [](const std::vector<VehicleLane>& lanes) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& lane : lanes) {
      nlohmann::ordered_json l;
      l["rect"] = {lane.rect.xmin, lane.rect.ymin, lane.rect.xmax, lane.rect.ymax};
      l["axis"] = lane.axis == 0 ? "x" : "y";
      arr.push_back(std::move(l));
    }
    return arr;
  };
  if (!c.vehicle_lanes.empty()) j["vehicle_lanes"] = lanes_to_json(c.vehicle_lanes);
  j["user"]["class"] = to_string(c.user_class);
  j["user"]["height"] = c.user_height;
  if (c.user_start) j["user"]["start"] = {c.user_start->x(), c.user_start->y()};
  if (c.user_heading_deg) j["user"]["heading_deg"] = *c.user_heading_deg;
  if (!c.user_lanes.empty()) j["user"]["lanes"] = lanes_to_json(c.user_lanes);
  j["seed"] = c.seed;
  return j;
}

SceneConfig load_scene_config(const std::string& path) {
  return scene_config_from_json(load_json_file(path));
}

void RunConfig::validate() const {
  scene.validate();
  if (qos.packets < 0 || qos.deadline_slots < 1) throw ConfigError("qos: D >= 0 and K >= 1 required");
  if (lb_cost <= mm_cost || mm_cost < 1.0) throw ConfigError("costs: need lb > mm >= 1");
  if (!std::isfinite(gamma_db)) throw ConfigError("gamma must be finite");
  if (slot_ms <= 0) throw ConfigError("slot duration must be positive");
  if (scale != "desk" && scale != "paper") throw ConfigError("scale: expected desk or paper");
  if (train_realizations < 1 || test_realizations < 1)
    throw ConfigError("realization counts must be >= 1");
  if (duration_slots < qos.deadline_slots || duration_slots % qos.deadline_slots != 0)
    throw ConfigError("duration_slots must be a positive multiple of K");
  if (forest.trees < 1 || forest.max_depth < 0) throw ConfigError("forest: bad hyperparameters");
  for (double b : betas)
    if (b < 0.0 || b > 1.0) throw ConfigError("betas must lie in [0, 1]");
}

RunConfig run_config_from_json(const json& j, const std::string& base_dir) {
  RunConfig c;
  try {
    const auto& scene = j.at("scene");
    if (scene.is_string()) {
      std::filesystem::path p = scene.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      c.scene_path = p.string();
      c.scene = load_scene_config(c.scene_path);
    } else {
      c.scene = scene_config_from_json(scene);
    }

    if (j.contains("qos")) {
      c.qos.packets = get_or(j.at("qos"), "d", 100);
      c.qos.deadline_slots = get_or(j.at("qos"), "k", 50);
    }
    if (j.contains("costs")) {
      c.lb_cost = get_or(j.at("costs"), "lb", 100.0);
      c.mm_cost = get_or(j.at("costs"), "mm", 1.0);
    }
    if (j.contains("radio")) {
      const auto& r = j.at("radio");
      c.radio.tx_power_dbm = get_or(r, "tx_power_dbm", c.radio.tx_power_dbm);
      c.radio.noise_dbm = get_or(r, "noise_dbm", c.radio.noise_dbm);
      c.radio.mm_freq_hz = get_or(r, "mm_freq_ghz", c.radio.mm_freq_hz / 1e9) * 1e9;
      c.radio.lb_freq_hz = get_or(r, "lb_freq_ghz", c.radio.lb_freq_hz / 1e9) * 1e9;
      c.radio.lb_pathloss_exp = get_or(r, "lb_pathloss_exp", c.radio.lb_pathloss_exp);
      c.radio.lb_ref_loss_db = get_or(r, "lb_ref_loss_db", c.radio.lb_ref_loss_db);
      c.radio.reflection_loss_db = get_or(r, "reflection_loss_db", c.radio.reflection_loss_db);
      c.radio.snr_floor_db = get_or(r, "snr_floor_db", c.radio.snr_floor_db);
    }
    c.gamma_db = get_or(j, "gamma_db", 10.0);
    c.slot_ms = get_or(j, "slot_ms", 1.0);

    c.scale = get_or<std::string>(j, "scale", "desk");
    if (c.scale == "paper") {
      c.train_realizations = 500;
      c.test_realizations = 10;
    }
    if (j.contains("realizations")) {
      const auto& r = j.at("realizations");
      c.train_realizations = get_or(r, "train", c.train_realizations);
      c.test_realizations = get_or(r, "test", c.test_realizations);
      c.duration_slots = get_or(r, "duration_slots", c.duration_slots);
    }

    if (j.contains("forest")) {
      const auto& f = j.at("forest");
      c.forest.trees = get_or(f, "trees", 200);
      c.forest.max_depth = get_or(f, "max_depth", 20);
      c.forest.max_leaves = get_or<std::int64_t>(f, "max_leaves", 0);
      c.forest.features_per_split = get_or(f, "features_per_split", 0);
      c.forest.min_samples_split = get_or(f, "min_samples_split", 2);
      c.forest.bootstrap = get_or(f, "bootstrap", true);
    }
    c.betas = get_or(j, "betas", c.betas);

    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      c.train_seed = get_or<std::uint64_t>(s, "train", c.train_seed);
      c.test_seed = get_or<std::uint64_t>(s, "test", c.test_seed);
      c.forest_seed = get_or<std::uint64_t>(s, "forest", c.forest_seed);
      c.shuffle_seed = get_or<std::uint64_t>(s, "shuffle", c.shuffle_seed);
    }
    c.forest.seed = c.forest_seed;
    c.forest.classes = 1 << (static_cast<int>(c.scene.mmaps.size()) + 1);

    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      c.sweep_train_sizes = get_or(s, "train_sizes", c.sweep_train_sizes);
      c.sweep_tree_counts = get_or(s, "tree_counts", c.sweep_tree_counts);
    }
    c.workers = get_or(j, "workers", 0);
    c.output_dir = get_or<std::string>(j, "output_dir", "runs");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json run_config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["scene"] = scene_config_to_json(c.scene);
  j["qos"] = {{"d", c.qos.packets}, {"k", c.qos.deadline_slots}};
  j["costs"] = {{"lb", c.lb_cost}, {"mm", c.mm_cost}};
  j["radio"] = {{"tx_power_dbm", c.radio.tx_power_dbm},
                {"noise_dbm", c.radio.noise_dbm},
                {"mm_freq_ghz", c.radio.mm_freq_hz / 1e9},
                {"lb_freq_ghz", c.radio.lb_freq_hz / 1e9},
                {"lb_pathloss_exp", c.radio.lb_pathloss_exp},
                {"lb_ref_loss_db", c.radio.lb_ref_loss_db},
                {"reflection_loss_db", c.radio.reflection_loss_db},
                {"snr_floor_db", c.radio.snr_floor_db}};
  j["gamma_db"] = c.gamma_db;
  j["slot_ms"] = c.slot_ms;
  j["scale"] = c.scale;
  j["realizations"] = {{"train", c.train_realizations},
                       {"test", c.test_realizations},
                       {"duration_slots", c.duration_slots}};
  j["forest"] = {{"trees", c.forest.trees},
                 {"max_depth", c.forest.max_depth},
                 {"max_leaves", c.forest.max_leaves},
                 {"features_per_split", c.forest.features_per_split},
                 {"min_samples_split", c.forest.min_samples_split},
                 {"bootstrap", c.forest.bootstrap}};
  j["betas"] = c.betas;
  j["seeds"] = {{"train", c.train_seed},
                {"test", c.test_seed},
                {"forest", c.forest_seed},
                {"shuffle", c.shuffle_seed}};
  j["sweep"] = {{"train_sizes", c.sweep_train_sizes}, {"tree_counts", c.sweep_tree_counts}};
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir;
  return j;
}

RunConfig load_run_config(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return run_config_from_json(load_json_file(path), dir);
}

std::string config_hash(const RunConfig& c) {
  // Canonical form: nlohmann::json (non-ordered) sorts keys.
  const json canonical = json::parse(run_config_to_json(c).dump());
  const std::string s = canonical.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mmcs
