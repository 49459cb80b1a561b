#include "mmcs/scene.hpp"

#include <random>

#include "mmcs/errors.hpp"
#include "mmcs/rng.hpp"

namespace mmcs {

const char* to_string(ObstacleClass c) {
  switch (c) {
    case ObstacleClass::pedestrian: return "pedestrian";
    case ObstacleClass::small_vehicle: return "small_vehicle";
    case ObstacleClass::large_vehicle: return "large_vehicle";
  }
  return "?";
}

const char* to_string(UserClass c) {
  return c == UserClass::pedestrian ? "pedestrian" : "small_vehicle";
}

ObstacleClass obstacle_class_from_string(const std::string& s) {
  if (s == "pedestrian") return ObstacleClass::pedestrian;
  if (s == "small_vehicle") return ObstacleClass::small_vehicle;
  if (s == "large_vehicle") return ObstacleClass::large_vehicle;
  throw ConfigError("unknown obstacle class: " + s);
}

UserClass user_class_from_string(const std::string& s) {
  if (s == "pedestrian") return UserClass::pedestrian;
  if (s == "small_vehicle") return UserClass::small_vehicle;
  throw ConfigError("unknown user class: " + s);
}

ObstacleDims default_dims(ObstacleClass c) {
  switch (c) {
    case ObstacleClass::pedestrian: return {0.5, 0.5, 1.75, 3.0 / 3.6};
    case ObstacleClass::small_vehicle: return {2.2, 4.0, 1.8, 50.0 / 3.6};
    case ObstacleClass::large_vehicle: return {2.2, 8.0, 3.0, 30.0 / 3.6};
  }
  return {0.5, 0.5, 1.75, 3.0 / 3.6};
}

double default_speed(UserClass c) {
  return c == UserClass::pedestrian ? 3.0 / 3.6 : 50.0 / 3.6;
}

void SceneConfig::validate() const {
  if (area.width() <= 0 || area.height() <= 0) throw ConfigError("scene: area must have positive extent");
  if (mmaps.empty()) throw ConfigError("scene: at least one mmAP is required");
  if (pedestrian_density < 0 || small_vehicle_density < 0 || large_vehicle_density < 0)
    throw ConfigError("scene: obstacle densities must be >= 0");
  if (user_height <= 0) throw ConfigError("scene: user height must be positive");
  for (const auto& ap : mmaps) {
    if (ap.position.z() <= 0) throw ConfigError("scene: mmAP height must be positive");
    if (!area.contains(Vec2(ap.position.x(), ap.position.y())))
      throw ConfigError("scene: mmAP outside area bounds");
  }
  if (lb_pos.z() <= 0) throw ConfigError("scene: LB-BS height must be positive");
  if (!area.contains(Vec2(lb_pos.x(), lb_pos.y()))) throw ConfigError("scene: LB-BS outside area bounds");
  for (const auto& b : fixed_obstacles) {
    if (b.isEmpty()) throw ConfigError("scene: fixed obstacle box is empty");
    if (!area.contains(Vec2(b.min().x(), b.min().y())) || !area.contains(Vec2(b.max().x(), b.max().y())))
      throw ConfigError("scene: fixed obstacle outside area bounds");
  }
  if (user_start && !area.contains(*user_start)) throw ConfigError("scene: user start outside area bounds");
  auto check_lanes = [&](const std::vector<VehicleLane>& lanes) {
    for (const auto& lane : lanes) {
      if (lane.axis != 0 && lane.axis != 1) throw ConfigError("scene: lane axis must be x or y");
      if (lane.rect.width() <= 0 || lane.rect.height() <= 0)
        throw ConfigError("scene: lane must have positive extent");
      if (!area.contains(Vec2(lane.rect.xmin, lane.rect.ymin)) ||
          !area.contains(Vec2(lane.rect.xmax, lane.rect.ymax)))
        throw ConfigError("scene: lane outside area bounds");
    }
  };
  check_lanes(vehicle_lanes);
  check_lanes(user_lanes);
  codebook.validate();
}

namespace {

Vec2 random_point(const Rect& area, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(area.xmin, area.xmax);
  std::uniform_real_distribution<double> uy(area.ymin, area.ymax);
  const double x = ux(rng);
  const double y = uy(rng);
  return Vec2(x, y);
}

Vec2 random_heading(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ua(0.0, 2.0 * kPi);
  const double a = ua(rng);
  return Vec2(std::cos(a), std::sin(a));
}

void drop_class(Scene& scene, ObstacleClass cls, double density,
                const std::vector<VehicleLane>& lanes, std::mt19937_64& rng) {
  if (density <= 0) return;
  std::poisson_distribution<int> count_dist(density * scene.area.area());
  const int count = count_dist(rng);
  const ObstacleDims dims = default_dims(cls);

  std::vector<double> lane_weight;  // cumulative, area-weighted
  double total_lane_area = 0.0;
  for (const auto& lane : lanes) {
    total_lane_area += lane.rect.area();
    lane_weight.push_back(total_lane_area);
  }

  for (int i = 0; i < count; ++i) {
    MovingObstacle o;
    o.cls = cls;
    o.width = dims.width;
    o.length = dims.length;
    o.height = dims.height;
    o.speed_mps = dims.speed_mps;
    if (lanes.empty()) {
      o.position = random_point(scene.area, rng);
      o.heading = random_heading(rng);
    } else {
      std::uniform_real_distribution<double> pick(0.0, total_lane_area);
      const double at = pick(rng);
      std::size_t li = 0;
      while (li + 1 < lanes.size() && at > lane_weight[li]) ++li;
      o.position = random_point(lanes[li].rect, rng);
      std::bernoulli_distribution sign(0.5);
      const double dir = sign(rng) ? 1.0 : -1.0;
      o.heading = lanes[li].axis == 0 ? Vec2(dir, 0.0) : Vec2(0.0, dir);
    }
    scene.moving.push_back(o);
  }
}

}  // namespace

Scene build_scene(const SceneConfig& config) {
  config.validate();
  Scene scene;
  scene.area = config.area;
  scene.mmaps = config.mmaps;
  scene.lb_pos = config.lb_pos;
  scene.codebook = config.codebook;
  scene.fixed_obstacles = config.fixed_obstacles;
  scene.seed = config.seed;

  auto rng = make_rng(config.seed);
  drop_class(scene, ObstacleClass::pedestrian, config.pedestrian_density, {}, rng);
  drop_class(scene, ObstacleClass::small_vehicle, config.small_vehicle_density,
             config.vehicle_lanes, rng);
  drop_class(scene, ObstacleClass::large_vehicle, config.large_vehicle_density,
             config.vehicle_lanes, rng);

  scene.user.cls = config.user_class;
  scene.user.height = config.user_height;
  scene.user.speed_mps = default_speed(config.user_class);
  if (config.user_start) {
    scene.user.position = *config.user_start;
  } else if (!config.user_lanes.empty()) {
    double total = 0.0;
    std::vector<double> cum;
    for (const auto& lane : config.user_lanes) {
      total += lane.rect.area();
      cum.push_back(total);
    }
    std::uniform_real_distribution<double> pick(0.0, total);
    const double at = pick(rng);
    std::size_t li = 0;
    while (li + 1 < config.user_lanes.size() && at > cum[li]) ++li;
    scene.user.position = random_point(config.user_lanes[li].rect, rng);
    std::bernoulli_distribution sign(0.5);
    const double dir = sign(rng) ? 1.0 : -1.0;
    scene.user.heading = config.user_lanes[li].axis == 0 ? Vec2(dir, 0.0) : Vec2(0.0, dir);
  } else {
    scene.user.position = random_point(scene.area, rng);
  }
  if (config.user_heading_deg) {
    const double a = deg2rad(*config.user_heading_deg);
    scene.user.heading = Vec2(std::cos(a), std::sin(a));
  } else if (config.user_lanes.empty() || config.user_start) {
    scene.user.heading = random_heading(rng);
  }
  return scene;
}

namespace {

void wrap_into(Vec2& p, const Rect& area) {
  p.x() = wrap_coord(p.x(), area.xmin, area.xmax);
  p.y() = wrap_coord(p.y(), area.ymin, area.ymax);
}

}  // namespace

void advance(Scene& scene, double dt_s) {
  if (dt_s <= 0) throw InputError("advance: dt must be positive");
  for (auto& o : scene.moving) {
    o.position += o.speed_mps * dt_s * o.heading;
    wrap_into(o.position, scene.area);
  }
  scene.user.position += scene.user.speed_mps * dt_s * scene.user.heading;
  wrap_into(scene.user.position, scene.area);
}

Scene advanced(const Scene& scene, double dt_s) {
  Scene out = scene;
  advance(out, dt_s);
  return out;
}

bool segment_blocked(const Vec3& a, const Vec3& b, const Scene& scene) {
  for (const auto& box : scene.fixed_obstacles) {
    if (segment_intersects_box(a, b, box)) return true;
  }
  for (const auto& o : scene.moving) {
    if (segment_intersects_obb(a, b, o.footprint_box())) return true;
  }
  return false;
}

}  // namespace mmcs
