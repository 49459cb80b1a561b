#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmcs/geometry.hpp"
#include "mmcs/radio.hpp"

namespace mmcs {

enum class ObstacleClass { pedestrian, small_vehicle, large_vehicle };
enum class UserClass { pedestrian, small_vehicle };

const char* to_string(ObstacleClass c);
const char* to_string(UserClass c);
ObstacleClass obstacle_class_from_string(const std::string& s);
UserClass user_class_from_string(const std::string& s);

struct ObstacleDims {
  double width;   // across heading, m
  double length;  // along heading, m
  double height;  // m
  double speed_mps;
};

// Default footprint/height/speed per class. Pedestrians have no standardized
// footprint; 0.5 m square is used.
ObstacleDims default_dims(ObstacleClass c);
double default_speed(UserClass c);

struct MovingObstacle {
  ObstacleClass cls = ObstacleClass::pedestrian;
  double width = 0.5;
  double length = 0.5;
  double height = 1.75;
  Vec2 position = Vec2::Zero();
  Vec2 heading = Vec2::UnitX();  // unit vector
  double speed_mps = 0.0;

  ObbXY footprint_box() const {
    ObbXY o;
    o.center = position;
    o.cos_h = heading.x();
    o.sin_h = heading.y();
    o.half_length = length / 2.0;
    o.half_width = width / 2.0;
    o.height = height;
    o.update_cull_radius();
    return o;
  }
};

struct User {
  UserClass cls = UserClass::pedestrian;
  Vec2 position = Vec2::Zero();
  Vec2 heading = Vec2::UnitX();
  double speed_mps = 0.0;
  double height = 1.5;

  Vec3 position3() const { return Vec3(position.x(), position.y(), height); }
};

struct MmApSite {
  Vec3 position = Vec3::Zero();
  double boresight_deg = 0.0;
  int codebook_id = 0;
};

// Optional traffic corridor: vehicles spawned inside it drive along `axis`
// (0 = x, 1 = y) with a random sign. Lanes should span the full area along
// their axis so wrap-around keeps vehicles in lane.
struct VehicleLane {
  Rect rect;
  int axis = 0;
};

struct SceneConfig {
  Rect area;
  std::vector<MmApSite> mmaps;
  Vec3 lb_pos = Vec3::Zero();
  BeamCodebook codebook;
  std::vector<Box3> fixed_obstacles;
  double pedestrian_density = 0.0;    // per m^2
  double small_vehicle_density = 0.0;
  double large_vehicle_density = 0.0;
  std::vector<VehicleLane> vehicle_lanes;  // empty: vehicles drop uniformly anywhere
  std::vector<VehicleLane> user_lanes;     // empty: user spawns uniformly anywhere
  UserClass user_class = UserClass::pedestrian;
  double user_height = 1.5;
  std::optional<Vec2> user_start;    // randomized (in a user lane, if any) when absent
  std::optional<double> user_heading_deg;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct Scene {
  Rect area;
  std::vector<MmApSite> mmaps;
  Vec3 lb_pos = Vec3::Zero();
  BeamCodebook codebook;
  std::vector<Box3> fixed_obstacles;
  std::vector<MovingObstacle> moving;
  User user;
  std::uint64_t seed = 0;

  int n_mmaps() const { return static_cast<int>(mmaps.size()); }
  int n_links() const { return n_mmaps() + 1; }  // LB-BS is link 0
};

// Drops moving obstacles uniformly at the configured densities (Poisson count
// per class) with uniform random headings; deterministic in config.seed.
Scene build_scene(const SceneConfig& config);

// Translates every moving obstacle and the user by speed*dt along heading,
// wrapping at the area edges. dt must be positive.
void advance(Scene& scene, double dt_s);
Scene advanced(const Scene& scene, double dt_s);

// True iff the open segment (a, b) passes through any fixed box or any moving
// obstacle's extruded footprint.
bool segment_blocked(const Vec3& a, const Vec3& b, const Scene& scene);

}  // namespace mmcs
