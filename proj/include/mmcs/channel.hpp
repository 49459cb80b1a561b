#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmcs/scene.hpp"

namespace mmcs {

// One propagation path AP -> user: the line-of-sight path (2 vertices) or a
// single specular wall bounce (3 vertices).
struct Ray {
  int link = 0;                 // originating mmAP link id, 1..N
  std::vector<Vec3> path;       // transmitter first, receiver last
  double gain = 0.0;            // linear power gain, |alpha|^2
  double departure_az = 0.0;    // radians, [-pi, pi]
  double departure_el = 0.0;    // radians, [-pi/2, pi/2]
  double arrival_az = 0.0;
  double arrival_el = 0.0;
  std::complex<double> alpha;   // complex amplitude, |alpha|^2 == gain

  double length() const;
};

// Unblocked candidate rays from mmAP `ap_index` (1..N) to `user_pos`:
// LOS plus first-order reflections off the vertical faces of fixed boxes.
// Empty result means the link is fully blocked.
std::vector<Ray> trace_rays(int ap_index, const Vec3& user_pos, const Scene& scene,
                            const RadioParams& radio);

// Per-beam SNR (dB) at the user, floor-clamped. Size M.
Eigen::VectorXd snr_per_beam(int ap_index, const Vec3& user_pos, const Scene& scene,
                             const RadioParams& radio);

// Low-band SNR (dB): log-distance path loss, never blocked.
double lb_snr(const Vec3& user_pos, const Scene& scene, const RadioParams& radio);

struct MeasurementVector {
  Eigen::MatrixXd snr_db;        // N x M
  double lb_snr_db = 0.0;
  Vec2 user_pos = Vec2::Zero();
  std::int64_t slot = 0;
  std::vector<int> best_beam;    // argmax per mmAP, lowest index on ties

  int n_mmaps() const { return static_cast<int>(snr_db.rows()); }
  int n_beams() const { return static_cast<int>(snr_db.cols()); }
};

// Alignment-phase measurement at the scene's current state (k = 0).
MeasurementVector align_and_measure(const Scene& scene, const RadioParams& radio,
                                    std::int64_t slot = 0);

// Binary channel coefficients for one scheduling window. Row 0 is the LB-BS,
// rows 1..N the mmAPs on their alignment-selected beams.
struct ChannelRealization {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> g;  // (N+1) x K
  std::vector<int> best_beam;                                     // size N

  int links() const { return static_cast<int>(g.rows()); }
  int slots() const { return static_cast<int>(g.cols()); }
};

// Fixes the serving beams at the current state, then advances the scene one
// slot at a time and thresholds the per-slot SNR against gamma. On return the
// scene has moved by K slots.
ChannelRealization realize_channel(Scene& scene, int window_slots, double slot_s,
                                   const RadioParams& radio, double gamma_db);

// CSV: one row per link (LB-BS first), one column per slot.
void write_channel_csv(std::ostream& out, const ChannelRealization& ch);
void write_channel_csv(const std::string& path, const ChannelRealization& ch);
ChannelRealization read_channel_csv(std::istream& in);
ChannelRealization read_channel_csv(const std::string& path);

// CSV: mmAP-major beam-minor SNR columns, then LB SNR, position, slot, beams.
void write_measurements_csv(std::ostream& out, const std::vector<MeasurementVector>& ms);
void write_measurements_csv(const std::string& path, const std::vector<MeasurementVector>& ms);

}  // namespace mmcs
