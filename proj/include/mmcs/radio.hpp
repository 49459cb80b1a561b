#pragma once

#include <cmath>

#include "mmcs/errors.hpp"
#include "mmcs/geometry.hpp"

namespace mmcs {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Free-space power gain (linear, dimensionless) over distance d at frequency f.
inline double friis_gain(double dist_m, double freq_hz) {
  const double lambda = kSpeedOfLight / freq_hz;
  const double x = lambda / (4.0 * kPi * std::max(dist_m, 1e-6));
  return x * x;
}

struct RadioParams {
  double tx_power_dbm = 24.0;
  double noise_dbm = -80.0;
  double mm_freq_hz = 28e9;
  double lb_freq_hz = 2e9;
  double lb_pathloss_exp = 3.5;
  double lb_ref_loss_db = 30.0;     // path loss at the 1 m reference distance
  double reflection_loss_db = 10.0; // per wall bounce
  double snr_floor_db = -40.0;      // reported when a link has no usable ray
};

// Fixed grid of horizontal beams. Beam m is centered at
// boresight - span/2 + m*step where span = step*(beams-1); the main lobe is a
// flat top of width `step`, everything else sits at the floor gain.
struct BeamCodebook {
  int beams = 19;
  double step_deg = 10.0;
  double peak_gain_db = 18.0;
  double floor_gain_db = -10.0;
  double downtilt_deg = 8.0;

  void validate() const {
    if (beams < 1) throw InputError("codebook: beam count must be >= 1");
    if (step_deg <= 0) throw InputError("codebook: angular step must be positive");
  }

  double span_deg() const { return step_deg * (beams - 1); }

  // Beam center relative to boresight, degrees.
  double center_deg(int m) const { return -span_deg() / 2.0 + step_deg * m; }

  // Gain seen by a departure azimuth `rel_deg` relative to boresight.
  double gain_db(int m, double rel_deg) const {
    const double off = std::abs(wrap_angle(deg2rad(rel_deg - center_deg(m))));
    return off <= deg2rad(step_deg) / 2.0 + 1e-12 ? peak_gain_db : floor_gain_db;
  }

  // Index of the beam whose center is closest to rel_deg (lowest index wins ties).
  int covering_beam(double rel_deg) const {
    int best = 0;
    double best_off = std::abs(wrap_angle(deg2rad(rel_deg - center_deg(0))));
    for (int m = 1; m < beams; ++m) {
      const double off = std::abs(wrap_angle(deg2rad(rel_deg - center_deg(m))));
      if (off < best_off - 1e-12) {
        best = m;
        best_off = off;
      }
    }
    return best;
  }
};

}  // namespace mmcs
