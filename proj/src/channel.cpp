#include "mmcs/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmcs/errors.hpp"

namespace mmcs {

double Ray::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

namespace {

void set_angles(Ray& ray) {
  const Vec3& tx = ray.path.front();
  const Vec3& rx = ray.path.back();
  const Vec3 dep = (ray.path[1] - tx).normalized();
  const Vec3 arr = (ray.path[ray.path.size() - 2] - rx).normalized();
  ray.departure_az = std::atan2(dep.y(), dep.x());
  ray.departure_el = std::asin(std::clamp(dep.z(), -1.0, 1.0));
  ray.arrival_az = std::atan2(arr.y(), arr.x());
  ray.arrival_el = std::asin(std::clamp(arr.z(), -1.0, 1.0));
}

void set_alpha(Ray& ray, double freq_hz) {
  const double lambda = kSpeedOfLight / freq_hz;
  const double phase = wrap_angle(-2.0 * kPi * ray.length() / lambda);
  ray.alpha = std::polar(std::sqrt(ray.gain), phase);
}

// Specular bounce off one vertical box face. axis is 0 (x) or 1 (y); coord is
// the face plane; sign the outward normal direction; lo/hi the face extent
// along the other horizontal axis; z0/z1 the vertical extent.
bool reflect_off_face(const Vec3& ap, const Vec3& user, int axis, double coord, double sign,
                      double lo, double hi, double z0, double z1, const Scene& scene, Vec3& point) {
  const double ap_side = (ap[axis] - coord) * sign;
  const double user_side = (user[axis] - coord) * sign;
  if (ap_side <= 1e-9 || user_side <= 1e-9) return false;
  const Vec3 image = mirror_across_plane(ap, axis, coord);
  const double denom = user[axis] - image[axis];
  if (std::abs(denom) < 1e-12) return false;
  const double t = (coord - image[axis]) / denom;
  if (t <= 0.0 || t >= 1.0) return false;
  const Vec3 p = image + t * (user - image);
  const int other = 1 - axis;
  if (p[other] < lo || p[other] > hi) return false;
  if (p.z() < z0 || p.z() > z1) return false;
  if (segment_blocked(ap, p, scene) || segment_blocked(p, user, scene)) return false;
  point = p;
  return true;
}

}  // namespace

std::vector<Ray> trace_rays(int ap_index, const Vec3& user_pos, const Scene& scene,
                            const RadioParams& radio) {
  if (ap_index < 1 || ap_index > scene.n_mmaps())
    throw InputError("trace_rays: mmAP index out of range");
  const Vec3 ap = scene.mmaps[ap_index - 1].position;

  std::vector<Ray> rays;
  if (!segment_blocked(ap, user_pos, scene)) {
    Ray los;
    los.link = ap_index;
    los.path = {ap, user_pos};
    los.gain = friis_gain((user_pos - ap).norm(), radio.mm_freq_hz);
    set_angles(los);
    set_alpha(los, radio.mm_freq_hz);
    rays.push_back(std::move(los));
  }

  const double bounce = db_to_linear(-radio.reflection_loss_db);
  for (const auto& box : scene.fixed_obstacles) {
    const Vec3& lo = box.min();
    const Vec3& hi = box.max();
    struct Face {
      int axis;
      double coord, sign;
    };
    const Face faces[4] = {{0, lo.x(), -1.0}, {0, hi.x(), 1.0}, {1, lo.y(), -1.0}, {1, hi.y(), 1.0}};
    for (const Face& f : faces) {
      const double olo = f.axis == 0 ? lo.y() : lo.x();
      const double ohi = f.axis == 0 ? hi.y() : hi.x();
      Vec3 p;
      if (!reflect_off_face(ap, user_pos, f.axis, f.coord, f.sign, olo, ohi, lo.z(), hi.z(),
                            scene, p))
        continue;
      Ray r;
      r.link = ap_index;
      r.path = {ap, p, user_pos};
      r.gain = friis_gain(r.length(), radio.mm_freq_hz) * bounce;
      set_angles(r);
      set_alpha(r, radio.mm_freq_hz);
      rays.push_back(std::move(r));
    }
  }
  return rays;
}

Eigen::VectorXd snr_per_beam(int ap_index, const Vec3& user_pos, const Scene& scene,
                             const RadioParams& radio) {
  const auto rays = trace_rays(ap_index, user_pos, scene, radio);
  const BeamCodebook& cb = scene.codebook;
  const double boresight = scene.mmaps[ap_index - 1].boresight_deg;

  Eigen::VectorXd snr = Eigen::VectorXd::Constant(cb.beams, radio.snr_floor_db);
  if (rays.empty()) return snr;

  std::vector<double> rel_deg(rays.size());
  for (std::size_t r = 0; r < rays.size(); ++r)
    rel_deg[r] = rad2deg(wrap_angle(rays[r].departure_az - deg2rad(boresight)));

  for (int m = 0; m < cb.beams; ++m) {
    double rx_lin = 0.0;
    for (std::size_t r = 0; r < rays.size(); ++r)
      rx_lin += rays[r].gain * db_to_linear(cb.gain_db(m, rel_deg[r]));
    if (rx_lin <= 0.0) continue;
    const double rx_dbm = radio.tx_power_dbm + linear_to_db(rx_lin);
    snr[m] = std::max(radio.snr_floor_db, rx_dbm - radio.noise_dbm);
  }
  return snr;
}

double lb_snr(const Vec3& user_pos, const Scene& scene, const RadioParams& radio) {
  const double d = std::max((user_pos - scene.lb_pos).norm(), 1.0);
  const double path_loss = radio.lb_ref_loss_db + 10.0 * radio.lb_pathloss_exp * std::log10(d);
  return radio.tx_power_dbm - path_loss - radio.noise_dbm;
}

MeasurementVector align_and_measure(const Scene& scene, const RadioParams& radio,
                                    std::int64_t slot) {
  const int n = scene.n_mmaps();
  const int m = scene.codebook.beams;
  MeasurementVector mv;
  mv.snr_db.resize(n, m);
  mv.best_beam.resize(n, 0);
  const Vec3 user = scene.user.position3();
  for (int i = 0; i < n; ++i) {
    mv.snr_db.row(i) = snr_per_beam(i + 1, user, scene, radio).transpose();
    int best = 0;
    for (int b = 1; b < m; ++b)
      if (mv.snr_db(i, b) > mv.snr_db(i, best)) best = b;  // strict: ties keep lowest
    mv.best_beam[i] = best;
  }
  mv.lb_snr_db = lb_snr(user, scene, radio);
  mv.user_pos = scene.user.position;
  mv.slot = slot;
  return mv;
}

ChannelRealization realize_channel(Scene& scene, int window_slots, double slot_s,
                                   const RadioParams& radio, double gamma_db) {
  if (window_slots < 1) throw InputError("realize_channel: window must be >= 1 slots");
  if (!std::isfinite(gamma_db)) throw InputError("realize_channel: gamma must be finite");

  const MeasurementVector align = align_and_measure(scene, radio);
  const int n = scene.n_mmaps();

  ChannelRealization ch;
  ch.best_beam = align.best_beam;
  ch.g.resize(n + 1, window_slots);
  for (int k = 0; k < window_slots; ++k) {
    advance(scene, slot_s);
    const Vec3 user = scene.user.position3();
    ch.g(0, k) = lb_snr(user, scene, radio) >= gamma_db ? 1 : 0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd snr = snr_per_beam(i + 1, user, scene, radio);
      ch.g(i + 1, k) = snr[ch.best_beam[i]] >= gamma_db ? 1 : 0;
    }
  }
  return ch;
}

void write_channel_csv(std::ostream& out, const ChannelRealization& ch) {
  for (int i = 0; i < ch.links(); ++i) {
    for (int k = 0; k < ch.slots(); ++k) {
      if (k) out << ',';
      out << int(ch.g(i, k));
    }
    out << '\n';
  }
}

void write_channel_csv(const std::string& path, const ChannelRealization& ch) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_channel_csv(f, ch);
}

ChannelRealization read_channel_csv(std::istream& in) {
  std::vector<std::vector<std::uint8_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::uint8_t> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const int v = std::stoi(cell);
      if (v != 0 && v != 1) throw InputError("channel csv: entries must be 0 or 1");
      row.push_back(static_cast<std::uint8_t>(v));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("channel csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("channel csv: empty input");
  ChannelRealization ch;
  ch.g.resize(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) ch.g(i, k) = rows[i][k];
  ch.best_beam.assign(rows.size() - 1, 0);
  return ch;
}

ChannelRealization read_channel_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  return read_channel_csv(f);
}

namespace {
std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_measurements_csv(std::ostream& out, const std::vector<MeasurementVector>& ms) {
  if (ms.empty()) throw InputError("measurements csv: empty input");
  const int n = ms.front().n_mmaps();
  const int m = ms.front().n_beams();
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < m; ++b) out << "snr_ap" << (i + 1) << "_b" << b << ',';
  out << "lb_snr,user_x,user_y,slot";
  for (int i = 0; i < n; ++i) out << ",best_beam_ap" << (i + 1);
  out << '\n';
  for (const auto& mv : ms) {
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < m; ++b) out << fmt_double(mv.snr_db(i, b)) << ',';
    out << fmt_double(mv.lb_snr_db) << ',' << fmt_double(mv.user_pos.x()) << ','
        << fmt_double(mv.user_pos.y()) << ',' << mv.slot;
    for (int i = 0; i < n; ++i) out << ',' << mv.best_beam[i];
    out << '\n';
  }
}

void write_measurements_csv(const std::string& path, const std::vector<MeasurementVector>& ms) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_measurements_csv(f, ms);
}

}  // namespace mmcs
