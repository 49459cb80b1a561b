#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmcs/forest.hpp"
#include "mmcs/scheduling.hpp"

namespace mmcs {

// One scheduling window: the alignment measurement at k=0, the realized
// channel for k=1..K, and the modified-IP training label.
struct EpisodeRecord {
  int realization_id = 0;
  int window_index = 0;
  MeasurementVector m;
  ChannelRealization g;
  FeatureVector x;
  int label = 0;
};

struct Realization {
  std::uint64_t seed = 0;
  UserClass user_class = UserClass::pedestrian;
  int duration_slots = 0;
  std::vector<EpisodeRecord> windows;
};

struct ExperimentParams {
  SceneConfig scene;
  RadioParams radio;
  QosRequirement qos;
  CostVector costs;
  double gamma_db = 10.0;
  double slot_s = 0.001;
  int duration_slots = 10000;
};

// Feature layout: N*M per-beam SNRs (mmAP-major, beam-minor), LB SNR, D, K,
// user x, user y.
FeatureVector make_features(const MeasurementVector& m, const QosRequirement& qos);

Realization generate_realization(const ExperimentParams& params, std::uint64_t seed,
                                 int realization_id);

// Realization r uses seed derive_seed(base_seed, r); windows are labeled via
// the consecutive-transmission optimum. Deterministic for any worker count.
std::vector<Realization> generate_realizations(const ExperimentParams& params,
                                               std::uint64_t base_seed, int count, int workers);

std::vector<TrainingSample> collect_samples(const std::vector<Realization>& realizations);

enum class PolicyKind { genie, greedy, min_multi_x, forest };
const char* to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& s);

struct KpiReport {
  double completed_fraction = 0.0;
  std::optional<double> failed_fraction;  // failures / transmissions; empty if no transmissions
  std::optional<double> lb_fraction;      // LB transmissions / transmissions
  double mean_cost = 0.0;
  std::size_t episodes = 0;
  std::size_t genie_infeasible = 0;  // windows no strategy could complete
};

KpiReport compute_kpis(const std::vector<ScheduleResult>& results);

struct PolicyEval {
  KpiReport kpis;
  std::vector<ScheduleResult> episodes;  // aligned with window order
};

// Runs one policy over every window of the test realizations. The genie sees
// g; the baselines and the forest see only the k=0 measurement.
PolicyEval evaluate_policy(PolicyKind kind, const std::vector<Realization>& test,
                           const QosRequirement& qos, const CostVector& costs,
                           const Forest* forest = nullptr, double beta = 0.0);

std::vector<KpiReport> sweep_beta(const Forest& forest, const std::vector<Realization>& test,
                                  const std::vector<double>& betas, const QosRequirement& qos,
                                  const CostVector& costs);

struct TrainingSweepCell {
  std::size_t train_size = 0;
  int trees = 0;
  KpiReport report;
};

// Grid sweep over (training-set size, tree count); each cell trains on a
// prefix of one seeded shuffle of the training samples and reports forest
// KPIs at beta = 0.
std::vector<TrainingSweepCell> sweep_training(const ForestParams& base_params,
                                              const std::vector<std::size_t>& train_sizes,
                                              const std::vector<int>& tree_counts,
                                              const std::vector<TrainingSample>& train,
                                              const std::vector<Realization>& test,
                                              const QosRequirement& qos, const CostVector& costs,
                                              std::uint64_t shuffle_seed, int workers);

// --------------------------------------------------------------------------
// Files. Dataset CSV: feature columns in the documented order plus the label.

struct DatasetFile {
  std::vector<TrainingSample> samples;
  int n_mmaps = 0;
  int n_beams = 0;
};

void write_dataset_csv(std::ostream& out, const std::vector<TrainingSample>& samples,
                       int n_mmaps, int n_beams);
void write_dataset_csv(const std::string& path, const std::vector<TrainingSample>& samples,
                       int n_mmaps, int n_beams);
DatasetFile read_dataset_csv(std::istream& in);
DatasetFile read_dataset_csv(const std::string& path);

struct KpiRow {
  std::string policy;
  std::optional<double> beta;
  KpiReport report;
};

void write_kpi_csv(std::ostream& out, const std::vector<KpiRow>& rows);
void write_kpi_csv(const std::string& path, const std::vector<KpiRow>& rows);
std::string kpi_rows_to_json(const std::vector<KpiRow>& rows);

void write_training_sweep_csv(std::ostream& out, const std::vector<TrainingSweepCell>& cells);
void write_training_sweep_csv(const std::string& path, const std::vector<TrainingSweepCell>& cells);

}  // namespace mmcs
