#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmcs/channel.hpp"
#include "mmcs/combinations.hpp"

namespace mmcs {

struct QosRequirement {
  int packets = 0;         // D
  int deadline_slots = 1;  // K

  void validate() const {
    if (packets < 0) throw InputError("qos: D must be >= 0");
    if (deadline_slots < 1) throw InputError("qos: K must be >= 1");
  }
};

// Per-link transmission costs; index 0 is the LB-BS, which must dominate the
// mm-wave costs so the low band is only scheduled when needed.
struct CostVector {
  Eigen::VectorXd c;

  static CostVector uniform(int n_links, double lb_cost = 100.0, double mm_cost = 1.0) {
    CostVector cv;
    cv.c = Eigen::VectorXd::Constant(n_links, mm_cost);
    cv.c(0) = lb_cost;
    return cv;
  }

  int links() const { return static_cast<int>(c.size()); }

  void validate() const {
    if (c.size() < 1) throw InputError("costs: empty");
    for (int i = 1; i < c.size(); ++i) {
      if (c(i) < 1.0) throw InputError("costs: mm-wave cost must be >= 1");
      if (c(0) <= c(i)) throw InputError("costs: LB cost must dominate mm-wave costs");
    }
  }
};

struct ScheduleResult {
  bool feasible = false;
  std::optional<int> combination;                    // chosen strategy index
  std::vector<std::vector<int>> slot_transmissions;  // links used per executed slot
  double cost = 0.0;
  int successes = 0;  // clamped at D
  int failures = 0;   // transmissions on slots with g == 0
  int transmissions = 0;
  int lb_transmissions = 0;
  int stop_slot = 0;  // 1-based slot where delivery finished; 0 if none ran
};

std::string schedule_result_to_json(const ScheduleResult& r);

// Exact optimum of the genie-aided scheduling problem: picks the combination
// and per-slot transmissions of minimum total cost that deliver D packets
// within the window, using perfect knowledge of g. For a fixed combination the
// optimum takes the D cheapest (cost, slot, link)-ordered available slots, so
// the search over combinations is exhaustive and exact.
ScheduleResult genie_solve(const ChannelRealization& g, const QosRequirement& qos,
                           const CostVector& costs);

// Transmit on every link of `combo` in every slot until D packets got through
// or the window ends. Over-delivery in the final slot still costs and counts
// as transmissions; the reported success count is clamped at D.
ScheduleResult consecutive_cost(LinkCombination combo, const ChannelRealization& g,
                                const QosRequirement& qos, const CostVector& costs);

// Same mechanics as consecutive_cost; the name used on the evaluation path.
ScheduleResult execute_policy(LinkCombination combo, const ChannelRealization& g,
                              const QosRequirement& qos, const CostVector& costs);

struct Label {
  int class_index = 0;  // 0 encodes "do not transmit"
};

// Training label: cheapest feasible combination under consecutive-transmission
// semantics; ties prefer fewer links, then the lower index. The empty-set
// class when nothing is feasible.
Label label_sample(const ChannelRealization& g, const QosRequirement& qos,
                   const CostVector& costs);

// Baseline: all links, every slot.
ScheduleResult greedy_multi_x(const ChannelRealization& g, const QosRequirement& qos,
                              const CostVector& costs);

// Baseline: the ceil(D/K) links with the highest alignment SNR (best beam per
// mmAP, raw LB SNR for link 0); saturates at all links.
LinkCombination min_multi_x(const MeasurementVector& m, const QosRequirement& qos);

}  // namespace mmcs
