#include "mmcs/scheduling.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace mmcs {

std::string schedule_result_to_json(const ScheduleResult& r) {
  nlohmann::ordered_json j;
  j["feasible"] = r.feasible;
  if (r.combination)
    j["combination"] = *r.combination;
  else
    j["combination"] = nullptr;
  j["cost"] = r.cost;
  j["successes"] = r.successes;
  j["failures"] = r.failures;
  j["transmissions"] = r.transmissions;
  j["lb_transmissions"] = r.lb_transmissions;
  j["stop_slot"] = r.stop_slot;
  j["slot_transmissions"] = r.slot_transmissions;
  return j.dump();
}

ScheduleResult genie_solve(const ChannelRealization& g, const QosRequirement& qos,
                           const CostVector& costs) {
  qos.validate();
  costs.validate();
  const int links = g.links();
  const int slots = g.slots();
  if (costs.links() != links) throw InputError("genie_solve: cost/link dimension mismatch");

  // Available (link, slot) pairs sorted once by (cost, slot, link); for any
  // combination the optimal schedule is the first D pairs within it.
  struct Pair {
    double cost;
    int slot, link;
  };
  std::vector<Pair> avail;
  for (int i = 0; i < links; ++i)
    for (int k = 0; k < slots; ++k)
      if (g.g(i, k)) avail.push_back({costs.c(i), k, i});
  std::sort(avail.begin(), avail.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.cost, a.slot, a.link) < std::tie(b.cost, b.slot, b.link);
  });

  const CombinationSet set = enumerate_combinations(links);
  const int d = qos.packets;

  bool have_best = false;
  double best_cost = 0.0;
  int best_j = 0;
  std::vector<const Pair*> best_pick, pick;
  for (const LinkCombination& combo : set.combos) {
    pick.clear();
    double cost = 0.0;
    for (const Pair& p : avail) {
      if (static_cast<int>(pick.size()) == d) break;
      if (!combo.contains(p.link)) continue;
      pick.push_back(&p);
      cost += p.cost;
    }
    if (static_cast<int>(pick.size()) < d) continue;
    const auto key = std::make_tuple(cost, combo.size(), combo.index());
    if (!have_best || key < std::make_tuple(best_cost, set[best_j].size(), best_j)) {
      have_best = true;
      best_cost = cost;
      best_j = combo.index();
      best_pick = pick;
    }
  }

  ScheduleResult r;
  if (!have_best) return r;  // infeasible
  r.feasible = true;
  r.combination = best_j;
  r.cost = best_cost;
  r.successes = d;
  r.failures = 0;
  r.transmissions = d;
  int stop = 0;
  for (const Pair* p : best_pick) stop = std::max(stop, p->slot + 1);
  r.stop_slot = stop;
  r.slot_transmissions.assign(stop, {});
  for (const Pair* p : best_pick) r.slot_transmissions[p->slot].push_back(p->link);
  for (auto& links_in_slot : r.slot_transmissions) std::sort(links_in_slot.begin(), links_in_slot.end());
  for (const Pair* p : best_pick)
    if (p->link == 0) ++r.lb_transmissions;
  return r;
}

ScheduleResult consecutive_cost(LinkCombination combo, const ChannelRealization& g,
                                const QosRequirement& qos, const CostVector& costs) {
  qos.validate();
  costs.validate();
  const int links = g.links();
  const int slots = g.slots();
  if (costs.links() != links) throw InputError("consecutive_cost: cost/link dimension mismatch");

  const std::vector<int> members = combo.members();
  const int d = qos.packets;

  ScheduleResult r;
  r.combination = combo.index();
  int delivered = 0;
  for (int k = 0; k < slots && delivered < d; ++k) {
    std::vector<int> used;
    used.reserve(members.size());
    for (int link : members) {
      if (link >= links) throw InputError("consecutive_cost: combination references missing link");
      ++r.transmissions;
      r.cost += costs.c(link);
      if (link == 0) ++r.lb_transmissions;
      if (g.g(link, k))
        ++delivered;
      else
        ++r.failures;
      used.push_back(link);
    }
    r.slot_transmissions.push_back(std::move(used));
    r.stop_slot = k + 1;
  }
  r.successes = std::min(delivered, d);
  r.feasible = delivered >= d;
  return r;
}

ScheduleResult execute_policy(LinkCombination combo, const ChannelRealization& g,
                              const QosRequirement& qos, const CostVector& costs) {
  return consecutive_cost(combo, g, qos, costs);
}

Label label_sample(const ChannelRealization& g, const QosRequirement& qos,
                   const CostVector& costs) {
  const CombinationSet set = enumerate_combinations(g.links());
  bool have_best = false;
  double best_cost = 0.0;
  int best_j = 0;
  for (const LinkCombination& combo : set.combos) {
    const ScheduleResult r = consecutive_cost(combo, g, qos, costs);
    if (!r.feasible) continue;
    const auto key = std::make_tuple(r.cost, combo.size(), combo.index());
    if (!have_best || key < std::make_tuple(best_cost, set[best_j].size(), best_j)) {
      have_best = true;
      best_cost = r.cost;
      best_j = combo.index();
    }
  }
  return Label{have_best ? best_j : 0};
}

ScheduleResult greedy_multi_x(const ChannelRealization& g, const QosRequirement& qos,
                              const CostVector& costs) {
  return consecutive_cost(LinkCombination::all(g.links()), g, qos, costs);
}

LinkCombination min_multi_x(const MeasurementVector& m, const QosRequirement& qos) {
  qos.validate();
  const int n_links = m.n_mmaps() + 1;
  const int want = (qos.packets + qos.deadline_slots - 1) / qos.deadline_slots;
  const int take = std::min(want, n_links);

  std::vector<std::pair<double, int>> scored;  // (-score, link) so sorting is ascending
  scored.reserve(n_links);
  scored.emplace_back(-m.lb_snr_db, 0);
  for (int i = 0; i < m.n_mmaps(); ++i) scored.emplace_back(-m.snr_db.row(i).maxCoeff(), i + 1);
  std::sort(scored.begin(), scored.end());  // score desc, link index asc on ties

  LinkCombination combo;
  for (int r = 0; r < take; ++r) combo.mask |= 1u << scored[r].second;
  return combo;
}

}  // namespace mmcs
