#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <tuple>

#include "mmcs/errors.hpp"
#include "mmcs/scheduling.hpp"

using namespace mmcs;

namespace {

ChannelRealization make_g(int links, int slots, const std::vector<int>& bits) {
  ChannelRealization ch;
  ch.g.resize(links, slots);
  for (int i = 0; i < links; ++i)
    for (int k = 0; k < slots; ++k) ch.g(i, k) = bits[i * slots + k];
  ch.best_beam.assign(links - 1, 0);
  return ch;
}

ChannelRealization const_g(int links, int slots, int value) {
  ChannelRealization ch;
  ch.g.setConstant(links, slots, value);
  ch.best_beam.assign(links - 1, 0);
  return ch;
}

// Exhaustive minimization over every (combination, transmission-set)
// assignment: the reference the fast solver must match.
struct BruteForce {
  bool feasible = false;
  double cost = 0.0;
};

BruteForce brute_force_ip(const ChannelRealization& g, const QosRequirement& qos,
                          const CostVector& costs) {
  const int links = g.links();
  const int slots = g.slots();
  const int bits = links * slots;
  BruteForce best;
  for (std::uint32_t combo = 0; combo < (1u << links); ++combo) {
    for (std::uint32_t y = 0; y < (1u << bits); ++y) {
      int delivered = 0;
      double cost = 0.0;
      bool valid = true;
      for (int i = 0; i < links && valid; ++i) {
        for (int k = 0; k < slots; ++k) {
          if (!((y >> (i * slots + k)) & 1u)) continue;
          if (!((combo >> i) & 1u)) {
            valid = false;  // transmitting outside the selected combination
            break;
          }
          cost += costs.c(i);
          if (g.g(i, k)) ++delivered;
        }
      }
      if (!valid || delivered < qos.packets) continue;
      if (!best.feasible || cost < best.cost) {
        best.feasible = true;
        best.cost = cost;
      }
    }
  }
  return best;
}

// Independent re-simulation of the consecutive-transmission rule, kept
// deliberately plain for use as the label oracle.
int brute_force_label(const ChannelRealization& g, const QosRequirement& qos,
                      const CostVector& costs) {
  const int links = g.links();
  bool found = false;
  double best_cost = 0;
  int best_links = 0, best_j = 0;
  for (int j = 0; j < (1 << links); ++j) {
    int delivered = 0;
    double cost = 0;
    for (int k = 0; k < g.slots() && delivered < qos.packets; ++k) {
      for (int i = 0; i < links; ++i) {
        if (!((j >> i) & 1)) continue;
        cost += costs.c(i);
        if (g.g(i, k)) ++delivered;
      }
    }
    if (delivered < qos.packets) continue;
    int nl = 0;
    for (int i = 0; i < links; ++i) nl += (j >> i) & 1;
    if (!found || std::make_tuple(cost, nl, j) < std::make_tuple(best_cost, best_links, best_j)) {
      found = true;
      best_cost = cost;
      best_links = nl;
      best_j = j;
    }
  }
  return found ? best_j : 0;
}

struct RandomInstance {
  ChannelRealization g;
  QosRequirement qos;
  CostVector costs;
};

RandomInstance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 2), k_dist(1, 4), d_dist(0, 4);
  std::uniform_real_distribution<double> p_dist(0.1, 0.9);
  std::uniform_int_distribution<int> mm_cost(1, 9), lb_cost(50, 150);
  RandomInstance inst;
  const int links = n_dist(rng) + 1;
  const int slots = k_dist(rng);
  inst.g.g.resize(links, slots);
  const double p = p_dist(rng);
  std::bernoulli_distribution bit(p);
  for (int i = 0; i < links; ++i)
    for (int k = 0; k < slots; ++k) inst.g.g(i, k) = bit(rng) ? 1 : 0;
  inst.g.best_beam.assign(links - 1, 0);
  inst.qos = {d_dist(rng), slots};
  inst.costs.c = Eigen::VectorXd(links);
  inst.costs.c(0) = lb_cost(rng);
  for (int i = 1; i < links; ++i) inst.costs.c(i) = mm_cost(rng);
  return inst;
}

}  // namespace

TEST_CASE("combination space enumeration") {
  const CombinationSet s = enumerate_combinations(4);
  CHECK(s.size() == 16);
  CHECK(s[0].empty());
  CHECK(s[15] == LinkCombination::all(4));
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(s[j].index() == static_cast<int>(j));

  const CombinationSet tiny = enumerate_combinations(1);
  REQUIRE(tiny.size() == 2);
  CHECK(tiny[0].empty());
  CHECK(tiny[1].members() == std::vector<int>{0});

  LinkCombination c{0b0101};  // links 0 and 2
  CHECK(c.index() == 5);
  CHECK(c.members() == std::vector<int>{0, 2});

  CHECK_THROWS_AS(enumerate_combinations(0), InputError);
  CHECK_THROWS_AS(enumerate_combinations(17), InputError);
}

TEST_CASE("genie picks the cheap mm-wave slot") {
  // Rows: LB always on, mmAP only in slot 2.
  const ChannelRealization g = make_g(2, 2, {1, 1, 0, 1});
  const QosRequirement qos{1, 2};
  CostVector costs;
  costs.c = Eigen::VectorXd(2);
  costs.c << 100, 1;
  const ScheduleResult r = genie_solve(g, qos, costs);
  CHECK(r.feasible);
  CHECK(*r.combination == 0b10);
  CHECK(r.cost == doctest::Approx(1.0));
  CHECK(r.stop_slot == 2);
  CHECK(r.successes == 1);
  CHECK(r.failures == 0);
  CHECK(r.lb_transmissions == 0);
  REQUIRE(r.slot_transmissions.size() == 2);
  CHECK(r.slot_transmissions[0].empty());
  CHECK(r.slot_transmissions[1] == std::vector<int>{1});
}

TEST_CASE("genie trivial edges") {
  const CostVector costs = CostVector::uniform(3);
  const ScheduleResult zero = genie_solve(const_g(3, 4, 1), {0, 4}, costs);
  CHECK(zero.feasible);
  CHECK(*zero.combination == 0);
  CHECK(zero.cost == 0.0);
  CHECK(zero.stop_slot == 0);

  const ScheduleResult dead = genie_solve(const_g(3, 4, 0), {1, 4}, costs);
  CHECK_FALSE(dead.feasible);
  CHECK_FALSE(dead.combination.has_value());
}

TEST_CASE("genie matches exhaustive brute force on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomInstance inst = random_instance(rng);
    const BruteForce oracle = brute_force_ip(inst.g, inst.qos, inst.costs);
    const ScheduleResult fast = genie_solve(inst.g, inst.qos, inst.costs);
    REQUIRE(fast.feasible == oracle.feasible);
    if (oracle.feasible) CHECK(fast.cost == doctest::Approx(oracle.cost));
  }
}

TEST_CASE("consecutive transmission semantics") {
  const CostVector costs = CostVector::uniform(3, 100.0, 1.0);

  // Two perfect mm-wave links, D=4: both transmit twice.
  const ScheduleResult two = consecutive_cost(LinkCombination{0b110}, const_g(3, 3, 1), {4, 3}, costs);
  CHECK(two.feasible);
  CHECK(two.stop_slot == 2);
  CHECK(two.cost == doctest::Approx(4.0));
  CHECK(two.failures == 0);
  CHECK(two.successes == 4);
  for (const auto& slot : two.slot_transmissions) CHECK(slot.size() == 2);

  // Empty combination cannot deliver.
  const ScheduleResult none = consecutive_cost(LinkCombination{0}, const_g(3, 3, 1), {1, 3}, costs);
  CHECK_FALSE(none.feasible);
  CHECK(none.cost == 0.0);
  CHECK(none.transmissions == 0);

  // One link, first slot blocked: three transmissions, one failure.
  const ChannelRealization g = make_g(2, 3, {1, 1, 1, 0, 1, 1});
  CostVector c2 = CostVector::uniform(2, 100.0, 1.0);
  const ScheduleResult lossy = consecutive_cost(LinkCombination{0b10}, g, {2, 3}, c2);
  CHECK(lossy.feasible);
  CHECK(lossy.stop_slot == 3);
  CHECK(lossy.cost == doctest::Approx(3.0));
  CHECK(lossy.failures == 1);
  CHECK(lossy.successes == 2);
}

TEST_CASE("over-delivery in the final slot still costs") {
  const CostVector costs = CostVector::uniform(3, 100.0, 1.0);
  const ScheduleResult r = consecutive_cost(LinkCombination{0b110}, const_g(3, 3, 1), {3, 3}, costs);
  CHECK(r.feasible);
  CHECK(r.stop_slot == 2);
  CHECK(r.transmissions == 4);
  CHECK(r.cost == doctest::Approx(4.0));
  CHECK(r.successes == 3);  // clamped at D
  CHECK(r.failures == 0);
}

TEST_CASE("label picks the cheapest feasible combination with documented tie-breaks") {
  const CostVector costs = CostVector::uniform(4, 100.0, 1.0);
  // All-ones, D=100, K=50: two mm-wave links deliver exactly 100 at cost 100;
  // anything else is costlier or LB-taxed. {1,2} wins the tie on lowest index.
  CHECK(label_sample(const_g(4, 50, 1), {100, 50}, costs).class_index == 0b0110);
  CHECK(label_sample(const_g(4, 50, 0), {100, 50}, costs).class_index == 0);
  CHECK(label_sample(const_g(4, 50, 1), {0, 50}, costs).class_index == 0);
}

TEST_CASE("label matches the independent consecutive-rule oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomInstance inst = random_instance(rng);
    CHECK(label_sample(inst.g, inst.qos, inst.costs).class_index ==
          brute_force_label(inst.g, inst.qos, inst.costs));
  }
}

TEST_CASE("greedy uses all links and stops at D successes") {
  const CostVector costs = CostVector::uniform(4, 100.0, 1.0);
  const ScheduleResult r = greedy_multi_x(const_g(4, 50, 1), {4, 50}, costs);
  CHECK(r.feasible);
  CHECK(r.stop_slot == 1);
  CHECK(r.cost == doctest::Approx(103.0));
  CHECK(r.failures == 0);

  const ScheduleResult dead = greedy_multi_x(const_g(4, 50, 0), {1, 50}, costs);
  CHECK_FALSE(dead.feasible);
  CHECK(dead.transmissions == 4 * 50);
  CHECK(dead.failures == 4 * 50);

  CHECK(greedy_multi_x(const_g(4, 50, 1), {0, 50}, costs).cost == 0.0);
}

TEST_CASE("min multi-x ranks links by alignment SNR") {
  MeasurementVector m;
  m.snr_db.resize(3, 2);
  m.snr_db << 25, 3, 5, 2, 15, 1;  // best-beam scores: 25, 5, 15
  m.lb_snr_db = 12;
  m.best_beam = {0, 0, 0};

  CHECK(min_multi_x(m, {100, 50}).size() == 2);  // ceil(D/K) = 2
  CHECK(min_multi_x(m, {1, 50}) == LinkCombination{0b0010});
  CHECK(min_multi_x(m, {100, 50}) == LinkCombination{0b1010});  // mmAP1 and mmAP3
  CHECK(min_multi_x(m, {1000, 50}) == LinkCombination::all(4));  // saturation
}

TEST_CASE("execute_policy on the LB link alone") {
  const CostVector costs = CostVector::uniform(2, 100.0, 1.0);
  const ScheduleResult r = execute_policy(LinkCombination{0b01}, const_g(2, 10, 1), {2, 10}, costs);
  CHECK(r.feasible);
  CHECK(r.cost == doctest::Approx(200.0));
  CHECK(r.lb_transmissions == 2);
  CHECK(r.stop_slot == 2);
}

TEST_CASE("genie is never beaten by any executed combination") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomInstance inst = random_instance(rng);
    const ScheduleResult genie = genie_solve(inst.g, inst.qos, inst.costs);
    for (std::uint32_t j = 0; j < (1u << inst.g.links()); ++j) {
      const ScheduleResult run = execute_policy(LinkCombination{j}, inst.g, inst.qos, inst.costs);
      if (genie.feasible && run.feasible) CHECK(genie.cost <= run.cost + 1e-9);
      if (run.feasible) CHECK(genie.feasible);
      CHECK(run.successes <= inst.qos.packets);
    }
  }
}

TEST_CASE("all-links is feasible whenever any combination is") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomInstance inst = random_instance(rng);
    bool any = false;
    for (std::uint32_t j = 0; j < (1u << inst.g.links()); ++j)
      any = any || execute_policy(LinkCombination{j}, inst.g, inst.qos, inst.costs).feasible;
    const bool all_ok =
        execute_policy(LinkCombination::all(inst.g.links()), inst.g, inst.qos, inst.costs).feasible;
    if (any) CHECK(all_ok);
  }
}

TEST_CASE("scaling costs leaves the genie argmin unchanged") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomInstance inst = random_instance(rng);
    const ScheduleResult base = genie_solve(inst.g, inst.qos, inst.costs);
    CostVector scaled;
    scaled.c = inst.costs.c * 2.5;
    const ScheduleResult twice = genie_solve(inst.g, inst.qos, scaled);
    CHECK(base.feasible == twice.feasible);
    if (base.feasible) {
      CHECK(*base.combination == *twice.combination);
      CHECK(base.slot_transmissions == twice.slot_transmissions);
      CHECK(twice.cost == doctest::Approx(base.cost * 2.5));
    }
  }
}

TEST_CASE("label never returns a feasible class with higher cost than another") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomInstance inst = random_instance(rng);
    const int label = label_sample(inst.g, inst.qos, inst.costs).class_index;
    const ScheduleResult chosen =
        execute_policy(LinkCombination{static_cast<std::uint32_t>(label)}, inst.g, inst.qos,
                       inst.costs);
    for (std::uint32_t j = 0; j < (1u << inst.g.links()); ++j) {
      const ScheduleResult other = execute_policy(LinkCombination{j}, inst.g, inst.qos, inst.costs);
      if (other.feasible && chosen.feasible) CHECK(chosen.cost <= other.cost + 1e-9);
    }
  }
}

TEST_CASE("schedule result serializes to json") {
  const CostVector costs = CostVector::uniform(2, 100.0, 1.0);
  const ScheduleResult r = execute_policy(LinkCombination{0b11}, const_g(2, 4, 1), {2, 4}, costs);
  const std::string j = schedule_result_to_json(r);
  CHECK(j.find("\"feasible\":true") != std::string::npos);
  CHECK(j.find("\"cost\":101.0") != std::string::npos);
  CHECK(j.find("\"lb_transmissions\":1") != std::string::npos);
}
