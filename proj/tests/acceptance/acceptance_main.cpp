// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
//
// Usage: acceptance <path-to-mmcs-cli>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mmcs/config.hpp"
#include "mmcs/parallel.hpp"
#include "mmcs/rng.hpp"

namespace fs = std::filesystem;
using namespace mmcs;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "C" << criterion << " " << detail << "\n";
  std::cout.flush();
  if (!pass) ++g_failures;
}

void note(const std::string& s) {
  std::cout << "  ... " << s << "\n";
  std::cout.flush();
}

// ---------------------------------------------------------------------------
// Shared scenario definitions (desk scale).

SceneConfig street_scene(UserClass user) {
  SceneConfig c;
  c.area = Rect{0, 0, 60, 60};
  c.mmaps.push_back({Vec3(0, 30, 10), 0.0, 0});
  c.mmaps.push_back({Vec3(60, 30, 10), 180.0, 0});
  c.mmaps.push_back({Vec3(30, 0, 10), 90.0, 0});
  c.lb_pos = Vec3(30, 30, 10);
  c.fixed_obstacles.emplace_back(Vec3(8, 8, 0), Vec3(20, 20, 12));
  c.fixed_obstacles.emplace_back(Vec3(40, 8, 0), Vec3(52, 20, 12));
  c.fixed_obstacles.emplace_back(Vec3(8, 40, 0), Vec3(20, 52, 12));
  c.fixed_obstacles.emplace_back(Vec3(40, 40, 0), Vec3(52, 52, 12));
  c.user_class = user;
  c.user_height = 1.5;
  if (user == UserClass::small_vehicle) {
    c.pedestrian_density = 0.03;
    c.small_vehicle_density = 0.005;
    c.large_vehicle_density = 0.005;
  } else {
    c.pedestrian_density = 0.03;
  }
  return c;
}

ExperimentParams scenario(UserClass user) {
  ExperimentParams p;
  p.scene = street_scene(user);
  p.radio = RadioParams{};
  p.qos = {100, 50};
  p.costs = CostVector::uniform(4, 100.0, 1.0);
  p.gamma_db = 10.0;
  p.slot_s = 0.001;
  p.duration_slots = 10000;  // 200 windows per realization
  return p;
}

std::vector<Realization> generate_range(const ExperimentParams& p, std::uint64_t base, int lo,
                                        int hi) {
  std::vector<Realization> out(hi - lo);
  parallel_for(out.size(), default_workers(), [&](std::size_t i) {
    const int id = lo + static_cast<int>(i);
    out[i] = generate_realization(p, derive_seed(base, id), id);
  });
  return out;
}

ForestParams forest_params(int trees, std::uint64_t seed) {
  ForestParams fp;
  fp.trees = trees;
  fp.max_depth = 20;
  fp.classes = 16;
  fp.seed = seed;
  return fp;
}

// ---------------------------------------------------------------------------
// C1/C2 oracles (independent of the library implementations).

struct Instance {
  ChannelRealization g;
  QosRequirement qos;
  CostVector costs;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 2), k_dist(1, 4), d_dist(0, 4);
  std::uniform_real_distribution<double> p_dist(0.1, 0.9);
  std::uniform_int_distribution<int> mm_cost(1, 9), lb_cost(50, 150);
  Instance inst;
  const int links = n_dist(rng) + 1;
  const int slots = k_dist(rng);
  inst.g.g.resize(links, slots);
  std::bernoulli_distribution bit(p_dist(rng));
  for (int i = 0; i < links; ++i)
    for (int k = 0; k < slots; ++k) inst.g.g(i, k) = bit(rng) ? 1 : 0;
  inst.g.best_beam.assign(links - 1, 0);
  inst.qos = {d_dist(rng), slots};
  inst.costs.c = Eigen::VectorXd(links);
  inst.costs.c(0) = lb_cost(rng);
  for (int i = 1; i < links; ++i) inst.costs.c(i) = mm_cost(rng);
  return inst;
}

// Enumerates every (combination, transmission set) assignment.
std::pair<bool, double> brute_force_ip(const Instance& inst) {
  const int links = inst.g.links();
  const int slots = inst.g.slots();
  const int bits = links * slots;
  bool feasible = false;
  double best = 0.0;
  for (std::uint32_t combo = 0; combo < (1u << links); ++combo) {
    for (std::uint32_t y = 0; y < (1u << bits); ++y) {
      int delivered = 0;
      double cost = 0.0;
      bool valid = true;
      for (int i = 0; i < links && valid; ++i) {
        for (int k = 0; k < slots; ++k) {
          if (!((y >> (i * slots + k)) & 1u)) continue;
          if (!((combo >> i) & 1u)) {
            valid = false;
            break;
          }
          cost += inst.costs.c(i);
          if (inst.g.g(i, k)) ++delivered;
        }
      }
      if (!valid || delivered < inst.qos.packets) continue;
      if (!feasible || cost < best) {
        feasible = true;
        best = cost;
      }
    }
  }
  return {feasible, best};
}

// Plain re-simulation of the consecutive rule over all combinations.
int brute_force_label(const Instance& inst) {
  const int links = inst.g.links();
  bool found = false;
  double best_cost = 0;
  int best_links = 0, best_j = 0;
  for (int j = 0; j < (1 << links); ++j) {
    int delivered = 0;
    double cost = 0;
    for (int k = 0; k < inst.g.slots() && delivered < inst.qos.packets; ++k) {
      for (int i = 0; i < links; ++i) {
        if (!((j >> i) & 1)) continue;
        cost += inst.costs.c(i);
        if (inst.g.g(i, k)) ++delivered;
      }
    }
    if (delivered < inst.qos.packets) continue;
    int nl = 0;
    for (int i = 0; i < links; ++i) nl += (j >> i) & 1;
    const auto key = std::make_tuple(cost, nl, j);
    if (!found || key < std::make_tuple(best_cost, best_links, best_j)) {
      found = true;
      best_cost = cost;
      best_links = nl;
      best_j = j;
    }
  }
  return found ? best_j : 0;
}

void criterion_1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = random_instance(rng);
    const auto [feasible, cost] = brute_force_ip(inst);
    const ScheduleResult fast = genie_solve(inst.g, inst.qos, inst.costs);
    if (fast.feasible != feasible) ++mismatches;
    else if (feasible && std::abs(fast.cost - cost) > 1e-9) ++mismatches;
  }
  const double dt = seconds_since(t0);
  report(1, mismatches == 0 && dt < 10.0,
         "IP solver vs exhaustive brute force: " + std::to_string(200 - mismatches) +
             "/200 matched in " + std::to_string(dt) + "s (budget 10s)");
}

void criterion_2() {
  std::mt19937_64 rng(2002);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = random_instance(rng);
    if (label_sample(inst.g, inst.qos, inst.costs).class_index != brute_force_label(inst))
      ++mismatches;
  }
  report(2, mismatches == 0,
         "label generator vs consecutive-rule brute force: " + std::to_string(200 - mismatches) +
             "/200 matched");
}

void criterion_3() {
  const CombinationSet s = enumerate_combinations(4);
  bool ok = s.size() == 16 && s[0].empty() && s[15] == LinkCombination::all(4);
  std::vector<bool> seen(16, false);
  for (const auto& c : s.combos) {
    if (c.mask < 16 && !seen[c.mask]) seen[c.mask] = true;
    else ok = false;
  }
  report(3, ok, "combination space: 16 distinct strategies, empty set first, all links last");
}

void criterion_4() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;

  // (a) probability normalization on 1000 random inputs.
  {
    std::mt19937_64 rng(3003);
    std::uniform_real_distribution<double> v(-40, 40);
    std::uniform_int_distribution<int> label(0, 15);
    std::vector<TrainingSample> samples;
    for (int i = 0; i < 600; ++i) {
      TrainingSample s;
      s.x = Eigen::VectorXd(8);
      for (int f = 0; f < 8; ++f) s.x[f] = v(rng);
      s.label = label(rng);
      samples.push_back(std::move(s));
    }
    const Forest forest = train_forest(samples, forest_params(30, 4), default_workers());
    for (int i = 0; i < 1000 && ok; ++i) {
      Eigen::VectorXd x(8);
      for (int f = 0; f < 8; ++f) x[f] = v(rng);
      if (std::abs(predict_proba(forest, x).p.sum() - 1.0) > 1e-9) ok = false;
    }
    if (!ok) detail = "probability normalization failed";
  }

  // (b) best_split equals exhaustive search on 100 micro datasets.
  if (ok) {
    std::mt19937_64 rng(3004);
    std::uniform_int_distribution<int> n_dist(2, 12), f_dist(1, 2), c_dist(2, 3);
    std::uniform_real_distribution<double> v_dist(-5, 5);
    for (int trial = 0; trial < 100 && ok; ++trial) {
      const int n = n_dist(rng);
      const int dim = f_dist(rng);
      const int classes = c_dist(rng);
      std::vector<TrainingSample> samples;
      std::uniform_int_distribution<int> label(0, classes - 1);
      for (int i = 0; i < n; ++i) {
        TrainingSample s;
        s.x = Eigen::VectorXd(dim);
        for (int f = 0; f < dim; ++f) s.x[f] = v_dist(rng);
        s.label = label(rng);
        samples.push_back(std::move(s));
      }
      std::vector<int> features(dim);
      std::iota(features.begin(), features.end(), 0);

      // Exhaustive oracle over all (feature, midpoint) candidates.
      bool oracle_found = false;
      double oracle_best = 0.0;
      for (int f = 0; f < dim; ++f) {
        std::vector<double> vals;
        for (const auto& s : samples) vals.push_back(s.x[f]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
          const double thr = (vals[i] + vals[i + 1]) / 2.0;
          std::vector<std::size_t> lc(classes, 0), rc(classes, 0);
          for (const auto& s : samples) (s.x[f] <= thr ? lc : rc)[s.label]++;
          std::size_t nl = 0, nr = 0;
          for (auto c : lc) nl += c;
          for (auto c : rc) nr += c;
          if (nl == 0 || nr == 0) continue;
          const double w = (nl * gini(lc) + nr * gini(rc)) / samples.size();
          if (!oracle_found || w < oracle_best) {
            oracle_found = true;
            oracle_best = w;
          }
        }
      }

      const auto mine = best_split(samples, features);
      bool pure = true;
      for (const auto& s : samples) pure = pure && s.label == samples.front().label;
      if (!mine.has_value()) {
        if (!pure && oracle_found) ok = false;
        continue;
      }
      if (!oracle_found) {
        ok = false;
        continue;
      }
      std::vector<std::size_t> lc(classes, 0), rc(classes, 0);
      for (const auto& s : samples) (s.x[mine->feature] <= mine->threshold ? lc : rc)[s.label]++;
      std::size_t nl = 0, nr = 0;
      for (auto c : lc) nl += c;
      for (auto c : rc) nr += c;
      if (nl == 0 || nr == 0) {
        ok = false;
        continue;
      }
      const double w = (nl * gini(lc) + nr * gini(rc)) / samples.size();
      if (std::abs(w - oracle_best) > 1e-9) ok = false;
    }
    if (!ok && detail.empty()) detail = "best_split diverged from exhaustive search";
  }

  // (c) held-out accuracy on a separable two-class problem.
  double accuracy = 0.0;
  if (ok) {
    std::mt19937_64 rng(3005);
    std::uniform_real_distribution<double> v(0, 1);
    std::vector<TrainingSample> train, test;
    int produced = 0;
    while (produced < 2000) {
      const double a = v(rng);
      const double b = v(rng);
      if (std::abs(a + b - 1.0) < 0.05) continue;
      TrainingSample s;
      s.x = Eigen::VectorXd(2);
      s.x << a, b;
      s.label = a + b > 1.0 ? 1 : 0;
      ((produced % 2) ? train : test).push_back(s);
      ++produced;
    }
    ForestParams fp = forest_params(50, 6);
    fp.classes = 2;
    const Forest forest = train_forest(train, fp, default_workers());
    std::size_t correct = 0;
    for (const auto& s : test) correct += predict_proba(forest, s.x).argmax == s.label;
    accuracy = static_cast<double>(correct) / test.size();
    if (accuracy < 0.95) {
      ok = false;
      detail = "held-out accuracy " + std::to_string(accuracy);
    }
  }

  const double dt = seconds_since(t0);
  if (dt >= 60.0) {
    ok = false;
    detail += " (over 60s budget)";
  }
  report(4, ok,
         "forest correctness: sum(p)=1 x1000, split oracle x100, separable accuracy " +
             std::to_string(accuracy) + ", " + std::to_string(dt) + "s (budget 60s)" +
             (detail.empty() ? "" : " -- " + detail));
}

// ---------------------------------------------------------------------------

struct Lab {
  ExperimentParams params;
  std::vector<Realization> test;
  std::vector<TrainingSample> samples;
  Forest forest;
  PolicyEval genie, greedy, minmx, forest0;
  double gen_train_s = 0, train_s = 0, eval_s = 0;
};

Lab build_lab(UserClass user, int train_realizations, std::uint64_t train_base,
              std::uint64_t test_base, std::uint64_t forest_seed) {
  Lab lab;
  lab.params = scenario(user);

  auto t0 = Clock::now();
  const auto train = generate_range(lab.params, train_base, 0, train_realizations);
  lab.samples = collect_samples(train);
  lab.gen_train_s = seconds_since(t0);

  t0 = Clock::now();
  lab.forest = train_forest(lab.samples, forest_params(200, forest_seed), default_workers());
  lab.train_s = seconds_since(t0);

  t0 = Clock::now();
  lab.test = generate_range(lab.params, test_base, 0, 10);
  lab.genie = evaluate_policy(PolicyKind::genie, lab.test, lab.params.qos, lab.params.costs);
  lab.greedy = evaluate_policy(PolicyKind::greedy, lab.test, lab.params.qos, lab.params.costs);
  lab.minmx =
      evaluate_policy(PolicyKind::min_multi_x, lab.test, lab.params.qos, lab.params.costs);
  lab.forest0 = evaluate_policy(PolicyKind::forest, lab.test, lab.params.qos, lab.params.costs,
                                &lab.forest, 0.0);
  lab.eval_s = seconds_since(t0);
  return lab;
}

long long sum_lb(const PolicyEval& e) {
  long long v = 0;
  for (const auto& r : e.episodes) v += r.lb_transmissions;
  return v;
}

long long sum_failures(const PolicyEval& e) {
  long long v = 0;
  for (const auto& r : e.episodes) v += r.failures;
  return v;
}

void criterion_5(const Lab& veh) {
  const std::vector<double> betas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<PolicyEval> evals;
  for (double beta : betas)
    evals.push_back(evaluate_policy(PolicyKind::forest, veh.test, veh.params.qos,
                                    veh.params.costs, &veh.forest, beta));
  bool monotone = true;
  std::ostringstream track;
  for (std::size_t i = 0; i + 1 < evals.size(); ++i) {
    if (evals[i + 1].kpis.completed_fraction < evals[i].kpis.completed_fraction - 1e-12)
      monotone = false;
    if (sum_lb(evals[i + 1]) < sum_lb(evals[i])) monotone = false;
    if (sum_failures(evals[i + 1]) < sum_failures(evals[i])) monotone = false;
  }
  for (std::size_t i = 0; i < evals.size(); ++i)
    track << (i ? " " : "") << evals[i].kpis.completed_fraction;

  // beta = 1 must reproduce Greedy Multi-x exactly, episode by episode.
  bool exact = evals.back().episodes.size() == veh.greedy.episodes.size();
  for (std::size_t i = 0; exact && i < veh.greedy.episodes.size(); ++i) {
    const auto& a = evals.back().episodes[i];
    const auto& b = veh.greedy.episodes[i];
    exact = a.feasible == b.feasible && a.cost == b.cost && a.successes == b.successes &&
            a.failures == b.failures && a.transmissions == b.transmissions &&
            a.lb_transmissions == b.lb_transmissions;
  }
  report(5, monotone && exact,
         "beta sweep monotone (completed/lb/failures) over {0,.25,.5,.75,1}; completed: [" +
             track.str() + "]; beta=1 == greedy: " + (exact ? "yes" : "no"));
}

void criterion_6(const Lab& veh) {
  // (a) Greedy completes every genie-feasible episode.
  bool greedy_covers = true;
  for (std::size_t i = 0; i < veh.genie.episodes.size(); ++i)
    if (veh.genie.episodes[i].feasible && !veh.greedy.episodes[i].feasible) greedy_covers = false;

  // (b) the genie never transmits into a blocked slot.
  const bool genie_clean = sum_failures(veh.genie) == 0;

  // (c) the forest beats Min Multi-x on completions without extra failures.
  const double f_completed = veh.forest0.kpis.completed_fraction;
  const double m_completed = veh.minmx.kpis.completed_fraction;
  const double f_failed = veh.forest0.kpis.failed_fraction.value_or(0.0);
  const double m_failed = veh.minmx.kpis.failed_fraction.value_or(0.0);
  const bool ordering = f_completed >= m_completed && f_failed <= m_failed + 0.02;

  const double total = veh.gen_train_s + veh.train_s + veh.eval_s;
  const bool in_budget = total < 600.0 && veh.samples.size() >= 10000;

  std::ostringstream os;
  os << "policy ordering: greedy covers genie " << (greedy_covers ? "yes" : "no")
     << "; genie failures 0 " << (genie_clean ? "yes" : "no") << "; forest(0) completed "
     << f_completed << " vs minmx " << m_completed << ", failed " << f_failed << " vs "
     << m_failed << "; " << veh.samples.size() << " samples, " << total
     << "s end-to-end (budget 600s)";
  report(6, greedy_covers && genie_clean && ordering && in_budget, os.str());
}

void criterion_7(const Lab& veh, const Lab& ped) {
  const double veh_gap =
      std::abs(veh.forest0.kpis.completed_fraction - veh.genie.kpis.completed_fraction);
  const double ped_gap =
      std::abs(ped.forest0.kpis.completed_fraction - ped.genie.kpis.completed_fraction);
  std::ostringstream os;
  os << "pedestrian gap to genie " << ped_gap << " <= vehicle gap " << veh_gap;
  report(7, ped_gap <= veh_gap + 1e-12, os.str());
}

void criterion_8(const Lab& veh, const std::vector<TrainingSample>& pool) {
  const auto cells = sweep_training(forest_params(200, 8), {1000, 10000, 50000}, {200}, pool,
                                    veh.test, veh.params.qos, veh.params.costs, 99,
                                    default_workers());
  bool trend = true;
  std::ostringstream track;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    track << (i ? " " : "") << cells[i].report.completed_fraction;
    if (i > 0 &&
        cells[i].report.completed_fraction < cells[i - 1].report.completed_fraction - 0.02)
      trend = false;
  }
  report(8, trend,
         "completed fraction vs training size {1k,10k,50k} @200 trees: [" + track.str() +
             "] non-decreasing within 0.02");
}

// ---------------------------------------------------------------------------

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion_9(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "mmcs_acceptance_c9";
  fs::remove_all(root);
  fs::create_directories(root);

  // Small but end-to-end config; scene inline so the config is one file.
  const std::string config = R"({
    "scene": {
      "area": [0, 0, 60, 60],
      "mmaps": [
        {"position": [0, 30, 10], "boresight_deg": 0},
        {"position": [60, 30, 10], "boresight_deg": 180}
      ],
      "lb_bs": {"position": [30, 30, 10]},
      "fixed_obstacles": [{"min": [20, 38, 0], "max": [40, 50, 12]}],
      "densities": {"pedestrian": 0.02, "small_vehicle": 0.004},
      "user": {"class": "small_vehicle"},
      "seed": 1
    },
    "qos": {"d": 40, "k": 50},
    "realizations": {"train": 4, "test": 2, "duration_slots": 1000},
    "forest": {"trees": 20},
    "betas": [0.0, 1.0],
    "workers": 2
  })";
  std::ofstream(root / "config.json") << config;

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >> " + (root / "log.txt").string() + " 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  bool ok = true;
  for (const std::string tag : {"a", "b"}) {
    const fs::path dir = root / tag;
    ok = ok && run("generate --config " + (root / "config.json").string() + " --out " +
                   (dir / "gen").string());
    ok = ok && run("train --config " + (root / "config.json").string() + " --dataset " +
                   (dir / "gen" / "dataset.csv").string() + " --out " + (dir / "model").string());
    ok = ok && run("evaluate --config " + (root / "config.json").string() + " --model " +
                   (dir / "model" / "model.bin").string() + " --out " + (dir / "eval").string());
  }
  std::string mismatch;
  if (ok) {
    const std::vector<std::string> files = {"gen/dataset.csv", "gen/manifest.json",
                                            "model/model.bin", "eval/kpi.csv", "eval/kpi.json"};
    for (const auto& f : files) {
      if (read_file(root / "a" / f) != read_file(root / "b" / f)) {
        ok = false;
        mismatch = f;
      }
      if (read_file(root / "a" / f).empty()) {
        ok = false;
        mismatch = f + " (empty)";
      }
    }
  } else {
    mismatch = "CLI invocation failed, see " + (root / "log.txt").string();
  }
  report(9, ok,
         "generate/train/evaluate twice from one config+seed: byte-identical dataset, model and "
         "KPI files" +
             (mismatch.empty() ? "" : " -- mismatch at " + mismatch));
}

void criterion_10() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(0, 60);
  bool ok = true;
  int checks = 0;

  // Blockage monotonicity and endpoint symmetry.
  SceneConfig cfg = street_scene(UserClass::small_vehicle);
  cfg.pedestrian_density = 0.005;
  cfg.small_vehicle_density = 0.002;
  for (int trial = 0; trial < 120 && ok; ++trial) {
    cfg.seed = 5000 + trial;
    Scene s = build_scene(cfg);
    for (int q = 0; q < 10; ++q) {
      const Vec3 a(u(rng), u(rng), 0.5 + u(rng) / 6);
      const Vec3 b(u(rng), u(rng), 0.5 + u(rng) / 6);
      const bool blocked = segment_blocked(a, b, s);
      if (blocked != segment_blocked(b, a, s)) ok = false;
      ++checks;

      Scene more = s;
      MovingObstacle extra;
      extra.position = Vec2(u(rng), u(rng));
      extra.width = 2.0;
      extra.length = 5.0;
      extra.height = 2.5;
      more.moving.push_back(extra);
      if (blocked && !segment_blocked(a, b, more)) ok = false;  // adding never unblocks
      ++checks;

      if (!s.moving.empty()) {
        Scene fewer = s;
        fewer.moving.erase(fewer.moving.begin() +
                           static_cast<long>(rng() % fewer.moving.size()));
        if (!blocked && segment_blocked(a, b, fewer)) ok = false;  // removing never blocks
        ++checks;
      }
    }
  }

  // Channel consistency: g equals the standalone threshold test, slot by slot.
  int g_checks = 0;
  for (int trial = 0; trial < 10 && ok; ++trial) {
    SceneConfig c2 = street_scene(UserClass::small_vehicle);
    c2.seed = 7000 + trial;
    Scene s = build_scene(c2);
    Scene replay = s;
    const RadioParams radio;
    const int K = 30;
    const ChannelRealization ch = realize_channel(s, K, 0.001, radio, 10.0);
    const MeasurementVector align = align_and_measure(replay, radio);
    for (int k = 0; k < K; ++k) {
      advance(replay, 0.001);
      const Vec3 user = replay.user.position3();
      if ((lb_snr(user, replay, radio) >= 10.0 ? 1 : 0) != ch.g(0, k)) ok = false;
      ++g_checks;
      for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXd snr = snr_per_beam(i + 1, user, replay, radio);
        if ((snr[align.best_beam[i]] >= 10.0 ? 1 : 0) != ch.g(i + 1, k)) ok = false;
        ++g_checks;
      }
    }
  }

  report(10, ok && checks >= 3000 && g_checks >= 1000,
         "simulator invariants: symmetry+monotonicity (" + std::to_string(checks) +
             " cases), g-consistency (" + std::to_string(g_checks) + " cases)");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-mmcs-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const auto t0 = Clock::now();

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();

  note("building vehicle lab: 250 train realizations (50k samples) + 10 test, 200-tree forest");
  Lab veh = build_lab(UserClass::small_vehicle, 250, 11, 12, 13);
  note("vehicle lab: gen " + std::to_string(veh.gen_train_s) + "s, train " +
       std::to_string(veh.train_s) + "s, eval " + std::to_string(veh.eval_s) + "s");

  criterion_5(veh);
  criterion_6(veh);

  note("building pedestrian lab: 250 train realizations + 10 test, 200-tree forest");
  const Lab ped = build_lab(UserClass::pedestrian, 250, 21, 22, 23);
  criterion_7(veh, ped);

  criterion_8(veh, veh.samples);

  criterion_9(cli);
  criterion_10();

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " ("
            << seconds_since(t0) << "s total)\n";
  return g_failures == 0 ? 0 : 1;
}
