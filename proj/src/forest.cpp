#include "mmcs/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "mmcs/errors.hpp"
#include "mmcs/parallel.hpp"
#include "mmcs/rng.hpp"

namespace mmcs {

double gini(const std::vector<std::size_t>& counts) {
  std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw InputError("gini: empty histogram");
  double sumsq = 0.0;
  for (std::size_t c : counts) {
    const double f = static_cast<double>(c) / static_cast<double>(total);
    sumsq += f * f;
  }
  return 1.0 - sumsq;
}

namespace {

struct Scratch {
  std::vector<std::pair<double, int>> vals;
  std::vector<std::uint32_t> node_counts, left_counts, right_counts;
};

double valid_threshold(double lo, double hi) {
  const double mid = std::midpoint(lo, hi);
  return (mid >= lo && mid < hi) ? mid : lo;  // guards FP collapse onto hi
}

std::optional<Split> best_split_impl(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                     const std::vector<int>& rows,
                                     const std::vector<int>& feature_subset, int n_classes,
                                     Scratch& s) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;

  s.node_counts.assign(n_classes, 0);
  for (int r : rows) s.node_counts[y[r]]++;
  int live_classes = 0;
  double sumsq_total = 0.0;
  for (std::uint32_t c : s.node_counts) {
    if (c > 0) ++live_classes;
    sumsq_total += static_cast<double>(c) * c;
  }
  if (live_classes <= 1) return std::nullopt;

  const double nn = static_cast<double>(n);
  double best_weighted = std::numeric_limits<double>::infinity();
  int best_feature = -1;
  double best_threshold = 0.0;

  for (int f : feature_subset) {
    s.vals.clear();
    s.vals.reserve(n);
    for (int r : rows) s.vals.emplace_back(X(r, f), r);
    std::sort(s.vals.begin(), s.vals.end());
    if (s.vals.front().first == s.vals.back().first) continue;  // constant feature

    s.left_counts.assign(n_classes, 0);
    s.right_counts = s.node_counts;
    double ssl = 0.0, ssr = sumsq_total;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const int c = y[s.vals[i].second];
      ssl += 2.0 * s.left_counts[c] + 1.0;
      s.left_counts[c]++;
      ssr -= 2.0 * s.right_counts[c] - 1.0;
      s.right_counts[c]--;
      if (s.vals[i + 1].first <= s.vals[i].first) continue;  // threshold only between distinct values
      const double nl = static_cast<double>(i + 1);
      const double nr = nn - nl;
      const double weighted = (nl - ssl / nl + nr - ssr / nr) / nn;
      if (weighted < best_weighted) {
        best_weighted = weighted;
        best_feature = f;
        best_threshold = valid_threshold(s.vals[i].first, s.vals[i + 1].first);
      }
    }
  }

  if (best_feature < 0) return std::nullopt;
  const double parent = 1.0 - sumsq_total / (nn * nn);
  return Split{best_feature, best_threshold, std::max(0.0, parent - best_weighted)};
}

int infer_classes(const std::vector<int>& y, int configured) {
  if (configured > 0) return configured;
  int top = 0;
  for (int v : y) top = std::max(top, v);
  return top + 1;
}

struct Grower {
  const Eigen::MatrixXd& X;
  const std::vector<int>& y;
  const ForestParams& params;
  std::mt19937_64& rng;
  int n_classes;
  std::int64_t splits_remaining;
  Scratch scratch;
  std::vector<int> feature_pool;
  int subset_size;

  Grower(const Eigen::MatrixXd& X_, const std::vector<int>& y_, const ForestParams& p,
         std::mt19937_64& rng_, int n_classes_)
      : X(X_), y(y_), params(p), rng(rng_), n_classes(n_classes_) {
    const int dim = static_cast<int>(X.cols());
    subset_size = p.features_per_split > 0
                      ? std::min(p.features_per_split, dim)
                      : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim))));
    splits_remaining =
        p.max_leaves > 0 ? p.max_leaves - 1 : std::numeric_limits<std::int64_t>::max();
  }

  std::vector<int> draw_features() {
    const int dim = static_cast<int>(X.cols());
    feature_pool.resize(dim);
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    for (int i = 0; i < subset_size; ++i) {
      std::uniform_int_distribution<int> pick(i, dim - 1);
      std::swap(feature_pool[i], feature_pool[pick(rng)]);
    }
    return {feature_pool.begin(), feature_pool.begin() + subset_size};
  }

  int make_leaf(Tree& tree, const std::vector<int>& rows, int begin, int end) {
    TreeNode node;
    std::vector<std::uint32_t> hist(n_classes, 0);
    for (int i = begin; i < end; ++i) hist[y[rows[i]]]++;
    node.total = static_cast<std::uint32_t>(end - begin);
    for (int c = 0; c < n_classes; ++c)
      if (hist[c] > 0) node.counts.emplace_back(c, hist[c]);
    tree.nodes.push_back(std::move(node));
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  bool pure(const std::vector<int>& rows, int begin, int end) const {
    for (int i = begin + 1; i < end; ++i)
      if (y[rows[i]] != y[rows[begin]]) return false;
    return true;
  }

  int grow(Tree& tree, std::vector<int>& rows, int begin, int end, int depth) {
    const int n = end - begin;
    if (n < params.min_samples_split || depth >= params.max_depth || splits_remaining <= 0 ||
        pure(rows, begin, end))
      return make_leaf(tree, rows, begin, end);

    const std::vector<int> feats = draw_features();
    const std::vector<int> node_rows(rows.begin() + begin, rows.begin() + end);
    const auto split = best_split_impl(X, y, node_rows, feats, n_classes, scratch);
    if (!split) return make_leaf(tree, rows, begin, end);

    auto mid_it = std::stable_partition(
        rows.begin() + begin, rows.begin() + end,
        [&](int r) { return X(r, split->feature) <= split->threshold; });
    const int mid = static_cast<int>(mid_it - rows.begin());
    if (mid == begin || mid == end) return make_leaf(tree, rows, begin, end);

    --splits_remaining;
    TreeNode node;
    node.feature = split->feature;
    node.threshold = split->threshold;
    tree.nodes.push_back(std::move(node));
    const int self = static_cast<int>(tree.nodes.size()) - 1;
    const int left = grow(tree, rows, begin, mid, depth + 1);
    const int right = grow(tree, rows, mid, end, depth + 1);
    tree.nodes[self].left = left;
    tree.nodes[self].right = right;
    return self;
  }
};

}  // namespace

std::optional<Split> best_split(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                const std::vector<int>& rows,
                                const std::vector<int>& feature_subset, int n_classes) {
  Scratch scratch;
  return best_split_impl(X, y, rows, feature_subset, n_classes, scratch);
}

std::optional<Split> best_split(const std::vector<TrainingSample>& samples,
                                const std::vector<int>& feature_subset) {
  Eigen::MatrixXd X;
  std::vector<int> y;
  dataset_from_samples(samples, X, y);
  std::vector<int> rows(samples.size());
  std::iota(rows.begin(), rows.end(), 0);
  return best_split(X, y, rows, feature_subset, infer_classes(y, 0));
}

int Tree::leaf_for(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int at = 0;
  while (!nodes[at].is_leaf()) at = x[nodes[at].feature] <= nodes[at].threshold
                                        ? nodes[at].left
                                        : nodes[at].right;
  return at;
}

Tree grow_tree(const Eigen::MatrixXd& X, const std::vector<int>& y, std::vector<int> rows,
               const ForestParams& params, std::mt19937_64& rng, int n_classes) {
  if (rows.empty()) throw InputError("grow_tree: no samples");
  Tree tree;
  Grower grower(X, y, params, rng, n_classes);
  grower.grow(tree, rows, 0, static_cast<int>(rows.size()), 0);
  return tree;
}

Tree grow_tree(const std::vector<TrainingSample>& samples, const ForestParams& params,
               std::mt19937_64& rng) {
  Eigen::MatrixXd X;
  std::vector<int> y;
  dataset_from_samples(samples, X, y);
  std::vector<int> rows(samples.size());
  std::iota(rows.begin(), rows.end(), 0);
  return grow_tree(X, y, std::move(rows), params, rng, infer_classes(y, params.classes));
}

Forest train_forest(const Eigen::MatrixXd& X, const std::vector<int>& y,
                    const ForestParams& params, int workers) {
  if (X.rows() == 0 || y.empty()) throw InputError("train_forest: empty dataset");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw InputError("train_forest: feature/label size mismatch");
  if (params.trees < 1) throw InputError("train_forest: need at least one tree");

  Forest forest;
  forest.params = params;
  forest.n_features = static_cast<int>(X.cols());
  forest.n_classes = infer_classes(y, params.classes);
  forest.trees.resize(params.trees);

  const int n = static_cast<int>(X.rows());
  parallel_for(params.trees, workers <= 0 ? default_workers() : workers, [&](std::size_t t) {
    auto rng = make_rng(derive_seed(params.seed, t));
    std::vector<int> rows(n);
    if (params.bootstrap) {
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int i = 0; i < n; ++i) rows[i] = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees[t] = grow_tree(X, y, std::move(rows), params, rng, forest.n_classes);
  });
  return forest;
}

Forest train_forest(const std::vector<TrainingSample>& samples, const ForestParams& params,
                    int workers) {
  Eigen::MatrixXd X;
  std::vector<int> y;
  dataset_from_samples(samples, X, y);
  return train_forest(X, y, params, workers);
}

PredictionOutput predict_proba(const Forest& forest, const FeatureVector& x) {
  if (x.size() != forest.n_features) throw InputError("predict_proba: feature dimension mismatch");
  PredictionOutput out;
  out.p = Eigen::VectorXd::Zero(forest.n_classes);
  for (const Tree& tree : forest.trees) {
    const TreeNode& leaf = tree.nodes[tree.leaf_for(x)];
    const double total = static_cast<double>(leaf.total);
    for (const auto& [cls, count] : leaf.counts) out.p[cls] += count / total;
  }
  out.p /= static_cast<double>(forest.trees.size());
  out.argmax = 0;
  for (int c = 1; c < forest.n_classes; ++c)
    if (out.p[c] > out.p[out.argmax]) out.argmax = c;
  return out;
}

LinkCombination decide(const PredictionOutput& pred, double beta, LinkCombination all_links) {
  if (pred.p[pred.argmax] > beta) return LinkCombination{static_cast<std::uint32_t>(pred.argmax)};
  return all_links;
}

void dataset_from_samples(const std::vector<TrainingSample>& samples, Eigen::MatrixXd& X,
                          std::vector<int>& y) {
  if (samples.empty()) throw InputError("dataset: empty");
  const Eigen::Index dim = samples.front().x.size();
  X.resize(samples.size(), dim);
  y.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].x.size() != dim) throw InputError("dataset: inconsistent feature dimension");
    X.row(i) = samples[i].x.transpose();
    y[i] = samples[i].label;
  }
}

// ---------------------------------------------------------------------------
// Serialization: fixed little-endian binary layout, magic "MMCSRF01".

namespace {

constexpr char kMagic[8] = {'M', 'M', 'C', 'S', 'R', 'F', '0', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("forest file: truncated");
  return v;
}

}  // namespace

void save_forest(const Forest& forest, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, forest.n_features);
  put<std::uint32_t>(out, forest.n_classes);
  put<std::uint32_t>(out, forest.trees.size());
  put<std::int32_t>(out, forest.params.trees);
  put<std::int32_t>(out, forest.params.max_depth);
  put<std::int64_t>(out, forest.params.max_leaves);
  put<std::int32_t>(out, forest.params.features_per_split);
  put<std::int32_t>(out, forest.params.min_samples_split);
  put<std::uint8_t>(out, forest.params.bootstrap ? 1 : 0);
  put<std::uint64_t>(out, forest.params.seed);
  put<std::int32_t>(out, forest.params.classes);
  for (const Tree& tree : forest.trees) {
    put<std::uint64_t>(out, tree.nodes.size());
    for (const TreeNode& n : tree.nodes) {
      put<std::int32_t>(out, n.feature);
      put<double>(out, n.threshold);
      put<std::int32_t>(out, n.left);
      put<std::int32_t>(out, n.right);
      put<std::uint32_t>(out, n.total);
      put<std::uint32_t>(out, n.counts.size());
      for (const auto& [cls, count] : n.counts) {
        put<std::int32_t>(out, cls);
        put<std::uint32_t>(out, count);
      }
    }
  }
  if (!out) throw IoError("forest file: write failed");
}

void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  save_forest(forest, f);
}

Forest load_forest(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("forest file: bad magic");
  Forest forest;
  forest.n_features = get<std::uint32_t>(in);
  forest.n_classes = get<std::uint32_t>(in);
  const auto n_trees = get<std::uint32_t>(in);
  forest.params.trees = get<std::int32_t>(in);
  forest.params.max_depth = get<std::int32_t>(in);
  forest.params.max_leaves = get<std::int64_t>(in);
  forest.params.features_per_split = get<std::int32_t>(in);
  forest.params.min_samples_split = get<std::int32_t>(in);
  forest.params.bootstrap = get<std::uint8_t>(in) != 0;
  forest.params.seed = get<std::uint64_t>(in);
  forest.params.classes = get<std::int32_t>(in);
  forest.trees.resize(n_trees);
  for (Tree& tree : forest.trees) {
    const auto n_nodes = get<std::uint64_t>(in);
    tree.nodes.resize(n_nodes);
    for (TreeNode& n : tree.nodes) {
      n.feature = get<std::int32_t>(in);
      n.threshold = get<double>(in);
      n.left = get<std::int32_t>(in);
      n.right = get<std::int32_t>(in);
      n.total = get<std::uint32_t>(in);
      const auto entries = get<std::uint32_t>(in);
      n.counts.resize(entries);
      for (auto& [cls, count] : n.counts) {
        cls = get<std::int32_t>(in);
        count = get<std::uint32_t>(in);
      }
    }
  }
  return forest;
}

Forest load_forest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  return load_forest(f);
}

}  // namespace mmcs
