#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmcs/combinations.hpp"

namespace mmcs {

using FeatureVector = Eigen::VectorXd;

struct TrainingSample {
  FeatureVector x;
  int label = 0;
};

struct ForestParams {
  int trees = 200;
  int max_depth = 20;
  std::int64_t max_leaves = 0;   // 0 = unlimited
  int features_per_split = 0;    // 0 = ceil(sqrt(dim))
  int min_samples_split = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int classes = 0;  // 0 = infer from labels; the pipeline pins 2^(N+1)
};

// Gini impurity 1 - sum((c/total)^2). Throws on an empty histogram.
double gini(const std::vector<std::size_t>& counts);

struct Split {
  int feature = 0;
  double threshold = 0.0;  // left: value <= threshold
  double gain = 0.0;       // parent minus size-weighted child impurity
};

// Minimizes size-weighted child Gini over midpoint thresholds of the given
// features. Returns nullopt when the node is pure or no feature admits a
// threshold. Zero-gain splits of impure nodes are returned (the CART greedy
// step proceeds even when no single split reduces impurity, as with XOR).
std::optional<Split> best_split(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                const std::vector<int>& rows,
                                const std::vector<int>& feature_subset, int n_classes);
std::optional<Split> best_split(const std::vector<TrainingSample>& samples,
                                const std::vector<int>& feature_subset);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  std::uint32_t total = 0;                                    // leaf sample count
  std::vector<std::pair<std::int32_t, std::uint32_t>> counts; // leaf class histogram

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int leaf_for(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

// Recursive CART growth over the given sample rows; a fresh random feature
// subset is drawn at every node from `rng`.
Tree grow_tree(const Eigen::MatrixXd& X, const std::vector<int>& y, std::vector<int> rows,
               const ForestParams& params, std::mt19937_64& rng, int n_classes);
Tree grow_tree(const std::vector<TrainingSample>& samples, const ForestParams& params,
               std::mt19937_64& rng);

struct Forest {
  ForestParams params;
  int n_features = 0;
  int n_classes = 0;
  std::vector<Tree> trees;
};

// Trains params.trees trees, each on its own bootstrap resample with an RNG
// stream derived as derive_seed(params.seed, tree_index). Deterministic in
// (dataset order, seed) regardless of worker count.
Forest train_forest(const Eigen::MatrixXd& X, const std::vector<int>& y,
                    const ForestParams& params, int workers = 1);
Forest train_forest(const std::vector<TrainingSample>& samples, const ForestParams& params,
                    int workers = 1);

struct PredictionOutput {
  Eigen::VectorXd p;  // class probabilities, sums to 1
  int argmax = 0;     // lowest index on ties; one-hot z is implied
};

PredictionOutput predict_proba(const Forest& forest, const FeatureVector& x);

// Trust the predicted combination only when its probability clears beta
// (strictly); otherwise fall back to transmitting on all links.
LinkCombination decide(const PredictionOutput& pred, double beta, LinkCombination all_links);

void save_forest(const Forest& forest, std::ostream& out);
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(std::istream& in);
Forest load_forest(const std::string& path);

void dataset_from_samples(const std::vector<TrainingSample>& samples, Eigen::MatrixXd& X,
                          std::vector<int>& y);

}  // namespace mmcs
