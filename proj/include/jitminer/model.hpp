#pragma once

#include "jitminer/metrics.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jitminer {

enum class NormFit { train, full };
std::string_view to_string(NormFit v);
NormFit parse_norm_fit(std::string_view s);

struct TrainConfig {
  std::size_t epochs = 3500;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double smooth_l1_beta = 1.0;
  double split_ratio = 0.7;
  std::uint64_t seed = 42;
  std::vector<std::string> feature_subset{kFeatureNames.begin(), kFeatureNames.end()};
  std::size_t hidden_width = 32;
  std::size_t layers = 9; // weight layers, output included
  double threshold = 0.5;
  NormFit norm_fit = NormFit::train;

  void validate() const; // Error(ConfigError)
};

// weights[l] is (layer_sizes[l+1] x layer_sizes[l]); biases[l] has
// layer_sizes[l+1] entries.
struct NetworkParams {
  std::vector<std::size_t> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  [[nodiscard]] std::size_t input_width() const { return layer_sizes.empty() ? 0 : layer_sizes[0]; }
  [[nodiscard]] std::size_t parameter_count() const;
  void check_shape() const; // Error(BadShape)
};

// input -> (layers - 1) hidden layers of `hidden_width` -> 1.
std::vector<std::size_t> default_layer_sizes(std::size_t input_width, std::size_t hidden_width,
                                             std::size_t layers);

// Xavier-uniform weights, zero biases.
NetworkParams init_network(const std::vector<std::size_t> &layer_sizes, std::uint64_t seed);

// Hidden layers use ReLU, the output a sigmoid.
double forward(const NetworkParams &params, const Eigen::VectorXd &x);
// One column per sample; returns one probability per column.
Eigen::VectorXd forward_batch(const NetworkParams &params, const Eigen::MatrixXd &x);

double smooth_l1(double diff, double beta);
// Mean over elements.
double smooth_l1_loss(std::span<const double> pred, std::span<const double> target, double beta);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  double loss = 0; // mean loss at the evaluated parameters
};

// Exact gradients of the mean Smooth L1 loss between the network output and
// `y` (one column of `x` per sample).
Gradients gradients(const NetworkParams &params, const Eigen::MatrixXd &x,
                    const Eigen::VectorXd &y, double beta);

struct AdamState {
  std::vector<Eigen::MatrixXd> m_w;
  std::vector<Eigen::MatrixXd> v_w;
  std::vector<Eigen::VectorXd> m_b;
  std::vector<Eigen::VectorXd> v_b;
  std::size_t step = 0;

  static AdamState zeros_like(const NetworkParams &params);
};

void adam_step(NetworkParams &params, AdamState &state, const Gradients &grads,
               const TrainConfig &config);

struct DataSplit {
  FeatureMatrix train;
  FeatureMatrix test;
};

// Seeded shuffle, then the first round(N * ratio) rows train. Both partitions
// keep the shuffled order. Error(TooFewRows) unless each class has two rows.
DataSplit split_dataset(const FeatureMatrix &matrix, double ratio, std::uint64_t seed);

// Drops random majority rows until both classes have the minority count.
// Survivors keep their original order. Error(SingleClass) if a class is absent.
FeatureMatrix undersample(const FeatureMatrix &train, std::uint64_t seed);

// Column-per-sample design matrix over the named features, plus 0/1 targets.
Eigen::MatrixXd design_matrix(const FeatureMatrix &matrix, const std::vector<std::string> &features);
Eigen::VectorXd target_vector(const FeatureMatrix &matrix);

// Full-batch training from the given parameters; returns the loss before
// each epoch's update.
std::vector<double> fit(NetworkParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                        const TrainConfig &config);

struct EvalMetrics {
  double recall = 0;
  double precision = 0;
  double f1 = 0;
  double mean_loss = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double threshold = 0.5;
};

EvalMetrics evaluate_predictions(std::span<const double> probabilities,
                                 std::span<const double> targets, double threshold, double beta);
// Error(EmptyDataset) on an empty test set.
EvalMetrics evaluate(const NetworkParams &params, const FeatureMatrix &test,
                     const std::vector<std::string> &features, double threshold = 0.5,
                     double beta = 1.0);

struct TrainedModel {
  NetworkParams params;
  std::vector<std::string> features;
  std::map<std::string, ColumnRange> normalization;
  TrainConfig config;
};

struct TrainResult {
  TrainedModel model;
  std::vector<double> loss_history; // `epochs` entries
  EvalMetrics test_metrics;
  std::size_t train_rows = 0; // after undersampling
  std::size_t test_rows = 0;
};

// normalize -> split -> undersample(train) -> fit -> evaluate(test).
TrainResult train(const FeatureMatrix &matrix, const TrainConfig &config);

// Applies the model's stored normalization before predicting.
EvalMetrics evaluate_model(const TrainedModel &model, const FeatureMatrix &data);

struct AblationRow {
  std::vector<std::string> features;
  std::optional<std::string> removed; // empty for the full set
  double recall = 0;
  double mean_loss = 0;
};

struct AblationReport {
  std::vector<AblationRow> rows; // recall descending, ties keep full-set-first order
};

// Full feature set plus every leave-one-out subset, all with the same seed.
AblationReport ablate(const FeatureMatrix &matrix, const std::vector<std::string> &base_features,
                      const TrainConfig &config, std::size_t jobs = 1);

nlohmann::json to_json(const TrainConfig &config);
nlohmann::json to_json(const EvalMetrics &metrics);
nlohmann::json to_json(const AblationReport &report);
nlohmann::json model_to_json(const TrainedModel &model);
TrainedModel model_from_json(const nlohmann::json &j); // Error(BadShape) on bad content

void save_model(const TrainedModel &model, const std::filesystem::path &path);
TrainedModel load_model(const std::filesystem::path &path);

} // namespace jitminer
