#include "jitminer/model.hpp"

#include "jitminer/error.hpp"
#include "jitminer/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace jitminer {

namespace {

// Independent deterministic streams derived from the single user seed.
enum class Stream : std::uint64_t { split = 1, undersample = 2, init = 3 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Distribution code is written out so results do not depend on the standard
// library's distribution implementations.
class Rng {
public:
  Rng(std::uint64_t seed, Stream stream)
      : gen_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)))) {}

  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = 0;
    do {
      r = gen_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
  }

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  template <typename T> void shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

private:
  std::mt19937_64 gen_;
};

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double smooth_l1_grad(double diff, double beta) {
  if (std::abs(diff) < beta) {
    return diff / beta;
  }
  return diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
}

void require_features(const std::vector<std::string> &features) {
  if (features.empty()) {
    throw Error(ErrorCode::ConfigError, "feature subset is empty");
  }
  std::set<std::string> seen;
  for (const auto &f : features) {
    if (!is_feature_name(f)) {
      throw Error(ErrorCode::ConfigError, "unknown feature '" + f + "'");
    }
    if (!seen.insert(f).second) {
      throw Error(ErrorCode::ConfigError, "duplicate feature '" + f + "'");
    }
  }
}

FeatureMatrix valid_rows(const FeatureMatrix &matrix) {
  FeatureMatrix out;
  out.feature_order = matrix.feature_order;
  out.normalization = matrix.normalization;
  for (const auto &row : matrix.rows) {
    if (row.valid()) {
      out.rows.push_back(row);
    }
  }
  return out;
}

std::pair<std::size_t, std::size_t> class_counts(const FeatureMatrix &m) {
  std::size_t pos = 0;
  for (const auto &row : m.rows) {
    pos += row.defective ? 1 : 0;
  }
  return {m.rows.size() - pos, pos};
}

template <typename T> T json_get(const nlohmann::json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::BadShape, std::string("model file lacks '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::BadShape, std::string("bad '") + key + "': " + e.what());
  }
}

} // namespace

std::string_view to_string(NormFit v) { return v == NormFit::train ? "train" : "full"; }

NormFit parse_norm_fit(std::string_view s) {
  if (s == "train") {
    return NormFit::train;
  }
  if (s == "full") {
    return NormFit::full;
  }
  throw Error(ErrorCode::ConfigError, "invalid norm-fit '" + std::string(s) + "' (expected train|full)");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string &msg) { throw Error(ErrorCode::ConfigError, msg); };
  if (epochs < 1) fail("epochs must be at least 1");
  if (!(learning_rate > 0)) fail("learning rate must be positive");
  if (!(split_ratio > 0 && split_ratio < 1)) fail("split ratio must be in (0, 1)");
  if (!(smooth_l1_beta > 0)) fail("smooth L1 beta must be positive");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1)) {
    fail("Adam betas must be in [0, 1)");
  }
  if (!(adam_epsilon > 0)) fail("Adam epsilon must be positive");
  if (hidden_width < 1) fail("hidden width must be at least 1");
  if (layers < 1) fail("layers must be at least 1");
  if (!(threshold >= 0 && threshold <= 1)) fail("threshold must be in [0, 1]");
  require_features(feature_subset);
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return n;
}

void NetworkParams::check_shape() const {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 1) {
    throw Error(ErrorCode::BadShape, "layer sizes must run from the input width down to 1");
  }
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size()) {
    throw Error(ErrorCode::BadShape, "parameter count does not match layer sizes");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    auto rows = static_cast<Eigen::Index>(layer_sizes[l + 1]);
    auto cols = static_cast<Eigen::Index>(layer_sizes[l]);
    if (weights[l].rows() != rows || weights[l].cols() != cols || biases[l].size() != rows) {
      throw Error(ErrorCode::BadShape, "layer " + std::to_string(l) + " shape mismatch");
    }
  }
}

std::vector<std::size_t> default_layer_sizes(std::size_t input_width, std::size_t hidden_width,
                                             std::size_t layers) {
  if (input_width == 0 || hidden_width == 0 || layers == 0) {
    throw Error(ErrorCode::BadShape, "widths and depth must be positive");
  }
  std::vector<std::size_t> sizes{input_width};
  for (std::size_t l = 1; l < layers; ++l) {
    sizes.push_back(hidden_width);
  }
  sizes.push_back(1);
  return sizes;
}

NetworkParams init_network(const std::vector<std::size_t> &layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 1 ||
      std::find(layer_sizes.begin(), layer_sizes.end(), 0) != layer_sizes.end()) {
    throw Error(ErrorCode::BadShape, "layer sizes must be positive and end in 1");
  }
  Rng rng(seed, Stream::init);
  NetworkParams p;
  p.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto fan_in = static_cast<double>(layer_sizes[l]);
    const auto fan_out = static_cast<double>(layer_sizes[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(static_cast<Eigen::Index>(layer_sizes[l + 1]),
                      static_cast<Eigen::Index>(layer_sizes[l]));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = (2.0 * rng.uniform01() - 1.0) * limit;
      }
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layer_sizes[l + 1])));
  }
  return p;
}

Eigen::VectorXd forward_batch(const NetworkParams &params, const Eigen::MatrixXd &x) {
  params.check_shape();
  if (x.rows() != static_cast<Eigen::Index>(params.input_width())) {
    throw Error(ErrorCode::BadShape, "input has " + std::to_string(x.rows()) + " features, network expects " +
                                         std::to_string(params.input_width()));
  }
  Eigen::MatrixXd a = x;
  const std::size_t last = params.weights.size() - 1;
  for (std::size_t l = 0; l <= last; ++l) {
    Eigen::MatrixXd z = (params.weights[l] * a).colwise() + params.biases[l];
    a = l == last ? z.unaryExpr([](double v) { return sigmoid(v); }).eval() : z.cwiseMax(0.0).eval();
  }
  return a.row(0).transpose();
}

double forward(const NetworkParams &params, const Eigen::VectorXd &x) {
  Eigen::MatrixXd col = x;
  return forward_batch(params, col)(0);
}

double smooth_l1(double diff, double beta) {
  double a = std::abs(diff);
  return a < beta ? 0.5 * diff * diff / beta : a - 0.5 * beta;
}

double smooth_l1_loss(std::span<const double> pred, std::span<const double> target, double beta) {
  if (pred.size() != target.size()) {
    throw Error(ErrorCode::BadShape, "prediction and target sizes differ");
  }
  if (pred.empty()) {
    return 0.0;
  }
  double sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += smooth_l1(pred[i] - target[i], beta);
  }
  return sum / static_cast<double>(pred.size());
}

Gradients gradients(const NetworkParams &params, const Eigen::MatrixXd &x,
                    const Eigen::VectorXd &y, double beta) {
  params.check_shape();
  if (x.cols() == 0) {
    throw Error(ErrorCode::BadShape, "empty batch");
  }
  if (x.rows() != static_cast<Eigen::Index>(params.input_width()) || y.size() != x.cols()) {
    throw Error(ErrorCode::BadShape, "batch shape does not match the network");
  }
  const std::size_t n_layers = params.weights.size();
  const auto n = static_cast<double>(x.cols());

  // activations[l] feeds layer l; pre[l] is layer l's pre-activation
  std::vector<Eigen::MatrixXd> activations{x};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l < n_layers; ++l) {
    pre.push_back((params.weights[l] * activations.back()).colwise() + params.biases[l]);
    if (l + 1 < n_layers) {
      activations.push_back(pre.back().cwiseMax(0.0));
    }
  }
  Eigen::RowVectorXd out = pre.back().row(0).unaryExpr([](double v) { return sigmoid(v); });

  Gradients g;
  g.weights.resize(n_layers);
  g.biases.resize(n_layers);
  Eigen::MatrixXd delta(1, x.cols());
  double loss = 0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double d = out(i) - y(i);
    loss += smooth_l1(d, beta);
    delta(0, i) = smooth_l1_grad(d, beta) / n * out(i) * (1.0 - out(i));
  }
  g.loss = loss / n;

  for (std::size_t l = n_layers; l-- > 0;) {
    g.weights[l] = delta * activations[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = params.weights[l].transpose() * delta;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

AdamState AdamState::zeros_like(const NetworkParams &params) {
  AdamState s;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    s.m_w.push_back(Eigen::MatrixXd::Zero(params.weights[l].rows(), params.weights[l].cols()));
    s.v_w.push_back(s.m_w.back());
    s.m_b.push_back(Eigen::VectorXd::Zero(params.biases[l].size()));
    s.v_b.push_back(s.m_b.back());
  }
  return s;
}

void adam_step(NetworkParams &params, AdamState &state, const Gradients &grads,
               const TrainConfig &config) {
  const std::size_t n = params.weights.size();
  if (state.m_w.size() != n || grads.weights.size() != n || grads.biases.size() != n) {
    throw Error(ErrorCode::BadShape, "optimizer state does not match the network");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (grads.weights[l].rows() != params.weights[l].rows() ||
        grads.weights[l].cols() != params.weights[l].cols() ||
        grads.biases[l].size() != params.biases[l].size() ||
        state.m_w[l].rows() != params.weights[l].rows() ||
        state.m_w[l].cols() != params.weights[l].cols() ||
        state.m_b[l].size() != params.biases[l].size()) {
      throw Error(ErrorCode::BadShape, "gradient shape mismatch at layer " + std::to_string(l));
    }
  }
  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  const double lr = config.learning_rate;
  const double eps = config.adam_epsilon;
  auto update = [&](auto &param, auto &m, auto &v, const auto &grad) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < n; ++l) {
    update(params.weights[l], state.m_w[l], state.v_w[l], grads.weights[l]);
    update(params.biases[l], state.m_b[l], state.v_b[l], grads.biases[l]);
  }
}

DataSplit split_dataset(const FeatureMatrix &matrix, double ratio, std::uint64_t seed) {
  if (!(ratio > 0 && ratio < 1)) {
    throw Error(ErrorCode::ConfigError, "split ratio must be in (0, 1)");
  }
  auto [neg, pos] = class_counts(matrix);
  if (neg < 2 || pos < 2) {
    throw Error(ErrorCode::TooFewRows,
                "need at least 2 rows of each class, found " + std::to_string(pos) + " defective and " +
                    std::to_string(neg) + " clean");
  }
  const std::size_t total = matrix.rows.size();
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(total) * ratio));
  if (n_train == 0 || n_train >= total) {
    throw Error(ErrorCode::TooFewRows, "split leaves an empty partition");
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Rng(seed, Stream::split).shuffle(order);

  DataSplit out;
  out.train.feature_order = out.test.feature_order = matrix.feature_order;
  out.train.normalization = out.test.normalization = matrix.normalization;
  for (std::size_t k = 0; k < total; ++k) {
    (k < n_train ? out.train : out.test).rows.push_back(matrix.rows[order[k]]);
  }
  return out;
}

FeatureMatrix undersample(const FeatureMatrix &train, std::uint64_t seed) {
  std::vector<std::size_t> clean;
  std::vector<std::size_t> defective;
  for (std::size_t i = 0; i < train.rows.size(); ++i) {
    (train.rows[i].defective ? defective : clean).push_back(i);
  }
  if (clean.empty() || defective.empty()) {
    throw Error(ErrorCode::SingleClass, "training data holds a single class");
  }
  auto &majority = clean.size() >= defective.size() ? clean : defective;
  const auto &minority = clean.size() >= defective.size() ? defective : clean;
  Rng rng(seed, Stream::undersample);
  // partial Fisher-Yates: the first minority.size() slots become the sample
  for (std::size_t i = 0; i < minority.size(); ++i) {
    std::swap(majority[i], majority[i + rng.below(majority.size() - i)]);
  }
  majority.resize(minority.size());

  std::vector<std::size_t> keep(minority);
  keep.insert(keep.end(), majority.begin(), majority.end());
  std::sort(keep.begin(), keep.end());
  FeatureMatrix out;
  out.feature_order = train.feature_order;
  out.normalization = train.normalization;
  for (auto i : keep) {
    out.rows.push_back(train.rows[i]);
  }
  return out;
}

Eigen::MatrixXd design_matrix(const FeatureMatrix &matrix,
                              const std::vector<std::string> &features) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()),
                    static_cast<Eigen::Index>(matrix.rows.size()));
  for (std::size_t c = 0; c < matrix.rows.size(); ++c) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      x(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(c)) =
          column_value(matrix.rows[c], features[f]);
    }
  }
  return x;
}

Eigen::VectorXd target_vector(const FeatureMatrix &matrix) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(matrix.rows.size()));
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = matrix.rows[i].defective ? 1.0 : 0.0;
  }
  return y;
}

std::vector<double> fit(NetworkParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                        const TrainConfig &config) {
  config.validate();
  AdamState state = AdamState::zeros_like(params);
  std::vector<double> history;
  history.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto g = gradients(params, x, y, config.smooth_l1_beta);
    history.push_back(g.loss);
    adam_step(params, state, g, config);
    if ((epoch + 1) % 500 == 0) {
      spdlog::debug("model: epoch {} loss {:.6f}", epoch + 1, g.loss);
    }
  }
  return history;
}

EvalMetrics evaluate_predictions(std::span<const double> probabilities,
                                 std::span<const double> targets, double threshold, double beta) {
  if (probabilities.size() != targets.size()) {
    throw Error(ErrorCode::BadShape, "prediction and target sizes differ");
  }
  if (probabilities.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no rows to evaluate");
  }
  EvalMetrics m;
  m.threshold = threshold;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const bool predicted = probabilities[i] >= threshold;
    const bool actual = targets[i] >= 0.5;
    if (predicted && actual) {
      ++m.tp;
    } else if (predicted) {
      ++m.fp;
    } else if (actual) {
      ++m.fn;
    } else {
      ++m.tn;
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.mean_loss = smooth_l1_loss(probabilities, targets, beta);
  return m;
}

EvalMetrics evaluate(const NetworkParams &params, const FeatureMatrix &test,
                     const std::vector<std::string> &features, double threshold, double beta) {
  if (test.rows.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no rows to evaluate");
  }
  Eigen::VectorXd p = forward_batch(params, design_matrix(test, features));
  Eigen::VectorXd y = target_vector(test);
  return evaluate_predictions({p.data(), static_cast<std::size_t>(p.size())},
                              {y.data(), static_cast<std::size_t>(y.size())}, threshold, beta);
}

TrainResult train(const FeatureMatrix &matrix, const TrainConfig &config) {
  config.validate();
  const auto &features = config.feature_subset;
  FeatureMatrix data = valid_rows(matrix);
  std::map<std::string, ColumnRange> ranges;

  DataSplit split;
  if (config.norm_fit == NormFit::full) {
    if (data.rows.empty()) {
      throw Error(ErrorCode::TooFewRows, "dataset has no rows");
    }
    data = min_max_normalize(data, features);
    ranges = data.normalization;
    split = split_dataset(data, config.split_ratio, config.seed);
  } else {
    split = split_dataset(data, config.split_ratio, config.seed);
    split.train = min_max_normalize(split.train, features);
    ranges = split.train.normalization;
    split.test = apply_normalization(split.test, ranges);
  }
  FeatureMatrix balanced = undersample(split.train, config.seed);

  TrainResult result;
  result.model.features = features;
  result.model.normalization = ranges;
  result.model.config = config;
  result.model.params =
      init_network(default_layer_sizes(features.size(), config.hidden_width, config.layers),
                   config.seed);
  result.loss_history = fit(result.model.params, design_matrix(balanced, features),
                            target_vector(balanced), config);
  result.train_rows = balanced.rows.size();
  result.test_rows = split.test.rows.size();
  result.test_metrics = evaluate(result.model.params, split.test, features, config.threshold,
                                 config.smooth_l1_beta);
  return result;
}

EvalMetrics evaluate_model(const TrainedModel &model, const FeatureMatrix &data) {
  FeatureMatrix rows = apply_normalization(valid_rows(data), model.normalization);
  return evaluate(model.params, rows, model.features, model.config.threshold,
                  model.config.smooth_l1_beta);
}

AblationReport ablate(const FeatureMatrix &matrix, const std::vector<std::string> &base_features,
                      const TrainConfig &config, std::size_t jobs) {
  require_features(base_features);
  if (base_features.size() < 2) {
    throw Error(ErrorCode::ConfigError, "ablation needs at least 2 features");
  }
  std::vector<AblationRow> rows(base_features.size() + 1);
  rows[0].features = base_features;
  for (std::size_t i = 0; i < base_features.size(); ++i) {
    auto &row = rows[i + 1];
    row.removed = base_features[i];
    for (const auto &f : base_features) {
      if (f != base_features[i]) {
        row.features.push_back(f);
      }
    }
  }
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    TrainConfig cfg = config;
    cfg.feature_subset = rows[i].features;
    auto result = train(matrix, cfg);
    rows[i].recall = result.test_metrics.recall;
    rows[i].mean_loss = result.test_metrics.mean_loss;
  });
  std::stable_sort(rows.begin(), rows.end(), [](const AblationRow &a, const AblationRow &b) {
    return a.recall > b.recall;
  });
  return {std::move(rows)};
}

nlohmann::json to_json(const TrainConfig &c) {
  return {
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_epsilon", c.adam_epsilon},
      {"smooth_l1_beta", c.smooth_l1_beta},
      {"split_ratio", c.split_ratio},
      {"seed", c.seed},
      {"features", c.feature_subset},
      {"hidden_width", c.hidden_width},
      {"layers", c.layers},
      {"threshold", c.threshold},
      {"norm_fit", std::string(to_string(c.norm_fit))},
  };
}

nlohmann::json to_json(const EvalMetrics &m) {
  return {
      {"recall", m.recall},
      {"precision", m.precision},
      {"f1", m.f1},
      {"mean_loss", m.mean_loss},
      {"threshold", m.threshold},
      {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}}},
  };
}

nlohmann::json to_json(const AblationReport &report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &row : report.rows) {
    rows.push_back({
        {"features", row.features},
        {"removed", row.removed ? nlohmann::json(*row.removed) : nlohmann::json(nullptr)},
        {"recall", row.recall},
        {"mean_loss", row.mean_loss},
    });
  }
  return {{"rows", rows}};
}

nlohmann::json model_to_json(const TrainedModel &model) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (std::size_t l = 0; l < model.params.weights.size(); ++l) {
    const auto &w = model.params.weights[l];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        flat.push_back(w(r, c));
      }
    }
    weights.push_back(flat);
    const auto &b = model.params.biases[l];
    biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  }
  nlohmann::json ranges = nlohmann::json::object();
  for (const auto &[name, range] : model.normalization) {
    ranges[name] = {{"min", range.min}, {"max", range.max}};
  }
  return {
      {"format", "jitminer-model"},
      {"version", 1},
      {"layer_sizes", model.params.layer_sizes},
      {"weights", weights},
      {"biases", biases},
      {"features", model.features},
      {"normalization", ranges},
      {"config", to_json(model.config)},
  };
}

TrainedModel model_from_json(const nlohmann::json &j) {
  TrainedModel model;
  model.params.layer_sizes = json_get<std::vector<std::size_t>>(j, "layer_sizes");
  auto weights = json_get<std::vector<std::vector<double>>>(j, "weights");
  auto biases = json_get<std::vector<std::vector<double>>>(j, "biases");
  const auto &sizes = model.params.layer_sizes;
  if (sizes.size() < 2 || weights.size() != sizes.size() - 1 || biases.size() != weights.size()) {
    throw Error(ErrorCode::BadShape, "layer count does not match the stored weights");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto rows = sizes[l + 1];
    const auto cols = sizes[l];
    if (weights[l].size() != rows * cols || biases[l].size() != rows) {
      throw Error(ErrorCode::BadShape, "layer " + std::to_string(l) + " has the wrong size");
    }
    Eigen::MatrixXd w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = weights[l][r * cols + c];
      }
    }
    model.params.weights.push_back(std::move(w));
    model.params.biases.push_back(
        Eigen::Map<const Eigen::VectorXd>(biases[l].data(), static_cast<Eigen::Index>(rows)));
  }
  model.params.check_shape();
  model.features = json_get<std::vector<std::string>>(j, "features");
  if (model.features.size() != model.params.input_width()) {
    throw Error(ErrorCode::BadShape, "feature list does not match the input width");
  }
  require_features(model.features);
  const auto ranges = json_get<nlohmann::json>(j, "normalization");
  for (const auto &[name, range] : ranges.items()) {
    model.normalization[name] = {json_get<double>(range, "min"), json_get<double>(range, "max")};
  }
  if (j.contains("config")) {
    const auto &c = j.at("config");
    auto &cfg = model.config;
    cfg.feature_subset = model.features;
    cfg.epochs = c.value("epochs", cfg.epochs);
    cfg.learning_rate = c.value("learning_rate", cfg.learning_rate);
    cfg.adam_beta1 = c.value("adam_beta1", cfg.adam_beta1);
    cfg.adam_beta2 = c.value("adam_beta2", cfg.adam_beta2);
    cfg.adam_epsilon = c.value("adam_epsilon", cfg.adam_epsilon);
    cfg.smooth_l1_beta = c.value("smooth_l1_beta", cfg.smooth_l1_beta);
    cfg.split_ratio = c.value("split_ratio", cfg.split_ratio);
    cfg.seed = c.value("seed", cfg.seed);
    cfg.hidden_width = c.value("hidden_width", cfg.hidden_width);
    cfg.layers = c.value("layers", cfg.layers);
    cfg.threshold = c.value("threshold", cfg.threshold);
    cfg.norm_fit = parse_norm_fit(c.value("norm_fit", std::string("train")));
  }
  return model;
}

void save_model(const TrainedModel &model, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << model_to_json(model).dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
}

TrainedModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::BadShape, std::string("model file is not JSON: ") + e.what());
  }
  return model_from_json(j);
}

} // namespace jitminer
