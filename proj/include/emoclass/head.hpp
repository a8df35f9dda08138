#pragma once

// Sigmoid-output linear head over sentence embeddings: inverted dropout on the
// input, smoothed binary cross-entropy, AdamW with global-norm clipping and
// early stopping on dev macro F1.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "emoclass/datasets.hpp"
#include "emoclass/detail/random.hpp"
#include "emoclass/embeddings.hpp"
#include "emoclass/error.hpp"
#include "emoclass/matrix.hpp"
#include "emoclass/metrics.hpp"

namespace emoclass {

struct TrainConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  std::size_t batch_size = 16;
  double dropout_rate = 0.3;
  double smoothing_alpha = 0.1;
  double clip_max_norm = 1.0;
  std::size_t patience = 4;
  std::size_t max_epochs = 100;
  double threshold = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::config, what); };
    if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must be in [0, 1)");
    if (!(epsilon > 0.0)) fail("epsilon must be > 0");
    if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must be in [0, 1)");
    if (!(smoothing_alpha >= 0.0 && smoothing_alpha <= 1.0)) fail("smoothing_alpha must be in [0, 1]");
    if (!(clip_max_norm > 0.0)) fail("clip_max_norm must be > 0");
    if (patience < 1) fail("patience must be >= 1");
    if (max_epochs < 1) fail("max_epochs must be >= 1");
    if (!(threshold > 0.0 && threshold < 1.0)) fail("threshold must be in (0, 1)");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Weights (labels x dim, row-major) followed by biases (labels), stored
/// contiguously so optimizers and clipping can treat them as one vector.
class HeadParams {
 public:
  HeadParams() = default;
  HeadParams(std::size_t labels, std::size_t dim) : labels_(labels), dim_(dim), values_(labels * dim + labels, 0.0) {}

  /// W, b ~ U(-1/sqrt(dim), 1/sqrt(dim)), weights drawn row-major before biases.
  static HeadParams random_init(std::size_t labels, std::size_t dim, detail::Engine& engine) {
    HeadParams p(labels, dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    for (double& v : p.values_) v = detail::uniform(engine, -bound, bound);
    return p;
  }

  [[nodiscard]] std::size_t labels() const noexcept { return labels_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

  double& weight(std::size_t l, std::size_t d) { return values_[l * dim_ + d]; }
  [[nodiscard]] double weight(std::size_t l, std::size_t d) const { return values_[l * dim_ + d]; }
  std::span<double> weight_row(std::size_t l) { return {values_.data() + l * dim_, dim_}; }
  [[nodiscard]] std::span<const double> weight_row(std::size_t l) const { return {values_.data() + l * dim_, dim_}; }
  double& bias(std::size_t l) { return values_[labels_ * dim_ + l]; }
  [[nodiscard]] double bias(std::size_t l) const { return values_[labels_ * dim_ + l]; }

  std::span<double> flat() noexcept { return values_; }
  [[nodiscard]] std::span<const double> flat() const noexcept { return values_; }

  friend bool operator==(const HeadParams&, const HeadParams&) = default;

 private:
  std::size_t labels_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

/// Hex digest of the exact bit patterns of every parameter.
inline std::string weight_fingerprint(const HeadParams& params) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const double v : params.flat()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(sigmoid(z)) without overflow for large |z|.
inline double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

enum class Mode : std::uint8_t { train, eval };

namespace detail {

inline void check_input(const HeadParams& params, std::span<const double> x) {
  if (x.size() != params.dim()) {
    throw Error(Errc::dim_mismatch, "input has dim " + std::to_string(x.size()) + ", head expects " +
                                        std::to_string(params.dim()));
  }
}

/// Inverted dropout: x' = mask * x / (1 - rate). Identity when rate is 0.
inline Vector dropout_input(std::span<const double> x, double rate, std::span<const std::uint8_t> mask) {
  Vector out(x.begin(), x.end());
  if (rate == 0.0) return out;
  if (mask.size() != x.size()) {
    throw Error(Errc::dim_mismatch, "dropout mask has " + std::to_string(mask.size()) + " entries, input has " +
                                        std::to_string(x.size()));
  }
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t d = 0; d < out.size(); ++d) out[d] = mask[d] ? out[d] * scale : 0.0;
  return out;
}

inline Vector logits(const HeadParams& params, std::span<const double> x) {
  Vector z(params.labels());
  for (std::size_t l = 0; l < params.labels(); ++l) {
    const auto w = params.weight_row(l);
    double acc = params.bias(l);
    for (std::size_t d = 0; d < x.size(); ++d) acc += w[d] * x[d];
    z[l] = acc;
  }
  return z;
}

}  // namespace detail

/// Per-label probabilities. Train mode applies inverted dropout with the
/// given keep-mask (1 = keep); eval mode ignores rate and mask.
inline Vector forward(const HeadParams& params, std::span<const double> x, Mode mode, double dropout_rate = 0.0,
                      std::span<const std::uint8_t> mask = {}) {
  detail::check_input(params, x);
  const auto input = mode == Mode::train ? detail::dropout_input(x, dropout_rate, mask) : Vector(x.begin(), x.end());
  auto z = detail::logits(params, input);
  for (double& v : z) v = sigmoid(v);
  return z;
}

/// Keep-mask for one input: each coordinate kept with probability 1 - rate.
inline std::vector<std::uint8_t> draw_dropout_mask(std::size_t dim, double rate, detail::Engine& engine) {
  std::vector<std::uint8_t> mask(dim, 1);
  if (rate == 0.0) return mask;
  for (auto& m : mask) m = detail::uniform01(engine) >= rate ? 1 : 0;
  return mask;
}

/// Binary label smoothing: y' = y (1 - alpha) + alpha / 2.
inline Vector smooth_targets(std::span<const std::uint8_t> y, double alpha) {
  Vector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = static_cast<double>(y[i]) * (1.0 - alpha) + alpha / 2.0;
  return out;
}

/// Mean over labels of -[y' ln p + (1 - y') ln(1 - p)].
inline double bce_loss(std::span<const double> p, std::span<const double> y_smooth) {
  if (p.size() != y_smooth.size()) {
    throw Error(Errc::dim_mismatch, std::to_string(p.size()) + " probabilities vs " +
                                        std::to_string(y_smooth.size()) + " targets");
  }
  if (p.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += y_smooth[i] * std::log(p[i]) + (1.0 - y_smooth[i]) * std::log(1.0 - p[i]);
  }
  return -sum / static_cast<double>(p.size());
}

struct LossAndGrads {
  double loss = 0.0;
  HeadParams grads;
};

/// Batch-mean smoothed BCE and its analytic gradient. `masks` holds one
/// keep-mask row per batch item; it may be empty when dropout_rate is 0.
/// The loss is evaluated from logits, so it stays finite for saturated units.
inline LossAndGrads loss_and_grads(const HeadParams& params, const Matrix& x, const BinaryMatrix& y,
                                   const TrainConfig& config, const BinaryMatrix& masks = {}) {
  if (x.rows() == 0) throw Error(Errc::empty_training, "empty batch");
  if (x.cols() != params.dim()) {
    throw Error(Errc::dim_mismatch, "batch dim " + std::to_string(x.cols()) + ", head dim " +
                                        std::to_string(params.dim()));
  }
  if (y.rows() != x.rows() || y.cols() != params.labels()) {
    throw Error(Errc::dim_mismatch, "label matrix shape does not match batch and head");
  }
  const bool use_dropout = config.dropout_rate > 0.0;
  if (use_dropout && (masks.rows() != x.rows() || masks.cols() != x.cols())) {
    throw Error(Errc::dim_mismatch, "dropout masks must be batch x dim");
  }

  const std::size_t labels = params.labels();
  const auto n = static_cast<double>(x.rows());
  const auto per_label = 1.0 / static_cast<double>(labels);
  LossAndGrads out{0.0, HeadParams(labels, params.dim())};

  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto input =
        detail::dropout_input(x.row(i), use_dropout ? config.dropout_rate : 0.0,
                              use_dropout ? masks.row(i) : std::span<const std::uint8_t>{});
    const auto z = detail::logits(params, input);
    const auto target = smooth_targets(y.row(i), config.smoothing_alpha);
    double sample_loss = 0.0;
    for (std::size_t l = 0; l < labels; ++l) {
      sample_loss -= target[l] * log_sigmoid(z[l]) + (1.0 - target[l]) * log_sigmoid(-z[l]);
      const double dz = (sigmoid(z[l]) - target[l]) * per_label / n;
      auto grow = out.grads.weight_row(l);
      for (std::size_t d = 0; d < input.size(); ++d) grow[d] += dz * input[d];
      out.grads.bias(l) += dz;
    }
    out.loss += sample_loss * per_label;
  }
  out.loss /= n;
  return out;
}

/// Scales `grads` in place so its L2 norm is at most max_norm; returns the
/// norm before clipping.
inline double clip_global_norm(std::span<double> grads, double max_norm) {
  double sum = 0.0;
  for (const double g : grads) sum += g * g;
  const double norm = std::sqrt(sum);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
  return norm;
}

inline HeadParams clip_global_norm(HeadParams grads, double max_norm) {
  clip_global_norm(grads.flat(), max_norm);
  return grads;
}

struct AdamWState {
  Vector m;
  Vector v;
  std::uint64_t t = 0;

  static AdamWState zeros(std::size_t size) { return {Vector(size, 0.0), Vector(size, 0.0), 0}; }
};

/// One AdamW update with bias correction and decoupled weight decay:
///   theta -= lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * theta)
inline void adamw_step(std::span<double> params, AdamWState& state, std::span<const double> grads,
                       const TrainConfig& config) {
  if (state.m.empty() && state.v.empty()) state = AdamWState::zeros(params.size());
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw Error(Errc::dim_mismatch, "optimizer state, gradient and parameter sizes differ");
  }
  state.t += 1;
  const auto t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= config.learning_rate * (m_hat / (std::sqrt(v_hat) + config.epsilon) + config.weight_decay * params[i]);
  }
}

inline void adamw_step(HeadParams& params, AdamWState& state, const HeadParams& grads, const TrainConfig& config) {
  adamw_step(params.flat(), state, grads.flat(), config);
}

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_macro_f1 = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Patience counter over a maximized score. Improvement is strict.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records an epoch's score; returns true when it is a new best.
  bool observe(std::size_t epoch, double score) {
    if (score > best_score_) {
      best_score_ = score;
      best_epoch_ = epoch;
      stale_ = 0;
      return true;
    }
    ++stale_;
    return false;
  }

  [[nodiscard]] bool should_stop() const noexcept { return stale_ >= patience_; }
  [[nodiscard]] std::size_t best_epoch() const noexcept { return best_epoch_; }
  [[nodiscard]] double best_score() const noexcept { return best_score_; }

 private:
  std::size_t patience_;
  std::size_t stale_ = 0;
  std::size_t best_epoch_ = 0;
  double best_score_ = -std::numeric_limits<double>::infinity();
};

struct TrainedModel {
  HeadParams params;
  LabelSchema schema;
  std::string embedder_fingerprint;
  double threshold = 0.5;
  TrainConfig config;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

struct Prediction {
  Vector probabilities;
  std::vector<std::uint8_t> labels;
};

/// Eval-mode probabilities thresholded with p >= threshold.
inline Prediction predict(const HeadParams& params, std::span<const double> x, double threshold) {
  Prediction out{forward(params, x, Mode::eval), {}};
  out.labels.reserve(out.probabilities.size());
  for (const double p : out.probabilities) out.labels.push_back(p >= threshold ? 1 : 0);
  return out;
}

inline Prediction predict(const TrainedModel& model, std::span<const double> x, double threshold) {
  return predict(model.params, x, threshold);
}

inline Prediction predict(const TrainedModel& model, std::span<const double> x) {
  return predict(model.params, x, model.threshold);
}

inline BinaryMatrix predict_all(const HeadParams& params, const Matrix& x, double threshold) {
  BinaryMatrix out(x.rows(), params.labels());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto p = predict(params, x.row(i), threshold);
    std::copy(p.labels.begin(), p.labels.end(), out.row(i).begin());
  }
  return out;
}

/// Dev-set score used for early stopping, called once per epoch (1-based)
/// with the current parameters.
using DevScorer = std::function<double(const HeadParams&, std::size_t epoch)>;

/// Called after every epoch with the record just appended; for logging.
using EpochCallback = std::function<void(const EpochRecord&)>;

struct TrainOptions {
  DevScorer dev_scorer;  // defaults to dev macro F1 at config.threshold
  EpochCallback on_epoch;
};

/// Mini-batch training with per-batch clip + AdamW and early stopping on dev
/// macro F1. Returns the parameters of the best dev epoch.
inline TrainedModel train_head(const Matrix& train_x, const BinaryMatrix& train_y, const Matrix& dev_x,
                               const BinaryMatrix& dev_y, const LabelSchema& schema, std::string embedder_fingerprint,
                               const TrainConfig& config, const TrainOptions& options = {}) {
  config.validate();
  if (train_x.rows() == 0) throw Error(Errc::empty_split, "training split is empty");
  if (dev_x.rows() == 0 && !options.dev_scorer) throw Error(Errc::empty_split, "dev split is empty");
  if (train_y.rows() != train_x.rows() || dev_y.rows() != dev_x.rows()) {
    throw Error(Errc::dim_mismatch, "embedding and label row counts differ");
  }
  if (train_y.cols() != schema.size() || (dev_x.rows() && dev_y.cols() != schema.size())) {
    throw Error(Errc::dim_mismatch, "label columns do not match the schema");
  }
  if (dev_x.rows() && dev_x.cols() != train_x.cols()) {
    throw Error(Errc::dim_mismatch, "train and dev embeddings differ in dim");
  }

  const std::size_t n = train_x.rows();
  const std::size_t dim = train_x.cols();
  const std::size_t labels = schema.size();

  detail::Engine engine(config.seed);
  auto params = HeadParams::random_init(labels, dim, engine);
  auto state = AdamWState::zeros(params.flat().size());

  DevScorer score = options.dev_scorer;
  if (!score) {
    score = [&](const HeadParams& p, std::size_t) {
      return macro_f1(confusion(predict_all(p, dev_x, config.threshold), dev_y));
    };
  }

  TrainedModel model;
  model.schema = schema;
  model.embedder_fingerprint = std::move(embedder_fingerprint);
  model.threshold = config.threshold;
  model.config = config;

  EarlyStopping stopper(config.patience);
  HeadParams best = params;
  std::vector<std::size_t> order(n);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    detail::shuffle(std::span<std::size_t>(order), engine);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t size = std::min(config.batch_size, n - start);
      Matrix bx(size, dim);
      BinaryMatrix by(size, labels);
      BinaryMatrix masks;
      if (config.dropout_rate > 0.0) masks = BinaryMatrix(size, dim);
      for (std::size_t k = 0; k < size; ++k) {
        const auto src = order[start + k];
        std::copy_n(train_x.row(src).begin(), dim, bx.row(k).begin());
        std::copy_n(train_y.row(src).begin(), labels, by.row(k).begin());
        if (config.dropout_rate > 0.0) {
          const auto mask = draw_dropout_mask(dim, config.dropout_rate, engine);
          std::copy(mask.begin(), mask.end(), masks.row(k).begin());
        }
      }
      auto step = loss_and_grads(params, bx, by, config, masks);
      clip_global_norm(step.grads.flat(), config.clip_max_norm);
      adamw_step(params, state, step.grads, config);
      loss_sum += step.loss * static_cast<double>(size);
    }

    const EpochRecord record{epoch, loss_sum / static_cast<double>(n), score(params, epoch)};
    model.history.push_back(record);
    if (options.on_epoch) options.on_epoch(record);
    if (stopper.observe(epoch, record.dev_macro_f1)) best = params;
    if (stopper.should_stop()) break;
  }

  model.params = std::move(best);
  model.best_epoch = stopper.best_epoch();
  return model;
}

/// Embedding rows and label rows for a dataset, looked up by sample key.
inline std::pair<Matrix, BinaryMatrix> gather(const Dataset& ds, const EmbeddingStore& store) {
  Matrix x(ds.size(), store.dim());
  BinaryMatrix y(ds.size(), ds.schema.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds.samples[i];
    const auto& v = store.at(s.key);
    std::copy(v.begin(), v.end(), x.row(i).begin());
    std::copy(s.labels.begin(), s.labels.end(), y.row(i).begin());
  }
  return {std::move(x), std::move(y)};
}

inline TrainedModel train_head(const Dataset& train, const Dataset& dev, const EmbeddingStore& store,
                               const TrainConfig& config, const TrainOptions& options = {}) {
  if (train.empty()) throw Error(Errc::empty_split, "training split is empty");
  if (dev.empty()) throw Error(Errc::empty_split, "dev split is empty");
  if (!train.schema.same_labels(dev.schema)) throw Error(Errc::schema_mismatch, "train and dev schemas differ");
  const auto [tx, ty] = gather(train, store);
  const auto [dx, dy] = gather(dev, store);
  auto fingerprint = store.fingerprint().empty() ? "precomputed:dim=" + std::to_string(store.dim())
                                                 : store.fingerprint();
  return train_head(tx, ty, dx, dy, train.schema, std::move(fingerprint), config, options);
}

}  // namespace emoclass
