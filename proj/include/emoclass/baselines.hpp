#pragma once

// Classical multi-output baselines: one independent binary learner per label
// (L2-penalized logistic regression or Gaussian naive Bayes) over
// L2-normalized, z-scored embeddings.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emoclass/datasets.hpp"
#include "emoclass/detail/text.hpp"
#include "emoclass/embeddings.hpp"
#include "emoclass/error.hpp"
#include "emoclass/head.hpp"
#include "emoclass/matrix.hpp"

namespace emoclass {

struct LogRegHyper {
  double l2_penalty = 1e-4;
  std::size_t max_iter = 1000;
  double tol = 1e-8;
  double initial_step = 0.1;
};

struct LogRegParams {
  Vector w;
  double bias = 0.0;
  double l2_penalty = 1e-4;
  std::size_t max_iter = 1000;
  double tol = 1e-8;
  std::size_t iterations = 0;

  friend bool operator==(const LogRegParams&, const LogRegParams&) = default;
};

namespace detail {

inline void check_design(const Matrix& x, std::span<const std::uint8_t> y) {
  if (x.rows() == 0) throw Error(Errc::empty_training, "no training rows");
  if (y.size() != x.rows()) {
    throw Error(Errc::dim_mismatch, std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) + " labels");
  }
}

}  // namespace detail

inline double logreg_probability(const LogRegParams& p, std::span<const double> x) {
  if (x.size() != p.w.size()) {
    throw Error(Errc::dim_mismatch, "input dim " + std::to_string(x.size()) + ", learner dim " +
                                        std::to_string(p.w.size()));
  }
  double z = p.bias;
  for (std::size_t d = 0; d < x.size(); ++d) z += p.w[d] * x[d];
  return sigmoid(z);
}

/// Mean Bernoulli negative log-likelihood plus (l2/2) ||w||^2; the bias is
/// not penalized.
inline double logreg_objective(const Matrix& x, std::span<const std::uint8_t> y, std::span<const double> w,
                               double bias, double l2_penalty) {
  double nll = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = bias;
    const auto row = x.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) z += w[d] * row[d];
    nll -= y[i] ? log_sigmoid(z) : log_sigmoid(-z);
  }
  double sq = 0.0;
  for (const double v : w) sq += v * v;
  return nll / static_cast<double>(x.rows()) + 0.5 * l2_penalty * sq;
}

/// Full-batch gradient descent from zero with backtracking: each iteration
/// tries the initial step and halves it until the objective does not
/// increase. Stops when the gradient norm drops below tol, no step helps, or
/// max_iter is reached. `trace`, when given, receives the objective after
/// every accepted iteration (starting with the initial value).
inline LogRegParams fit_logreg(const Matrix& x, std::span<const std::uint8_t> y, const LogRegHyper& hyper = {},
                               std::vector<double>* trace = nullptr) {
  detail::check_design(x, y);
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  LogRegParams p{Vector(dim, 0.0), 0.0, hyper.l2_penalty, hyper.max_iter, hyper.tol, 0};

  double objective = logreg_objective(x, y, p.w, p.bias, p.l2_penalty);
  if (trace) trace->push_back(objective);
  Vector grad_w(dim);
  Vector cand_w(dim);

  for (std::size_t iter = 0; iter < hyper.max_iter; ++iter) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      const double r = logreg_probability(p, row) - static_cast<double>(y[i]);
      for (std::size_t d = 0; d < dim; ++d) grad_w[d] += r * row[d];
      grad_b += r;
    }
    double norm_sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      grad_w[d] = grad_w[d] / static_cast<double>(n) + p.l2_penalty * p.w[d];
      norm_sq += grad_w[d] * grad_w[d];
    }
    grad_b /= static_cast<double>(n);
    norm_sq += grad_b * grad_b;
    if (std::sqrt(norm_sq) < hyper.tol) break;

    bool accepted = false;
    for (double step = hyper.initial_step; step > 1e-12; step *= 0.5) {
      for (std::size_t d = 0; d < dim; ++d) cand_w[d] = p.w[d] - step * grad_w[d];
      const double cand_b = p.bias - step * grad_b;
      const double cand = logreg_objective(x, y, cand_w, cand_b, p.l2_penalty);
      if (cand <= objective) {
        p.w.swap(cand_w);
        p.bias = cand_b;
        objective = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    p.iterations = iter + 1;
    if (trace) trace->push_back(objective);
  }
  return p;
}

/// Per-class Gaussian statistics; index 0 is the negative class.
struct GnbParams {
  std::array<double, 2> log_prior{};
  std::array<Vector, 2> mean;
  std::array<Vector, 2> var;

  friend bool operator==(const GnbParams&, const GnbParams&) = default;
};

/// Per-class mean and population variance, with every variance raised by
/// 1e-9 times the largest per-dimension variance of the whole sample.
inline GnbParams fit_gnb(const Matrix& x, std::span<const std::uint8_t> y) {
  detail::check_design(x, y);
  const std::size_t dim = x.cols();
  std::array<std::size_t, 2> count{};
  for (const auto label : y) ++count[label ? 1 : 0];
  if (count[0] == 0 || count[1] == 0) throw Error(Errc::single_class, "both classes must be present");

  GnbParams p;
  for (int c = 0; c < 2; ++c) {
    p.mean[c].assign(dim, 0.0);
    p.var[c].assign(dim, 0.0);
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const int c = y[i] ? 1 : 0;
    for (std::size_t d = 0; d < dim; ++d) p.mean[c][d] += x(i, d);
  }
  for (int c = 0; c < 2; ++c) {
    for (double& m : p.mean[c]) m /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const int c = y[i] ? 1 : 0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double e = x(i, d) - p.mean[c][d];
      p.var[c][d] += e * e;
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (double& v : p.var[c]) v /= static_cast<double>(count[c]);
  }

  double max_var = 0.0;
  const auto overall_n = static_cast<double>(x.rows());
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, d);
    mean /= overall_n;
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) var += (x(i, d) - mean) * (x(i, d) - mean);
    max_var = std::max(max_var, var / overall_n);
  }
  // All-identical inputs leave no scale to borrow; fall back to an absolute floor.
  const double smoothing = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
  for (int c = 0; c < 2; ++c) {
    for (double& v : p.var[c]) v += smoothing;
    p.log_prior[c] = std::log(static_cast<double>(count[c]) / overall_n);
  }
  return p;
}

/// Joint log-likelihood log P(c) + sum_d log N(x_d | mean_cd, var_cd).
inline std::array<double, 2> gnb_log_joint(const GnbParams& p, std::span<const double> x) {
  if (x.size() != p.mean[0].size()) {
    throw Error(Errc::dim_mismatch, "input dim " + std::to_string(x.size()) + ", learner dim " +
                                        std::to_string(p.mean[0].size()));
  }
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c) {
    double acc = p.log_prior[c];
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double e = x[d] - p.mean[c][d];
      acc -= 0.5 * std::log(2.0 * std::numbers::pi * p.var[c][d]) + e * e / (2.0 * p.var[c][d]);
    }
    out[c] = acc;
  }
  return out;
}

/// Emits one fixed class; used for labels with a single class in training.
struct ConstantLearner {
  std::uint8_t value = 0;
  friend bool operator==(const ConstantLearner&, const ConstantLearner&) = default;
};

using Learner = std::variant<LogRegParams, GnbParams, ConstantLearner>;

struct BinaryDecision {
  std::uint8_t label = 0;
  /// Estimated probability of the positive class.
  double score = 0.0;
};

/// Logistic regression: positive iff p >= 0.5. GNB: positive iff the positive
/// log-joint is strictly larger (ties go to class 0).
inline BinaryDecision predict_binary(const Learner& learner, std::span<const double> x) {
  struct Visitor {
    std::span<const double> x;
    BinaryDecision operator()(const LogRegParams& p) const {
      const double prob = logreg_probability(p, x);
      return {static_cast<std::uint8_t>(prob >= 0.5 ? 1 : 0), prob};
    }
    BinaryDecision operator()(const GnbParams& p) const {
      const auto lj = gnb_log_joint(p, x);
      const double hi = std::max(lj[0], lj[1]);
      const double prob = std::exp(lj[1] - hi) / (std::exp(lj[0] - hi) + std::exp(lj[1] - hi));
      return {static_cast<std::uint8_t>(lj[1] > lj[0] ? 1 : 0), prob};
    }
    BinaryDecision operator()(const ConstantLearner& c) const { return {c.value, c.value ? 1.0 : 0.0}; }
  };
  return std::visit(Visitor{x}, learner);
}

enum class LearnerKind : std::uint8_t { logreg, gnb };

inline std::string_view learner_kind_name(LearnerKind k) { return k == LearnerKind::logreg ? "logreg" : "gnb"; }

inline LearnerKind parse_learner_kind(std::string_view s) {
  if (s == "logreg") return LearnerKind::logreg;
  if (s == "gnb") return LearnerKind::gnb;
  throw Error(Errc::config, "unknown learner kind '" + std::string(s) + "' (expected logreg or gnb)");
}

struct MultiOutputModel {
  LearnerKind kind = LearnerKind::logreg;
  LabelSchema schema;
  std::string embedder_fingerprint;
  ScalerParams scaler;
  std::vector<Learner> learners;  // one per schema label, schema order
};

/// Raw embedding -> L2-normalized -> z-scored with the frozen training scaler.
inline Vector prepare_features(const ScalerParams& scaler, std::span<const double> raw) {
  return transform_scaler(scaler, l2_normalize(raw));
}

inline MultiOutputModel fit_multioutput(LearnerKind kind, const Matrix& raw, const BinaryMatrix& labels,
                                        const LabelSchema& schema, std::string embedder_fingerprint = {},
                                        const LogRegHyper& hyper = {}) {
  if (raw.rows() == 0) throw Error(Errc::empty_training, "no training rows");
  if (labels.rows() != raw.rows()) {
    throw Error(Errc::dim_mismatch, std::to_string(raw.rows()) + " embeddings but " +
                                        std::to_string(labels.rows()) + " label rows");
  }
  if (labels.cols() != schema.size()) {
    throw Error(Errc::dim_mismatch, "label matrix has " + std::to_string(labels.cols()) + " columns, schema has " +
                                        std::to_string(schema.size()));
  }

  Matrix normalized(raw.rows(), raw.cols());
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    const auto v = l2_normalize(raw.row(i));
    std::copy(v.begin(), v.end(), normalized.row(i).begin());
  }
  MultiOutputModel model{kind, schema, std::move(embedder_fingerprint), fit_scaler(normalized), {}};
  const auto features = transform_scaler(model.scaler, normalized);

  for (std::size_t l = 0; l < schema.size(); ++l) {
    const auto column = labels.column(l);
    std::size_t positives = 0;
    for (const auto v : column) positives += v ? 1 : 0;
    if (positives == 0 || positives == column.size()) {
      model.learners.emplace_back(ConstantLearner{static_cast<std::uint8_t>(positives ? 1 : 0)});
    } else if (kind == LearnerKind::logreg) {
      model.learners.emplace_back(fit_logreg(features, column, hyper));
    } else {
      model.learners.emplace_back(fit_gnb(features, column));
    }
  }
  return model;
}

inline std::vector<BinaryDecision> predict_row(const MultiOutputModel& model, std::span<const double> raw) {
  const auto x = prepare_features(model.scaler, raw);
  std::vector<BinaryDecision> out;
  out.reserve(model.learners.size());
  for (const auto& learner : model.learners) out.push_back(predict_binary(learner, x));
  return out;
}

inline BinaryMatrix predict_all(const MultiOutputModel& model, const Matrix& raw) {
  BinaryMatrix out(raw.rows(), model.learners.size());
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    const auto decisions = predict_row(model, raw.row(i));
    for (std::size_t l = 0; l < decisions.size(); ++l) out(i, l) = decisions[l].label;
  }
  return out;
}

/// Emotion name -> 0/1 for every schema label.
using EmotionDict = std::map<std::string, std::uint8_t>;

inline EmotionDict predict_dict(const MultiOutputModel& model, const std::string& text, const TextEmbedder& embedder) {
  if (detail::trim(text).empty()) throw Error(Errc::empty_text, "cannot predict on empty text");
  if (embedder.fingerprint != model.embedder_fingerprint) {
    throw Error(Errc::fingerprint_mismatch, "model was trained on '" + model.embedder_fingerprint +
                                                "' embeddings, embedder is '" + embedder.fingerprint + "'");
  }
  const auto decisions = predict_row(model, embedder.embed(text));
  const auto names = model.schema.names();
  EmotionDict out;
  for (std::size_t l = 0; l < names.size(); ++l) out[names[l]] = decisions[l].label;
  return out;
}

// Baseline checkpoint: tab-separated lines, reals with 17 significant digits
// so a reloaded model predicts bit-identically.
//
//   emoclass-baseline v1
//   kind / language / labels / embedder / dim
//   scaler_mean, scaler_std
//   per label, one of:
//     constant <0|1>
//     logreg <bias> <l2> <max_iter> <tol> <iterations> <w_1..w_D>
//     gnb <log_prior0> <log_prior1>, then gnb_mean0, gnb_var0, gnb_mean1, gnb_var1

inline std::string format_baseline(const MultiOutputModel& m) {
  using detail::format_g17;
  auto join = [](std::span<const double> v) {
    std::string s;
    for (const double x : v) s += "\t" + format_g17(x);
    return s;
  };
  std::string out = "emoclass-baseline v1\n";
  out += "kind\t" + std::string(learner_kind_name(m.kind)) + "\n";
  out += "language\t" + m.schema.language() + "\n";
  out += "labels\t";
  const auto names = m.schema.names();
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  out += "\n";
  out += "embedder\t" + m.embedder_fingerprint + "\n";
  out += "dim\t" + std::to_string(m.scaler.dim()) + "\n";
  out += "scaler_mean" + join(m.scaler.mean) + "\n";
  out += "scaler_std" + join(m.scaler.std) + "\n";
  for (const auto& learner : m.learners) {
    if (const auto* c = std::get_if<ConstantLearner>(&learner)) {
      out += "constant\t" + std::to_string(c->value) + "\n";
    } else if (const auto* lr = std::get_if<LogRegParams>(&learner)) {
      out += "logreg\t" + format_g17(lr->bias) + "\t" + format_g17(lr->l2_penalty) + "\t" +
             std::to_string(lr->max_iter) + "\t" + format_g17(lr->tol) + "\t" + std::to_string(lr->iterations) +
             join(lr->w) + "\n";
    } else {
      const auto& g = std::get<GnbParams>(learner);
      out += "gnb\t" + format_g17(g.log_prior[0]) + "\t" + format_g17(g.log_prior[1]) + "\n";
      out += "gnb_mean0" + join(g.mean[0]) + "\n";
      out += "gnb_var0" + join(g.var[0]) + "\n";
      out += "gnb_mean1" + join(g.mean[1]) + "\n";
      out += "gnb_var1" + join(g.var[1]) + "\n";
    }
  }
  return out;
}

inline MultiOutputModel parse_baseline(std::string_view content) {
  auto lines = detail::split(content, '\n');
  if (lines.empty() || detail::trim(lines[0]) != "emoclass-baseline v1") {
    throw Error(Errc::parse, "not an emoclass baseline checkpoint");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto& line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!detail::trim(line).empty()) rows.push_back(detail::split(line, '\t'));
  }

  std::size_t pos = 0;
  auto expect = [&](std::string_view tag) -> const std::vector<std::string>& {
    if (pos >= rows.size() || rows[pos][0] != tag) {
      throw ParseError(pos + 1, 0, "expected '" + std::string(tag) + "'");
    }
    return rows[pos++];
  };
  auto reals = [&](const std::vector<std::string>& row, std::size_t from) {
    Vector v;
    for (std::size_t c = from; c < row.size(); ++c) {
      double x = 0.0;
      if (!detail::parse_double(row[c], x)) throw ParseError(pos, c, "bad number '" + row[c] + "'");
      v.push_back(x);
    }
    return v;
  };
  auto field = [&](std::string_view tag) {
    const auto& row = expect(tag);
    if (row.size() < 2) throw ParseError(pos, 1, "missing value for '" + std::string(tag) + "'");
    return row[1];
  };

  MultiOutputModel m;
  m.kind = parse_learner_kind(field("kind"));
  const auto language = field("language");
  std::vector<Emotion> labels;
  for (const auto& name : detail::split(field("labels"), ',')) {
    const auto e = parse_emotion(name);
    if (!e) throw Error(Errc::parse, "unknown label '" + name + "'");
    labels.push_back(*e);
  }
  m.schema = LabelSchema(language, labels);
  {
    const auto& row = expect("embedder");
    m.embedder_fingerprint = row.size() > 1 ? row[1] : "";
  }
  long long dim = 0;
  if (!detail::parse_long(field("dim"), dim) || dim < 1) throw Error(Errc::parse, "bad dim");
  const auto d = static_cast<std::size_t>(dim);
  m.scaler.mean = reals(expect("scaler_mean"), 1);
  m.scaler.std = reals(expect("scaler_std"), 1);
  if (m.scaler.mean.size() != d || m.scaler.std.size() != d) throw Error(Errc::dim_mismatch, "scaler length");

  for (std::size_t l = 0; l < m.schema.size(); ++l) {
    if (pos >= rows.size()) throw Error(Errc::parse, "checkpoint has fewer learners than labels");
    const auto tag = rows[pos][0];
    if (tag == "constant") {
      const auto v = field("constant");
      if (v != "0" && v != "1") throw Error(Errc::parse, "constant learner must emit 0 or 1");
      m.learners.emplace_back(ConstantLearner{static_cast<std::uint8_t>(v == "1")});
    } else if (tag == "logreg") {
      const auto& row = expect("logreg");
      if (row.size() != 6 + d) throw Error(Errc::dim_mismatch, "logreg row length");
      LogRegParams p;
      long long max_iter = 0;
      long long iterations = 0;
      if (!detail::parse_double(row[1], p.bias) || !detail::parse_double(row[2], p.l2_penalty) ||
          !detail::parse_long(row[3], max_iter) || !detail::parse_double(row[4], p.tol) ||
          !detail::parse_long(row[5], iterations)) {
        throw ParseError(pos, 1, "bad logreg header fields");
      }
      p.max_iter = static_cast<std::size_t>(max_iter);
      p.iterations = static_cast<std::size_t>(iterations);
      p.w = reals(row, 6);
      m.learners.emplace_back(std::move(p));
    } else if (tag == "gnb") {
      const auto priors = reals(expect("gnb"), 1);
      if (priors.size() != 2) throw Error(Errc::parse, "gnb needs two priors");
      GnbParams g;
      g.log_prior = {priors[0], priors[1]};
      g.mean[0] = reals(expect("gnb_mean0"), 1);
      g.var[0] = reals(expect("gnb_var0"), 1);
      g.mean[1] = reals(expect("gnb_mean1"), 1);
      g.var[1] = reals(expect("gnb_var1"), 1);
      for (int c = 0; c < 2; ++c) {
        if (g.mean[c].size() != d || g.var[c].size() != d) throw Error(Errc::dim_mismatch, "gnb vector length");
      }
      m.learners.emplace_back(std::move(g));
    } else {
      throw ParseError(pos + 1, 0, "unknown learner '" + tag + "'");
    }
  }
  return m;
}

inline void save_baseline(const MultiOutputModel& m, const std::string& path) {
  detail::write_file(path, format_baseline(m));
}

inline MultiOutputModel load_baseline(const std::string& path) { return parse_baseline(detail::read_file(path)); }

}  // namespace emoclass
