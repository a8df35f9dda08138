#pragma once

// Text checkpoints for the trained head. Line-oriented, tab-separated:
//
//   emoclass-head v1
//   language    <code>
//   labels      anger,fear,...
//   embedder    <fingerprint>
//   threshold   <tau>
//   dim         <D>
//   best_epoch  <k>
//   config      key=value ...
//   history     <epoch> <train_loss> <dev_macro_f1>      (one line per epoch)
//   W           w_1 ... w_D                              (one line per label)
//   b           b_1 ... b_L
//
// Reals use 9 significant digits.

#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "emoclass/datasets.hpp"
#include "emoclass/detail/text.hpp"
#include "emoclass/error.hpp"
#include "emoclass/head.hpp"

namespace emoclass {

inline std::vector<std::pair<std::string, std::string>> train_config_items(const TrainConfig& c) {
  using detail::format_g9;
  return {{"learning_rate", format_g9(c.learning_rate)},
          {"beta1", format_g9(c.beta1)},
          {"beta2", format_g9(c.beta2)},
          {"epsilon", format_g9(c.epsilon)},
          {"weight_decay", format_g9(c.weight_decay)},
          {"batch_size", std::to_string(c.batch_size)},
          {"dropout_rate", format_g9(c.dropout_rate)},
          {"smoothing_alpha", format_g9(c.smoothing_alpha)},
          {"clip_max_norm", format_g9(c.clip_max_norm)},
          {"patience", std::to_string(c.patience)},
          {"max_epochs", std::to_string(c.max_epochs)},
          {"threshold", format_g9(c.threshold)},
          {"seed", std::to_string(c.seed)}};
}

/// Sets one TrainConfig field by name. Returns false for unknown keys; throws
/// ConfigError for unparsable values.
inline bool set_train_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  auto real = [&](double& field) {
    if (!detail::parse_double(value, field)) {
      throw Error(Errc::config, "'" + std::string(key) + "' needs a number, got '" + std::string(value) + "'");
    }
  };
  auto count = [&](auto& field) {
    long long v = 0;
    if (!detail::parse_long(value, v) || v < 0) {
      throw Error(Errc::config,
                  "'" + std::string(key) + "' needs a non-negative integer, got '" + std::string(value) + "'");
    }
    field = static_cast<std::remove_reference_t<decltype(field)>>(v);
  };
  if (key == "learning_rate") real(c.learning_rate);
  else if (key == "beta1") real(c.beta1);
  else if (key == "beta2") real(c.beta2);
  else if (key == "epsilon") real(c.epsilon);
  else if (key == "weight_decay") real(c.weight_decay);
  else if (key == "batch_size") count(c.batch_size);
  else if (key == "dropout_rate") real(c.dropout_rate);
  else if (key == "smoothing_alpha") real(c.smoothing_alpha);
  else if (key == "clip_max_norm") real(c.clip_max_norm);
  else if (key == "patience") count(c.patience);
  else if (key == "max_epochs") count(c.max_epochs);
  else if (key == "threshold") real(c.threshold);
  else if (key == "seed") count(c.seed);
  else return false;
  return true;
}

inline std::string format_model(const TrainedModel& m) {
  using detail::format_g9;
  std::string out = "emoclass-head v1\n";
  out += "language\t" + m.schema.language() + "\n";
  out += "labels\t";
  const auto names = m.schema.names();
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  out += "\n";
  out += "embedder\t" + m.embedder_fingerprint + "\n";
  out += "threshold\t" + format_g9(m.threshold) + "\n";
  out += "dim\t" + std::to_string(m.params.dim()) + "\n";
  out += "best_epoch\t" + std::to_string(m.best_epoch) + "\n";
  out += "config";
  for (const auto& [k, v] : train_config_items(m.config)) out += "\t" + k + "=" + v;
  out += "\n";
  for (const auto& h : m.history) {
    out += "history\t" + std::to_string(h.epoch) + "\t" + format_g9(h.train_loss) + "\t" + format_g9(h.dev_macro_f1) +
           "\n";
  }
  for (std::size_t l = 0; l < m.params.labels(); ++l) {
    out += "W";
    for (const double w : m.params.weight_row(l)) out += "\t" + format_g9(w);
    out += "\n";
  }
  out += "b";
  for (std::size_t l = 0; l < m.params.labels(); ++l) out += "\t" + format_g9(m.params.bias(l));
  out += "\n";
  return out;
}

inline TrainedModel parse_model(std::string_view content) {
  auto lines = detail::split(content, '\n');
  if (lines.empty() || detail::trim(lines[0]) != "emoclass-head v1") {
    throw Error(Errc::parse, "not an emoclass head checkpoint");
  }
  TrainedModel m;
  std::string language;
  std::vector<Emotion> labels;
  long long dim = -1;
  std::vector<Vector> weight_rows;
  Vector bias;
  bool have_bias = false;

  auto real = [](const std::string& s, std::size_t line) {
    double v = 0.0;
    if (!detail::parse_double(s, v)) throw ParseError(line, 1, "bad number '" + s + "'");
    return v;
  };

  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, '\t');
    const auto& tag = cells[0];
    if (tag == "language") {
      language = cells.at(1);
    } else if (tag == "labels") {
      for (const auto& name : detail::split(cells.at(1), ',')) {
        const auto e = parse_emotion(name);
        if (!e) throw ParseError(i, 1, "unknown label '" + name + "'");
        labels.push_back(*e);
      }
    } else if (tag == "embedder") {
      m.embedder_fingerprint = cells.size() > 1 ? cells[1] : "";
    } else if (tag == "threshold") {
      m.threshold = real(cells.at(1), i);
    } else if (tag == "dim") {
      if (!detail::parse_long(cells.at(1), dim) || dim < 1) throw ParseError(i, 1, "bad dim");
    } else if (tag == "best_epoch") {
      long long v = 0;
      if (!detail::parse_long(cells.at(1), v) || v < 0) throw ParseError(i, 1, "bad best_epoch");
      m.best_epoch = static_cast<std::size_t>(v);
    } else if (tag == "config") {
      for (std::size_t c = 1; c < cells.size(); ++c) {
        const auto eq = cells[c].find('=');
        if (eq == std::string::npos ||
            !set_train_config_value(m.config, cells[c].substr(0, eq), cells[c].substr(eq + 1))) {
          throw ParseError(i, c, "bad config entry '" + cells[c] + "'");
        }
      }
    } else if (tag == "history") {
      if (cells.size() != 4) throw ParseError(i, cells.size(), "history needs 3 fields");
      long long epoch = 0;
      if (!detail::parse_long(cells[1], epoch) || epoch < 1) throw ParseError(i, 1, "bad epoch");
      m.history.push_back({static_cast<std::size_t>(epoch), real(cells[2], i), real(cells[3], i)});
    } else if (tag == "W") {
      Vector row;
      for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(real(cells[c], i));
      weight_rows.push_back(std::move(row));
    } else if (tag == "b") {
      for (std::size_t c = 1; c < cells.size(); ++c) bias.push_back(real(cells[c], i));
      have_bias = true;
    } else {
      throw ParseError(i, 0, "unknown field '" + tag + "'");
    }
  }

  m.schema = LabelSchema(language, labels);
  if (dim < 1 || !have_bias) throw Error(Errc::parse, "checkpoint lacks dim or bias");
  if (weight_rows.size() != m.schema.size() || bias.size() != m.schema.size()) {
    throw Error(Errc::dim_mismatch, "checkpoint weight shape does not match its label list");
  }
  m.params = HeadParams(m.schema.size(), static_cast<std::size_t>(dim));
  for (std::size_t l = 0; l < weight_rows.size(); ++l) {
    if (weight_rows[l].size() != static_cast<std::size_t>(dim)) {
      throw Error(Errc::dim_mismatch, "weight row " + std::to_string(l) + " has wrong length");
    }
    std::copy(weight_rows[l].begin(), weight_rows[l].end(), m.params.weight_row(l).begin());
    m.params.bias(l) = bias[l];
  }
  return m;
}

inline void save_model(const TrainedModel& m, const std::string& path) { detail::write_file(path, format_model(m)); }

inline TrainedModel load_model(const std::string& path) { return parse_model(detail::read_file(path)); }

}  // namespace emoclass
