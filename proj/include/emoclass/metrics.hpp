#pragma once

// Multi-label evaluation: confusion counts, precision/recall/F1, micro and
// macro F1, per-language score tables, seed aggregation and leaderboard gaps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emoclass/datasets.hpp"
#include "emoclass/detail/text.hpp"
#include "emoclass/error.hpp"
#include "emoclass/matrix.hpp"

namespace emoclass {

struct LabelCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

struct ConfusionCounts {
  std::vector<LabelCounts> per_label;
  std::size_t samples = 0;
};

/// Dataset-global counts over every (sample, label) pair.
inline ConfusionCounts confusion(const BinaryMatrix& preds, const BinaryMatrix& golds) {
  if (preds.rows() != golds.rows() || preds.cols() != golds.cols()) {
    throw Error(Errc::shape_mismatch, "predictions are " + std::to_string(preds.rows()) + "x" +
                                          std::to_string(preds.cols()) + ", gold labels are " +
                                          std::to_string(golds.rows()) + "x" + std::to_string(golds.cols()));
  }
  ConfusionCounts out{std::vector<LabelCounts>(golds.cols()), golds.rows()};
  for (std::size_t i = 0; i < golds.rows(); ++i) {
    for (std::size_t l = 0; l < golds.cols(); ++l) {
      const bool p = preds(i, l) != 0;
      const bool g = golds(i, l) != 0;
      auto& c = out.per_label[l];
      if (p && g) {
        ++c.tp;
      } else if (p) {
        ++c.fp;
      } else if (g) {
        ++c.fn;
      } else {
        ++c.tn;
      }
    }
  }
  return out;
}

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Any 0/0 ratio is defined as 0.
inline Prf1 prf1(const LabelCounts& c) {
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  Prf1 out{ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn), 0.0};
  const double sum = out.precision + out.recall;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
  return out;
}

inline double micro_f1(const ConfusionCounts& counts) {
  LabelCounts sum;
  for (const auto& c : counts.per_label) {
    sum.tp += c.tp;
    sum.fp += c.fp;
    sum.fn += c.fn;
    sum.tn += c.tn;
  }
  return prf1(sum).f1;
}

struct LabelMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  LabelCounts counts;
};

struct EvalReport {
  std::string language;
  std::vector<LabelMetrics> labels;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::size_t samples = 0;
  std::vector<std::string> warnings;
};

/// Unweighted mean of per-label F1, labels with F1 = 0 included.
inline double macro_f1(const EvalReport& report) {
  if (report.labels.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& l : report.labels) sum += l.f1;
  return sum / static_cast<double>(report.labels.size());
}

inline double macro_f1(const ConfusionCounts& counts) {
  if (counts.per_label.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : counts.per_label) sum += prf1(c).f1;
  return sum / static_cast<double>(counts.per_label.size());
}

inline EvalReport classification_report(const BinaryMatrix& preds, const BinaryMatrix& golds,
                                        const LabelSchema& schema) {
  if (golds.cols() != schema.size()) {
    throw Error(Errc::shape_mismatch, "gold labels have " + std::to_string(golds.cols()) + " columns, schema has " +
                                          std::to_string(schema.size()));
  }
  const auto counts = confusion(preds, golds);
  EvalReport report;
  report.language = schema.language();
  report.samples = counts.samples;
  const auto names = schema.names();
  for (std::size_t l = 0; l < names.size(); ++l) {
    const auto& c = counts.per_label[l];
    const auto m = prf1(c);
    report.labels.push_back({names[l], m.precision, m.recall, m.f1, c.tp + c.fn, c});
    if (c.tp + c.fp == 0) {
      report.warnings.push_back("'" + names[l] + "': no predicted positives; precision set to 0");
    }
    if (c.tp + c.fn == 0) {
      report.warnings.push_back("'" + names[l] +
                                "': no gold positives; recall set to 0 and the label still counts toward macro F1");
    }
  }
  report.micro_f1 = micro_f1(counts);
  report.macro_f1 = macro_f1(report);
  return report;
}

namespace detail {

inline std::size_t display_width(std::string_view s) {
  std::size_t n = 0;
  for (const char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

inline std::string pad_right(std::string s, std::size_t width) {
  const auto w = display_width(s);
  if (w < width) s.append(width - w, ' ');
  return s;
}

inline std::string capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

}  // namespace detail

/// Plain-text report: one row per label, then micro and macro summaries.
inline std::string format_report(const EvalReport& report) {
  std::string out;
  out += detail::pad_right("label", 12) + detail::pad_right("precision", 11) + detail::pad_right("recall", 9) +
         detail::pad_right("f1", 9) + "support\n";
  for (const auto& l : report.labels) {
    out += detail::pad_right(l.name, 12) + detail::pad_right(detail::format_fixed(l.precision, 4), 11) +
           detail::pad_right(detail::format_fixed(l.recall, 4), 9) +
           detail::pad_right(detail::format_fixed(l.f1, 4), 9) + std::to_string(l.support) + "\n";
  }
  out += "\n";
  out += detail::pad_right("micro f1", 12) + detail::format_fixed(report.micro_f1, 4) + "\n";
  out += detail::pad_right("macro f1", 12) + detail::format_fixed(report.macro_f1, 4) + "\n";
  out += detail::pad_right("samples", 12) + std::to_string(report.samples) + "\n";
  for (const auto& w : report.warnings) out += "warning: " + w + "\n";
  return out;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["language"] = report.language;
  j["samples"] = report.samples;
  j["labels"] = nlohmann::ordered_json::array();
  for (const auto& l : report.labels) {
    j["labels"].push_back({{"name", l.name},
                           {"precision", l.precision},
                           {"recall", l.recall},
                           {"f1", l.f1},
                           {"support", l.support},
                           {"tp", l.counts.tp},
                           {"fp", l.counts.fp},
                           {"fn", l.counts.fn},
                           {"tn", l.counts.tn}});
  }
  j["micro_f1"] = report.micro_f1;
  j["macro_f1"] = report.macro_f1;
  j["warnings"] = report.warnings;
  return j;
}

/// One row of a per-language score table: F1 per canonical emotion (absent
/// when the language's schema lacks it), then micro and macro F1.
struct ScoreRow {
  std::string language;
  std::array<std::optional<double>, 6> emotion_f1{};
  double micro = 0.0;
  double macro = 0.0;
};

inline ScoreRow to_score_row(const EvalReport& report) {
  ScoreRow row;
  row.language = report.language;
  for (const auto& l : report.labels) {
    if (const auto e = parse_emotion(l.name)) row.emotion_f1[static_cast<std::size_t>(*e)] = l.f1;
  }
  row.micro = report.micro_f1;
  row.macro = report.macro_f1;
  return row;
}

inline constexpr std::string_view kAbsentCell = "–";

/// Table with columns Language, the six emotions, Micro, Macro; four decimals,
/// en dash for emotions a language does not annotate.
inline std::string format_score_table(std::span<const ScoreRow> rows) {
  std::size_t lang_width = std::string_view("Language").size();
  for (const auto& r : rows) lang_width = std::max(lang_width, detail::display_width(r.language));
  lang_width += 2;
  constexpr std::size_t cell = 10;

  std::string out = detail::pad_right("Language", lang_width);
  for (const auto e : kAllEmotions) out += detail::pad_right(detail::capitalize(emotion_name(e)), cell);
  out += "| " + detail::pad_right("Micro", cell) + "| Macro\n";
  for (const auto& r : rows) {
    out += detail::pad_right(r.language, lang_width);
    for (const auto& f1 : r.emotion_f1) {
      out += detail::pad_right(f1 ? detail::format_fixed(*f1, 4) : std::string(kAbsentCell), cell);
    }
    out += "| " + detail::pad_right(detail::format_fixed(r.micro, 4), cell) + "| " +
           detail::format_fixed(r.macro, 4) + "\n";
  }
  return out;
}

/// Tab-separated score rows: language, six emotion F1 cells ("-" or the en
/// dash for absent), micro, macro. Blank lines, '#' comments and a header row
/// starting with "language" are skipped.
inline std::vector<ScoreRow> parse_score_table(std::string_view content) {
  std::vector<ScoreRow> rows;
  std::size_t line_no = 0;
  for (auto line : detail::split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto cells = detail::split(line, '\t');
    if (detail::to_lower_ascii(detail::trim(cells[0])) == "language") continue;
    if (cells.size() != 9) {
      throw ParseError(line_no, cells.size(), "expected 9 tab-separated cells");
    }
    ScoreRow row;
    row.language = std::string(detail::trim(cells[0]));
    for (std::size_t e = 0; e < 6; ++e) {
      const auto c = detail::trim(cells[e + 1]);
      if (c == "-" || c == kAbsentCell) continue;
      double v = 0.0;
      if (!detail::parse_double(c, v)) throw ParseError(line_no, e + 1, "bad score '" + std::string(c) + "'");
      row.emotion_f1[e] = v;
    }
    if (!detail::parse_double(cells[7], row.micro)) throw ParseError(line_no, 7, "bad micro score");
    if (!detail::parse_double(cells[8], row.macro)) throw ParseError(line_no, 8, "bad macro score");
    rows.push_back(std::move(row));
  }
  return rows;
}

struct MetricStat {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and population standard deviation of every metric across runs.
struct SeedAggregate {
  std::size_t runs = 0;
  /// Metric name -> statistics. Names: micro_f1, macro_f1 and
  /// <label>.precision / .recall / .f1.
  std::map<std::string, MetricStat> metrics;
};

inline SeedAggregate aggregate_seeds(std::span<const EvalReport> reports) {
  if (reports.empty()) throw Error(Errc::empty_training, "no reports to aggregate");
  const auto& first = reports.front();
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : reports) {
    if (r.labels.size() != first.labels.size()) {
      throw Error(Errc::schema_mismatch, "reports do not share one label schema");
    }
    for (std::size_t l = 0; l < r.labels.size(); ++l) {
      if (r.labels[l].name != first.labels[l].name) {
        throw Error(Errc::schema_mismatch, "reports do not share one label schema");
      }
      values[r.labels[l].name + ".precision"].push_back(r.labels[l].precision);
      values[r.labels[l].name + ".recall"].push_back(r.labels[l].recall);
      values[r.labels[l].name + ".f1"].push_back(r.labels[l].f1);
    }
    values["micro_f1"].push_back(r.micro_f1);
    values["macro_f1"].push_back(r.macro_f1);
  }
  SeedAggregate agg;
  agg.runs = reports.size();
  for (const auto& [name, xs] : values) {
    // Shifted by the first run so identical runs give exactly zero spread.
    const auto n = static_cast<double>(xs.size());
    double shift = 0.0;
    for (const double x : xs) shift += x - xs.front();
    const double mean = xs.front() + shift / n;
    double var = 0.0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    agg.metrics[name] = {mean, std::sqrt(var / n)};
  }
  return agg;
}

inline std::string format_aggregate(const SeedAggregate& agg) {
  std::string out = "runs " + std::to_string(agg.runs) + "\n";
  for (const auto& [name, stat] : agg.metrics) {
    out += detail::pad_right(name, 20) + "mean " + detail::format_fixed(stat.mean, 4) + "  std " +
           detail::format_fixed(stat.std, 4) + "\n";
  }
  return out;
}

struct LeaderboardEntry {
  std::string language;
  /// Ranked best first.
  std::vector<std::pair<std::string, double>> teams;
  std::optional<double> ours;
};

struct GapRow {
  std::string language;
  double ours = 0.0;
  std::vector<std::pair<std::string, double>> teams;
  /// Reference score minus ours, per ranked team.
  std::vector<double> gaps;
};

inline std::vector<GapRow> leaderboard_compare(const std::map<std::string, double>& ours,
                                               std::span<const LeaderboardEntry> reference) {
  std::vector<GapRow> rows;
  for (const auto& [language, score] : ours) {
    const auto it = std::find_if(reference.begin(), reference.end(),
                                 [&](const LeaderboardEntry& e) { return e.language == language; });
    if (it == reference.end()) {
      throw Error(Errc::missing_language, "no reference scores for '" + language + "'");
    }
    GapRow row{language, score, it->teams, {}};
    for (const auto& [team, ref] : it->teams) row.gaps.push_back(ref - score);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Tab-separated rows: language, then (team, score) pairs best first, then an
/// optional trailing column with our own score.
inline std::vector<LeaderboardEntry> parse_leaderboard(std::string_view content) {
  std::vector<LeaderboardEntry> entries;
  std::size_t line_no = 0;
  for (auto line : detail::split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto cells = detail::split(line, '\t');
    if (detail::to_lower_ascii(detail::trim(cells[0])) == "language") continue;
    if (cells.size() < 3) throw ParseError(line_no, cells.size(), "need language and at least one team");
    LeaderboardEntry e;
    e.language = std::string(detail::trim(cells[0]));
    std::size_t c = 1;
    for (; c + 1 < cells.size(); c += 2) {
      double score = 0.0;
      if (!detail::parse_double(cells[c + 1], score)) throw ParseError(line_no, c + 1, "bad score");
      e.teams.emplace_back(std::string(detail::trim(cells[c])), score);
    }
    if (c < cells.size()) {
      double score = 0.0;
      if (!detail::parse_double(cells[c], score)) throw ParseError(line_no, c, "bad score for ours");
      e.ours = score;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::string format_gap_table(std::span<const GapRow> rows) {
  std::string out = detail::pad_right("Language", 10) + detail::pad_right("Ours", 9);
  std::size_t ranks = 0;
  for (const auto& r : rows) ranks = std::max(ranks, r.teams.size());
  for (std::size_t k = 0; k < ranks; ++k) {
    const auto rank = std::to_string(k + 1) + (k == 0 ? "st" : k == 1 ? "nd" : k == 2 ? "rd" : "th");
    out += detail::pad_right(rank + " team", 16) + detail::pad_right(rank, 9) + detail::pad_right("gap", 9);
  }
  out += "\n";
  for (const auto& r : rows) {
    out += detail::pad_right(r.language, 10) + detail::pad_right(detail::format_fixed(r.ours, 4), 9);
    for (std::size_t k = 0; k < r.teams.size(); ++k) {
      out += detail::pad_right(r.teams[k].first, 16) + detail::pad_right(detail::format_fixed(r.teams[k].second, 4), 9) +
             detail::pad_right(detail::format_fixed(r.gaps[k], 4), 9);
    }
    out += "\n";
  }
  return out;
}

}  // namespace emoclass
