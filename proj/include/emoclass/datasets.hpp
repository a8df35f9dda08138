#pragma once

// Emotion-labeled text corpora in the BRIGHTER track-A CSV layout: one "text"
// column, one 0/1 column per emotion, optionally an "id" column and any other
// passthrough columns.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emoclass/detail/csv.hpp"
#include "emoclass/detail/text.hpp"
#include "emoclass/error.hpp"

namespace emoclass {

enum class Emotion : std::uint8_t { anger, disgust, fear, joy, sadness, surprise };

inline constexpr std::array<Emotion, 6> kAllEmotions = {
    Emotion::anger, Emotion::disgust, Emotion::fear, Emotion::joy, Emotion::sadness, Emotion::surprise};

inline constexpr std::string_view emotion_name(Emotion e) {
  constexpr std::array<std::string_view, 6> names = {"anger", "disgust", "fear", "joy", "sadness", "surprise"};
  return names[static_cast<std::size_t>(e)];
}

/// Case-insensitive lookup of a canonical emotion name.
inline std::optional<Emotion> parse_emotion(std::string_view name) {
  const auto lowered = detail::to_lower_ascii(detail::trim(name));
  for (const auto e : kAllEmotions) {
    if (lowered == emotion_name(e)) return e;
  }
  return std::nullopt;
}

/// Ordered label set for one language: 5 or 6 emotions in canonical order.
class LabelSchema {
 public:
  LabelSchema() = default;

  /// Validates and canonicalizes; labels may be given in any order.
  LabelSchema(std::string language, std::vector<Emotion> labels) : language_(std::move(language)) {
    std::array<bool, 6> present{};
    for (const auto e : labels) {
      auto& slot = present[static_cast<std::size_t>(e)];
      if (slot) throw Error(Errc::schema_mismatch, "duplicate label '" + std::string(emotion_name(e)) + "'");
      slot = true;
    }
    for (const auto e : kAllEmotions) {
      if (present[static_cast<std::size_t>(e)]) labels_.push_back(e);
    }
    if (labels_.size() < 5) {
      throw Error(Errc::too_few_emotion_columns,
                  "a schema needs 5 or 6 emotions, got " + std::to_string(labels_.size()));
    }
  }

  static LabelSchema full(std::string language) {
    return {std::move(language), {kAllEmotions.begin(), kAllEmotions.end()}};
  }

  /// English track-A data has no disgust annotations.
  static LabelSchema english() {
    return {"eng", {Emotion::anger, Emotion::fear, Emotion::joy, Emotion::sadness, Emotion::surprise}};
  }

  [[nodiscard]] const std::string& language() const noexcept { return language_; }
  [[nodiscard]] std::span<const Emotion> labels() const noexcept { return labels_; }
  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }

  [[nodiscard]] std::optional<std::size_t> index_of(Emotion e) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == e) return i;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto e : labels_) out.emplace_back(emotion_name(e));
    return out;
  }

  /// Same label set, language ignored.
  [[nodiscard]] bool same_labels(const LabelSchema& other) const { return labels_ == other.labels_; }

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;

 private:
  std::string language_;
  std::vector<Emotion> labels_;
};

enum class Split : std::uint8_t { train, dev, test };

inline constexpr std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

inline std::optional<Split> parse_split(std::string_view s) {
  for (const auto split : {Split::train, Split::dev, Split::test}) {
    if (s == split_name(split)) return split;
  }
  return std::nullopt;
}

struct Sample {
  /// Embedding lookup key: the "id" column when present, else "<split>:<row>"
  /// with a 0-based data-row index.
  std::string key;
  std::string text;
  std::vector<std::uint8_t> labels;
  /// Passthrough cells, aligned with Dataset::extra_columns.
  std::vector<std::string> extras;
};

struct Dataset {
  LabelSchema schema;
  Split split = Split::train;
  /// Source header in file order; empty for datasets built in memory.
  std::vector<std::string> header;
  std::vector<std::string> extra_columns;
  std::vector<Sample> samples;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
};

namespace detail {

inline bool is_text_column(std::string_view name) { return to_lower_ascii(trim(name)) == "text"; }
inline bool is_id_column(std::string_view name) { return to_lower_ascii(trim(name)) == "id"; }

struct ColumnRole {
  enum Kind { text, label, extra } kind;
  std::size_t index;  // label index in schema, or extra index
};

inline std::vector<ColumnRole> map_columns(const std::vector<std::string>& header, const LabelSchema& schema,
                                           std::vector<std::string>* extra_names) {
  std::vector<ColumnRole> roles;
  std::optional<std::size_t> text_col;
  std::vector<bool> seen(schema.size(), false);
  std::size_t extras = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (is_text_column(header[c])) {
      if (text_col) throw Error(Errc::schema_mismatch, "duplicate text column");
      text_col = c;
      roles.push_back({ColumnRole::text, 0});
    } else if (const auto e = parse_emotion(header[c])) {
      const auto idx = schema.index_of(*e);
      if (!idx) {
        throw Error(Errc::schema_mismatch,
                    "column '" + header[c] + "' is not part of the " + schema.language() + " schema");
      }
      if (seen[*idx]) throw Error(Errc::schema_mismatch, "duplicate column '" + header[c] + "'");
      seen[*idx] = true;
      roles.push_back({ColumnRole::label, *idx});
    } else {
      if (extra_names) extra_names->push_back(header[c]);
      roles.push_back({ColumnRole::extra, extras++});
    }
  }
  if (!text_col) throw Error(Errc::missing_text_column, "header has no 'text' column");
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error(Errc::schema_mismatch,
                  "header lacks schema label '" + std::string(emotion_name(schema.labels()[i])) + "'");
    }
  }
  return roles;
}

inline std::vector<CsvRecord> parse_records(std::string content) {
  if (content.starts_with("\xEF\xBB\xBF")) content.erase(0, 3);
  if (!is_valid_utf8(content)) throw ParseError(0, 0, "input is not valid UTF-8");
  auto records = parse_csv(content);
  std::erase_if(records, [](const CsvRecord& r) { return r.size() == 1 && r[0].empty(); });
  if (records.empty()) throw Error(Errc::schema_mismatch, "no header row");
  return records;
}

}  // namespace detail

/// Schema from a header row. Accepts "text", emotion names (any case) and
/// "id"; anything else is rejected.
inline LabelSchema infer_schema(std::span<const std::string> header, std::string language) {
  bool has_text = false;
  std::vector<Emotion> labels;
  for (const auto& column : header) {
    if (detail::is_text_column(column)) {
      has_text = true;
    } else if (const auto e = parse_emotion(column)) {
      labels.push_back(*e);
    } else if (!detail::is_id_column(column)) {
      throw Error(Errc::unknown_column, "unrecognized column '" + column + "'");
    }
  }
  if (!has_text) throw Error(Errc::missing_text_column, "header has no 'text' column");
  if (labels.size() < 5) {
    throw Error(Errc::too_few_emotion_columns,
                "need at least 5 emotion columns, found " + std::to_string(labels.size()));
  }
  return {std::move(language), std::move(labels)};
}

inline std::vector<std::string> read_header(const std::string& path) {
  return detail::parse_records(detail::read_file(path)).front();
}

namespace detail {

inline Dataset build_dataset(std::vector<CsvRecord> records, const LabelSchema& schema, Split split) {
  Dataset ds;
  ds.schema = schema;
  ds.split = split;
  ds.header = records.front();
  const auto roles = detail::map_columns(ds.header, schema, &ds.extra_columns);
  std::optional<std::size_t> id_extra;
  for (std::size_t i = 0; i < ds.extra_columns.size(); ++i) {
    if (detail::is_id_column(ds.extra_columns[i])) id_extra = i;
  }

  ds.samples.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != roles.size()) {
      throw ParseError(r, rec.size(),
                       "expected " + std::to_string(roles.size()) + " fields, got " + std::to_string(rec.size()));
    }
    Sample s;
    s.labels.assign(schema.size(), 0);
    s.extras.resize(ds.extra_columns.size());
    for (std::size_t c = 0; c < rec.size(); ++c) {
      const auto& role = roles[c];
      switch (role.kind) {
        case detail::ColumnRole::text:
          if (detail::trim(rec[c]).empty()) throw ParseError(r, c, "empty text");
          s.text = rec[c];
          break;
        case detail::ColumnRole::label: {
          const auto cell = detail::trim(rec[c]);
          if (cell == "0") {
            s.labels[role.index] = 0;
          } else if (cell == "1") {
            s.labels[role.index] = 1;
          } else {
            throw ParseError(r, c, "label cell '" + rec[c] + "' is not 0 or 1");
          }
          break;
        }
        case detail::ColumnRole::extra:
          s.extras[role.index] = rec[c];
          break;
      }
    }
    s.key = id_extra ? s.extras[*id_extra] : std::string(split_name(split)) + ":" + std::to_string(r - 1);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace detail

inline Dataset parse_dataset(std::string content, const LabelSchema& schema, Split split) {
  return detail::build_dataset(detail::parse_records(std::move(content)), schema, split);
}

inline Dataset load_dataset(const std::string& path, const LabelSchema& schema, Split split) {
  return parse_dataset(detail::read_file(path), schema, split);
}

/// Loads with the schema inferred from the file's own header.
inline Dataset load_dataset(const std::string& path, std::string language, Split split) {
  auto records = detail::parse_records(detail::read_file(path));
  auto schema = infer_schema(records.front(), std::move(language));
  return detail::build_dataset(std::move(records), schema, split);
}

/// CSV rendering. Datasets loaded from a file reuse the source header layout,
/// so load followed by this is byte-identical for minimally quoted LF files.
inline std::string to_csv(const Dataset& ds) {
  std::vector<std::string> header = ds.header;
  if (header.empty()) {
    header.push_back("text");
    for (const auto& name : ds.schema.names()) header.push_back(name);
    for (const auto& extra : ds.extra_columns) header.push_back(extra);
  }
  const auto roles = detail::map_columns(header, ds.schema, nullptr);
  std::string out;
  detail::append_csv_record(out, header);
  detail::CsvRecord row(roles.size());
  for (const auto& s : ds.samples) {
    for (std::size_t c = 0; c < roles.size(); ++c) {
      switch (roles[c].kind) {
        case detail::ColumnRole::text: row[c] = s.text; break;
        case detail::ColumnRole::label: row[c] = s.labels[roles[c].index] ? "1" : "0"; break;
        case detail::ColumnRole::extra:
          row[c] = roles[c].index < s.extras.size() ? s.extras[roles[c].index] : std::string{};
          break;
      }
    }
    detail::append_csv_record(out, row);
  }
  return out;
}

inline void save_dataset(const Dataset& ds, const std::string& path) { detail::write_file(path, to_csv(ds)); }

struct SplitStats {
  std::map<Split, std::size_t> per_split{{Split::train, 0}, {Split::dev, 0}, {Split::test, 0}};
  /// Positive count per schema label, summed over all datasets.
  std::vector<std::size_t> positives;
  std::vector<std::string> label_names;
  std::size_t total = 0;
};

inline SplitStats split_stats(std::span<const Dataset> datasets) {
  SplitStats stats;
  if (datasets.empty()) return stats;
  const auto& schema = datasets.front().schema;
  stats.positives.assign(schema.size(), 0);
  stats.label_names = schema.names();
  for (const auto& ds : datasets) {
    if (!ds.schema.same_labels(schema)) {
      throw Error(Errc::schema_mismatch, "datasets do not share one label schema");
    }
    stats.per_split[ds.split] += ds.size();
    stats.total += ds.size();
    for (const auto& s : ds.samples) {
      for (std::size_t l = 0; l < s.labels.size(); ++l) stats.positives[l] += s.labels[l];
    }
  }
  return stats;
}

}  // namespace emoclass
