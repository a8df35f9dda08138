#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace emoclass {

enum class Errc {
  io,
  parse,
  schema_mismatch,
  missing_text_column,
  too_few_emotion_columns,
  unknown_column,
  empty_text,
  dim_mismatch,
  duplicate_key,
  zero_vector,
  too_few_rows,
  network,
  remote,
  empty_split,
  missing_embedding,
  single_class,
  empty_training,
  shape_mismatch,
  fingerprint_mismatch,
  missing_language,
  config,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::io: return "IoError";
    case Errc::parse: return "ParseError";
    case Errc::schema_mismatch: return "SchemaMismatch";
    case Errc::missing_text_column: return "MissingTextColumn";
    case Errc::too_few_emotion_columns: return "TooFewEmotionColumns";
    case Errc::unknown_column: return "UnknownColumn";
    case Errc::empty_text: return "EmptyText";
    case Errc::dim_mismatch: return "DimMismatch";
    case Errc::duplicate_key: return "DuplicateKey";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::too_few_rows: return "TooFewRows";
    case Errc::network: return "NetworkError";
    case Errc::remote: return "RemoteError";
    case Errc::empty_split: return "EmptySplit";
    case Errc::missing_embedding: return "MissingEmbedding";
    case Errc::single_class: return "SingleClass";
    case Errc::empty_training: return "EmptyTraining";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::fingerprint_mismatch: return "FingerprintMismatch";
    case Errc::missing_language: return "MissingLanguage";
    case Errc::config: return "ConfigError";
  }
  return "Error";
}

/// Base of every error raised by the library. The code identifies the failure
/// class; the message is human-readable context.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Malformed cell or row in a data file. Row is 1-based over data rows (the
/// header is row 0); column is 0-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& message)
      : Error(Errc::parse, "row " + std::to_string(row) + ", column " + std::to_string(column) +
                               ": " + message),
        row_(row),
        column_(column) {}

  [[nodiscard]] std::size_t row() const noexcept { return row_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class RemoteError : public Error {
 public:
  RemoteError(int status, const std::string& message)
      : Error(Errc::remote, "HTTP " + std::to_string(status) + ": " + message), status_(status) {}

  [[nodiscard]] int status() const noexcept { return status_; }

 private:
  int status_;
};

class MissingEmbedding : public Error {
 public:
  explicit MissingEmbedding(std::string key)
      : Error(Errc::missing_embedding, "no embedding for key '" + key + "'"), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace emoclass
