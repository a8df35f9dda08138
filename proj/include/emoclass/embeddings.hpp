#pragma once

// Text-to-vector backends and the L2 + z-score normalization pipeline.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "emoclass/detail/text.hpp"
#include "emoclass/error.hpp"
#include "emoclass/matrix.hpp"

namespace emoclass {

enum class Backend : std::uint8_t { hashing, precomputed, remote };

inline std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::hashing: return "hashing";
    case Backend::precomputed: return "precomputed";
    case Backend::remote: return "remote";
  }
  return "hashing";
}

struct EmbedderConfig {
  static constexpr std::size_t kHashingDim = 256;
  static constexpr std::size_t kEncoderDim = 1024;
  static constexpr std::size_t kMaxTokens = 150;

  Backend backend = Backend::hashing;
  std::size_t dim = kHashingDim;
  std::size_t max_tokens = kMaxTokens;
  std::string endpoint;  // remote only
  std::uint64_t seed = 0;  // hashing only

  void validate() const {
    if (dim < 2) throw Error(Errc::config, "embedding dim must be >= 2");
    if (max_tokens < 1) throw Error(Errc::config, "max_tokens must be >= 1");
    if (backend == Backend::remote && endpoint.empty()) throw Error(Errc::config, "remote backend needs an endpoint");
  }

  /// Identity of the vector space. Models record it so that prediction-time
  /// embeddings come from the same space as training embeddings. The remote
  /// endpoint is deliberately not part of it.
  [[nodiscard]] std::string fingerprint() const {
    std::string fp(backend_name(backend));
    fp += ":dim=" + std::to_string(dim);
    if (backend != Backend::precomputed) fp += ":max_tokens=" + std::to_string(max_tokens);
    if (backend == Backend::hashing) fp += ":seed=" + std::to_string(seed);
    return fp;
  }

  static EmbedderConfig from_fingerprint(std::string_view fp) {
    const auto parts = detail::split(fp, ':');
    EmbedderConfig cfg;
    if (parts[0] == "hashing") {
      cfg.backend = Backend::hashing;
    } else if (parts[0] == "remote") {
      cfg.backend = Backend::remote;
    } else if (parts[0] == "precomputed") {
      cfg.backend = Backend::precomputed;
    } else {
      throw Error(Errc::config, "unknown embedder fingerprint '" + std::string(fp) + "'");
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto eq = parts[i].find('=');
      long long value = 0;
      if (eq == std::string::npos || !detail::parse_long(parts[i].substr(eq + 1), value) || value < 0) {
        throw Error(Errc::config, "malformed fingerprint field '" + parts[i] + "'");
      }
      const auto key = parts[i].substr(0, eq);
      if (key == "dim") {
        cfg.dim = static_cast<std::size_t>(value);
      } else if (key == "max_tokens") {
        cfg.max_tokens = static_cast<std::size_t>(value);
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(value);
      } else {
        throw Error(Errc::config, "unknown fingerprint field '" + key + "'");
      }
    }
    return cfg;
  }
};

inline bool all_finite(std::span<const double> v) {
  for (const double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (const double x : v) sum += x * x;
  return std::sqrt(sum);
}

inline Vector l2_normalize(std::span<const double> v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) throw Error(Errc::zero_vector, "cannot normalize a zero vector");
  Vector out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::vector<std::string_view> whitespace_tokens(std::string_view text, std::size_t limit) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  std::vector<std::string_view> tokens;
  std::size_t pos = text.find_first_not_of(ws);
  while (pos != std::string_view::npos && tokens.size() < limit) {
    const auto end = text.find_first_of(ws, pos);
    tokens.push_back(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = text.find_first_not_of(ws, end);
  }
  return tokens;
}

}  // namespace detail

/// Bucket and sign of one token under the hashing embedder.
struct HashedToken {
  std::size_t bucket;
  double sign;
};

inline HashedToken hash_token(std::string_view token, std::size_t dim, std::uint64_t seed) {
  const auto base = detail::fnv1a64(token);
  const auto bucket_hash = detail::splitmix64(base ^ detail::splitmix64(seed));
  const auto sign_hash = detail::splitmix64(base ^ detail::splitmix64(seed ^ 0x5851F42D4C957F2DULL));
  return {static_cast<std::size_t>(bucket_hash % dim), (sign_hash & 1U) ? -1.0 : 1.0};
}

/// Signed feature hashing over whitespace tokens (first max_tokens only),
/// L2-normalized. A pure function of (text, dim, max_tokens, seed).
inline Vector embed_hashing(std::string_view text, const EmbedderConfig& config) {
  const auto tokens = detail::whitespace_tokens(text, config.max_tokens);
  if (tokens.empty()) throw Error(Errc::empty_text, "nothing to embed");
  Vector acc(config.dim, 0.0);
  for (const auto token : tokens) {
    const auto h = hash_token(token, config.dim, config.seed);
    acc[h.bucket] += h.sign;
  }
  return l2_normalize(acc);
}

/// Type-erased single-text embedder.
struct TextEmbedder {
  std::string fingerprint;
  std::size_t dim = 0;
  std::function<Vector(const std::string&)> embed;
};

inline TextEmbedder make_hashing_embedder(EmbedderConfig config) {
  config.backend = Backend::hashing;
  config.validate();
  return {config.fingerprint(), config.dim, [config](const std::string& text) { return embed_hashing(text, config); }};
}

/// Keyed collection of equal-length vectors. Iteration follows insertion order.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim, std::string fingerprint = {})
      : dim_(dim), fingerprint_(std::move(fingerprint)) {}

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] const std::string& fingerprint() const noexcept { return fingerprint_; }
  void set_fingerprint(std::string fp) { fingerprint_ = std::move(fp); }

  void insert(std::string key, Vector values) {
    if (values.size() != dim_) {
      throw Error(Errc::dim_mismatch, "key '" + key + "' has " + std::to_string(values.size()) +
                                          " values, store dim is " + std::to_string(dim_));
    }
    if (!all_finite(values)) throw Error(Errc::parse, "key '" + key + "' has a non-finite value");
    if (key.empty() || key.find_first_of("\t\r\n") != std::string::npos) {
      throw Error(Errc::parse, "store keys must be non-empty and free of tabs and line breaks");
    }
    if (index_.contains(key)) throw Error(Errc::duplicate_key, "duplicate key '" + key + "'");
    index_.emplace(key, entries_.size());
    entries_.emplace_back(std::move(key), std::move(values));
  }

  [[nodiscard]] bool contains(const std::string& key) const { return index_.contains(key); }

  [[nodiscard]] const Vector* find(const std::string& key) const {
    const auto it = index_.find(key);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  [[nodiscard]] const Vector& at(const std::string& key) const {
    const auto* v = find(key);
    if (!v) throw MissingEmbedding(key);
    return *v;
  }

  [[nodiscard]] const std::vector<std::pair<std::string, Vector>>& entries() const noexcept { return entries_; }

  /// Adds every entry of `other`; dims must agree and keys stay unique.
  void merge(const EmbeddingStore& other) {
    if (other.empty()) return;
    if (entries_.empty()) dim_ = other.dim_;
    if (other.dim_ != dim_) throw Error(Errc::dim_mismatch, "cannot merge stores of different dims");
    if (fingerprint_.empty()) fingerprint_ = other.fingerprint_;
    for (const auto& [k, v] : other.entries_) insert(k, v);
  }

 private:
  std::size_t dim_ = 0;
  std::string fingerprint_;
  std::vector<std::pair<std::string, Vector>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Text exchange format:
///   dim=<D> count=<N>[ embedder=<fingerprint>]
///   key<TAB>v1<TAB>...<TAB>vD        (N rows, 9 significant digits)
inline std::string format_store(const EmbeddingStore& store) {
  std::string out = "dim=" + std::to_string(store.dim()) + " count=" + std::to_string(store.size());
  if (!store.fingerprint().empty()) out += " embedder=" + store.fingerprint();
  out += '\n';
  for (const auto& [key, values] : store.entries()) {
    out += key;
    for (const double v : values) {
      out += '\t';
      out += detail::format_g9(v);
    }
    out += '\n';
  }
  return out;
}

inline EmbeddingStore parse_store(std::string_view content) {
  auto lines = detail::split(content, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  if (lines.empty()) throw Error(Errc::parse, "embedding file has no header");

  long long dim = -1;
  long long count = -1;
  std::string fingerprint;
  for (const auto& field : detail::split(lines[0], ' ')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw Error(Errc::parse, "malformed header field '" + field + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "dim") {
      if (!detail::parse_long(value, dim) || dim < 0) throw Error(Errc::parse, "bad dim '" + value + "'");
    } else if (key == "count") {
      if (!detail::parse_long(value, count) || count < 0) throw Error(Errc::parse, "bad count '" + value + "'");
    } else if (key == "embedder") {
      fingerprint = value;
    } else {
      throw Error(Errc::parse, "unknown header field '" + key + "'");
    }
  }
  if (dim < 0 || count < 0) throw Error(Errc::parse, "header must declare dim and count");
  if (static_cast<long long>(lines.size()) - 1 != count) {
    throw Error(Errc::parse, "header declares " + std::to_string(count) + " rows, found " +
                                 std::to_string(lines.size() - 1));
  }

  EmbeddingStore store(static_cast<std::size_t>(dim), fingerprint);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = detail::split(lines[i], '\t');
    if (cells.size() - 1 != static_cast<std::size_t>(dim)) {
      throw Error(Errc::dim_mismatch, "row " + std::to_string(i) + " has " + std::to_string(cells.size() - 1) +
                                          " values, header declares dim=" + std::to_string(dim));
    }
    Vector values(cells.size() - 1);
    for (std::size_t d = 0; d < values.size(); ++d) {
      if (!detail::parse_double(cells[d + 1], values[d])) {
        throw Error(Errc::parse, "row " + std::to_string(i) + ": bad value '" + cells[d + 1] + "'");
      }
    }
    store.insert(cells[0], std::move(values));
  }
  return store;
}

inline EmbeddingStore load_store(const std::string& path) { return parse_store(detail::read_file(path)); }

inline void save_store(const EmbeddingStore& store, const std::string& path) {
  detail::write_file(path, format_store(store));
}

/// Per-dimension z-score statistics (population standard deviation).
struct ScalerParams {
  Vector mean;
  Vector std;

  [[nodiscard]] std::size_t dim() const noexcept { return mean.size(); }
  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

inline ScalerParams fit_scaler(const Matrix& rows) {
  if (rows.rows() < 2) throw Error(Errc::too_few_rows, "scaler needs at least 2 rows");
  const auto n = static_cast<double>(rows.rows());
  ScalerParams p{Vector(rows.cols(), 0.0), Vector(rows.cols(), 0.0)};
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t d = 0; d < rows.cols(); ++d) p.mean[d] += rows(r, d);
  }
  for (double& m : p.mean) m /= n;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t d = 0; d < rows.cols(); ++d) {
      const double c = rows(r, d) - p.mean[d];
      p.std[d] += c * c;
    }
  }
  for (double& s : p.std) s = std::sqrt(s / n);
  return p;
}

inline void transform_row(const ScalerParams& params, std::span<const double> in, std::span<double> out) {
  if (in.size() != params.dim() || out.size() != params.dim()) {
    throw Error(Errc::dim_mismatch, "scaler dim " + std::to_string(params.dim()) + ", input dim " +
                                        std::to_string(in.size()));
  }
  for (std::size_t d = 0; d < in.size(); ++d) {
    // Constant dimensions carry no information; map them to exactly zero.
    out[d] = params.std[d] > 0.0 ? (in[d] - params.mean[d]) / params.std[d] : 0.0;
  }
}

inline Vector transform_scaler(const ScalerParams& params, std::span<const double> row) {
  Vector out(row.size());
  transform_row(params, row, out);
  return out;
}

inline Matrix transform_scaler(const ScalerParams& params, const Matrix& rows) {
  if (rows.cols() != params.dim() && !rows.empty()) {
    throw Error(Errc::dim_mismatch, "scaler dim " + std::to_string(params.dim()) + ", matrix has " +
                                        std::to_string(rows.cols()) + " columns");
  }
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r) transform_row(params, rows.row(r), out.row(r));
  return out;
}

}  // namespace emoclass
