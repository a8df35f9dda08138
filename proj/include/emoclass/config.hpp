#pragma once

// Run configuration for the command-line tool: flat key=value files, with
// precedence flags > file > EMOCLASS_SEED (seed list only) > built-in defaults.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emoclass/detail/text.hpp"
#include "emoclass/embeddings.hpp"
#include "emoclass/error.hpp"
#include "emoclass/head.hpp"
#include "emoclass/head_io.hpp"

namespace emoclass {

inline const std::vector<std::uint64_t> kDefaultSeeds = {0, 1, 2, 3, 4};

struct RunConfig {
  std::string train_csv;
  std::string dev_csv;
  std::string test_csv;
  std::vector<std::string> embeddings;
  std::string out_model;
  std::string language = "und";
  std::vector<std::uint64_t> seeds = kDefaultSeeds;
  EmbedderConfig embedder;
  TrainConfig train;
};

inline std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : detail::split(text, ',')) {
    long long v = 0;
    if (!detail::parse_long(part, v) || v < 0) throw Error(Errc::config, "bad seed '" + part + "'");
    seeds.push_back(static_cast<std::uint64_t>(v));
  }
  if (seeds.empty()) throw Error(Errc::config, "seed list is empty");
  return seeds;
}

/// Applies one key=value setting. Unknown keys are a configuration error.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const std::string v(detail::trim(value));
  if (key == "train_csv") {
    cfg.train_csv = v;
  } else if (key == "dev_csv") {
    cfg.dev_csv = v;
  } else if (key == "test_csv") {
    cfg.test_csv = v;
  } else if (key == "embeddings") {
    cfg.embeddings.clear();
    for (const auto& p : detail::split(v, ',')) {
      if (!detail::trim(p).empty()) cfg.embeddings.emplace_back(detail::trim(p));
    }
  } else if (key == "out_model") {
    cfg.out_model = v;
  } else if (key == "language") {
    cfg.language = v;
  } else if (key == "seeds") {
    cfg.seeds = parse_seed_list(v);
  } else if (key == "backend") {
    if (v == "hashing") cfg.embedder.backend = Backend::hashing;
    else if (v == "precomputed") cfg.embedder.backend = Backend::precomputed;
    else if (v == "remote") cfg.embedder.backend = Backend::remote;
    else throw Error(Errc::config, "unknown backend '" + v + "'");
  } else if (key == "dim" || key == "max_tokens" || key == "embed_seed") {
    long long n = 0;
    if (!detail::parse_long(v, n) || n < 0) throw Error(Errc::config, "'" + std::string(key) + "' needs an integer");
    if (key == "dim") cfg.embedder.dim = static_cast<std::size_t>(n);
    else if (key == "max_tokens") cfg.embedder.max_tokens = static_cast<std::size_t>(n);
    else cfg.embedder.seed = static_cast<std::uint64_t>(n);
  } else if (key == "endpoint") {
    cfg.embedder.endpoint = v;
  } else if (!set_train_config_value(cfg.train, key, v)) {
    throw Error(Errc::config, "unknown setting '" + std::string(key) + "'");
  }
}

/// key=value lines; '#' starts a comment line; blank lines ignored.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::config, "line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error&) {
    throw Error(Errc::config, "cannot read config file '" + path + "'");
  }
  apply_config_text(cfg, text);
}

/// Defaults, then EMOCLASS_SEED (if set) replacing the default seed list.
inline RunConfig default_run_config() {
  RunConfig cfg;
  if (const char* env = std::getenv("EMOCLASS_SEED"); env && *env) cfg.seeds = parse_seed_list(env);
  return cfg;
}

}  // namespace emoclass
