#pragma once

// Shared test helpers: fixture paths, scratch directories and the seeded
// separable corpus used by the convergence and CLI tests.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "emoclass/datasets.hpp"
#include "emoclass/detail/csv.hpp"
#include "emoclass/detail/random.hpp"
#include "emoclass/detail/text.hpp"
#include "emoclass/embeddings.hpp"

namespace emoclass::testing {

inline std::string fixture(const std::string& name) { return std::string(EMOCLASS_FIXTURE_DIR) + "/" + name; }

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("emoclass-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct SyntheticCorpus {
  std::string train_csv;
  std::string dev_csv;
  std::string test_csv;
};

/// Three independent binary factors drive anger, fear and joy; sadness and
/// surprise are the complements of anger and fear. Each factor state has its
/// own pair of tokens, every token hashes to a distinct bucket, and every text
/// has the same length, so texts differ only in word order within a label
/// combination. Each split cycles through all eight combinations.
inline SyntheticCorpus make_separable_corpus(std::uint64_t seed, std::size_t n_train, std::size_t n_dev,
                                             std::size_t n_test, const EmbedderConfig& embedder = {}) {
  constexpr std::size_t kFactors = 3;
  constexpr std::size_t kPerState = 2;
  constexpr std::size_t kPads = 2;
  std::vector<std::string> tokens;
  std::vector<std::size_t> buckets;
  for (std::size_t k = 0; tokens.size() < 2 * kFactors * kPerState + kPads; ++k) {
    const std::string token = "tok" + std::to_string(k);
    const auto bucket = hash_token(token, embedder.dim, embedder.seed).bucket;
    if (std::find(buckets.begin(), buckets.end(), bucket) != buckets.end()) continue;
    buckets.push_back(bucket);
    tokens.push_back(token);
  }

  detail::Engine engine(seed);
  auto make_split = [&](std::size_t rows) {
    std::string out;
    detail::append_csv_record(out, {"text", "anger", "fear", "joy", "sadness", "surprise"});
    std::vector<std::size_t> combos;
    while (combos.size() < rows) {
      std::vector<std::size_t> round{0, 1, 2, 3, 4, 5, 6, 7};
      detail::shuffle(std::span<std::size_t>(round), engine);
      combos.insert(combos.end(), round.begin(), round.end());
    }
    for (std::size_t r = 0; r < rows; ++r) {
      bool factor[kFactors];
      std::vector<std::string> words;
      for (std::size_t k = 0; k < kFactors; ++k) {
        factor[k] = (combos[r] >> k) & 1u;
        const std::size_t state = factor[k] ? k : kFactors + k;
        for (std::size_t q = 0; q < kPerState; ++q) words.push_back(tokens[state * kPerState + q]);
      }
      for (std::size_t p = 0; p < kPads; ++p) words.push_back(tokens[2 * kFactors * kPerState + p]);
      detail::shuffle(std::span<std::string>(words), engine);
      std::string text;
      for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
      const auto bit = [](bool b) { return std::string(b ? "1" : "0"); };
      detail::append_csv_record(out, {text, bit(factor[0]), bit(factor[1]), bit(factor[2]), bit(!factor[0]),
                                      bit(!factor[1])});
    }
    return out;
  };
  SyntheticCorpus corpus;
  corpus.train_csv = make_split(n_train);
  corpus.dev_csv = make_split(n_dev);
  corpus.test_csv = make_split(n_test);
  return corpus;
}

/// Hashing-embeds every sample of `ds` into `store` under the sample key.
inline void embed_into(const Dataset& ds, EmbeddingStore& store, const EmbedderConfig& embedder = {}) {
  for (const auto& s : ds.samples) store.insert(s.key, embed_hashing(s.text, embedder));
}

}  // namespace emoclass::testing
