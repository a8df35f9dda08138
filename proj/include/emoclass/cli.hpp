#pragma once

// Subcommands of the `emoclass` tool. Results go to `out`, diagnostics to
// `err`. Exit codes: 0 ok, 2 configuration error (bad flags, missing files),
// 3 data error, 4 missing embeddings, 5 network or remote-service error.

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emoclass/baselines.hpp"
#include "emoclass/config.hpp"
#include "emoclass/datasets.hpp"
#include "emoclass/embeddings.hpp"
#include "emoclass/error.hpp"
#include "emoclass/head.hpp"
#include "emoclass/head_io.hpp"
#include "emoclass/metrics.hpp"
#include "emoclass/remote.hpp"

namespace emoclass::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kMissingEmbeddings = 4,
  kNetworkError = 5,
};

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::config: return kConfigError;
    case Errc::missing_embedding: return kMissingEmbeddings;
    case Errc::network:
    case Errc::remote: return kNetworkError;
    default: return kDataError;
  }
}

namespace detail {

namespace fs = std::filesystem;

inline void require_file(const std::string& path, std::string_view flag) {
  if (path.empty()) throw Error(Errc::config, std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw Error(Errc::config, "file not found: " + path + " (" + std::string(flag) + ")");
}

inline EmbeddingStore load_stores(const std::vector<std::string>& paths) {
  if (paths.empty()) throw Error(Errc::config, "--embeddings is required");
  EmbeddingStore merged;
  for (const auto& p : paths) {
    require_file(p, "--embeddings");
    merged.merge(load_store(p));
  }
  return merged;
}

inline std::string store_fingerprint(const EmbeddingStore& store) {
  return store.fingerprint().empty() ? "precomputed:dim=" + std::to_string(store.dim()) : store.fingerprint();
}

inline void require_keys(const Dataset& ds, const EmbeddingStore& store) {
  for (const auto& s : ds.samples) {
    if (!store.contains(s.key)) throw MissingEmbedding(s.key);
  }
}

/// Rebuilds a text embedder from a model's recorded fingerprint.
inline TextEmbedder embedder_for(const std::string& fingerprint, const std::string& endpoint) {
  auto cfg = EmbedderConfig::from_fingerprint(fingerprint);
  switch (cfg.backend) {
    case Backend::hashing: return make_hashing_embedder(cfg);
    case Backend::remote:
      if (endpoint.empty()) throw Error(Errc::config, "model uses remote embeddings; pass --endpoint");
      cfg.endpoint = endpoint;
      return make_remote_embedder(cfg);
    case Backend::precomputed: break;
  }
  throw Error(Errc::config, "model was trained on precomputed embeddings; new text cannot be embedded");
}

/// Flags collected by CLI11 and applied over the config file.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> settings;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { settings.emplace_back(key, v); }, help);
  }
};

inline RunConfig resolve(const std::string& config_path, const Overrides& overrides) {
  auto cfg = default_run_config();
  if (!config_path.empty()) apply_config_file(cfg, config_path);
  for (const auto& [k, v] : overrides.settings) apply_setting(cfg, k, v);
  return cfg;
}

struct InputFiles {
  std::string train_csv;
  std::string dev_csv;
  std::string test_csv;
};

/// Loads whichever of train/dev/test are given; the schema comes from the
/// first file's header and the others must match it.
inline std::vector<Dataset> load_splits(const RunConfig& cfg) {
  std::vector<Dataset> out;
  std::optional<LabelSchema> schema;
  const std::pair<const std::string*, Split> files[] = {
      {&cfg.train_csv, Split::train}, {&cfg.dev_csv, Split::dev}, {&cfg.test_csv, Split::test}};
  for (const auto& [path, split] : files) {
    if (path->empty()) continue;
    require_file(*path, "--" + std::string(split_name(split)) + "-csv");
    if (!schema) {
      out.push_back(load_dataset(*path, cfg.language, split));
      schema = out.back().schema;
    } else {
      out.push_back(load_dataset(*path, *schema, split));
    }
  }
  if (out.empty()) throw Error(Errc::config, "give at least one of --train-csv, --dev-csv, --test-csv");
  return out;
}

inline void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) return;
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  emoclass::detail::write_file(path, content);
}

}  // namespace detail

inline void add_input_flags(CLI::App* cmd, detail::Overrides& ov) {
  ov.bind(cmd, "--train-csv", "train_csv", "Training split CSV");
  ov.bind(cmd, "--dev-csv", "dev_csv", "Development split CSV");
  ov.bind(cmd, "--test-csv", "test_csv", "Test split CSV");
  ov.bind(cmd, "--language", "language", "Language code recorded in the schema");
}

inline void add_train_flags(CLI::App* cmd, detail::Overrides& ov) {
  ov.bind(cmd, "--lr", "learning_rate", "AdamW learning rate");
  ov.bind(cmd, "--epochs", "max_epochs", "Maximum epochs");
  ov.bind(cmd, "--batch-size", "batch_size", "Mini-batch size");
  ov.bind(cmd, "--patience", "patience", "Early-stopping patience in epochs");
  ov.bind(cmd, "--threshold", "threshold", "Decision threshold");
  ov.bind(cmd, "--dropout", "dropout_rate", "Input dropout rate");
  ov.bind(cmd, "--smoothing", "smoothing_alpha", "Label smoothing alpha");
  ov.bind(cmd, "--weight-decay", "weight_decay", "Decoupled weight decay");
  ov.bind(cmd, "--seeds", "seeds", "Comma-separated seed list");
}

struct EmbedArgs {
  std::string config;
  std::string out;
  std::size_t batch = 32;
  detail::Overrides ov;
};

inline int cmd_embed(const EmbedArgs& a, Backend backend, std::ostream& out, std::ostream& err) {
  auto cfg = default_run_config();
  if (backend == Backend::remote) cfg.embedder.dim = EmbedderConfig::kEncoderDim;
  if (!a.config.empty()) apply_config_file(cfg, a.config);
  for (const auto& [k, v] : a.ov.settings) apply_setting(cfg, k, v);
  cfg.embedder.backend = backend;
  cfg.embedder.validate();
  if (a.out.empty()) throw Error(Errc::config, "--out is required");

  const auto datasets = detail::load_splits(cfg);
  EmbeddingStore store(cfg.embedder.dim, cfg.embedder.fingerprint());
  for (const auto& ds : datasets) {
    if (backend == Backend::hashing) {
      for (const auto& s : ds.samples) store.insert(s.key, embed_hashing(s.text, cfg.embedder));
    } else {
      for (std::size_t start = 0; start < ds.size(); start += a.batch) {
        std::vector<std::string> texts;
        std::vector<std::string> keys;
        for (std::size_t i = start; i < std::min(ds.size(), start + a.batch); ++i) {
          texts.push_back(ds.samples[i].text);
          keys.push_back(ds.samples[i].key);
        }
        auto vectors = embed_remote(texts, cfg.embedder);
        for (std::size_t i = 0; i < vectors.size(); ++i) store.insert(keys[i], std::move(vectors[i]));
      }
    }
    err << "embedded " << ds.size() << " " << split_name(ds.split) << " samples\n";
  }
  detail::write_output(a.out, format_store(store));
  out << "wrote " << store.size() << " vectors (dim " << store.dim() << ") to " << a.out << "\n";
  return kOk;
}

struct TrainArgs {
  std::string config;
  std::vector<std::string> embeddings;
  std::string out_model;
  std::vector<std::uint64_t> seed_flags;
  bool verbose = false;
  detail::Overrides ov;
};

inline std::string checkpoint_name(std::uint64_t seed) { return "model_seed" + std::to_string(seed) + ".txt"; }

inline int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  auto cfg = detail::resolve(a.config, a.ov);
  if (!a.embeddings.empty()) cfg.embeddings = a.embeddings;
  if (!a.out_model.empty()) cfg.out_model = a.out_model;
  if (!a.seed_flags.empty()) cfg.seeds = a.seed_flags;
  cfg.train.validate();
  detail::require_file(cfg.train_csv, "--train-csv");
  detail::require_file(cfg.dev_csv, "--dev-csv");
  if (cfg.out_model.empty()) throw Error(Errc::config, "--out-model is required");
  for (const auto& p : cfg.embeddings) detail::require_file(p, "--embeddings");

  const auto train = load_dataset(cfg.train_csv, cfg.language, Split::train);
  const auto dev = load_dataset(cfg.dev_csv, train.schema, Split::dev);
  const auto store = detail::load_stores(cfg.embeddings);
  detail::require_keys(train, store);
  detail::require_keys(dev, store);

  std::filesystem::create_directories(cfg.out_model);
  const auto [dev_x, dev_y] = gather(dev, store);
  std::vector<EvalReport> reports;
  std::string summary;
  for (const auto seed : cfg.seeds) {
    auto tc = cfg.train;
    tc.seed = seed;
    TrainOptions options;
    if (a.verbose) {
      options.on_epoch = [&err, seed](const EpochRecord& r) {
        err << "seed " << seed << " epoch " << r.epoch << " loss " << emoclass::detail::format_g9(r.train_loss)
            << " dev_macro_f1 " << emoclass::detail::format_fixed(r.dev_macro_f1, 4) << "\n";
      };
    }
    const auto model = train_head(train, dev, store, tc, options);
    const auto path = (std::filesystem::path(cfg.out_model) / checkpoint_name(seed)).string();
    save_model(model, path);
    auto report = classification_report(predict_all(model.params, dev_x, model.threshold), dev_y, train.schema);
    summary += "seed " + std::to_string(seed) + "\tbest_epoch " + std::to_string(model.best_epoch) + "\tepochs " +
               std::to_string(model.history.size()) + "\tdev_macro_f1 " +
               emoclass::detail::format_fixed(report.macro_f1, 4) + "\tdev_micro_f1 " +
               emoclass::detail::format_fixed(report.micro_f1, 4) + "\n";
    reports.push_back(std::move(report));
  }
  const auto agg = aggregate_seeds(reports);
  const auto aggregate_text = summary + format_aggregate(agg);
  detail::write_output((std::filesystem::path(cfg.out_model) / "aggregate.txt").string(), aggregate_text);
  out << aggregate_text;
  return kOk;
}

struct EvalArgs {
  std::string model;
  std::string test_csv;
  std::vector<std::string> embeddings;
  std::string format = "table";
  std::string out_file;
  std::optional<double> threshold;
};

inline std::string render_report(const EvalReport& report, const std::string& format) {
  if (format == "json") return report_to_json(report).dump(2) + "\n";
  const ScoreRow row = to_score_row(report);
  return format_score_table(std::span<const ScoreRow>(&row, 1)) + "\n" + format_report(report);
}

inline int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  if (a.format != "table" && a.format != "json") throw Error(Errc::config, "--format must be table or json");
  detail::require_file(a.model, "--model");
  detail::require_file(a.test_csv, "--test-csv");
  const auto model = load_model(a.model);
  const auto test = load_dataset(a.test_csv, model.schema, Split::test);
  const auto store = detail::load_stores(a.embeddings);
  detail::require_keys(test, store);
  const auto [x, y] = gather(test, store);
  const auto report =
      classification_report(predict_all(model.params, x, a.threshold.value_or(model.threshold)), y, model.schema);
  const auto text = render_report(report, a.format);
  detail::write_output(a.out_file, text);
  out << text;
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string text;
  std::string endpoint;
  std::string format = "table";
  std::optional<double> threshold;
};

inline int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream&) {
  detail::require_file(a.model, "--model");
  if (emoclass::detail::trim(a.text).empty()) throw Error(Errc::empty_text, "--text is empty");
  const auto model = load_model(a.model);
  const double threshold = a.threshold.value_or(model.threshold);
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(Errc::config, "--threshold must be in (0, 1)");
  const auto embedder = detail::embedder_for(model.embedder_fingerprint, a.endpoint);
  const auto pred = predict(model, embedder.embed(a.text), threshold);
  const auto names = model.schema.names();
  if (a.format == "json") {
    nlohmann::ordered_json j;
    for (std::size_t l = 0; l < names.size(); ++l) {
      j[names[l]] = {{"probability", pred.probabilities[l]}, {"label", pred.labels[l]}};
    }
    out << j.dump(2) << "\n";
  } else {
    for (std::size_t l = 0; l < names.size(); ++l) {
      out << names[l] << "\t" << emoclass::detail::format_fixed(pred.probabilities[l], 4) << "\t"
          << static_cast<int>(pred.labels[l]) << "\n";
    }
  }
  return kOk;
}

struct BaselineArgs {
  std::string config;
  std::string kind = "logreg";
  std::vector<std::string> embeddings;
  std::string model;
  std::string out_model;
  std::string text;
  std::string endpoint;
  std::string format = "table";
  detail::Overrides ov;
};

inline int cmd_baseline_fit(const BaselineArgs& a, std::ostream& out, std::ostream&) {
  auto cfg = detail::resolve(a.config, a.ov);
  if (!a.embeddings.empty()) cfg.embeddings = a.embeddings;
  const auto kind = parse_learner_kind(a.kind);
  detail::require_file(cfg.train_csv, "--train-csv");
  if (a.out_model.empty()) throw Error(Errc::config, "--out-model is required");
  const auto train = load_dataset(cfg.train_csv, cfg.language, Split::train);
  const auto store = detail::load_stores(cfg.embeddings);
  detail::require_keys(train, store);
  const auto [x, y] = gather(train, store);
  const auto model = fit_multioutput(kind, x, y, train.schema, detail::store_fingerprint(store));
  detail::write_output(a.out_model, format_baseline(model));
  const auto report = classification_report(predict_all(model, x), y, train.schema);
  out << "training-set report (" << learner_kind_name(kind) << ")\n" << render_report(report, a.format);
  return kOk;
}

inline int cmd_baseline_eval(const BaselineArgs& a, std::ostream& out, std::ostream&) {
  auto cfg = detail::resolve(a.config, a.ov);
  if (!a.embeddings.empty()) cfg.embeddings = a.embeddings;
  detail::require_file(a.model, "--model");
  detail::require_file(cfg.test_csv, "--test-csv");
  const auto model = load_baseline(a.model);
  const auto test = load_dataset(cfg.test_csv, model.schema, Split::test);
  const auto store = detail::load_stores(cfg.embeddings);
  detail::require_keys(test, store);
  const auto [x, y] = gather(test, store);
  out << render_report(classification_report(predict_all(model, x), y, model.schema), a.format);
  return kOk;
}

inline int cmd_baseline_predict(const BaselineArgs& a, std::ostream& out, std::ostream&) {
  detail::require_file(a.model, "--model");
  if (emoclass::detail::trim(a.text).empty()) throw Error(Errc::empty_text, "--text is empty");
  const auto model = load_baseline(a.model);
  const auto embedder = detail::embedder_for(model.embedder_fingerprint, a.endpoint);
  const auto dict = predict_dict(model, a.text, embedder);
  if (a.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [name, label] : dict) j[name] = label;
    out << j.dump(2) << "\n";
  } else {
    for (const auto& [name, label] : dict) out << name << "\t" << static_cast<int>(label) << "\n";
  }
  return kOk;
}

struct ReportArgs {
  std::string scores;
  std::string reference;
  std::string ours;
  std::string format = "table";
  detail::Overrides ov;
};

inline int cmd_report_table(const ReportArgs& a, std::ostream& out, std::ostream&) {
  detail::require_file(a.scores, "--scores");
  const auto rows = parse_score_table(emoclass::detail::read_file(a.scores));
  if (a.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json row;
      row["language"] = r.language;
      for (const auto e : kAllEmotions) {
        const auto& v = r.emotion_f1[static_cast<std::size_t>(e)];
        row[std::string(emotion_name(e))] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
      }
      row["micro"] = r.micro;
      row["macro"] = r.macro;
      j.push_back(row);
    }
    out << j.dump(2) << "\n";
  } else {
    out << format_score_table(rows);
  }
  return kOk;
}

inline int cmd_report_leaderboard(const ReportArgs& a, std::ostream& out, std::ostream&) {
  detail::require_file(a.reference, "--reference");
  const auto reference = parse_leaderboard(emoclass::detail::read_file(a.reference));
  std::map<std::string, double> ours;
  if (!a.ours.empty()) {
    detail::require_file(a.ours, "--ours");
    std::size_t line_no = 0;
    for (const auto& line : emoclass::detail::split(emoclass::detail::read_file(a.ours), '\n')) {
      ++line_no;
      const auto trimmed = emoclass::detail::trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      const auto cells = emoclass::detail::split(trimmed, '\t');
      double score = 0.0;
      if (cells.size() != 2 || !emoclass::detail::parse_double(emoclass::detail::trim(cells[1]), score)) {
        throw ParseError(line_no, 0, "--ours rows must be <language><TAB><score>");
      }
      ours[std::string(emoclass::detail::trim(cells[0]))] = score;
    }
  } else {
    for (const auto& e : reference) {
      if (e.ours) ours[e.language] = *e.ours;
    }
  }
  if (ours.empty()) throw Error(Errc::config, "no scores of our own: pass --ours or add a trailing column");
  out << format_gap_table(leaderboard_compare(ours, reference));
  return kOk;
}

inline int cmd_report_stats(const ReportArgs& a, std::ostream& out, std::ostream&) {
  auto cfg = detail::resolve({}, a.ov);
  const auto datasets = detail::load_splits(cfg);
  const auto stats = split_stats(datasets);
  for (const auto& [split, n] : stats.per_split) out << split_name(split) << "\t" << n << "\n";
  out << "total\t" << stats.total << "\n";
  for (std::size_t l = 0; l < stats.label_names.size(); ++l) {
    out << stats.label_names[l] << "\t" << stats.positives[l] << "\n";
  }
  return kOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-label emotion classification over sentence embeddings", "emoclass"};
  app.require_subcommand(1);
  std::function<int()> action;

  EmbedArgs hash_args;
  auto* embed_hash = app.add_subcommand("embed-hash", "Embed CSV texts with the deterministic hashing embedder");
  add_input_flags(embed_hash, hash_args.ov);
  hash_args.ov.bind(embed_hash, "--dim", "dim", "Embedding dimension (default 256)");
  hash_args.ov.bind(embed_hash, "--max-tokens", "max_tokens", "Token budget per text (default 150)");
  hash_args.ov.bind(embed_hash, "--embed-seed", "embed_seed", "Hash seed");
  embed_hash->add_option("--config", hash_args.config, "key=value config file");
  embed_hash->add_option("--out", hash_args.out, "Output embeddings file");
  embed_hash->callback([&] { action = [&] { return cmd_embed(hash_args, Backend::hashing, out, err); }; });

  EmbedArgs remote_args;
  auto* embed_rem = app.add_subcommand("embed-remote", "Embed CSV texts through an encoder service");
  add_input_flags(embed_rem, remote_args.ov);
  remote_args.ov.bind(embed_rem, "--dim", "dim", "Expected embedding dimension (default 1024)");
  remote_args.ov.bind(embed_rem, "--max-tokens", "max_tokens", "Token budget per text (default 150)");
  remote_args.ov.bind(embed_rem, "--endpoint", "endpoint", "Service base URL, e.g. http://localhost:8080");
  embed_rem->add_option("--batch", remote_args.batch, "Texts per request")->check(CLI::PositiveNumber);
  embed_rem->add_option("--config", remote_args.config, "key=value config file");
  embed_rem->add_option("--out", remote_args.out, "Output embeddings file");
  embed_rem->callback([&] { action = [&] { return cmd_embed(remote_args, Backend::remote, out, err); }; });

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the classification head, one checkpoint per seed");
  add_input_flags(train, train_args.ov);
  add_train_flags(train, train_args.ov);
  train->add_option("--config", train_args.config, "key=value config file");
  train->add_option("--embeddings", train_args.embeddings, "Embeddings file(s)");
  train->add_option("--out-model", train_args.out_model, "Output directory for checkpoints");
  train->add_option("--seed", train_args.seed_flags, "Seed (repeatable)");
  train->add_flag("-v,--verbose", train_args.verbose, "Log every epoch to stderr");
  train->callback([&] { action = [&] { return cmd_train(train_args, out, err); }; });

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a head checkpoint on a labeled split");
  eval->add_option("--model", eval_args.model, "Head checkpoint");
  eval->add_option("--test-csv", eval_args.test_csv, "Labeled CSV to evaluate on");
  eval->add_option("--embeddings", eval_args.embeddings, "Embeddings file(s)");
  eval->add_option("--format", eval_args.format, "table or json");
  eval->add_option("--out", eval_args.out_file, "Also write the report here");
  eval->add_option("--threshold", eval_args.threshold, "Override the decision threshold");
  eval->callback([&] { action = [&] { return cmd_eval(eval_args, out, err); }; });

  PredictArgs predict_args;
  auto* pred = app.add_subcommand("predict", "Print per-emotion probabilities and decisions for one text");
  pred->add_option("--model", predict_args.model, "Head checkpoint");
  pred->add_option("--text", predict_args.text, "Input text");
  pred->add_option("--threshold", predict_args.threshold, "Override the decision threshold");
  pred->add_option("--endpoint", predict_args.endpoint, "Encoder service for remote-embedding models");
  pred->add_option("--format", predict_args.format, "table or json");
  pred->callback([&] { action = [&] { return cmd_predict(predict_args, out, err); }; });

  BaselineArgs base_args;
  auto* baseline = app.add_subcommand("baseline", "Classical multi-output baselines");
  baseline->require_subcommand(1);
  auto* bfit = baseline->add_subcommand("fit", "Fit one binary learner per label");
  add_input_flags(bfit, base_args.ov);
  bfit->add_option("--kind", base_args.kind, "logreg or gnb");
  bfit->add_option("--config", base_args.config, "key=value config file");
  bfit->add_option("--embeddings", base_args.embeddings, "Embeddings file(s)");
  bfit->add_option("--out-model", base_args.out_model, "Output checkpoint file");
  bfit->add_option("--format", base_args.format, "table or json");
  bfit->callback([&] { action = [&] { return cmd_baseline_fit(base_args, out, err); }; });
  auto* beval = baseline->add_subcommand("eval", "Evaluate a baseline on a labeled split");
  beval->add_option("--model", base_args.model, "Baseline checkpoint");
  add_input_flags(beval, base_args.ov);
  beval->add_option("--embeddings", base_args.embeddings, "Embeddings file(s)");
  beval->add_option("--format", base_args.format, "table or json");
  beval->callback([&] { action = [&] { return cmd_baseline_eval(base_args, out, err); }; });
  auto* bpred = baseline->add_subcommand("predict", "Emotion -> 0/1 dictionary for one text");
  bpred->add_option("--model", base_args.model, "Baseline checkpoint");
  bpred->add_option("--text", base_args.text, "Input text");
  bpred->add_option("--endpoint", base_args.endpoint, "Encoder service for remote-embedding models");
  bpred->add_option("--format", base_args.format, "table or json");
  bpred->callback([&] { action = [&] { return cmd_baseline_predict(base_args, out, err); }; });

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Score tables, leaderboard gaps and split statistics");
  report->require_subcommand(1);
  auto* rtable = report->add_subcommand("table", "Render per-language scores as a table");
  rtable->add_option("--scores", report_args.scores, "Tab-separated score rows");
  rtable->add_option("--format", report_args.format, "table or json");
  rtable->callback([&] { action = [&] { return cmd_report_table(report_args, out, err); }; });
  auto* rboard = report->add_subcommand("leaderboard", "Gaps between our scores and ranked teams");
  rboard->add_option("--reference", report_args.reference, "Leaderboard file");
  rboard->add_option("--ours", report_args.ours, "Our scores, <language><TAB><score> per line");
  rboard->callback([&] { action = [&] { return cmd_report_leaderboard(report_args, out, err); }; });
  auto* rstats = report->add_subcommand("stats", "Per-split and per-label counts");
  add_input_flags(rstats, report_args.ov);
  rstats->callback([&] { action = [&] { return cmd_report_stats(report_args, out, err); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return action ? action() : kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"emoclass"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace emoclass::cli
