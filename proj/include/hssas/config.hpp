#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hssas/inference.hpp"
#include "hssas/model.hpp"
#include "hssas/rouge.hpp"
#include "hssas/training.hpp"

namespace hssas {

/// Every knob of a run. Text form is INI-like:
///
///   [section]
///   key = value   # comment
///
/// Keys are addressed as section.key. Later assignments win, so command-line
/// overrides are applied after the file.
struct RunConfig {
  ModelConfig model;  // vocab_size is filled in from the built vocabulary
  bool freeze_embeddings = false;

  std::size_t vocab_cap = kDefaultVocabCap;
  std::size_t max_sent_len = kDefaultMaxSentLen;
  std::size_t max_sents = kDefaultMaxSents;
  std::filesystem::path train_path;
  std::filesystem::path validation_path;
  std::filesystem::path embeddings_path;

  TrainConfig train;

  std::filesystem::path checkpoint_path = "model.ckpt";
  std::filesystem::path log_path = "train_log.csv";
  std::filesystem::path config_echo_path;  // default: checkpoint_path + ".config"

  Budget budget = Budget::sentences(3);
  RougeMode rouge_mode = RougeMode::kRecallTruncated;
  bool rouge_stemming = false;

  /// Applies one `section.key = value` assignment.
  void set(std::string_view key, std::string_view value);

  static RunConfig parse(std::string_view text, std::string_view source = "config");
  static RunConfig load(const std::filesystem::path& path);

  /// Canonical text listing every key; parse(to_text()) reproduces *this.
  std::string to_text() const;
};

RougeMode parse_rouge_mode(std::string_view name);

}  // namespace hssas
