#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hssas/config.hpp"

namespace hssas::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

struct TrainOutputs {
  TrainResult result;
  std::filesystem::path checkpoint;
  std::filesystem::path log;
  std::filesystem::path config_echo;
};

/// Trains on config.train_path and writes the best checkpoint, the CSV log
/// (epoch,train_loss,val_loss,clip_events) and the config echo.
TrainOutputs cmd_train(RunConfig config);

struct SummarizeOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path input;
  std::optional<Budget> budget;  // falls back to the checkpoint's config
  bool attention = false;
  bool lead3 = false;
};

/// Writes one JSON record per input document.
void cmd_summarize(const SummarizeOptions& options, std::ostream& out);
void cmd_lead3(const std::filesystem::path& input, std::ostream& out);

/// Prints the score table and returns the report.
RougeReport cmd_rouge(const std::filesystem::path& system, const std::filesystem::path& reference, RougeMode mode,
                      bool stemming, std::ostream& out);

void cmd_inspect(const std::filesystem::path& checkpoint, const std::filesystem::path& input, std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hssas::cli
