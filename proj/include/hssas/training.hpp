#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hssas/model.hpp"

namespace hssas {

inline constexpr double kLogFloor = 1e-12;

/// -sum_j [y log p + (1 - y) log(1 - p)] with log arguments clamped at 1e-12.
Var nll_loss(std::span<const Var> probs, std::span<const int> labels);
double nll_loss(std::span<const double> probs, std::span<const int> labels);
/// Sum of per-document losses.
double nll_loss(std::span<const std::vector<double>> probs, std::span<const std::vector<int>> labels);

/// Joint L2 norm over every grad; rescales all grads by clip_norm / norm when
/// the norm exceeds clip_norm. Returns the factor applied (1 when unclipped).
double clip_gradients(std::span<Param* const> params, double clip_norm);

struct AdadeltaSlot {
  Tensor mean_sq_grad;    // E[g^2]
  Tensor mean_sq_update;  // E[dx^2]
};

/// Optimizer state, one slot per parameter in params() order.
struct AdadeltaState {
  std::vector<AdadeltaSlot> slots;

  static AdadeltaState for_params(std::span<Param* const> params);
};

void adadelta_step(Param& param, AdadeltaSlot& slot, double rho, double epsilon);

struct TrainConfig {
  double rho = 0.95;
  double epsilon = 1e-6;
  double clip_norm = 5.0;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 10;
  std::uint64_t seed = 1;
  bool teacher_forcing = false;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per sentence
  std::optional<double> val_loss;
  std::size_t clip_events = 0;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  /// Parameter values at best_epoch (lowest validation loss, or the last
  /// epoch without a validation split), in params() order.
  std::vector<Tensor> best_params;
  AdadeltaState best_optimizer;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Adadelta over shuffled minibatches. Each batch sums document losses,
/// clips the joint gradient and takes one optimizer step.
TrainResult train(Model& model, std::span<const Document> train_docs, std::span<const Document> validation_docs,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Mean loss per sentence, scored as in training.
double evaluate_loss(Model& model, std::span<const Document> docs, bool teacher_forcing = false);

/// Per-sentence probabilities with no gradient bookkeeping kept.
std::vector<double> predict(Model& model, const Document& doc);

void restore_params(Model& model, std::span<const Tensor> values);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string config_text;
  std::vector<std::string> vocabulary;  // non-reserved words in id order
  std::uint64_t epoch = 0;
  ModelConfig model_config;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

void save_checkpoint(const std::filesystem::path& path, const Model& model, const AdadeltaState* optimizer,
                     const std::string& config_text, const Vocabulary& vocab, std::uint64_t epoch);

/// Reads the container and validates it; `expected` pins the model shape.
Checkpoint read_checkpoint(const std::filesystem::path& path);
Model load_model(const Checkpoint& ckpt, const std::optional<ModelConfig>& expected = std::nullopt);
/// Optimizer slots stored alongside the model, if any.
std::optional<AdadeltaState> load_optimizer(const Checkpoint& ckpt, const Model& model);

}  // namespace hssas
