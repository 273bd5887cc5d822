#pragma once

#include <optional>
#include <vector>

#include "hssas/classifier.hpp"
#include "hssas/corpus.hpp"
#include "hssas/encoder.hpp"

namespace hssas {

struct ModelConfig {
  Index vocab_size = 2;
  Index word_dim = 100;
  Index hidden = 200;         // u per direction
  Index attention_dim = 400;  // k
  Index position_dim = 50;    // d_p per direction
  int max_positions = kDefaultMaxPositions;

  Index state_dim() const { return 2 * hidden; }
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Every learnable array of the hierarchical summarizer.
class Model {
 public:
  Model(const ModelConfig& config, Rng& rng);

  const ModelConfig& config() const { return config_; }

  /// All parameters in a fixed order; pointers are into this instance.
  std::vector<Param*> params();
  std::vector<const Param*> params() const;
  /// params() minus a frozen embedding table.
  std::vector<Param*> trainable_params();

  EmbeddingTable embedding;
  PositionTables positions;
  LstmParams word_lstm;
  AttentionUnit word_attention;
  LstmParams sentence_lstm;
  AttentionUnit sentence_attention;
  ClassifierParams classifier;

 private:
  ModelConfig config_;
};

struct DocumentForward {
  std::vector<Var> probs;
  std::vector<Var> sentence_vectors;
  std::vector<Var> word_attention;  // one T_j x 1 vector per sentence
  Var sentence_attention;           // n x 1
  Var document_vector;
};

/// Full forward pass over one encoded document. `teacher_forcing` feeds gold
/// labels into the running summary and needs doc.labels.
DocumentForward forward(Tape& tape, Model& model, const Document& doc, bool teacher_forcing = false);

/// Negative log-likelihood of one document's labels on the tape.
Var document_loss(const DocumentForward& out, std::span<const int> labels);

std::vector<double> values(std::span<const Var> vars);

}  // namespace hssas
