#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hssas/embeddings.hpp"

namespace hssas {

/// Nonzero entries mark real (unpadded) timesteps.
using Mask = std::vector<std::uint8_t>;

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };

/// One direction of an LSTM. Gates are indexed by `Gate`.
struct LstmDirection {
  std::array<Param, 4> input;      // u x input_dim
  std::array<Param, 4> recurrent;  // u x u
  std::array<Param, 4> bias;       // u

  Index hidden() const { return input[0].value.rows(); }
  Index input_dim() const { return input[0].value.cols(); }
};

struct LstmParams {
  LstmDirection forward;
  LstmDirection backward;
};

/// Uniform [-0.1, 0.1] weights, zero biases except the forget gate at 1.0.
LstmParams make_lstm(const std::string& prefix, Index input_dim, Index hidden, Rng& rng);

/// Structured self-attention: a = softmax(w2 . tanh(W1 H^T)).
struct AttentionUnit {
  Param w1;  // k x 2u
  Param w2;  // k
};

AttentionUnit make_attention(const std::string& prefix, Index state_dim, Index attention_dim, Rng& rng);

struct LstmState {
  Var h;
  Var c;
};

LstmState lstm_step(Var x, const LstmState& prev, LstmDirection& params);

struct EncodedSequence {
  Var states;  // T x 2u, rows are [forward ; backward]
  Mask mask;
};

/// Runs the forward direction left to right and the backward direction right
/// to left over unmasked rows of `inputs`. Masked rows of the result are zero.
EncodedSequence bilstm_encode(Var inputs, const Mask& mask, LstmParams& params);

struct Attended {
  Var weights;  // T x 1
  Var pooled;   // 2u x 1
};

Attended self_attend(const EncodedSequence& seq, AttentionUnit& unit);

struct SentenceEncoding {
  Var vector;   // 2u x 1
  Var weights;  // word attention, T x 1
};

/// Embedding, word-level BiLSTM and attention pooling for one sentence.
/// PAD ids are masked out.
SentenceEncoding encode_words(Tape& tape, std::span<const int> ids, EmbeddingTable& table, LstmParams& lstm,
                              AttentionUnit& attention);

struct DocumentEncoding {
  Var states;    // n x 2u
  Var vector;    // 2u x 1
  Var weights;   // sentence attention, n x 1
};

DocumentEncoding encode_sentences(std::span<const Var> sentence_vectors, LstmParams& lstm, AttentionUnit& attention);

}  // namespace hssas
