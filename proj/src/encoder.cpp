#include "hssas/encoder.hpp"

#include <algorithm>

#include "hssas/errors.hpp"

namespace hssas {
namespace {

constexpr std::array<const char*, 4> kGateNames = {"i", "f", "o", "g"};

LstmDirection make_direction(const std::string& prefix, Index input_dim, Index hidden, Rng& rng) {
  LstmDirection d;
  for (std::size_t g = 0; g < 4; ++g) {
    d.input[g] = Param(prefix + ".W_" + kGateNames[g], {hidden, input_dim});
    d.recurrent[g] = Param(prefix + ".U_" + kGateNames[g], {hidden, hidden});
    d.bias[g] = Param(prefix + ".b_" + kGateNames[g], {hidden});
    fill_uniform(d.input[g].value, rng);
    fill_uniform(d.recurrent[g].value, rng);
  }
  d.bias[kForgetGate].value.matrix().setOnes();
  return d;
}

Var gate_preactivation(Tape& tape, Var x, Var h, LstmDirection& p, std::size_t g) {
  return matmul(tape.param(p.input[g]), x) + matmul(tape.param(p.recurrent[g]), h) + tape.param(p.bias[g]);
}

std::vector<Var> run_direction(Tape& tape, Var inputs, const std::vector<Index>& order, LstmDirection& p) {
  const Index u = p.hidden();
  LstmState state{tape.constant(Matrix::Zero(u, 1)), tape.constant(Matrix::Zero(u, 1))};
  std::vector<Var> outputs;
  outputs.reserve(order.size());
  for (Index t : order) {
    state = lstm_step(row(inputs, t), state, p);
    outputs.push_back(state.h);
  }
  return outputs;
}

}  // namespace

LstmParams make_lstm(const std::string& prefix, Index input_dim, Index hidden, Rng& rng) {
  LstmParams p;
  p.forward = make_direction(prefix + ".forward", input_dim, hidden, rng);
  p.backward = make_direction(prefix + ".backward", input_dim, hidden, rng);
  return p;
}

AttentionUnit make_attention(const std::string& prefix, Index state_dim, Index attention_dim, Rng& rng) {
  AttentionUnit a{Param(prefix + ".W_s1", {attention_dim, state_dim}), Param(prefix + ".w_s2", {attention_dim})};
  fill_uniform(a.w1.value, rng);
  fill_uniform(a.w2.value, rng);
  return a;
}

LstmState lstm_step(Var x, const LstmState& prev, LstmDirection& params) {
  if (x.cols() != 1 || x.rows() != params.input_dim()) {
    throw DimensionError("lstm_step: input of " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                         " for input dimension " + std::to_string(params.input_dim()));
  }
  Tape& tape = *x.tape();
  const Var i = sigmoid(gate_preactivation(tape, x, prev.h, params, kInputGate));
  const Var f = sigmoid(gate_preactivation(tape, x, prev.h, params, kForgetGate));
  const Var o = sigmoid(gate_preactivation(tape, x, prev.h, params, kOutputGate));
  const Var g = tanh(gate_preactivation(tape, x, prev.h, params, kCandidate));
  const Var c = mul(f, prev.c) + mul(i, g);
  return {mul(o, tanh(c)), c};
}

EncodedSequence bilstm_encode(Var inputs, const Mask& mask, LstmParams& params) {
  const Index steps = inputs.rows();
  if (steps < 1) throw DimensionError("bilstm_encode: empty sequence");
  if (static_cast<Index>(mask.size()) != steps) throw DimensionError("bilstm_encode: mask length differs from input");

  std::vector<Index> order;
  for (Index t = 0; t < steps; ++t) {
    if (mask[static_cast<std::size_t>(t)]) order.push_back(t);
  }
  if (order.empty()) throw InvariantError("bilstm_encode: every position is masked");

  Tape& tape = *inputs.tape();
  const std::vector<Var> fwd = run_direction(tape, inputs, order, params.forward);
  std::vector<Index> reversed(order.rbegin(), order.rend());
  std::vector<Var> bwd = run_direction(tape, inputs, reversed, params.backward);
  std::reverse(bwd.begin(), bwd.end());

  const Index u = params.forward.hidden() + params.backward.hidden();
  const Var padding = tape.constant(Matrix::Zero(u, 1));
  std::vector<Var> rows(static_cast<std::size_t>(steps), padding);
  for (std::size_t k = 0; k < order.size(); ++k) {
    rows[static_cast<std::size_t>(order[k])] = concat(fwd[k], bwd[k]);
  }
  return {stack_rows(rows), mask};
}

Attended self_attend(const EncodedSequence& seq, AttentionUnit& unit) {
  Tape& tape = *seq.states.tape();
  const Var hidden = tanh(matmul(tape.param(unit.w1), transpose(seq.states)));
  const Var scores = transpose(matmul(transpose(tape.param(unit.w2)), hidden));
  const Var weights = softmax(scores, seq.mask);
  return {weights, matmul(transpose(seq.states), weights)};
}

SentenceEncoding encode_words(Tape& tape, std::span<const int> ids, EmbeddingTable& table, LstmParams& lstm,
                              AttentionUnit& attention) {
  if (ids.empty()) throw DimensionError("encode_words: empty sentence");
  Mask mask(ids.size());
  std::transform(ids.begin(), ids.end(), mask.begin(), [](int id) { return id != kPadId; });
  const EncodedSequence seq = bilstm_encode(embed_sentence(tape, table, ids), mask, lstm);
  const Attended att = self_attend(seq, attention);
  return {att.pooled, att.weights};
}

DocumentEncoding encode_sentences(std::span<const Var> sentence_vectors, LstmParams& lstm, AttentionUnit& attention) {
  if (sentence_vectors.empty()) throw DimensionError("encode_sentences: document has no sentences");
  const Var inputs = stack_rows(sentence_vectors);
  const EncodedSequence seq = bilstm_encode(inputs, Mask(sentence_vectors.size(), 1), lstm);
  const Attended att = self_attend(seq, attention);
  return {seq.states, att.pooled, att.weights};
}

}  // namespace hssas
