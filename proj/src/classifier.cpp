#include "hssas/classifier.hpp"

#include "hssas/errors.hpp"

namespace hssas {
namespace {

void require_column(const char* what, Var v, Index n) {
  if (v.cols() != 1 || v.rows() != n) {
    throw DimensionError(std::string(what) + ": expected a " + std::to_string(n) + "-vector, got " +
                         std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
  }
}

}  // namespace

ClassifierParams make_classifier(Index state_dim, Index position_dim, Rng& rng) {
  ClassifierParams p{Param("classifier.W_c", {1, state_dim}), Param("classifier.W_s", {state_dim, state_dim}),
                     Param("classifier.W_r", {state_dim, state_dim}), Param("classifier.W_p", {1, position_dim}),
                     Param("classifier.b", {})};
  fill_uniform(p.content.value, rng);
  fill_uniform(p.salience.value, rng);
  fill_uniform(p.novelty.value, rng);
  fill_uniform(p.position.value, rng);
  return p;
}

SummaryState initial_summary(Tape& tape, Index state_dim) { return {tape.constant(Matrix::Zero(state_dim, 1)), {}}; }

Var content_score(Var sentence, ClassifierParams& params) {
  require_column("content_score", sentence, params.content.value.cols());
  return matmul(sentence.tape()->param(params.content), sentence);
}

Var salience_score(Var sentence, Var document, ClassifierParams& params) {
  const Index n = params.salience.value.rows();
  require_column("salience_score", sentence, n);
  require_column("salience_score", document, n);
  return matmul(transpose(sentence), matmul(sentence.tape()->param(params.salience), document));
}

Var novelty_score(Var sentence, Var summary, ClassifierParams& params) {
  const Index n = params.novelty.value.rows();
  require_column("novelty_score", sentence, n);
  require_column("novelty_score", summary, n);
  return matmul(transpose(sentence), matmul(sentence.tape()->param(params.novelty), tanh(summary)));
}

Var position_score(Var position, ClassifierParams& params) {
  require_column("position_score", position, params.position.value.cols());
  return matmul(position.tape()->param(params.position), position);
}

Var sentence_prob(Var content, Var salience, Var novelty, Var position, Var bias) {
  return sigmoid(content + salience - novelty + position + bias);
}

SummaryState update_summary(SummaryState state, Var sentence, Var prob, Var weight) {
  state.summary = state.summary + scale(sentence, weight);
  state.probs.push_back(prob);
  return state;
}

std::vector<Var> score_document(std::span<const Var> sentences, std::span<const Var> positions, Var document,
                                ClassifierParams& params, std::optional<std::span<const int>> gold) {
  if (sentences.empty()) throw DimensionError("score_document: no sentences");
  if (positions.size() != sentences.size()) throw DimensionError("score_document: one position embedding per sentence");
  if (gold && gold->size() != sentences.size()) throw DimensionError("score_document: one gold label per sentence");

  Tape& tape = *document.tape();
  SummaryState state = initial_summary(tape, params.salience.value.rows());
  const Var bias = tape.param(params.bias);
  for (std::size_t j = 0; j < sentences.size(); ++j) {
    const Var s = sentences[j];
    const Var p = sentence_prob(content_score(s, params), salience_score(s, document, params),
                                novelty_score(s, state.summary, params), position_score(positions[j], params), bias);
    const Var weight = gold ? tape.constant(static_cast<double>((*gold)[j])) : p;
    state = update_summary(std::move(state), s, p, weight);
  }
  return state.probs;
}

}  // namespace hssas
