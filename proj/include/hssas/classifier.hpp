#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hssas/embeddings.hpp"

namespace hssas {

/// Weights of the logistic membership layer. Every feature is a scalar: row
/// vectors for content and position, bilinear forms for salience and novelty.
struct ClassifierParams {
  Param content;   // W_c: 1 x 2u
  Param salience;  // W_s: 2u x 2u
  Param novelty;   // W_r: 2u x 2u
  Param position;  // W_p: 1 x 2 d_p
  Param bias;      // b: scalar
};

ClassifierParams make_classifier(Index state_dim, Index position_dim, Rng& rng);

/// Running probability-weighted sum of already scored sentence vectors.
struct SummaryState {
  Var summary;  // o, 2u x 1
  std::vector<Var> probs;
};

SummaryState initial_summary(Tape& tape, Index state_dim);

Var content_score(Var sentence, ClassifierParams& params);
Var salience_score(Var sentence, Var document, ClassifierParams& params);
Var novelty_score(Var sentence, Var summary, ClassifierParams& params);
Var position_score(Var position, ClassifierParams& params);
/// sigmoid(C + M - N + P + b)
Var sentence_prob(Var content, Var salience, Var novelty, Var position, Var bias);

/// o <- o + weight * s, and records `prob`. `weight` is usually `prob` itself.
SummaryState update_summary(SummaryState state, Var sentence, Var prob, Var weight);
inline SummaryState update_summary(SummaryState state, Var sentence, Var prob) {
  return update_summary(std::move(state), sentence, prob, prob);
}

/// Scores sentences left to right, feeding each prediction into the summary
/// state seen by the next one. With `gold` set, the summary accumulates gold
/// labels instead of predictions.
std::vector<Var> score_document(std::span<const Var> sentences, std::span<const Var> positions, Var document,
                                ClassifierParams& params, std::optional<std::span<const int>> gold = std::nullopt);

}  // namespace hssas
