#include "hssas/model.hpp"

#include "hssas/errors.hpp"
#include "hssas/training.hpp"

namespace hssas {
namespace {

template <typename ParamT, typename Self>
std::vector<ParamT*> collect(Self& m) {
  std::vector<ParamT*> out{&m.embedding.table, &m.positions.forward, &m.positions.backward};
  auto lstm = [&out](auto& p) {
    for (auto* dir : {&p.forward, &p.backward}) {
      for (std::size_t g = 0; g < 4; ++g) {
        out.push_back(&dir->input[g]);
        out.push_back(&dir->recurrent[g]);
        out.push_back(&dir->bias[g]);
      }
    }
  };
  lstm(m.word_lstm);
  out.push_back(&m.word_attention.w1);
  out.push_back(&m.word_attention.w2);
  lstm(m.sentence_lstm);
  out.push_back(&m.sentence_attention.w1);
  out.push_back(&m.sentence_attention.w2);
  for (auto* p : {&m.classifier.content, &m.classifier.salience, &m.classifier.novelty, &m.classifier.position,
                  &m.classifier.bias}) {
    out.push_back(p);
  }
  return out;
}

}  // namespace

Model::Model(const ModelConfig& config, Rng& rng)
    : embedding(make_embedding_table(static_cast<std::size_t>(config.vocab_size), config.word_dim, rng)),
      positions(make_position_tables(config.max_positions, config.position_dim, rng)),
      word_lstm(make_lstm("word_lstm", config.word_dim, config.hidden, rng)),
      word_attention(make_attention("word_attention", config.state_dim(), config.attention_dim, rng)),
      sentence_lstm(make_lstm("sentence_lstm", config.state_dim(), config.hidden, rng)),
      sentence_attention(make_attention("sentence_attention", config.state_dim(), config.attention_dim, rng)),
      classifier(make_classifier(config.state_dim(), 2 * config.position_dim, rng)),
      config_(config) {
  if (config.vocab_size < 2 || config.word_dim < 1 || config.hidden < 1 || config.attention_dim < 1 ||
      config.position_dim < 1 || config.max_positions < 1) {
    throw UsageError("model dimensions must be positive (vocabulary includes PAD and UNK)");
  }
}

std::vector<Param*> Model::params() { return collect<Param>(*this); }
std::vector<const Param*> Model::params() const { return collect<const Param>(*this); }

std::vector<Param*> Model::trainable_params() {
  auto all = params();
  if (!embedding.trainable) std::erase(all, &embedding.table);
  return all;
}

DocumentForward forward(Tape& tape, Model& model, const Document& doc, bool teacher_forcing) {
  const int n = static_cast<int>(doc.sentences.size());
  if (n == 0) throw DataError("document '" + doc.id + "' has no sentences");
  if (teacher_forcing && !doc.labels) throw DataError("document '" + doc.id + "' has no labels for teacher forcing");

  DocumentForward out;
  for (const auto& ids : doc.sentences) {
    SentenceEncoding enc = encode_words(tape, ids, model.embedding, model.word_lstm, model.word_attention);
    out.sentence_vectors.push_back(enc.vector);
    out.word_attention.push_back(enc.weights);
  }
  const DocumentEncoding docenc = encode_sentences(out.sentence_vectors, model.sentence_lstm, model.sentence_attention);
  out.document_vector = docenc.vector;
  out.sentence_attention = docenc.weights;

  std::vector<Var> positions;
  positions.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) positions.push_back(position_embed(tape, model.positions, j, n));

  std::optional<std::span<const int>> gold;
  if (teacher_forcing) gold = std::span<const int>(*doc.labels);
  out.probs = score_document(out.sentence_vectors, positions, out.document_vector, model.classifier, gold);
  return out;
}

Var document_loss(const DocumentForward& out, std::span<const int> labels) { return nll_loss(out.probs, labels); }

std::vector<double> values(std::span<const Var> vars) {
  std::vector<double> v;
  v.reserve(vars.size());
  for (const Var& x : vars) v.push_back(x.scalar());
  return v;
}

}  // namespace hssas
