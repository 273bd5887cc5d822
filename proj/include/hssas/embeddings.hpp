#pragma once

#include <filesystem>
#include <random>
#include <span>

#include "hssas/corpus.hpp"
#include "hssas/tape.hpp"

namespace hssas {

/// |V| x d_w word vectors. Row 0 (PAD) stays zero.
struct EmbeddingTable {
  Param table;
  bool trainable = true;

  Index vocab_size() const { return table.value.rows(); }
  Index dim() const { return table.value.cols(); }
};

/// Learned lookups for forward and backward sentence positions.
struct PositionTables {
  Param forward;
  Param backward;

  int max_positions() const { return static_cast<int>(forward.value.rows()); }
  Index dim() const { return forward.value.cols(); }
};

using Rng = std::mt19937_64;

/// Fills `t` with draws from U[-scale, scale].
void fill_uniform(Tensor& t, Rng& rng, double scale = 0.1);

EmbeddingTable make_embedding_table(std::size_t vocab_size, Index dim, Rng& rng);
PositionTables make_position_tables(int max_positions, Index dim, Rng& rng);

struct PretrainedEmbeddings {
  EmbeddingTable table;
  std::size_t matched = 0;
};

/// Reads word2vec text format ("count dim" header, then "word v1 ... vdim").
/// Vocabulary words missing from the file keep a random initialization.
PretrainedEmbeddings load_pretrained(const std::filesystem::path& path, const Vocabulary& vocab, Index dim, Rng& rng);

/// len x d_w matrix of word vectors; PAD ids give zero rows.
Var embed_sentence(Tape& tape, EmbeddingTable& table, std::span<const int> ids);

/// concat(P_f[forward], P_b[backward]) for sentence j of n (1-based).
Var position_embed(Tape& tape, PositionTables& tables, int j, int n);

}  // namespace hssas
