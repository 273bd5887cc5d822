#include "hssas/embeddings.hpp"

#include <fstream>
#include <sstream>

#include "hssas/errors.hpp"

namespace hssas {

void fill_uniform(Tensor& t, Rng& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& v : t.data()) v = dist(rng);
}

EmbeddingTable make_embedding_table(std::size_t vocab_size, Index dim, Rng& rng) {
  EmbeddingTable e{Param("embedding", {static_cast<Index>(vocab_size), dim})};
  fill_uniform(e.table.value, rng);
  e.table.value.matrix().row(kPadId).setZero();
  return e;
}

PositionTables make_position_tables(int max_positions, Index dim, Rng& rng) {
  PositionTables p{Param("position.forward", {max_positions, dim}), Param("position.backward", {max_positions, dim})};
  fill_uniform(p.forward.value, rng);
  fill_uniform(p.backward.value, rng);
  return p;
}

PretrainedEmbeddings load_pretrained(const std::filesystem::path& path, const Vocabulary& vocab, Index dim, Rng& rng) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path.string());

  std::string line;
  long long count = 0;
  Index file_dim = 0;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty embedding file");
  {
    std::istringstream header(line);
    if (!(header >> count >> file_dim) || count < 0 || file_dim <= 0) {
      throw DataError(path.string() + " line 1: expected '<count> <dim>' header");
    }
  }
  if (file_dim != dim) {
    throw DataError(path.string() + ": embedding dimension " + std::to_string(file_dim) + " does not match configured " +
                    std::to_string(dim));
  }

  PretrainedEmbeddings out{make_embedding_table(vocab.size(), dim, rng)};
  auto table = out.table.table.value.matrix();
  std::vector<bool> seen(vocab.size(), false);
  for (std::size_t number = 2; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    Vector v(dim);
    for (Index k = 0; k < dim; ++k) {
      if (!(fields >> v[k])) {
        throw DataError(path.string() + " line " + std::to_string(number) + ": expected " + std::to_string(dim) +
                        " values for '" + word + "'");
      }
    }
    double extra = 0.0;
    if (fields >> extra) {
      throw DataError(path.string() + " line " + std::to_string(number) + ": more than " + std::to_string(dim) +
                      " values for '" + word + "'");
    }
    if (!vocab.contains(word)) continue;
    const int id = vocab.id(word);
    table.row(id) = v.transpose();
    if (!seen[static_cast<std::size_t>(id)]) {
      seen[static_cast<std::size_t>(id)] = true;
      ++out.matched;
    }
  }
  return out;
}

Var embed_sentence(Tape& tape, EmbeddingTable& table, std::span<const int> ids) {
  if (ids.empty()) throw DimensionError("embed_sentence: empty sentence");
  return gather_rows(tape, table.table, ids);
}

Var position_embed(Tape& tape, PositionTables& tables, int j, int n) {
  const PositionIndex idx = position_indices(j, n, tables.max_positions());
  Var fwd = row(tape.param(tables.forward), idx.forward - 1);
  Var bwd = row(tape.param(tables.backward), idx.backward - 1);
  return concat(fwd, bwd);
}

}  // namespace hssas
