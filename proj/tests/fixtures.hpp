#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "hssas/model.hpp"

namespace hssas::testing {

inline ModelConfig tiny_config() {
  ModelConfig c;
  c.vocab_size = 20;
  c.word_dim = 8;
  c.hidden = 4;
  c.attention_dim = 5;
  c.position_dim = 3;
  c.max_positions = 100;
  return c;
}

inline Document random_document(std::mt19937_64& rng, int sentences, int words, int vocab_size,
                                const std::string& id = "doc") {
  std::uniform_int_distribution<int> token(2, vocab_size - 1);
  std::bernoulli_distribution coin(0.5);
  Document d;
  d.id = id;
  d.labels.emplace();
  for (int s = 0; s < sentences; ++s) {
    std::vector<int> ids;
    for (int w = 0; w < words; ++w) ids.push_back(token(rng));
    d.sentences.push_back(ids);
    d.text.push_back("sentence " + std::to_string(s));
    d.labels->push_back(coin(rng) ? 1 : 0);
  }
  return d;
}

inline void zero_direction(LstmDirection& d) {
  for (std::size_t g = 0; g < 4; ++g) {
    d.input[g].value.set_zero();
    d.recurrent[g].value.set_zero();
    d.bias[g].value.set_zero();
  }
}

inline Matrix random_matrix(Index r, Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

inline std::vector<Document> random_corpus(std::uint64_t seed, int documents, int vocab_size) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sentences(3, 6);
  std::uniform_int_distribution<int> words(3, 7);
  std::vector<Document> out;
  for (int d = 0; d < documents; ++d) {
    out.push_back(random_document(rng, sentences(rng), words(rng), vocab_size, "doc" + std::to_string(d)));
  }
  return out;
}

/// Fresh scratch directory, removed first if a previous run left it behind.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hssas_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

}  // namespace hssas::testing
