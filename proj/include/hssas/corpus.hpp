#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hssas {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr std::size_t kDefaultVocabCap = 150000;
inline constexpr std::size_t kDefaultMaxSentLen = 50;
inline constexpr std::size_t kDefaultMaxSents = 100;
inline constexpr int kDefaultMaxPositions = 100;

/// Lowercases, splits on whitespace, and peels the characters .,!?;:"'()[]
/// off both ends of every chunk as single-character tokens.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  Vocabulary();
  /// Reserved entries followed by `words` in id order (ids 2, 3, ...).
  explicit Vocabulary(const std::vector<std::string>& words);

  int id(std::string_view word) const;
  const std::string& word(int id) const;
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view word) const;
  /// Non-reserved words in id order.
  std::vector<std::string> words() const { return {words_.begin() + 2, words_.end()}; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> words_;
};

/// Raw record as it appears in a corpus file.
struct RawDocument {
  std::string id;
  std::vector<std::string> sentences;
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<std::string>> references;
};

struct Document {
  std::string id;
  std::vector<std::vector<int>> sentences;
  /// Source text of each kept sentence, aligned with `sentences`.
  std::vector<std::string> text;
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<std::string>> references;
};

enum class SplitRole { kTrain, kValidation, kTest };

struct CorpusSplit {
  SplitRole role = SplitRole::kTrain;
  std::vector<RawDocument> documents;
};

Vocabulary build_vocab(const CorpusSplit& corpus, std::size_t cap = kDefaultVocabCap);

/// Tokenizes and maps to ids. Sentences that tokenize to nothing are dropped
/// together with their labels, then sentences and documents are truncated.
Document encode_document(const RawDocument& raw, const Vocabulary& vocab, std::size_t max_sent_len = kDefaultMaxSentLen,
                         std::size_t max_sents = kDefaultMaxSents);

/// Space-joined words of every sentence; UNK becomes "<unk>".
RawDocument decode_document(const Document& doc, const Vocabulary& vocab);

CorpusSplit load_jsonl(const std::filesystem::path& path, SplitRole role = SplitRole::kTrain);
/// Parses one record; `line` is used in error messages only.
RawDocument parse_record(std::string_view json_line, std::size_t line);

struct PositionIndex {
  int forward;
  int backward;
};

/// 1-based forward (j) and backward (n - j + 1) positions, clamped to `capacity`.
PositionIndex position_indices(int j, int n, int capacity = kDefaultMaxPositions);

}  // namespace hssas
