#include "hssas/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <unordered_set>

#include "json.hpp"

#include "hssas/errors.hpp"

namespace hssas {
namespace {

constexpr std::string_view kPeel = ".,!?;:\"'()[]";

bool peelable(char c) { return kPeel.find(c) != std::string_view::npos; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = i;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    if (end == i) break;

    std::string_view chunk = text.substr(i, end - i);
    i = end;
    std::size_t lead = 0;
    while (lead < chunk.size() && peelable(chunk[lead])) ++lead;
    std::size_t trail = chunk.size();
    while (trail > lead && peelable(chunk[trail - 1])) --trail;

    for (std::size_t k = 0; k < lead; ++k) tokens.emplace_back(1, chunk[k]);
    if (trail > lead) {
      std::string core(chunk.substr(lead, trail - lead));
      for (char& c : core) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      tokens.push_back(std::move(core));
    }
    for (std::size_t k = trail; k < chunk.size(); ++k) tokens.emplace_back(1, chunk[k]);
  }
  return tokens;
}

Vocabulary::Vocabulary() : words_{"<pad>", "<unk>"} {}

Vocabulary::Vocabulary(const std::vector<std::string>& words) : Vocabulary() {
  for (const auto& w : words) {
    if (ids_.contains(w)) throw DataError("duplicate vocabulary word '" + w + "'");
    ids_.emplace(w, static_cast<int>(words_.size()));
    words_.push_back(w);
  }
}

int Vocabulary::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    throw DataError("vocabulary id " + std::to_string(id) + " out of range");
  }
  return words_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(std::string_view word) const { return ids_.contains(std::string(word)); }

Vocabulary build_vocab(const CorpusSplit& corpus, std::size_t cap) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus.documents) {
    for (const auto& sentence : doc.sentences) {
      for (auto& token : tokenize(sentence)) ++counts[std::move(token)];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // std::map iteration is lexicographic, so a stable sort by count keeps ties ordered.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > cap) ranked.resize(cap);

  std::vector<std::string> words;
  words.reserve(ranked.size());
  for (auto& [w, c] : ranked) words.push_back(std::move(w));
  return Vocabulary(words);
}

Document encode_document(const RawDocument& raw, const Vocabulary& vocab, std::size_t max_sent_len,
                         std::size_t max_sents) {
  if (max_sent_len < 1 || max_sents < 1) throw UsageError("truncation limits must be at least 1");
  if (raw.labels && raw.labels->size() != raw.sentences.size()) {
    throw DataError("document '" + raw.id + "': " + std::to_string(raw.labels->size()) + " labels for " +
                    std::to_string(raw.sentences.size()) + " sentences");
  }

  Document doc;
  doc.id = raw.id;
  doc.references = raw.references;
  if (raw.labels) doc.labels.emplace();
  for (std::size_t s = 0; s < raw.sentences.size() && doc.sentences.size() < max_sents; ++s) {
    auto tokens = tokenize(raw.sentences[s]);
    if (tokens.empty()) continue;
    if (tokens.size() > max_sent_len) tokens.resize(max_sent_len);
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(vocab.id(t));
    doc.sentences.push_back(std::move(ids));
    doc.text.push_back(raw.sentences[s]);
    if (raw.labels) doc.labels->push_back((*raw.labels)[s]);
  }
  return doc;
}

RawDocument decode_document(const Document& doc, const Vocabulary& vocab) {
  RawDocument raw;
  raw.id = doc.id;
  raw.labels = doc.labels;
  raw.references = doc.references;
  for (const auto& sentence : doc.sentences) {
    std::string text;
    for (int id : sentence) {
      if (!text.empty()) text += ' ';
      text += vocab.word(id);
    }
    raw.sentences.push_back(std::move(text));
  }
  return raw;
}

RawDocument parse_record(std::string_view json_line, std::size_t line) {
  const std::string where = "line " + std::to_string(line) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw DataError(where + "record is not a JSON object");

  RawDocument doc;
  try {
    if (!j.contains("id") || !j["id"].is_string()) throw DataError(where + "missing string field 'id'");
    doc.id = j["id"].get<std::string>();
    if (!j.contains("sentences") || !j["sentences"].is_array()) {
      throw DataError(where + "document '" + doc.id + "' has no 'sentences' array");
    }
    doc.sentences = j["sentences"].get<std::vector<std::string>>();
    if (j.contains("labels") && !j["labels"].is_null()) {
      auto labels = j["labels"].get<std::vector<int>>();
      for (int y : labels) {
        if (y != 0 && y != 1) throw DataError(where + "document '" + doc.id + "' has a label outside {0,1}");
      }
      if (labels.size() != doc.sentences.size()) {
        throw DataError(where + "document '" + doc.id + "' has " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(doc.sentences.size()) + " sentences");
      }
      doc.labels = std::move(labels);
    }
    if (j.contains("references") && !j["references"].is_null()) {
      doc.references = j["references"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + "bad field type (" + e.what() + ")");
  }
  return doc;
}

CorpusSplit load_jsonl(const std::filesystem::path& path, SplitRole role) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  CorpusSplit split;
  split.role = role;
  std::unordered_set<std::string> seen;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RawDocument doc = parse_record(line, number);
    if (!seen.insert(doc.id).second) {
      throw DataError(path.string() + " line " + std::to_string(number) + ": duplicate id '" + doc.id + "'");
    }
    split.documents.push_back(std::move(doc));
  }
  return split;
}

PositionIndex position_indices(int j, int n, int capacity) {
  if (n < 1 || j < 1 || j > n) {
    throw InvariantError("position index " + std::to_string(j) + " outside 1.." + std::to_string(n));
  }
  return {std::min(j, capacity), std::min(n - j + 1, capacity)};
}

}  // namespace hssas
