#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hssas/model.hpp"

namespace hssas {

/// Output-size limit for test-time selection.
struct Budget {
  enum class Kind { kSentenceCount, kWordCount };
  Kind kind = Kind::kSentenceCount;
  std::size_t limit = 3;

  static Budget sentences(std::size_t n) { return {Kind::kSentenceCount, n}; }
  static Budget words(std::size_t n) { return {Kind::kWordCount, n}; }
};

/// Greedy pick in descending probability (ties: earlier sentence first).
/// Word budgets stop before the first sentence that would overflow, but the
/// top sentence is always taken. Returned indices are in document order.
std::vector<std::size_t> select_sentences(std::span<const double> probs, std::span<const std::size_t> lengths,
                                          const Budget& budget);

/// Indices of the first three sentences that exist.
std::vector<std::size_t> lead3(const Document& doc);

struct Summary {
  std::vector<std::size_t> selected;
  std::string text;
  std::vector<double> probs;
  std::vector<std::vector<double>> word_attention;
  std::vector<double> sentence_attention;
};

/// Selected source sentences joined with single spaces.
std::string join_sentences(const Document& doc, std::span<const std::size_t> selected);

Summary summarize(Model& model, const Document& doc, const Budget& budget);
Summary summarize_lead3(const Document& doc);

}  // namespace hssas
