#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hssas {

using Tokens = std::vector<std::string>;

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;

  static RougeScore from(double recall, double precision);
};

/// Contiguous n-grams with multiplicity.
using NGramMultiset = std::map<Tokens, std::size_t>;

NGramMultiset ngrams(std::span<const std::string> tokens, std::size_t n);

/// Clipped n-gram overlap summed over references. Recall divides by the total
/// reference n-gram count, precision by candidate n-grams times the number of
/// references.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const Tokens> references, std::size_t n);

/// Length of the longest common subsequence.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Summary-level LCS score against each reference; the best-F1 reference wins.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const Tokens> references);

Tokens truncate_candidate(std::span<const std::string> tokens, std::size_t word_limit);

/// Porter (1980) stemmer for lowercase ASCII tokens.
std::string stem(std::string_view token);

/// Tokens used for scoring: the corpus tokenizer minus punctuation-only
/// tokens, optionally stemmed.
Tokens rouge_tokens(std::string_view text, bool use_stemmer = false);

enum class RougeMode { kRecallTruncated, kFullLengthF1 };

inline constexpr std::size_t kRougeWordLimit = 75;

struct RougeReport {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
  std::size_t documents = 0;
};

struct ScoredText {
  std::string id;
  std::vector<std::string> texts;  // one system summary, or the references
};

/// Per-document ROUGE-1/2/L averaged over documents, matched by id. The
/// recall mode truncates candidates to 75 words first.
RougeReport evaluate_corpus(std::span<const ScoredText> system, std::span<const ScoredText> references, RougeMode mode,
                            bool use_stemmer = false);

/// Fixed-width table with 4-decimal recall, precision and F1 per metric.
std::string format_report(const RougeReport& report);

}  // namespace hssas
