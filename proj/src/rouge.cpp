#include "hssas/rouge.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "hssas/corpus.hpp"
#include "hssas/errors.hpp"

namespace hssas {

RougeScore RougeScore::from(double recall, double precision) {
  const double denom = recall + precision;
  return {recall, precision, denom > 0.0 ? 2.0 * precision * recall / denom : 0.0};
}

NGramMultiset ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n < 1) throw UsageError("n-gram order must be at least 1");
  NGramMultiset out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

namespace {

std::size_t total(const NGramMultiset& grams) {
  std::size_t t = 0;
  for (const auto& [g, c] : grams) t += c;
  return t;
}

double ratio(std::size_t num, std::size_t den) { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }

}  // namespace

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const Tokens> references, std::size_t n) {
  if (n < 1) throw UsageError("ROUGE-N needs n >= 1");
  if (references.empty()) throw DataError("ROUGE needs at least one reference");
  const NGramMultiset cand = ngrams(candidate, n);
  const std::size_t cand_total = total(cand);

  std::size_t matched = 0;
  std::size_t ref_total = 0;
  for (const Tokens& ref : references) {
    const NGramMultiset grams = ngrams(ref, n);
    ref_total += total(grams);
    for (const auto& [gram, count] : grams) {
      auto it = cand.find(gram);
      if (it != cand.end()) matched += std::min(count, it->second);
    }
  }
  return RougeScore::from(ratio(matched, ref_total), ratio(matched, cand_total * references.size()));
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const Tokens> references) {
  if (references.empty()) throw DataError("ROUGE needs at least one reference");
  RougeScore best;
  bool first = true;
  for (const Tokens& ref : references) {
    const std::size_t l = lcs_length(candidate, ref);
    const RougeScore s = RougeScore::from(ratio(l, ref.size()), ratio(l, candidate.size()));
    if (first || s.f1 > best.f1) best = s;
    first = false;
  }
  return best;
}

Tokens truncate_candidate(std::span<const std::string> tokens, std::size_t word_limit) {
  if (word_limit < 1) throw UsageError("truncation limit must be at least 1");
  return Tokens(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(std::min(word_limit, tokens.size())));
}

Tokens rouge_tokens(std::string_view text, bool use_stemmer) {
  Tokens out;
  for (auto& t : tokenize(text)) {
    const bool punctuation_only =
        std::all_of(t.begin(), t.end(), [](char c) { return std::string_view(".,!?;:\"'()[]").find(c) != std::string_view::npos; });
    if (punctuation_only) continue;
    out.push_back(use_stemmer ? stem(t) : std::move(t));
  }
  return out;
}

RougeReport evaluate_corpus(std::span<const ScoredText> system, std::span<const ScoredText> references, RougeMode mode,
                            bool use_stemmer) {
  std::unordered_map<std::string, const ScoredText*> by_id;
  for (const auto& r : references) {
    if (!by_id.emplace(r.id, &r).second) throw DataError("duplicate reference id '" + r.id + "'");
  }
  if (system.size() != references.size()) {
    throw DataError("system has " + std::to_string(system.size()) + " documents, references have " +
                    std::to_string(references.size()));
  }

  // Documents are averaged in sorted id order so the result does not depend on file order.
  std::vector<const ScoredText*> ordered;
  for (const auto& s : system) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(), [](const ScoredText* a, const ScoredText* b) { return a->id < b->id; });

  RougeReport report;
  auto accumulate = [](RougeScore& acc, const RougeScore& s) {
    acc.recall += s.recall;
    acc.precision += s.precision;
    acc.f1 += s.f1;
  };
  std::string previous;
  for (const ScoredText* sys : ordered) {
    if (report.documents && sys->id == previous) throw DataError("duplicate system id '" + sys->id + "'");
    previous = sys->id;
    auto it = by_id.find(sys->id);
    if (it == by_id.end()) throw DataError("system id '" + sys->id + "' has no reference");
    if (it->second->texts.empty()) throw DataError("document '" + sys->id + "' has no reference summaries");

    std::string joined;
    for (const auto& t : sys->texts) joined += t + " ";
    Tokens cand = rouge_tokens(joined, use_stemmer);
    if (mode == RougeMode::kRecallTruncated) cand = truncate_candidate(cand, kRougeWordLimit);
    std::vector<Tokens> refs;
    for (const auto& t : it->second->texts) refs.push_back(rouge_tokens(t, use_stemmer));

    accumulate(report.rouge1, rouge_n(cand, refs, 1));
    accumulate(report.rouge2, rouge_n(cand, refs, 2));
    accumulate(report.rougeL, rouge_l(cand, refs));
    ++report.documents;
  }
  if (report.documents) {
    const double n = static_cast<double>(report.documents);
    for (RougeScore* s : {&report.rouge1, &report.rouge2, &report.rougeL}) {
      s->recall /= n;
      s->precision /= n;
      s->f1 /= n;
    }
  }
  return report;
}

std::string format_report(const RougeReport& report) {
  std::string out = "metric    recall  precision      f1\n";
  char line[96];
  const std::pair<const char*, const RougeScore*> rows[] = {
      {"ROUGE-1", &report.rouge1}, {"ROUGE-2", &report.rouge2}, {"ROUGE-L", &report.rougeL}};
  for (const auto& [name, s] : rows) {
    std::snprintf(line, sizeof(line), "%-8s %7.4f %10.4f %7.4f\n", name, s->recall, s->precision, s->f1);
    out += line;
  }
  return out;
}

}  // namespace hssas
