#include "hssas/inference.hpp"

#include <algorithm>
#include <numeric>

#include "hssas/errors.hpp"

namespace hssas {

std::vector<std::size_t> select_sentences(std::span<const double> probs, std::span<const std::size_t> lengths,
                                          const Budget& budget) {
  if (probs.empty()) throw DataError("select_sentences: empty document");
  if (budget.limit < 1) throw UsageError("summary budget must be at least 1");
  if (budget.kind == Budget::Kind::kWordCount && lengths.size() != probs.size()) {
    throw DimensionError("select_sentences: one length per sentence is required for word budgets");
  }

  std::vector<std::size_t> ranked(probs.size());
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

  std::vector<std::size_t> picked;
  std::size_t words = 0;
  for (std::size_t idx : ranked) {
    if (budget.kind == Budget::Kind::kSentenceCount) {
      if (picked.size() == budget.limit) break;
    } else {
      if (!picked.empty() && words + lengths[idx] > budget.limit) break;
      words += lengths[idx];
    }
    picked.push_back(idx);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<std::size_t> lead3(const Document& doc) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, doc.sentences.size()); ++i) out.push_back(i);
  return out;
}

std::string join_sentences(const Document& doc, std::span<const std::size_t> selected) {
  std::string text;
  for (std::size_t idx : selected) {
    if (!text.empty()) text += ' ';
    text += doc.text.at(idx);
  }
  return text;
}

Summary summarize(Model& model, const Document& doc, const Budget& budget) {
  Tape tape;
  const DocumentForward out = forward(tape, model, doc);
  Summary s;
  s.probs = values(out.probs);
  std::vector<std::size_t> lengths;
  for (const auto& sentence : doc.sentences) lengths.push_back(sentence.size());
  s.selected = select_sentences(s.probs, lengths, budget);
  s.text = join_sentences(doc, s.selected);
  for (const Var& w : out.word_attention) {
    const auto v = w.value();
    s.word_attention.emplace_back(v.data(), v.data() + v.size());
  }
  const auto a = out.sentence_attention.value();
  s.sentence_attention.assign(a.data(), a.data() + a.size());
  return s;
}

Summary summarize_lead3(const Document& doc) {
  Summary s;
  s.selected = lead3(doc);
  s.text = join_sentences(doc, s.selected);
  return s;
}

}  // namespace hssas
