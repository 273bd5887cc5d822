#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "doctest.h"
#include "fixtures.hpp"
#include "hssas/errors.hpp"
#include "hssas/inference.hpp"
#include "hssas/training.hpp"

using namespace hssas;
using namespace hssas::testing;

namespace {

using Indices = std::vector<std::size_t>;

Document text_document(int sentences) {
  Document d;
  d.id = "t";
  for (int i = 0; i < sentences; ++i) {
    d.sentences.push_back({2 + i, 3});
    d.text.push_back("Sentence " + std::to_string(i) + ".");
  }
  return d;
}

// Reference walk over (-p, index) pairs.
Indices oracle_select(const std::vector<double>& probs, const std::vector<std::size_t>& lengths, const Budget& b) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < probs.size(); ++i) order.emplace_back(-probs[i], i);
  std::sort(order.begin(), order.end());
  Indices out;
  std::size_t used = 0;
  for (const auto& [neg, i] : order) {
    const std::size_t cost = b.kind == Budget::Kind::kSentenceCount ? 1 : lengths[i];
    if (!out.empty() && used + cost > b.limit) break;
    if (b.kind == Budget::Kind::kSentenceCount && out.size() == b.limit) break;
    used += cost;
    out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("select sentences examples") {
  CHECK(select_sentences(std::vector<double>{0.9, 0.1, 0.8, 0.7}, {}, Budget::sentences(2)) == Indices{0, 2});
  CHECK(select_sentences(std::vector<double>{0.5, 0.5, 0.5}, {}, Budget::sentences(2)) == Indices{0, 1});
  CHECK(select_sentences(std::vector<double>{0.2, 0.9, 0.8}, std::vector<std::size_t>{40, 50, 30}, Budget::words(75)) ==
        Indices{1});
}

TEST_CASE("select sentences edge cases") {
  // The first pick is kept even when it alone exceeds the word budget.
  CHECK(select_sentences(std::vector<double>{0.3, 0.6}, std::vector<std::size_t>{10, 90}, Budget::words(75)) ==
        Indices{1});
  // Budget larger than the document takes everything.
  CHECK(select_sentences(std::vector<double>{0.1, 0.2}, {}, Budget::sentences(3)) == Indices{0, 1});
  CHECK_THROWS_AS(select_sentences(std::vector<double>{}, {}, Budget::sentences(3)), DataError);
  CHECK_THROWS_AS(select_sentences(std::vector<double>{0.5}, {}, Budget::sentences(0)), UsageError);
  CHECK_THROWS_AS(select_sentences(std::vector<double>{0.5, 0.4}, std::vector<std::size_t>{3}, Budget::words(5)),
                  DimensionError);
}

TEST_CASE("select sentences agrees with a reference walk and respects budgets") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> count(1, 12);
  std::uniform_int_distribution<int> coarse(0, 4);  // coarse values force ties
  std::uniform_int_distribution<std::size_t> len(1, 40);
  std::uniform_int_distribution<std::size_t> limit(1, 80);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = count(rng);
    std::vector<double> probs;
    std::vector<std::size_t> lengths;
    for (int i = 0; i < n; ++i) {
      probs.push_back(coarse(rng) / 4.0);
      lengths.push_back(len(rng));
    }
    const Budget b = trial % 2 ? Budget::words(limit(rng)) : Budget::sentences(limit(rng) % 5 + 1);
    const Indices got = select_sentences(probs, lengths, b);
    CHECK(got == oracle_select(probs, lengths, b));
    CHECK(std::is_sorted(got.begin(), got.end()));
    if (b.kind == Budget::Kind::kSentenceCount) {
      CHECK(got.size() <= b.limit);
    } else {
      std::size_t words = 0;
      for (std::size_t i : got) words += lengths[i];
      CHECK((words <= b.limit || got.size() == 1));
    }

    // Strictly monotone transforms leave the selection unchanged.
    std::vector<double> logits, cubes;
    for (double p : probs) {
      logits.push_back(std::log(p + 1e-3) - std::log1p(1e-3 - p));
      cubes.push_back(p * p * p + 2.0);
    }
    CHECK(select_sentences(logits, lengths, b) == got);
    CHECK(select_sentences(cubes, lengths, b) == got);
  }
}

TEST_CASE("lead3") {
  CHECK(lead3(text_document(5)) == Indices{0, 1, 2});
  CHECK(lead3(text_document(2)) == Indices{0, 1});
  CHECK(lead3(text_document(0)).empty());
  const Summary s = summarize_lead3(text_document(5));
  CHECK(s.text == "Sentence 0. Sentence 1. Sentence 2.");
  CHECK(summarize_lead3(text_document(0)).text.empty());
}

TEST_CASE("summarize a one-sentence document") {
  Rng rng(1);
  Model model(tiny_config(), rng);
  const Document doc = text_document(1);
  for (const Budget& b : {Budget::sentences(1), Budget::sentences(3), Budget::words(1), Budget::words(75)}) {
    const Summary s = summarize(model, doc, b);
    CHECK(s.selected == Indices{0});
    CHECK(s.text == "Sentence 0.");
  }
}

TEST_CASE("summarize output is deterministic and carries attention") {
  Rng rng(2);
  Model model(tiny_config(), rng);
  std::mt19937_64 data(3);
  Document doc = random_document(data, 5, 4, 20);
  const Summary a = summarize(model, doc, Budget::sentences(2));
  const Summary b = summarize(model, doc, Budget::sentences(2));
  CHECK(a.selected == b.selected);
  CHECK(a.text == b.text);
  CHECK(a.probs == b.probs);
  CHECK(a.selected.size() == 2);
  REQUIRE(a.word_attention.size() == 5);
  for (const auto& w : a.word_attention) {
    CHECK(w.size() == 4);
    double total = 0.0;
    for (double v : w) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(a.sentence_attention.size() == 5);
  CHECK(a.probs == predict(model, doc));
}

TEST_CASE("zeroed model reproduces lead3") {
  Rng rng(4);
  Model model(tiny_config(), rng);
  for (Param* p : model.params()) p->value.set_zero();
  std::mt19937_64 data(5);
  Document doc = random_document(data, 6, 3, 20);
  const Summary s = summarize(model, doc, Budget::sentences(3));
  for (double p : s.probs) CHECK(p == 0.5);
  CHECK(s.selected == lead3(doc));
  CHECK(s.text == summarize_lead3(doc).text);
}
