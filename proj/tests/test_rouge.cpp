#include <algorithm>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "hssas/errors.hpp"
#include "hssas/rouge.hpp"
#include "rouge_oracles.hpp"

using namespace hssas;
using namespace hssas::testing;

namespace {

Tokens words(const std::string& text) { return rouge_tokens(text); }

}  // namespace

TEST_CASE("ngrams") {
  const Tokens aba{"a", "b", "a"};
  CHECK(ngrams(aba, 1) == NGramMultiset{{{"a"}, 2}, {{"b"}, 1}});
  CHECK(ngrams(Tokens{"a", "b", "c"}, 2) == NGramMultiset{{{"a", "b"}, 1}, {{"b", "c"}, 1}});
  CHECK(ngrams(Tokens{"a", "b"}, 3).empty());
  CHECK_THROWS_AS(ngrams(aba, 0), UsageError);
}

TEST_CASE("rouge-n worked examples") {
  const std::vector<Tokens> ref{words("the cat sat on the mat")};
  const Tokens cand = words("the cat the mat");
  const RougeScore r1 = rouge_n(cand, ref, 1);
  CHECK(r1.recall == doctest::Approx(4.0 / 6.0));
  CHECK(r1.precision == 1.0);
  CHECK(r1.f1 == doctest::Approx(0.8));
  const RougeScore r2 = rouge_n(cand, ref, 2);
  CHECK(r2.recall == doctest::Approx(0.4));
  CHECK(r2.precision == doctest::Approx(2.0 / 3.0));

  const RougeScore same = rouge_n(ref[0], ref, 2);
  CHECK(same.recall == 1.0);
  CHECK(same.precision == 1.0);
  CHECK(same.f1 == 1.0);
  CHECK_THROWS_AS(rouge_n(cand, {}, 1), DataError);
  CHECK_THROWS_AS(rouge_n(cand, ref, 0), UsageError);
}

TEST_CASE("rouge-n sums over references") {
  const std::vector<Tokens> refs{{"a", "b"}, {"a", "c", "d"}};
  const RougeScore s = rouge_n(Tokens{"a", "c"}, refs, 1);
  CHECK(s.recall == doctest::Approx(3.0 / 5.0));
  CHECK(s.precision == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("rouge-l worked examples") {
  const std::vector<Tokens> ref{{"a", "b", "c", "d"}};
  const RougeScore s = rouge_l(Tokens{"a", "c", "b", "d"}, ref);
  CHECK(s.recall == 0.75);
  CHECK(s.precision == 0.75);
  CHECK(s.f1 == doctest::Approx(0.75));
  CHECK(rouge_l(ref[0], ref).f1 == 1.0);
  const RougeScore none = rouge_l(Tokens{"x", "y"}, ref);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  const RougeScore empty = rouge_l(Tokens{}, ref);
  CHECK(empty.recall == 0.0);
  CHECK(empty.precision == 0.0);
  CHECK(empty.f1 == 0.0);
}

TEST_CASE("rouge-l keeps the best reference") {
  const std::vector<Tokens> refs{{"x", "y", "z"}, {"a", "b"}};
  const RougeScore s = rouge_l(Tokens{"a", "b"}, refs);
  CHECK(s.f1 == 1.0);
}

TEST_CASE("random pairs agree with brute-force oracles") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tokens cand = random_tokens(rng, 8);
    const Tokens ref = random_tokens(rng, 8);
    const std::vector<Tokens> refs{ref};
    CHECK(lcs_length(cand, ref) == brute_lcs(cand, ref));
    for (std::size_t n : {1u, 2u}) {
      const std::size_t m = brute_matches(cand, ref, n);
      const std::size_t rc = ref.size() >= n ? ref.size() - n + 1 : 0;
      const std::size_t cc = cand.size() >= n ? cand.size() - n + 1 : 0;
      const RougeScore s = rouge_n(cand, refs, n);
      CHECK(s.recall == (rc ? static_cast<double>(m) / static_cast<double>(rc) : 0.0));
      CHECK(s.precision == (cc ? static_cast<double>(m) / static_cast<double>(cc) : 0.0));

      // Swapping roles swaps recall and precision.
      const RougeScore swapped = rouge_n(ref, std::vector<Tokens>{cand}, n);
      CHECK(swapped.recall == s.precision);
      CHECK(swapped.precision == s.recall);

      CHECK(s.f1 >= 0.0);
      CHECK(s.f1 <= std::max(s.recall, s.precision) + 1e-15);
    }
    const std::size_t l = brute_lcs(cand, ref);
    const RougeScore sl = rouge_l(cand, refs);
    CHECK(sl.recall == (ref.empty() ? 0.0 : static_cast<double>(l) / static_cast<double>(ref.size())));
    CHECK(sl.precision == (cand.empty() ? 0.0 : static_cast<double>(l) / static_cast<double>(cand.size())));
  }
}

TEST_CASE("appending a reference gram never lowers the match count") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    Tokens cand = random_tokens(rng, 8);
    Tokens ref = random_tokens(rng, 8);
    if (ref.empty()) continue;
    const std::size_t before = brute_matches(cand, ref, 1);
    const double recall = rouge_n(cand, std::vector<Tokens>{ref}, 1).recall;
    cand.push_back(ref[trial % ref.size()]);
    CHECK(brute_matches(cand, ref, 1) >= before);
    CHECK(rouge_n(cand, std::vector<Tokens>{ref}, 1).recall >= recall);
  }
}

TEST_CASE("truncation") {
  Tokens eighty;
  for (int i = 0; i < 80; ++i) eighty.push_back("w" + std::to_string(i));
  const Tokens t = truncate_candidate(eighty, 75);
  CHECK(t.size() == 75);
  CHECK(t.back() == "w74");
  CHECK(truncate_candidate(Tokens(10, "x"), 75).size() == 10);
  CHECK(truncate_candidate(eighty, 1) == Tokens{"w0"});
  CHECK_THROWS_AS(truncate_candidate(eighty, 0), UsageError);
}

TEST_CASE("porter stemmer examples") {
  CHECK(stem("caresses") == "caress");
  CHECK(stem("cat") == "cat");
  CHECK(stem("running") == "run");
  CHECK(stem("ponies") == "poni");
  CHECK(stem("relational") == "relat");
  CHECK(stem("generalizations") == "gener");
}

TEST_CASE("porter stemmer matches the reference vocabulary") {
  std::ifstream in(std::string(HSSAS_TEST_DATA) + "/porter_vocabulary.tsv");
  REQUIRE(in);
  std::string line;
  std::size_t checked = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const std::string word = line.substr(0, tab);
    CHECK_MESSAGE(stem(word) == line.substr(tab + 1), word);
    ++checked;
  }
  CHECK(checked > 2000);
}

TEST_CASE("scoring tokens drop punctuation and can stem") {
  CHECK(rouge_tokens("The cat, (sat).") == Tokens{"the", "cat", "sat"});
  CHECK(rouge_tokens("Cats running!", true) == Tokens{"cat", "run"});
}

TEST_CASE("corpus evaluation") {
  SUBCASE("identical sets score 1") {
    const std::vector<ScoredText> sys{{"a", {"the cat sat"}}, {"b", {"a dog ran far"}}};
    const std::vector<ScoredText> ref{{"b", {"a dog ran far"}}, {"a", {"the cat sat"}}};
    for (RougeMode mode : {RougeMode::kRecallTruncated, RougeMode::kFullLengthF1}) {
      const RougeReport r = evaluate_corpus(sys, ref, mode);
      CHECK(r.documents == 2);
      for (const RougeScore* s : {&r.rouge1, &r.rouge2, &r.rougeL}) {
        CHECK(s->recall == doctest::Approx(1.0));
        CHECK(s->f1 == doctest::Approx(1.0));
      }
    }
  }
  SUBCASE("mean over documents") {
    // Unigram recalls 3/5 and 4/5.
    const std::vector<ScoredText> sys{{"a", {"p q r"}}, {"b", {"p q r s"}}};
    const std::vector<ScoredText> ref{{"a", {"p q r x y"}}, {"b", {"p q r s z"}}};
    CHECK(evaluate_corpus(sys, ref, RougeMode::kRecallTruncated).rouge1.recall == doctest::Approx(0.7));
  }
  SUBCASE("worked fixture through the corpus path") {
    const std::vector<ScoredText> sys{{"d", {"the cat the mat"}}};
    const std::vector<ScoredText> ref{{"d", {"the cat sat on the mat"}}};
    const RougeReport r = evaluate_corpus(sys, ref, RougeMode::kFullLengthF1);
    CHECK(r.rouge1.f1 == doctest::Approx(0.8));
    CHECK(r.rouge2.recall == doctest::Approx(0.4));
    CHECK(r.rougeL.recall == doctest::Approx(4.0 / 6.0));
  }
  SUBCASE("recall mode truncates the candidate to 75 words") {
    std::string ref_text, cand_text;
    for (int i = 0; i < 80; ++i) cand_text += "w" + std::to_string(i) + " ";
    for (int i = 70; i < 80; ++i) ref_text += "w" + std::to_string(i) + " ";
    const std::vector<ScoredText> sys{{"d", {cand_text}}};
    const std::vector<ScoredText> ref{{"d", {ref_text}}};
    CHECK(evaluate_corpus(sys, ref, RougeMode::kRecallTruncated).rouge1.recall == doctest::Approx(0.5));
    CHECK(evaluate_corpus(sys, ref, RougeMode::kFullLengthF1).rouge1.recall == doctest::Approx(1.0));
  }
  SUBCASE("id mismatch") {
    const std::vector<ScoredText> sys{{"a", {"x"}}};
    const std::vector<ScoredText> ref{{"b", {"x"}}};
    CHECK_THROWS_WITH_AS(evaluate_corpus(sys, ref, RougeMode::kFullLengthF1), doctest::Contains("'a'"), DataError);
    const std::vector<ScoredText> two{{"a", {"x"}}, {"b", {"y"}}};
    CHECK_THROWS_AS(evaluate_corpus(sys, two, RougeMode::kFullLengthF1), DataError);
    const std::vector<ScoredText> dup{{"a", {"x"}}, {"a", {"y"}}};
    CHECK_THROWS_AS(evaluate_corpus(dup, two, RougeMode::kFullLengthF1), DataError);
  }
}

TEST_CASE("report format") {
  RougeReport r;
  r.rouge1 = RougeScore::from(2.0 / 3.0, 1.0);
  const std::string text = format_report(r);
  CHECK(text.find("metric    recall  precision      f1\n") == 0);
  CHECK(text.find("ROUGE-1   0.6667     1.0000  0.8000\n") != std::string::npos);
  CHECK(text.find("ROUGE-L   0.0000     0.0000  0.0000\n") != std::string::npos);
}
