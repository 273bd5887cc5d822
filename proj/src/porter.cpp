#include "hssas/rouge.hpp"

#include <array>
#include <string_view>

namespace hssas {
namespace {

// Martin Porter's 1980 suffix-stripping rules, as originally published.
class PorterStemmer {
 public:
  explicit PorterStemmer(std::string word) : w_(std::move(word)) {}

  std::string run() {
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return w_;
  }

 private:
  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 || !consonant(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC)^m[V] for the first `len` characters.
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // *o: stem ends consonant-vowel-consonant, final consonant not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 3) || consonant(len - 2) || !consonant(len - 1)) return false;
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const { return w_.size() >= s.size() && std::string_view(w_).ends_with(s); }

  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void replace(std::string_view suffix, std::string_view with) {
    w_.resize(stem_len(suffix));
    w_ += with;
  }

  // Longest listed suffix wins; if its condition fails the step does nothing.
  template <std::size_t N>
  void apply(const std::array<Rule, N>& rules, int min_measure) {
    for (const Rule& r : rules) {
      if (!ends(r.suffix)) continue;
      if (measure(stem_len(r.suffix)) > min_measure) replace(r.suffix, r.replacement);
      return;
    }
  }

  void step1a() {
    if (ends("sses")) {
      replace("sses", "ss");
    } else if (ends("ies")) {
      replace("ies", "i");
    } else if (ends("ss")) {
    } else if (ends("s")) {
      replace("s", "");
    }
  }

  void step1b() {
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace("eed", "ee");
      return;
    }
    bool stripped = false;
    for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
      if (ends(suffix) && has_vowel(stem_len(suffix))) {
        replace(suffix, "");
        stripped = true;
        break;
      }
    }
    if (!stripped) return;
    if (ends("at")) {
      replace("at", "ate");
    } else if (ends("bl")) {
      replace("bl", "ble");
    } else if (ends("iz")) {
      replace("iz", "ize");
    } else if (double_consonant(w_.size())) {
      const char c = w_.back();
      if (c != 'l' && c != 's' && c != 'z') w_.pop_back();
    } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
      w_ += 'e';
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) w_.back() = 'i';
  }

  void step2() {
    static constexpr std::array<Rule, 20> rules{{{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
                                                 {"anci", "ance"},   {"izer", "ize"},     {"abli", "able"},
                                                 {"alli", "al"},     {"entli", "ent"},    {"eli", "e"},
                                                 {"ousli", "ous"},   {"ization", "ize"},  {"ation", "ate"},
                                                 {"ator", "ate"},    {"alism", "al"},     {"iveness", "ive"},
                                                 {"fulness", "ful"}, {"ousness", "ous"},  {"aliti", "al"},
                                                 {"iviti", "ive"},   {"biliti", "ble"}}};
    apply(rules, 0);
  }

  void step3() {
    static constexpr std::array<Rule, 7> rules{{{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                                                {"ical", "ic"}, {"ful", ""}, {"ness", ""}}};
    apply(rules, 0);
  }

  void step4() {
    static constexpr std::array<std::string_view, 19> suffixes{"al",   "ance", "ence", "er",  "ic",  "able", "ible",
                                                               "ant",  "ement", "ment", "ent", "ion", "ou",  "ism",
                                                               "ate",  "iti",  "ous",  "ive", "ize"};
    for (std::string_view s : suffixes) {
      if (!ends(s)) continue;
      const std::size_t len = stem_len(s);
      bool ok = measure(len) > 1;
      if (s == "ion") ok = ok && len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't');
      if (ok) replace(s, "");
      return;
    }
  }

  void step5a() {
    if (!ends("e")) return;
    const std::size_t len = stem_len("e");
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) w_.pop_back();
  }

  void step5b() {
    if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
  }

  std::string w_;
};

}  // namespace

std::string stem(std::string_view token) { return PorterStemmer(std::string(token)).run(); }

}  // namespace hssas
