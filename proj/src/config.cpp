#include "hssas/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hssas/errors.hpp"

namespace hssas {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

template <typename T>
T parse_positive(std::string_view key, std::string_view value) {
  const T v = parse_number<T>(key, value);
  if (!(v > T(0))) throw UsageError(std::string(key) + " must be positive");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw UsageError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

RougeMode parse_rouge_mode(std::string_view name) {
  if (name == "recall75") return RougeMode::kRecallTruncated;
  if (name == "f1") return RougeMode::kFullLengthF1;
  throw UsageError("unknown ROUGE mode '" + std::string(name) + "' (expected recall75 or f1)");
}

void RunConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "model.word_dim") {
    model.word_dim = parse_positive<Index>(key, value);
  } else if (key == "model.hidden") {
    model.hidden = parse_positive<Index>(key, value);
  } else if (key == "model.attention_dim") {
    model.attention_dim = parse_positive<Index>(key, value);
  } else if (key == "model.position_dim") {
    model.position_dim = parse_positive<Index>(key, value);
  } else if (key == "model.max_positions") {
    model.max_positions = parse_positive<int>(key, value);
  } else if (key == "model.freeze_embeddings") {
    freeze_embeddings = parse_bool(key, value);
  } else if (key == "corpus.vocab_cap") {
    vocab_cap = parse_number<std::size_t>(key, value);
  } else if (key == "corpus.max_sent_len") {
    max_sent_len = parse_positive<std::size_t>(key, value);
  } else if (key == "corpus.max_sents") {
    max_sents = parse_positive<std::size_t>(key, value);
  } else if (key == "corpus.train") {
    train_path = value;
  } else if (key == "corpus.validation") {
    validation_path = value;
  } else if (key == "corpus.embeddings") {
    embeddings_path = value;
  } else if (key == "train.rho") {
    train.rho = parse_number<double>(key, value);
  } else if (key == "train.epsilon") {
    train.epsilon = parse_positive<double>(key, value);
  } else if (key == "train.clip_norm") {
    train.clip_norm = parse_positive<double>(key, value);
  } else if (key == "train.batch_size") {
    train.batch_size = parse_positive<std::size_t>(key, value);
  } else if (key == "train.max_epochs") {
    train.max_epochs = parse_number<std::size_t>(key, value);
  } else if (key == "train.seed") {
    train.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "train.teacher_forcing") {
    train.teacher_forcing = parse_bool(key, value);
  } else if (key == "output.checkpoint") {
    checkpoint_path = value;
  } else if (key == "output.log") {
    log_path = value;
  } else if (key == "output.config_echo") {
    config_echo_path = value;
  } else if (key == "inference.budget") {
    if (value == "sentences") {
      budget.kind = Budget::Kind::kSentenceCount;
    } else if (value == "words") {
      budget.kind = Budget::Kind::kWordCount;
    } else {
      throw UsageError("inference.budget must be 'sentences' or 'words'");
    }
  } else if (key == "inference.limit") {
    budget.limit = parse_positive<std::size_t>(key, value);
  } else if (key == "rouge.mode") {
    rouge_mode = parse_rouge_mode(value);
  } else if (key == "rouge.stemming") {
    rouge_stemming = parse_bool(key, value);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig RunConfig::parse(std::string_view text, std::string_view source) {
  RunConfig config;
  std::string section;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++number;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(source) + " line " + std::to_string(number) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw UsageError(where + "expected 'key = value'");
    const std::string_view name = trim(line.substr(0, eq));
    const std::string key = section.empty() ? std::string(name) : section + "." + std::string(name);
    try {
      config.set(key, line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    }
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "[model]\n"
     << "word_dim = " << model.word_dim << "\n"
     << "hidden = " << model.hidden << "\n"
     << "attention_dim = " << model.attention_dim << "\n"
     << "position_dim = " << model.position_dim << "\n"
     << "max_positions = " << model.max_positions << "\n"
     << "freeze_embeddings = " << (freeze_embeddings ? "true" : "false") << "\n"
     << "\n[corpus]\n"
     << "vocab_cap = " << vocab_cap << "\n"
     << "max_sent_len = " << max_sent_len << "\n"
     << "max_sents = " << max_sents << "\n"
     << "train = " << train_path.string() << "\n"
     << "validation = " << validation_path.string() << "\n"
     << "embeddings = " << embeddings_path.string() << "\n"
     << "\n[train]\n"
     << "rho = " << format_real(train.rho) << "\n"
     << "epsilon = " << format_real(train.epsilon) << "\n"
     << "clip_norm = " << format_real(train.clip_norm) << "\n"
     << "batch_size = " << train.batch_size << "\n"
     << "max_epochs = " << train.max_epochs << "\n"
     << "seed = " << train.seed << "\n"
     << "teacher_forcing = " << (train.teacher_forcing ? "true" : "false") << "\n"
     << "\n[output]\n"
     << "checkpoint = " << checkpoint_path.string() << "\n"
     << "log = " << log_path.string() << "\n"
     << "config_echo = " << config_echo_path.string() << "\n"
     << "\n[inference]\n"
     << "budget = " << (budget.kind == Budget::Kind::kSentenceCount ? "sentences" : "words") << "\n"
     << "limit = " << budget.limit << "\n"
     << "\n[rouge]\n"
     << "mode = " << (rouge_mode == RougeMode::kRecallTruncated ? "recall75" : "f1") << "\n"
     << "stemming = " << (rouge_stemming ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace hssas
