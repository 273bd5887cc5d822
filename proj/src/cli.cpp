#include "hssas/cli.hpp"

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hssas/errors.hpp"

namespace hssas::cli {
namespace {

using nlohmann::json;

std::vector<Document> encode_split(const CorpusSplit& split, const Vocabulary& vocab, const RunConfig& config) {
  std::vector<Document> docs;
  docs.reserve(split.documents.size());
  for (const RawDocument& raw : split.documents) {
    docs.push_back(encode_document(raw, vocab, config.max_sent_len, config.max_sents));
  }
  return docs;
}

void require_labels(const CorpusSplit& split, const std::filesystem::path& path) {
  for (const RawDocument& raw : split.documents) {
    if (!raw.labels) throw DataError(path.string() + ": document '" + raw.id + "' has no labels");
  }
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct LoadedModel {
  RunConfig config;
  Vocabulary vocab;
  Model model;
};

LoadedModel load_checkpoint_file(const std::filesystem::path& path) {
  Checkpoint ckpt = read_checkpoint(path);
  RunConfig config = RunConfig::parse(ckpt.config_text, path.string() + " (config echo)");
  ModelConfig expected = config.model;
  expected.vocab_size = static_cast<Index>(ckpt.vocabulary.size()) + 2;
  Model model = load_model(ckpt, expected);
  return {std::move(config), Vocabulary(ckpt.vocabulary), std::move(model)};
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

json summary_record(const Document& doc, const Summary& s, bool attention) {
  json rec;
  rec["id"] = doc.id;
  rec["selected"] = s.selected;
  rec["summary"] = s.text;
  rec["probs"] = s.probs;
  if (attention) rec["attention"] = {{"words", s.word_attention}, {"sentences", s.sentence_attention}};
  return rec;
}

std::vector<ScoredText> read_scored(const std::filesystem::path& path, bool system) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<ScoredText> out;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + " line " + std::to_string(number) + ": ";
    try {
      const json j = json::parse(line);
      ScoredText t;
      t.id = j.at("id").get<std::string>();
      if (system) {
        t.texts.push_back(j.at("summary").get<std::string>());
      } else {
        t.texts = j.at("references").get<std::vector<std::string>>();
      }
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw DataError(where + e.what());
    }
  }
  return out;
}

}  // namespace

TrainOutputs cmd_train(RunConfig config) {
  if (config.train_path.empty()) throw UsageError("corpus.train is not set");
  if (config.config_echo_path.empty()) config.config_echo_path = config.checkpoint_path.string() + ".config";

  const CorpusSplit train_split = load_jsonl(config.train_path, SplitRole::kTrain);
  require_labels(train_split, config.train_path);
  CorpusSplit val_split{SplitRole::kValidation, {}};
  if (!config.validation_path.empty()) {
    val_split = load_jsonl(config.validation_path, SplitRole::kValidation);
    require_labels(val_split, config.validation_path);
  }

  const Vocabulary vocab = build_vocab(train_split, config.vocab_cap);
  const std::vector<Document> train_docs = encode_split(train_split, vocab, config);
  const std::vector<Document> val_docs = encode_split(val_split, vocab, config);

  config.model.vocab_size = static_cast<Index>(vocab.size());
  Rng rng(config.train.seed);
  Model model(config.model, rng);
  if (!config.embeddings_path.empty()) {
    model.embedding = load_pretrained(config.embeddings_path, vocab, config.model.word_dim, rng).table;
  }
  model.embedding.trainable = !config.freeze_embeddings;

  const std::string echo = config.to_text();
  TrainOutputs outputs{train(model, train_docs, val_docs, config.train), config.checkpoint_path, config.log_path,
                       config.config_echo_path};

  restore_params(model, outputs.result.best_params);
  save_checkpoint(config.checkpoint_path, model, &outputs.result.best_optimizer, echo, vocab,
                  outputs.result.best_epoch);

  std::ofstream log = open_output(config.log_path);
  log << "epoch,train_loss,val_loss,clip_events\n";
  for (const EpochRecord& r : outputs.result.log) {
    log << r.epoch << ',' << format_real(r.train_loss) << ',' << (r.val_loss ? format_real(*r.val_loss) : "") << ','
        << r.clip_events << '\n';
  }
  std::ofstream echo_out = open_output(config.config_echo_path);
  echo_out << "# hssas checkpoint format " << kCheckpointVersion << "\n" << echo;
  return outputs;
}

void cmd_summarize(const SummarizeOptions& options, std::ostream& out) {
  if (options.lead3) {
    cmd_lead3(options.input, out);
    return;
  }
  LoadedModel loaded = load_checkpoint_file(options.checkpoint);
  const Budget budget = options.budget.value_or(loaded.config.budget);
  const CorpusSplit split = load_jsonl(options.input, SplitRole::kTest);
  for (const RawDocument& raw : split.documents) {
    const Document doc = encode_document(raw, loaded.vocab, loaded.config.max_sent_len, loaded.config.max_sents);
    const Summary s = summarize(loaded.model, doc, budget);
    out << summary_record(doc, s, options.attention).dump() << '\n';
  }
}

void cmd_lead3(const std::filesystem::path& input, std::ostream& out) {
  const CorpusSplit split = load_jsonl(input, SplitRole::kTest);
  const Vocabulary vocab;
  for (const RawDocument& raw : split.documents) {
    // Only sentence boundaries matter here, so no truncation is applied.
    const Document doc =
        encode_document(raw, vocab, std::numeric_limits<std::size_t>::max(), std::numeric_limits<std::size_t>::max());
    out << summary_record(doc, summarize_lead3(doc), false).dump() << '\n';
  }
}

RougeReport cmd_rouge(const std::filesystem::path& system, const std::filesystem::path& reference, RougeMode mode,
                      bool stemming, std::ostream& out) {
  const auto sys = read_scored(system, true);
  const auto refs = read_scored(reference, false);
  const RougeReport report = evaluate_corpus(sys, refs, mode, stemming);
  out << format_report(report);
  return report;
}

void cmd_inspect(const std::filesystem::path& checkpoint, const std::filesystem::path& input, std::ostream& out) {
  LoadedModel loaded = load_checkpoint_file(checkpoint);
  const CorpusSplit split = load_jsonl(input, SplitRole::kTest);
  for (const RawDocument& raw : split.documents) {
    const Document doc = encode_document(raw, loaded.vocab, loaded.config.max_sent_len, loaded.config.max_sents);
    const Summary s = summarize(loaded.model, doc, Budget::sentences(1));
    json tokens = json::array();
    for (const auto& sentence : doc.sentences) {
      std::vector<std::string> words;
      for (int id : sentence) words.push_back(loaded.vocab.word(id));
      tokens.push_back(words);
    }
    json rec;
    rec["id"] = doc.id;
    rec["tokens"] = tokens;
    rec["word_attention"] = s.word_attention;
    rec["sentence_attention"] = s.sentence_attention;
    out << rec.dump() << '\n';
  }
}

namespace {

class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = open_output(path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical self-attentive extractive summarizer"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
  train_cmd->add_option("--config", config_path, "Config file (key = value sections)")->required();
  train_cmd->add_option("--set", overrides, "Override a config key: section.key=value (repeatable)");

  SummarizeOptions sum_opts;
  std::string sum_output;
  std::size_t budget_sentences = 0;
  std::size_t budget_words = 0;
  auto* sum_cmd = app.add_subcommand("summarize", "Extract summaries with a trained model");
  sum_cmd->add_option("--checkpoint", sum_opts.checkpoint, "Model checkpoint");
  sum_cmd->add_option("--input", sum_opts.input, "Corpus JSONL")->required();
  sum_cmd->add_option("--output", sum_output, "Output JSONL (default stdout)");
  auto* by_sentences = sum_cmd->add_option("--budget-sentences", budget_sentences, "Select at most N sentences");
  auto* by_words = sum_cmd->add_option("--budget-words", budget_words, "Select up to N words");
  by_sentences->excludes(by_words);
  sum_cmd->add_flag("--attention", sum_opts.attention, "Include attention weights");
  sum_cmd->add_flag("--lead3", sum_opts.lead3, "Emit the first three sentences instead of running the model");

  std::string lead_input;
  std::string lead_output;
  auto* lead_cmd = app.add_subcommand("lead3", "First-three-sentences baseline");
  lead_cmd->add_option("--input", lead_input, "Corpus JSONL")->required();
  lead_cmd->add_option("--output", lead_output, "Output JSONL (default stdout)");

  std::string system_path;
  std::string reference_path;
  std::string mode_name = "recall75";
  bool stemming = false;
  auto* rouge_cmd = app.add_subcommand("rouge", "Score system summaries against references");
  rouge_cmd->add_option("--system", system_path, "JSONL with id and summary")->required();
  rouge_cmd->add_option("--reference", reference_path, "JSONL with id and references")->required();
  rouge_cmd->add_option("--mode", mode_name, "recall75 (truncate to 75 words) or f1 (full length)");
  rouge_cmd->add_flag("--stem", stemming, "Apply the Porter stemmer");

  std::string inspect_ckpt;
  std::string inspect_input;
  std::string inspect_output;
  auto* inspect_cmd = app.add_subcommand("inspect", "Dump word and sentence attention weights");
  inspect_cmd->add_option("--checkpoint", inspect_ckpt, "Model checkpoint")->required();
  inspect_cmd->add_option("--input", inspect_input, "Corpus JSONL")->required();
  inspect_cmd->add_option("--output", inspect_output, "Output JSONL (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) {
      RunConfig config = RunConfig::load(config_path);
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects section.key=value, got '" + kv + "'");
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      const TrainOutputs o = cmd_train(std::move(config));
      err << "trained " << o.result.log.size() << " epochs, best epoch " << o.result.best_epoch << ", checkpoint "
          << o.checkpoint.string() << '\n';
    } else if (*sum_cmd) {
      if (!sum_opts.lead3 && sum_opts.checkpoint.empty()) throw UsageError("summarize needs --checkpoint or --lead3");
      if (*by_sentences) sum_opts.budget = Budget::sentences(budget_sentences);
      if (*by_words) sum_opts.budget = Budget::words(budget_words);
      if (sum_opts.budget && sum_opts.budget->limit < 1) throw UsageError("budget must be at least 1");
      OutputTarget target(sum_output, out);
      cmd_summarize(sum_opts, target.get());
    } else if (*lead_cmd) {
      OutputTarget target(lead_output, out);
      cmd_lead3(lead_input, target.get());
    } else if (*rouge_cmd) {
      const RougeMode mode = parse_rouge_mode(mode_name);
      cmd_rouge(system_path, reference_path, mode, stemming, out);
    } else if (*inspect_cmd) {
      OutputTarget target(inspect_output, out);
      cmd_inspect(inspect_ckpt, inspect_input, target.get());
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}

}  // namespace hssas::cli
