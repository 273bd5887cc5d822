#include "hssas/training.hpp"

#include <algorithm>
#include <bit>
#include <iterator>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "hssas/errors.hpp"

namespace hssas {

Var nll_loss(std::span<const Var> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) {
    throw DimensionError("nll_loss: " + std::to_string(probs.size()) + " probabilities for " +
                         std::to_string(labels.size()) + " labels");
  }
  if (probs.empty()) throw DimensionError("nll_loss: empty sequence");
  Tape& tape = *probs.front().tape();
  const Var one = tape.constant(1.0);
  std::vector<Var> terms;
  terms.reserve(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) {
    // y is 0 or 1, so only one of the two log terms survives.
    terms.push_back(labels[j] ? log_clamped(probs[j], kLogFloor) : log_clamped(one - probs[j], kLogFloor));
  }
  return scale(sum(stack_rows(terms)), -1.0);
}

double nll_loss(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) {
    throw DimensionError("nll_loss: " + std::to_string(probs.size()) + " probabilities for " +
                         std::to_string(labels.size()) + " labels");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double y = labels[j];
    total -= y * std::log(std::max(probs[j], kLogFloor)) + (1.0 - y) * std::log(std::max(1.0 - probs[j], kLogFloor));
  }
  return total;
}

double nll_loss(std::span<const std::vector<double>> probs, std::span<const std::vector<int>> labels) {
  if (probs.size() != labels.size()) throw DimensionError("nll_loss: document counts differ");
  double total = 0.0;
  for (std::size_t d = 0; d < probs.size(); ++d) total += nll_loss(probs[d], labels[d]);
  return total;
}

double clip_gradients(std::span<Param* const> params, double clip_norm) {
  if (!(clip_norm > 0.0)) throw UsageError("clip norm must be positive");
  double squared = 0.0;
  for (const Param* p : params) {
    if (!p->grad.all_finite()) throw InvariantError("non-finite gradient in " + p->name);
    squared += p->grad.matrix().squaredNorm();
  }
  const double norm = std::sqrt(squared);
  if (norm <= clip_norm) return 1.0;
  const double factor = clip_norm / norm;
  for (Param* p : params) p->grad.matrix() *= factor;
  return factor;
}

AdadeltaState AdadeltaState::for_params(std::span<Param* const> params) {
  AdadeltaState state;
  state.slots.reserve(params.size());
  for (const Param* p : params) state.slots.push_back({Tensor(p->value.shape()), Tensor(p->value.shape())});
  return state;
}

void adadelta_step(Param& param, AdadeltaSlot& slot, double rho, double epsilon) {
  auto g = param.grad.matrix().array();
  auto eg2 = slot.mean_sq_grad.matrix().array();
  auto edx2 = slot.mean_sq_update.matrix().array();
  eg2 = rho * eg2 + (1.0 - rho) * g.square();
  const Eigen::ArrayXXd delta = -((edx2 + epsilon).sqrt() / (eg2 + epsilon).sqrt()) * g;
  edx2 = rho * edx2 + (1.0 - rho) * delta.square();
  param.value.matrix().array() += delta;
}

void TrainConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw UsageError("adadelta rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw UsageError("adadelta epsilon must be positive");
  if (!(clip_norm > 0.0)) throw UsageError("clip norm must be positive");
  if (batch_size < 1) throw UsageError("batch size must be at least 1");
}

double evaluate_loss(Model& model, std::span<const Document> docs, bool teacher_forcing) {
  double total = 0.0;
  std::size_t sentences = 0;
  for (const Document& doc : docs) {
    if (!doc.labels) throw DataError("document '" + doc.id + "' has no labels");
    Tape tape;
    const DocumentForward out = forward(tape, model, doc, teacher_forcing);
    total += nll_loss(values(out.probs), *doc.labels);
    sentences += doc.sentences.size();
  }
  return sentences ? total / static_cast<double>(sentences) : 0.0;
}

std::vector<double> predict(Model& model, const Document& doc) {
  Tape tape;
  return values(forward(tape, model, doc).probs);
}

void restore_params(Model& model, std::span<const Tensor> values) {
  auto params = model.params();
  if (values.size() != params.size()) throw InvariantError("restore_params: parameter count differs");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].shape() != params[i]->value.shape()) throw InvariantError("restore_params: shape differs");
    params[i]->value = values[i];
  }
}

namespace {

std::vector<Tensor> snapshot(Model& model) {
  std::vector<Tensor> out;
  for (const Param* p : model.params()) out.push_back(p->value);
  return out;
}

}  // namespace

TrainResult train(Model& model, std::span<const Document> train_docs, std::span<const Document> validation_docs,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  for (const Document& doc : train_docs) {
    if (!doc.labels) throw DataError("training document '" + doc.id + "' has no labels");
    if (doc.sentences.empty()) throw DataError("training document '" + doc.id + "' has no sentences");
  }
  for (const Document& doc : validation_docs) {
    if (!doc.labels) throw DataError("validation document '" + doc.id + "' has no labels");
  }

  const std::vector<Param*> all = model.params();
  const std::vector<Param*> trainable = model.trainable_params();
  AdadeltaState optimizer = AdadeltaState::for_params(all);
  std::vector<std::size_t> slot_of;
  for (Param* p : trainable) {
    slot_of.push_back(static_cast<std::size_t>(std::find(all.begin(), all.end(), p) - all.begin()));
  }

  Rng shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochRecord record;
    record.epoch = epoch;
    double epoch_loss = 0.0;
    std::size_t epoch_sentences = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      for (Param* p : all) p->zero_grad();
      for (std::size_t k = start; k < stop; ++k) {
        const Document& doc = train_docs[order[k]];
        Tape tape;
        const DocumentForward out = forward(tape, model, doc, config.teacher_forcing);
        const Var loss = document_loss(out, *doc.labels);
        epoch_loss += loss.scalar();
        epoch_sentences += doc.sentences.size();
        tape.backward(loss);
      }
      if (clip_gradients(trainable, config.clip_norm) < 1.0) ++record.clip_events;
      for (std::size_t i = 0; i < trainable.size(); ++i) {
        adadelta_step(*trainable[i], optimizer.slots[slot_of[i]], config.rho, config.epsilon);
      }
    }

    record.train_loss = epoch_sentences ? epoch_loss / static_cast<double>(epoch_sentences) : 0.0;
    if (!validation_docs.empty()) record.val_loss = evaluate_loss(model, validation_docs, config.teacher_forcing);
    result.log.push_back(record);

    const bool improved = record.val_loss ? *record.val_loss < best_val : true;
    if (improved) {
      if (record.val_loss) best_val = *record.val_loss;
      result.best_epoch = epoch;
      result.best_params = snapshot(model);
      result.best_optimizer = optimizer;
    }
    if (on_epoch) on_epoch(record);
  }
  if (result.best_params.empty()) {
    result.best_params = snapshot(model);
    result.best_optimizer = optimizer;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoint container. All integers and reals are little-endian.

namespace {

constexpr char kMagic[5] = {'H', 'S', 'S', 'A', 'S'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out_.write(reinterpret_cast<const char*>(bytes), sizeof(T));
  }

  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void put_tensor(const std::string& name, const Tensor& t) {
    put_string(name);
    put<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (Index e : t.shape()) put<std::uint64_t>(static_cast<std::uint64_t>(e));
    for (double v : t.data()) put<double>(v);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::string bytes, std::string source) : bytes_(std::move(bytes)), source_(std::move(source)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::pair<std::string, Tensor> get_tensor() {
    std::string name = get_string();
    const auto rank = get<std::uint32_t>();
    if (rank > 2) throw DataError(source_ + ": tensor '" + name + "' has unsupported rank " + std::to_string(rank));
    Shape shape;
    std::uint64_t count = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const auto e = get<std::uint64_t>();
      if (e == 0 || e > (std::uint64_t{1} << 40)) throw DataError(source_ + ": tensor '" + name + "' has bad extent");
      shape.push_back(static_cast<Index>(e));
      count *= e;
    }
    need(count * sizeof(double));
    std::vector<double> data(count);
    for (auto& v : data) v = get<double>();
    return {std::move(name), Tensor(std::move(shape), std::move(data))};
  }

  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw DataError(source_ + ": checkpoint is truncated");
  }

  bool at_end() const { return pos_ == bytes_.size(); }
  std::string_view peek(std::size_t n) const { return std::string_view(bytes_).substr(pos_, n); }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  const std::string& source() const { return source_; }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
  std::string source_;
};

const std::string kGradPrefix = "adadelta.mean_sq_grad:";
const std::string kUpdatePrefix = "adadelta.mean_sq_update:";

const Tensor* find_tensor(const Checkpoint& ckpt, const std::string& name) {
  for (const auto& [n, t] : ckpt.tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

const Tensor& require_tensor(const Checkpoint& ckpt, const std::string& name) {
  const Tensor* t = find_tensor(ckpt, name);
  if (!t) throw DataError("checkpoint has no tensor '" + name + "'");
  return *t;
}

ModelConfig infer_config(const Checkpoint& ckpt) {
  ModelConfig c;
  const Tensor& emb = require_tensor(ckpt, "embedding");
  const Tensor& pos = require_tensor(ckpt, "position.forward");
  const Tensor& wi = require_tensor(ckpt, "word_lstm.forward.W_i");
  const Tensor& att = require_tensor(ckpt, "word_attention.W_s1");
  if (emb.rank() != 2 || pos.rank() != 2 || wi.rank() != 2 || att.rank() != 2) {
    throw DataError("checkpoint tensors have unexpected rank");
  }
  c.vocab_size = emb.rows();
  c.word_dim = emb.cols();
  c.max_positions = static_cast<int>(pos.rows());
  c.position_dim = pos.cols();
  c.hidden = wi.rows();
  c.attention_dim = att.rows();
  return c;
}

std::string describe(const ModelConfig& c) {
  return "vocab=" + std::to_string(c.vocab_size) + " word_dim=" + std::to_string(c.word_dim) +
         " hidden=" + std::to_string(c.hidden) + " attention_dim=" + std::to_string(c.attention_dim) +
         " position_dim=" + std::to_string(c.position_dim) + " max_positions=" + std::to_string(c.max_positions);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, const AdadeltaState* optimizer,
                     const std::string& config_text, const Vocabulary& vocab, std::uint64_t epoch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put_string(config_text);
  const auto words = vocab.words();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(words.size()));
  for (const auto& word : words) w.put_string(word);
  w.put<std::uint64_t>(epoch);

  const auto params = model.params();
  if (optimizer && optimizer->slots.size() != params.size()) {
    throw InvariantError("save_checkpoint: optimizer state does not match the model");
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size() * (optimizer ? 3 : 1)));
  for (const Param* p : params) w.put_tensor(p->name, p->value);
  if (optimizer) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      w.put_tensor(kGradPrefix + params[i]->name, optimizer->slots[i].mean_sq_grad);
      w.put_tensor(kUpdatePrefix + params[i]->name, optimizer->slots[i].mean_sq_update);
    }
  }
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes), path.string());

  if (r.peek(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw DataError(path.string() + ": not a checkpoint (bad magic)");
  }
  r.skip(sizeof(kMagic));
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError(path.string() + ": checkpoint version " + std::to_string(version) + ", expected " +
                    std::to_string(kCheckpointVersion));
  }
  Checkpoint ckpt;
  ckpt.config_text = r.get_string();
  const auto words = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < words; ++i) ckpt.vocabulary.push_back(r.get_string());
  ckpt.epoch = r.get<std::uint64_t>();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) ckpt.tensors.push_back(r.get_tensor());
  if (!r.at_end()) throw DataError(path.string() + ": unexpected trailing bytes after the last tensor");
  ckpt.model_config = infer_config(ckpt);
  if (ckpt.model_config.vocab_size != static_cast<Index>(ckpt.vocabulary.size()) + 2) {
    throw DataError(path.string() + ": embedding rows do not match the stored vocabulary");
  }
  return ckpt;
}

Model load_model(const Checkpoint& ckpt, const std::optional<ModelConfig>& expected) {
  if (expected && !(*expected == ckpt.model_config)) {
    throw DataError("checkpoint shape mismatch: stored " + describe(ckpt.model_config) + ", configured " +
                    describe(*expected));
  }
  Rng rng(0);
  Model model(ckpt.model_config, rng);
  for (Param* p : model.params()) {
    const Tensor& t = require_tensor(ckpt, p->name);
    if (t.shape() != p->value.shape()) {
      throw DataError("checkpoint tensor '" + p->name + "' has shape " + shape_string(t.shape()) + ", expected " +
                      shape_string(p->value.shape()));
    }
    p->value = t;
  }
  return model;
}

std::optional<AdadeltaState> load_optimizer(const Checkpoint& ckpt, const Model& model) {
  AdadeltaState state;
  for (const Param* p : model.params()) {
    const Tensor* g = find_tensor(ckpt, kGradPrefix + p->name);
    const Tensor* u = find_tensor(ckpt, kUpdatePrefix + p->name);
    if (!g || !u) return std::nullopt;
    if (g->shape() != p->value.shape() || u->shape() != p->value.shape()) {
      throw DataError("checkpoint optimizer state for '" + p->name + "' has the wrong shape");
    }
    state.slots.push_back({*g, *u});
  }
  return state;
}

}  // namespace hssas
