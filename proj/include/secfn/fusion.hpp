#pragma once

#include <optional>
#include <string>
#include <vector>

#include "secfn/corpus.hpp"
#include "secfn/encoders.hpp"
#include "secfn/features.hpp"

namespace secfn {

// Head/tail proportional slices of a token sequence: ceil(p*n) tokens each;
// when the slices would overlap, the overlap is removed from the tail.
template <class T>
std::pair<std::vector<T>, std::vector<T>> head_tail_slice(const std::vector<T>& tokens, double p,
                                                          bool two_slices = true) {
  if (tokens.empty()) throw DataError("head_tail_slice: empty token list");
  const double limit = two_slices ? 0.5 : 1.0;
  if (!(p > 0.0) || p > limit) throw ConfigError("head_tail_slice: proportion out of range");
  const size_t n = tokens.size();
  const size_t take = static_cast<size_t>(std::ceil(p * static_cast<double>(n)));
  std::vector<T> head(tokens.begin(), tokens.begin() + static_cast<long>(take));
  if (!two_slices) return {head, {}};
  const size_t tail_start = std::max(take, n - take);
  std::vector<T> tail(tokens.begin() + static_cast<long>(tail_start), tokens.end());
  return {head, tail};
}

enum class Direction { Previous, Next, Both };
enum class FusionEncoder { Bilstm, Cnn };
enum class ReorderMode { ArticleOrder, CurrentFirstOrdered, CurrentFirstShuffled };

const char* direction_name(Direction d);
Direction parse_direction(const std::string& s);
const char* reorder_name(ReorderMode m);
ReorderMode parse_reorder(const std::string& s);

// Slot layout around chapter i (0-based): indices into the article's chapter
// list, -1 for out-of-range padding slots.
struct Window {
  std::vector<int> slots;
  int cur_pos = 0;
};

Window context_window(int n_chapters, int chapter, int w, Direction d);

// article_order is the identity; current_first_* move the current slot to
// position 0, the shuffled variant permuting the remaining slots by seed.
Window reorder_context(const Window& win, ReorderMode mode, uint64_t seed);

enum class ArchKind {
  CnnTitle,
  BilstmContent,
  HierContent,
  HierAttnContent,
  HeadTail,
  FuseContent,
  FuseTitle,
  FuseTitleContent,
};

const char* arch_name(ArchKind k);
ArchKind parse_arch(const std::string& s);
bool arch_is_contextual(ArchKind k);

struct SeqCaps {
  int title_cap = 15;
  int sent_cap = 40;
  int max_sents = 30;
  int flat_cap = 300;
};

struct Hyper {
  double learning_rate = 0.01;
  int batch_size = 128;
  double dropout = 0.5;
  int lstm_hidden = 100;
  int cnn_filters = 50;
  std::vector<int> cnn_heights = {1, 2, 3};
  int embed_dim = 100;
  int max_epochs = 50;
  int patience = 5;
  uint64_t seed = 42;
  int micro_batch = 0;  // 0 = per-architecture default

  void validate() const;
};

struct ModelSpec {
  ArchKind kind = ArchKind::CnnTitle;
  int window = 0;  // fusion window w; 0 = non-contextual baseline
  Direction direction = Direction::Both;
  FusionEncoder fusion_encoder = FusionEncoder::Bilstm;
  double head_p = 0.1;        // HeadTail slice proportion
  bool head_and_tail = true;  // false = head-only control group
  ReorderMode reorder = ReorderMode::ArticleOrder;
  uint64_t reorder_seed = 0;
  SeqCaps caps;

  int slot_count() const {
    return direction == Direction::Both ? 2 * window + 1 : window + 1;
  }
  void validate() const;
  std::string to_string() const;
  static ModelSpec from_string(const std::string& s);
};

// Token-id view of one chapter under a NeuralVocab.
struct ChapterTokens {
  std::vector<int> title;                   // capped at title_cap
  std::vector<std::vector<int>> sentences;  // capped; never empty
  std::vector<int> flat;                    // uncapped; capped at batch build
};

struct EncodedCorpus {
  std::vector<std::vector<ChapterTokens>> articles;
  std::string fit_tag;  // copied from the vocabulary used to encode
};

struct TrainExample {
  int article = 0;  // index into EncodedCorpus
  int chapter = 0;  // 0-based chapter index
  int label = -1;   // class id; -1 for prediction-only examples
  uint64_t reorder_salt = 0;
};

NeuralVocab build_neural_vocab(const Corpus& corpus, const std::vector<int>& article_indices,
                               const StopwordSet& stopwords, bool strip_title_nums,
                               const std::string& fit_tag);

EncodedCorpus encode_corpus(const Corpus& corpus, const NeuralVocab& vocab,
                            const StopwordSet& stopwords, bool strip_title_nums,
                            const SeqCaps& caps);

// One architecture + its parameters. Forward passes are pure functions of
// (parameters, input, mode flags); training mutates parameters only through
// sgd_step.
class NeuralModel {
 public:
  NeuralModel(ModelSpec spec, Hyper hyper, NeuralVocab vocab);

  void init_params(uint64_t seed);
  std::vector<Param*> params();
  const ModelSpec& spec() const { return spec_; }
  const Hyper& hyper() const { return hyper_; }
  const NeuralVocab& vocab() const { return vocab_; }
  NeuralVocab& vocab_mutable() { return vocab_; }

  // Logits (batch x 6). dropout_rng must be set when train is true.
  Var* forward(Tape& t, const EncodedCorpus& data, const std::vector<TrainExample>& batch,
               bool train, Rng* dropout_rng);

  // Softmax probabilities, evaluated in micro-batches, dropout off.
  Mat predict_probs(const EncodedCorpus& data, const std::vector<TrainExample>& batch);
  std::vector<Label> predict(const EncodedCorpus& data, const std::vector<TrainExample>& batch);

  int micro_batch_size() const;

 private:
  // Slot chapter vectors for every (example, slot) pair, zeros for padding:
  // (batch * slot_count) x slot_dim, plus the fixed current position.
  Var* slot_matrix(Tape& t, const EncodedCorpus& data, const std::vector<TrainExample>& batch,
                   int* cur_pos_out);
  Var* encode_unique_chapters(Tape& t, const EncodedCorpus& data,
                              const std::vector<std::pair<int, int>>& uniq);
  Var* readout(Tape& t, const EncodedCorpus& data, const std::vector<TrainExample>& batch);

  ModelSpec spec_;
  Hyper hyper_;
  NeuralVocab vocab_;

  EmbeddingTable emb_;
  CnnParams title_cnn_;
  BiLstmParams flat_bilstm_;
  HierParams hier_;
  BiLstmParams head_enc_, tail_enc_;
  BiLstmParams fusion_bilstm_;
  CnnParams fusion_cnn_;
  DenseParams dense_;
  int readout_dim_ = 0;
  bool built_ = false;
};

}  // namespace secfn
