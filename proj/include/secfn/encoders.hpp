#pragma once

#include <map>
#include <string>
#include <vector>

#include "secfn/rng.hpp"
#include "secfn/tensor.hpp"

namespace secfn {

// Token-id vocabulary for the embedding table. Id 0 is the padding row; real
// tokens get ids 1..V. Out-of-vocabulary tokens map to 0 as well.
struct NeuralVocab {
  std::map<std::string, int> ids;
  std::string fit_tag;

  int size() const { return static_cast<int>(ids.size()); }
  int id_of(const std::string& tok) const {
    auto it = ids.find(tok);
    return it == ids.end() ? 0 : it->second;
  }
  void add(const std::string& tok) {
    ids.emplace(tok, static_cast<int>(ids.size()) + 1);
  }
};

// A batch of equal-padded token sequences. ids[b*len + t] == 0 marks padding.
struct TokenBatch {
  int batch = 0;
  int len = 0;
  std::vector<int> ids;

  static TokenBatch pack(const std::vector<std::vector<int>>& seqs, int min_len = 1);
  Mat step_mask(int t) const;  // batch x 1, 1.0 where ids != 0
  std::vector<int> step_ids(int t) const;
};

// (V+1) x dim table; row 0 is the all-zero padding vector and is excluded
// from updates.
struct EmbeddingTable {
  Param table;
  int dim = 0;

  void init(int vocab_size, int embed_dim, Rng& rng);
  // Embeds all positions of the batch: (batch*len) x dim.
  Var* embed_flat(Tape& t, const TokenBatch& b) const;
  // Embeds one time step: batch x dim.
  Var* embed_step(Tape& t, const TokenBatch& b, int step) const;
};

struct LstmParams {
  Param wx;  // in x 4h, gate order [i f g o]
  Param wh;  // h x 4h
  Param b;   // 1 x 4h
  int in_dim = 0, hidden = 0;

  void init(const std::string& name, int in, int h, Rng& rng);
  void collect(std::vector<Param*>& out);
};

struct BiLstmParams {
  LstmParams fwd, bwd;
  int hidden = 0;

  void init(const std::string& name, int in, int h, Rng& rng);
  void collect(std::vector<Param*>& out);
  int out_dim() const { return 2 * hidden; }
};

// Runs one LSTM direction over step inputs (each batch x in). Masked steps
// carry state through unchanged and contribute no parameter gradient.
// Returns per-step hidden states in input time order.
std::vector<Var*> lstm_run(Tape& t, const LstmParams& p, const std::vector<Var*>& steps,
                           const std::vector<Mat>& masks, bool reverse);

struct BiLstmOut {
  Var* final = nullptr;             // batch x 2h: [fwd at T-1 ; bwd at 0]
  std::vector<Var*> per_step;       // batch x 2h per step
};

BiLstmOut bilstm_run(Tape& t, const BiLstmParams& p, const std::vector<Var*>& steps,
                     const std::vector<Mat>& masks);

// Embeds and encodes a token batch; the sequence must be nonempty.
BiLstmOut bilstm_encode(Tape& t, const TokenBatch& b, const EmbeddingTable& emb,
                        const BiLstmParams& p);

struct AttentionParams {
  Param w;  // in x att
  Param b;  // 1 x att
  Param v;  // att x 1
  int att_dim = 0;

  void init(const std::string& name, int in, int att, Rng& rng);
  void collect(std::vector<Param*>& out);
};

// Additive attention pooling over per-step outputs; weights form a masked
// softmax over steps. Also exposes the weight matrix (batch x T) on request.
Var* attention_pool(Tape& t, const AttentionParams& p, const std::vector<Var*>& steps,
                    const std::vector<Mat>& masks, Var** weights_out = nullptr);

struct CnnParams {
  std::vector<int> heights;
  std::vector<Param> w;  // per height: (h*in) x filters
  std::vector<Param> b;  // per height: 1 x filters
  int in_dim = 0, filters = 0;

  void init(const std::string& name, int in, int filters, const std::vector<int>& heights,
            Rng& rng);
  void collect(std::vector<Param*>& out);
  int out_dim() const { return filters * static_cast<int>(heights.size()); }
};

// Convolution over rows of a (groups*len x in) matrix with ReLU and
// max-over-time pooling; output groups x (filters * |heights|).
Var* cnn_over_rows(Tape& t, const CnnParams& p, Var* rows, int groups, int len);

// Kim-style text CNN over an embedded token batch; output batch x out_dim.
Var* cnn_encode(Tape& t, const TokenBatch& b, const EmbeddingTable& emb, const CnnParams& p);

// Sentence-level hierarchy: word Bi-LSTM per sentence, then a chapter-level
// Bi-LSTM over sentence vectors. With attention on, additive attention pools
// both levels instead of final-state concatenation.
struct HierParams {
  BiLstmParams word;
  BiLstmParams sent;
  AttentionParams word_att, sent_att;
  bool attention = false;

  void init(const std::string& name, int embed_dim, int hidden, bool with_attention, Rng& rng);
  void collect(std::vector<Param*>& out);
  int out_dim() const { return sent.out_dim(); }
};

// sentences: flattened sentence batch over all group members; groups[i] lists
// the sentence rows of member i (>= 1 sentence each).
Var* hierarchical_encode(Tape& t, const TokenBatch& sentences,
                         const std::vector<std::vector<int>>& groups, const EmbeddingTable& emb,
                         const HierParams& p);

struct DenseParams {
  Param w;  // in x out
  Param b;  // 1 x out
  void init(const std::string& name, int in, int out, Rng& rng);
  void collect(std::vector<Param*>& out);
};

Var* dense(Tape& t, const DenseParams& p, Var* x);

}  // namespace secfn
