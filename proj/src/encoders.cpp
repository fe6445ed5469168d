#include "secfn/encoders.hpp"

#include <algorithm>

namespace secfn {

namespace {

void uniform_init(Mat& m, Rng& rng, double half_range = 0.05) {
  for (double& x : m.a) x = rng.uniform(-half_range, half_range);
}

// Glorot-style range for weight matrices; keeps activations at a workable
// scale under the fixed SGD rate.
void glorot_init(Mat& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
  for (double& x : m.a) x = rng.uniform(-limit, limit);
}

}  // namespace

TokenBatch TokenBatch::pack(const std::vector<std::vector<int>>& seqs, int min_len) {
  if (seqs.empty()) throw InternalError("TokenBatch::pack: empty batch");
  TokenBatch b;
  b.batch = static_cast<int>(seqs.size());
  size_t longest = static_cast<size_t>(min_len);
  for (const auto& s : seqs) longest = std::max(longest, s.size());
  b.len = static_cast<int>(longest);
  b.ids.assign(static_cast<size_t>(b.batch) * longest, 0);
  for (int i = 0; i < b.batch; ++i)
    std::copy(seqs[static_cast<size_t>(i)].begin(), seqs[static_cast<size_t>(i)].end(),
              b.ids.begin() + static_cast<size_t>(i) * longest);
  return b;
}

Mat TokenBatch::step_mask(int t) const {
  Mat m(batch, 1);
  for (int i = 0; i < batch; ++i)
    m.at(i, 0) = ids[static_cast<size_t>(i) * static_cast<size_t>(len) + static_cast<size_t>(t)] != 0 ? 1.0 : 0.0;
  return m;
}

std::vector<int> TokenBatch::step_ids(int t) const {
  std::vector<int> out(static_cast<size_t>(batch));
  for (int i = 0; i < batch; ++i)
    out[static_cast<size_t>(i)] = ids[static_cast<size_t>(i) * static_cast<size_t>(len) + static_cast<size_t>(t)];
  return out;
}

void EmbeddingTable::init(int vocab_size, int embed_dim, Rng& rng) {
  dim = embed_dim;
  table = Param("embedding", vocab_size + 1, embed_dim);
  table.pad_row0 = true;
  uniform_init(table.w, rng);
  for (int j = 0; j < embed_dim; ++j) table.w.at(0, j) = 0.0;  // padding row
}

Var* EmbeddingTable::embed_flat(Tape& t, const TokenBatch& b) const {
  Var* e = t.param(const_cast<Param&>(table));
  return t.gather_rows(e, b.ids);
}

Var* EmbeddingTable::embed_step(Tape& t, const TokenBatch& b, int step) const {
  Var* e = t.param(const_cast<Param&>(table));
  return t.gather_rows(e, b.step_ids(step));
}

void LstmParams::init(const std::string& name, int in, int h, Rng& rng) {
  in_dim = in;
  hidden = h;
  wx = Param(name + ".wx", in, 4 * h);
  wh = Param(name + ".wh", h, 4 * h);
  b = Param(name + ".b", 1, 4 * h);
  glorot_init(wx.w, rng);
  glorot_init(wh.w, rng);
}

void LstmParams::collect(std::vector<Param*>& out) {
  out.push_back(&wx);
  out.push_back(&wh);
  out.push_back(&b);
}

void BiLstmParams::init(const std::string& name, int in, int h, Rng& rng) {
  hidden = h;
  fwd.init(name + ".fwd", in, h, rng);
  bwd.init(name + ".bwd", in, h, rng);
}

void BiLstmParams::collect(std::vector<Param*>& out) {
  fwd.collect(out);
  bwd.collect(out);
}

std::vector<Var*> lstm_run(Tape& t, const LstmParams& p, const std::vector<Var*>& steps,
                           const std::vector<Mat>& masks, bool reverse) {
  if (steps.empty()) throw InternalError("lstm_run: empty sequence");
  if (masks.size() != steps.size()) throw InternalError("lstm_run: mask count mismatch");
  const int batch = steps[0]->rows();
  const int h = p.hidden;
  Var* wx = t.param(const_cast<Param&>(p.wx));
  Var* wh = t.param(const_cast<Param&>(p.wh));
  Var* bias = t.param(const_cast<Param&>(p.b));
  Var* hprev = t.zeros(batch, h);
  Var* cprev = t.zeros(batch, h);
  std::vector<Var*> out(steps.size(), nullptr);
  const int n = static_cast<int>(steps.size());
  for (int k = 0; k < n; ++k) {
    const int step = reverse ? n - 1 - k : k;
    Var* z = t.add_rowvec(t.add(t.matmul(steps[static_cast<size_t>(step)], wx), t.matmul(hprev, wh)), bias);
    Var* gi = t.sigmoid(t.slice_cols(z, 0, h));
    Var* gf = t.sigmoid(t.slice_cols(z, h, 2 * h));
    Var* gg = t.tanh(t.slice_cols(z, 2 * h, 3 * h));
    Var* go = t.sigmoid(t.slice_cols(z, 3 * h, 4 * h));
    Var* cnew = t.add(t.mul(gf, cprev), t.mul(gi, gg));
    Var* hnew = t.mul(go, t.tanh(cnew));
    Var* c = t.mask_mix(masks[static_cast<size_t>(step)], cnew, cprev);
    Var* hh = t.mask_mix(masks[static_cast<size_t>(step)], hnew, hprev);
    out[static_cast<size_t>(step)] = hh;
    hprev = hh;
    cprev = c;
  }
  return out;
}

BiLstmOut bilstm_run(Tape& t, const BiLstmParams& p, const std::vector<Var*>& steps,
                     const std::vector<Mat>& masks) {
  std::vector<Var*> hf = lstm_run(t, p.fwd, steps, masks, false);
  std::vector<Var*> hb = lstm_run(t, p.bwd, steps, masks, true);
  BiLstmOut out;
  out.final = t.concat_cols({hf.back(), hb.front()});
  out.per_step.reserve(steps.size());
  for (size_t i = 0; i < steps.size(); ++i)
    out.per_step.push_back(t.concat_cols({hf[i], hb[i]}));
  return out;
}

BiLstmOut bilstm_encode(Tape& t, const TokenBatch& b, const EmbeddingTable& emb,
                        const BiLstmParams& p) {
  if (b.len < 1) throw DataError("bilstm_encode: empty sequence");
  std::vector<Var*> steps;
  std::vector<Mat> masks;
  steps.reserve(static_cast<size_t>(b.len));
  masks.reserve(static_cast<size_t>(b.len));
  Var* table = t.param(const_cast<Param&>(emb.table));
  for (int s = 0; s < b.len; ++s) {
    steps.push_back(t.gather_rows(table, b.step_ids(s)));
    masks.push_back(b.step_mask(s));
  }
  return bilstm_run(t, p, steps, masks);
}

void AttentionParams::init(const std::string& name, int in, int att, Rng& rng) {
  att_dim = att;
  w = Param(name + ".w", in, att);
  b = Param(name + ".b", 1, att);
  v = Param(name + ".v", att, 1);
  glorot_init(w.w, rng);
  glorot_init(v.w, rng);
}

void AttentionParams::collect(std::vector<Param*>& out) {
  out.push_back(&w);
  out.push_back(&b);
  out.push_back(&v);
}

Var* attention_pool(Tape& t, const AttentionParams& p, const std::vector<Var*>& steps,
                    const std::vector<Mat>& masks, Var** weights_out) {
  if (steps.empty()) throw InternalError("attention_pool: empty sequence");
  Var* w = t.param(const_cast<Param&>(p.w));
  Var* b = t.param(const_cast<Param&>(p.b));
  Var* v = t.param(const_cast<Param&>(p.v));
  const int batch = steps[0]->rows();
  const int n = static_cast<int>(steps.size());
  std::vector<Var*> scores;
  scores.reserve(static_cast<size_t>(n));
  Mat mask(batch, n);
  for (int s = 0; s < n; ++s) {
    Var* u = t.tanh(t.add_rowvec(t.matmul(steps[static_cast<size_t>(s)], w), b));
    scores.push_back(t.matmul(u, v));  // batch x 1
    for (int i = 0; i < batch; ++i) mask.at(i, s) = masks[static_cast<size_t>(s)].at(i, 0);
  }
  Var* score_mat = t.concat_cols(scores);                 // batch x n
  Var* alpha = t.masked_softmax_rows(score_mat, mask);    // batch x n
  if (weights_out) *weights_out = alpha;
  Var* pooled = nullptr;
  for (int s = 0; s < n; ++s) {
    Var* term = t.colwise_mul(steps[static_cast<size_t>(s)], t.slice_cols(alpha, s, s + 1));
    pooled = pooled ? t.add(pooled, term) : term;
  }
  return pooled;
}

void CnnParams::init(const std::string& name, int in, int n_filters,
                     const std::vector<int>& hs, Rng& rng) {
  in_dim = in;
  filters = n_filters;
  heights = hs;
  w.clear();
  b.clear();
  for (int h : heights) {
    w.emplace_back(name + ".w" + std::to_string(h), h * in, n_filters);
    b.emplace_back(name + ".b" + std::to_string(h), 1, n_filters);
    glorot_init(w.back().w, rng);
  }
}

void CnnParams::collect(std::vector<Param*>& out) {
  for (auto& p : w) out.push_back(&p);
  for (auto& p : b) out.push_back(&p);
}

Var* cnn_over_rows(Tape& t, const CnnParams& p, Var* rows, int groups, int len) {
  std::vector<Var*> pooled;
  pooled.reserve(p.heights.size());
  for (size_t hi = 0; hi < p.heights.size(); ++hi) {
    const int h = p.heights[hi];
    if (h > len) throw InternalError("cnn_over_rows: filter height exceeds sequence length");
    Var* col = t.im2col_rows(rows, groups, len, h);
    Var* z = t.add_rowvec(t.matmul(col, t.param(const_cast<Param&>(p.w[hi]))),
                          t.param(const_cast<Param&>(p.b[hi])));
    pooled.push_back(t.rows_max_pool(t.relu(z), groups));
  }
  return t.concat_cols(pooled);
}

Var* cnn_encode(Tape& t, const TokenBatch& b, const EmbeddingTable& emb, const CnnParams& p) {
  int max_h = 0;
  for (int h : p.heights) max_h = std::max(max_h, h);
  if (b.len < max_h)
    throw InternalError("cnn_encode: batch must be padded to at least the max filter height");
  Var* flat = emb.embed_flat(t, b);  // (batch*len) x dim
  return cnn_over_rows(t, p, flat, b.batch, b.len);
}

void HierParams::init(const std::string& name, int embed_dim, int hidden, bool with_attention,
                      Rng& rng) {
  attention = with_attention;
  word.init(name + ".word", embed_dim, hidden, rng);
  sent.init(name + ".sent", word.out_dim(), hidden, rng);
  if (attention) {
    word_att.init(name + ".word_att", word.out_dim(), hidden, rng);
    sent_att.init(name + ".sent_att", sent.out_dim(), hidden, rng);
  }
}

void HierParams::collect(std::vector<Param*>& out) {
  word.collect(out);
  sent.collect(out);
  if (attention) {
    word_att.collect(out);
    sent_att.collect(out);
  }
}

Var* hierarchical_encode(Tape& t, const TokenBatch& sentences,
                         const std::vector<std::vector<int>>& groups, const EmbeddingTable& emb,
                         const HierParams& p) {
  if (groups.empty()) throw DataError("hierarchical_encode: empty group list");
  for (const auto& g : groups)
    if (g.empty()) throw DataError("hierarchical_encode: member with no sentences");

  // Word level: encode every sentence in the flattened batch.
  std::vector<Var*> word_steps;
  std::vector<Mat> word_masks;
  Var* table = t.param(const_cast<Param&>(emb.table));
  for (int s = 0; s < sentences.len; ++s) {
    word_steps.push_back(t.gather_rows(table, sentences.step_ids(s)));
    word_masks.push_back(sentences.step_mask(s));
  }
  Var* sent_vecs;  // n_sentences x 2h
  if (p.attention) {
    std::vector<Var*> hsteps = lstm_run(t, p.word.fwd, word_steps, word_masks, false);
    std::vector<Var*> bsteps = lstm_run(t, p.word.bwd, word_steps, word_masks, true);
    std::vector<Var*> outs;
    outs.reserve(hsteps.size());
    for (size_t i = 0; i < hsteps.size(); ++i)
      outs.push_back(t.concat_cols({hsteps[i], bsteps[i]}));
    sent_vecs = attention_pool(t, p.word_att, outs, word_masks);
  } else {
    sent_vecs = bilstm_run(t, p.word, word_steps, word_masks).final;
  }

  // Sentence level: regroup sentence vectors per member and encode again.
  size_t max_sents = 0;
  for (const auto& g : groups) max_sents = std::max(max_sents, g.size());
  const int batch = static_cast<int>(groups.size());
  std::vector<Var*> steps;
  std::vector<Mat> masks;
  for (size_t s = 0; s < max_sents; ++s) {
    std::vector<int> idx(static_cast<size_t>(batch), -1);
    Mat mask(batch, 1);
    for (int i = 0; i < batch; ++i) {
      if (s < groups[static_cast<size_t>(i)].size()) {
        idx[static_cast<size_t>(i)] = groups[static_cast<size_t>(i)][s];
        mask.at(i, 0) = 1.0;
      }
    }
    steps.push_back(t.gather_rows(sent_vecs, idx));
    masks.push_back(std::move(mask));
  }
  if (p.attention) {
    std::vector<Var*> hsteps = lstm_run(t, p.sent.fwd, steps, masks, false);
    std::vector<Var*> bsteps = lstm_run(t, p.sent.bwd, steps, masks, true);
    std::vector<Var*> outs;
    outs.reserve(hsteps.size());
    for (size_t i = 0; i < hsteps.size(); ++i)
      outs.push_back(t.concat_cols({hsteps[i], bsteps[i]}));
    return attention_pool(t, p.sent_att, outs, masks);
  }
  return bilstm_run(t, p.sent, steps, masks).final;
}

void DenseParams::init(const std::string& name, int in, int out, Rng& rng) {
  w = Param(name + ".w", in, out);
  b = Param(name + ".b", 1, out);
  glorot_init(w.w, rng);
}

void DenseParams::collect(std::vector<Param*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

Var* dense(Tape& t, const DenseParams& p, Var* x) {
  return t.add_rowvec(t.matmul(x, t.param(const_cast<Param&>(p.w))),
                      t.param(const_cast<Param&>(p.b)));
}

}  // namespace secfn
