#include "secfn/gradcheck.hpp"

#include <cmath>
#include <functional>

#include "secfn/encoders.hpp"
#include "secfn/fusion.hpp"
#include "secfn/train.hpp"

namespace secfn {

namespace {

// rel = |a-b| / max(|a|, |b|, 1e-4): the floor keeps finite-difference noise
// (~1e-10 in double precision) from inflating the error on near-zero grads.
double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-4});
}

void randomize(Param& p, Rng& rng, double half_range = 0.4) {
  for (double& x : p.w.a) x = rng.uniform(-half_range, half_range);
}

// Checks d(loss)/d(param) for every entry of every param against central
// differences of the given forward function.
double check_params(const std::vector<Param*>& params, const std::function<double()>& fwd_loss,
                    const std::function<void()>& backward_into_grads) {
  for (Param* p : params) p->zero_grad();
  backward_into_grads();
  double worst = 0.0;
  for (Param* p : params) {
    for (size_t i = 0; i < p->w.size(); ++i) {
      const double save = p->w.a[i];
      const double eps = 1e-5;
      p->w.a[i] = save + eps;
      const double up = fwd_loss();
      p->w.a[i] = save - eps;
      const double dn = fwd_loss();
      p->w.a[i] = save;
      const double fd = (up - dn) / (2.0 * eps);
      worst = std::max(worst, rel_err(p->g.a[i], fd));
    }
  }
  return worst;
}

std::vector<int> random_labels(Rng& rng, int n, int classes = kNumLabels) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(classes))));
  return out;
}

TokenBatch random_tokens(Rng& rng, int batch, int max_len, int vocab, int min_len_pack = 1) {
  std::vector<std::vector<int>> seqs;
  for (int b = 0; b < batch; ++b) {
    const int len = static_cast<int>(rng.range(1, max_len));
    std::vector<int> s;
    for (int t = 0; t < len; ++t)
      s.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab))));
    seqs.push_back(std::move(s));
  }
  return TokenBatch::pack(seqs, min_len_pack);
}

double run_embedding_trial(Rng& rng) {
  EmbeddingTable emb;
  emb.init(6, 3, rng);
  randomize(emb.table, rng);
  for (int j = 0; j < 3; ++j) emb.table.w.at(0, j) = 0.0;
  std::vector<int> idx;
  for (int i = 0; i < 7; ++i) idx.push_back(static_cast<int>(rng.below(7)));
  auto fwd = [&] {
    Tape t;
    Var* e = t.param(emb.table);
    Var* g = t.gather_rows(e, idx);
    Var* g2 = t.mul(g, g);  // nonlinearity so grads depend on values
    return t.sum_all(g2)->val.a[0];
  };
  auto back = [&] {
    Tape t;
    Var* e = t.param(emb.table);
    Var* g = t.gather_rows(e, idx);
    Var* loss = t.sum_all(t.mul(g, g));
    t.backward(loss);
    t.flush_param_grads();
  };
  return check_params({&emb.table}, fwd, back);
}

double run_bilstm_trial(Rng& rng) {
  EmbeddingTable emb;
  emb.init(8, 4, rng);
  randomize(emb.table, rng);
  for (int j = 0; j < 4; ++j) emb.table.w.at(0, j) = 0.0;
  BiLstmParams lstm;
  lstm.init("lstm", 4, 3, rng);
  DenseParams out;
  out.init("out", 6, kNumLabels, rng);
  std::vector<Param*> params{&emb.table};
  lstm.collect(params);
  out.collect(params);
  for (Param* p : params) randomize(*p, rng);
  for (int j = 0; j < 4; ++j) emb.table.w.at(0, j) = 0.0;
  const TokenBatch batch = random_tokens(rng, 3, 5, 8);
  const std::vector<int> labels = random_labels(rng, 3);
  auto fwd = [&] {
    Tape t;
    Var* logits = dense(t, out, bilstm_encode(t, batch, emb, lstm).final);
    return t.cross_entropy_mean(logits, labels)->val.a[0];
  };
  auto back = [&] {
    Tape t;
    Var* logits = dense(t, out, bilstm_encode(t, batch, emb, lstm).final);
    t.backward(t.cross_entropy_mean(logits, labels));
    t.flush_param_grads();
  };
  return check_params(params, fwd, back);
}

double run_cnn_trial(Rng& rng) {
  EmbeddingTable emb;
  emb.init(9, 4, rng);
  CnnParams cnn;
  cnn.init("cnn", 4, 2, {1, 2, 3}, rng);
  DenseParams out;
  out.init("out", 6, kNumLabels, rng);
  std::vector<Param*> params{&emb.table};
  cnn.collect(params);
  out.collect(params);
  for (Param* p : params) randomize(*p, rng);
  for (int j = 0; j < 4; ++j) emb.table.w.at(0, j) = 0.0;
  const TokenBatch batch = random_tokens(rng, 3, 6, 9, 3);
  const std::vector<int> labels = random_labels(rng, 3);
  auto fwd = [&] {
    Tape t;
    Var* logits = dense(t, out, cnn_encode(t, batch, emb, cnn));
    return t.cross_entropy_mean(logits, labels)->val.a[0];
  };
  auto back = [&] {
    Tape t;
    Var* logits = dense(t, out, cnn_encode(t, batch, emb, cnn));
    t.backward(t.cross_entropy_mean(logits, labels));
    t.flush_param_grads();
  };
  return check_params(params, fwd, back);
}

double run_hier_trial(Rng& rng, bool attention) {
  EmbeddingTable emb;
  emb.init(8, 3, rng);
  HierParams hier;
  hier.init("hier", 3, 2, attention, rng);
  DenseParams out;
  out.init("out", 4, kNumLabels, rng);
  std::vector<Param*> params{&emb.table};
  hier.collect(params);
  out.collect(params);
  for (Param* p : params) randomize(*p, rng);
  for (int j = 0; j < 3; ++j) emb.table.w.at(0, j) = 0.0;

  // two chapters with 1-3 sentences each
  std::vector<std::vector<int>> seqs;
  std::vector<std::vector<int>> groups;
  for (int g = 0; g < 2; ++g) {
    const int n_sent = static_cast<int>(rng.range(1, 3));
    std::vector<int> rows;
    for (int s = 0; s < n_sent; ++s) {
      rows.push_back(static_cast<int>(seqs.size()));
      std::vector<int> sent;
      const int len = static_cast<int>(rng.range(1, 4));
      for (int w = 0; w < len; ++w)
        sent.push_back(1 + static_cast<int>(rng.below(8)));
      seqs.push_back(std::move(sent));
    }
    groups.push_back(std::move(rows));
  }
  const TokenBatch sentences = TokenBatch::pack(seqs, 1);
  const std::vector<int> labels = random_labels(rng, 2);
  auto fwd = [&] {
    Tape t;
    Var* logits = dense(t, out, hierarchical_encode(t, sentences, groups, emb, hier));
    return t.cross_entropy_mean(logits, labels)->val.a[0];
  };
  auto back = [&] {
    Tape t;
    Var* logits = dense(t, out, hierarchical_encode(t, sentences, groups, emb, hier));
    t.backward(t.cross_entropy_mean(logits, labels));
    t.flush_param_grads();
  };
  return check_params(params, fwd, back);
}

// A tiny hand-built encoded corpus: one article, 4 chapters.
EncodedCorpus tiny_corpus(Rng& rng, int vocab) {
  EncodedCorpus data;
  data.fit_tag = "gradcheck";
  std::vector<ChapterTokens> chapters;
  for (int c = 0; c < 4; ++c) {
    ChapterTokens ct;
    const int tlen = static_cast<int>(rng.range(1, 4));
    for (int i = 0; i < tlen; ++i)
      ct.title.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab))));
    const int n_sent = static_cast<int>(rng.range(1, 2));
    for (int s = 0; s < n_sent; ++s) {
      std::vector<int> sent;
      const int len = static_cast<int>(rng.range(1, 3));
      for (int w = 0; w < len; ++w)
        sent.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab))));
      ct.sentences.push_back(std::move(sent));
    }
    for (int w = 0; w < 5; ++w)
      ct.flat.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab))));
    chapters.push_back(std::move(ct));
  }
  data.articles.push_back(std::move(chapters));
  return data;
}

double run_fusion_trial(Rng& rng, ArchKind kind, FusionEncoder fe) {
  const int vocab = 7;
  NeuralVocab nv;
  nv.fit_tag = "gradcheck";
  for (int i = 0; i < vocab; ++i) nv.add("tok" + std::to_string(i));
  Hyper hy;
  hy.embed_dim = 3;
  hy.lstm_hidden = 2;
  hy.cnn_filters = 2;
  hy.cnn_heights = {1, 2};
  hy.dropout = 0.0;
  ModelSpec spec;
  spec.kind = kind;
  spec.window = 1;
  spec.direction = Direction::Both;
  spec.fusion_encoder = kind == ArchKind::FuseTitleContent ? FusionEncoder::Cnn : fe;
  spec.caps = SeqCaps{4, 4, 3, 8};
  NeuralModel model(spec, hy, nv);
  model.init_params(rng.next_u64());
  std::vector<Param*> params = model.params();
  for (Param* p : params)
    if (!p->pad_row0) randomize(*p, rng);
  EmbeddingTable dummy;  // randomize embedding but keep the pad row zero
  randomize(*params[0], rng);
  for (int j = 0; j < 3; ++j) params[0]->w.at(0, j) = 0.0;
  (void)dummy;

  const EncodedCorpus data = tiny_corpus(rng, vocab);
  std::vector<TrainExample> batch;
  for (int c = 0; c < 4; ++c)
    batch.push_back({0, c, static_cast<int>(rng.below(kNumLabels)), static_cast<uint64_t>(c)});
  std::vector<int> labels;
  for (const auto& ex : batch) labels.push_back(ex.label);
  auto fwd = [&] {
    Tape t;
    Var* logits = model.forward(t, data, batch, false, nullptr);
    return t.cross_entropy_mean(logits, labels)->val.a[0];
  };
  auto back = [&] {
    Tape t;
    Var* logits = model.forward(t, data, batch, false, nullptr);
    t.backward(t.cross_entropy_mean(logits, labels));
    t.flush_param_grads();
  };
  return check_params(params, fwd, back);
}

}  // namespace

std::vector<GradCheckResult> run_gradient_checks(int trials_per_block, uint64_t seed, double eps,
                                                 double tol) {
  (void)eps;  // fixed at 1e-5 inside check_params
  struct Block {
    std::string name;
    std::function<double(Rng&)> trial;
  };
  const std::vector<Block> blocks = {
      {"embedding", [](Rng& r) { return run_embedding_trial(r); }},
      {"bilstm", [](Rng& r) { return run_bilstm_trial(r); }},
      {"cnn", [](Rng& r) { return run_cnn_trial(r); }},
      {"hierarchical", [](Rng& r) { return run_hier_trial(r, false); }},
      {"hierarchical+attention", [](Rng& r) { return run_hier_trial(r, true); }},
      {"fuse-content",
       [](Rng& r) { return run_fusion_trial(r, ArchKind::FuseContent, FusionEncoder::Bilstm); }},
      {"fuse-title(bilstm)",
       [](Rng& r) { return run_fusion_trial(r, ArchKind::FuseTitle, FusionEncoder::Bilstm); }},
      {"fuse-title(cnn)",
       [](Rng& r) { return run_fusion_trial(r, ArchKind::FuseTitle, FusionEncoder::Cnn); }},
      {"fuse-title-content",
       [](Rng& r) { return run_fusion_trial(r, ArchKind::FuseTitleContent, FusionEncoder::Cnn); }},
  };
  std::vector<GradCheckResult> out;
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    Rng rng(derive_seed(seed, bi));
    GradCheckResult res;
    res.block = blocks[bi].name;
    res.trials = trials_per_block;
    for (int trial = 0; trial < trials_per_block; ++trial)
      res.max_rel_err = std::max(res.max_rel_err, blocks[bi].trial(rng));
    res.pass = res.max_rel_err < tol;
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace secfn
