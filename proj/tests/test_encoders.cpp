#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "secfn/fusion.hpp"
#include "secfn/train.hpp"

using namespace secfn;

namespace {

void zero_params(std::vector<Param*> params) {
  for (Param* p : params) std::fill(p->w.a.begin(), p->w.a.end(), 0.0);
}

EncodedCorpus tiny_data(Rng& rng, int n_articles, int n_chapters, int vocab,
                        const std::string& tag = "test") {
  EncodedCorpus data;
  data.fit_tag = tag;
  for (int a = 0; a < n_articles; ++a) {
    std::vector<ChapterTokens> chapters;
    for (int c = 0; c < n_chapters; ++c) {
      ChapterTokens ct;
      const int tlen = static_cast<int>(rng.range(1, 4));
      for (int i = 0; i < tlen; ++i)
        ct.title.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab))));
      const int ns = static_cast<int>(rng.range(1, 3));
      for (int s = 0; s < ns; ++s) {
        std::vector<int> sent;
        const int len = static_cast<int>(rng.range(1, 5));
        for (int w = 0; w < len; ++w)
          sent.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab))));
        ct.sentences.push_back(std::move(sent));
      }
      for (int w = 0; w < 6; ++w)
        ct.flat.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab))));
      chapters.push_back(std::move(ct));
    }
    data.articles.push_back(std::move(chapters));
  }
  return data;
}

NeuralVocab tiny_vocab(int n, const std::string& tag = "test") {
  NeuralVocab v;
  v.fit_tag = tag;
  for (int i = 0; i < n; ++i) v.add("w" + std::to_string(i));
  return v;
}

Hyper tiny_hyper() {
  Hyper hy;
  hy.embed_dim = 4;
  hy.lstm_hidden = 3;
  hy.cnn_filters = 2;
  hy.cnn_heights = {1, 2};
  hy.dropout = 0.0;
  hy.batch_size = 8;
  return hy;
}

}  // namespace

TEST_CASE("bilstm with all-zero weights maps any input to zero") {
  Rng rng(2);
  EmbeddingTable emb;
  emb.init(5, 4, rng);
  BiLstmParams lstm;
  lstm.init("l", 4, 3, rng);
  std::vector<Param*> params{&emb.table};
  lstm.collect(params);
  zero_params(params);
  Tape t;
  const TokenBatch batch = TokenBatch::pack({{1, 2, 3}, {4, 1}}, 1);
  BiLstmOut out = bilstm_run(t, lstm, {t.gather_rows(t.param(emb.table), batch.step_ids(0)),
                                       t.gather_rows(t.param(emb.table), batch.step_ids(1)),
                                       t.gather_rows(t.param(emb.table), batch.step_ids(2))},
                             {batch.step_mask(0), batch.step_mask(1), batch.step_mask(2)});
  for (double v : out.final->val.a) CHECK(v == 0.0);
}

TEST_CASE("bilstm output shape is 2*hidden") {
  Rng rng(3);
  EmbeddingTable emb;
  emb.init(10, 100, rng);
  BiLstmParams lstm;
  lstm.init("l", 100, 100, rng);
  Tape t;
  const TokenBatch batch = TokenBatch::pack({{1, 2, 3}}, 1);
  BiLstmOut out = bilstm_encode(t, batch, emb, lstm);
  CHECK(out.final->rows() == 1);
  CHECK(out.final->cols() == 200);
}

TEST_CASE("padding positions neither change outputs nor receive gradient") {
  Rng rng(4);
  EmbeddingTable emb;
  emb.init(6, 4, rng);
  BiLstmParams lstm;
  lstm.init("l", 4, 3, rng);
  DenseParams out_p;
  out_p.init("d", 6, kNumLabels, rng);
  std::vector<Param*> params{&emb.table};
  lstm.collect(params);
  out_p.collect(params);

  // same sequence, once tight and once padded to length 6
  auto run = [&](const TokenBatch& b) {
    for (Param* p : params) p->zero_grad();
    Tape t;
    Var* logits = dense(t, out_p, bilstm_encode(t, b, emb, lstm).final);
    Var* loss = t.cross_entropy_mean(logits, {2});
    const std::vector<double> val = logits->val.a;
    t.backward(loss);
    t.flush_param_grads();
    std::vector<double> grads;
    for (Param* p : params) grads.insert(grads.end(), p->g.a.begin(), p->g.a.end());
    return std::make_pair(val, grads);
  };
  const auto tight = run(TokenBatch::pack({{2, 5, 1}}, 1));
  const auto padded = run(TokenBatch::pack({{2, 5, 1, 0, 0, 0}}, 1));
  CHECK(tight.first == padded.first);    // bitwise-equal logits
  CHECK(tight.second == padded.second);  // bitwise-equal parameter gradients
}

TEST_CASE("attention weights are a probability distribution over real steps") {
  Rng rng(6);
  EmbeddingTable emb;
  emb.init(7, 4, rng);
  BiLstmParams lstm;
  lstm.init("l", 4, 3, rng);
  AttentionParams att;
  att.init("a", 6, 5, rng);
  Tape t;
  const TokenBatch batch = TokenBatch::pack({{1, 2, 3, 4}, {5, 6}}, 1);
  std::vector<Var*> steps;
  std::vector<Mat> masks;
  Var* table = t.param(emb.table);
  for (int s = 0; s < batch.len; ++s) {
    steps.push_back(t.gather_rows(table, batch.step_ids(s)));
    masks.push_back(batch.step_mask(s));
  }
  std::vector<Var*> hf = lstm_run(t, lstm.fwd, steps, masks, false);
  std::vector<Var*> hb = lstm_run(t, lstm.bwd, steps, masks, true);
  std::vector<Var*> outs;
  for (size_t i = 0; i < hf.size(); ++i) outs.push_back(t.concat_cols({hf[i], hb[i]}));
  Var* weights = nullptr;
  attention_pool(t, att, outs, masks, &weights);
  REQUIRE(weights != nullptr);
  for (int i = 0; i < 2; ++i) {
    double sum = 0.0;
    for (int s = 0; s < batch.len; ++s) {
      CHECK(weights->val.at(i, s) >= 0.0);
      sum += weights->val.at(i, s);
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }
  // padded steps of the short row get zero weight
  CHECK(weights->val.at(1, 2) == 0.0);
  CHECK(weights->val.at(1, 3) == 0.0);
}

TEST_CASE("cnn output shape is filters*heights and all-padding reduces to biases") {
  Rng rng(7);
  EmbeddingTable emb;
  emb.init(9, 100, rng);
  CnnParams cnn;
  cnn.init("c", 100, 50, {1, 2, 3}, rng);
  Tape t;
  BiLstmParams unused;
  (void)unused;
  const TokenBatch batch = TokenBatch::pack({{1, 2, 3, 4, 5}, {}}, 3);
  Var* out = cnn_encode(t, batch, emb, cnn);
  CHECK(out->rows() == 2);
  CHECK(out->cols() == 150);
  // the all-padding row equals relu(bias) per filter
  for (size_t hi = 0; hi < cnn.heights.size(); ++hi)
    for (int f = 0; f < 50; ++f) {
      const double expect = std::max(0.0, cnn.b[hi].w.at(0, f));
      CHECK(out->val.at(1, static_cast<int>(hi) * 50 + f) == doctest::Approx(expect));
    }
}

TEST_CASE("hierarchical encoder handles single one-token sentences") {
  Rng rng(8);
  EmbeddingTable emb;
  emb.init(5, 4, rng);
  HierParams hier;
  hier.init("h", 4, 3, false, rng);
  Tape t;
  const TokenBatch sentences = TokenBatch::pack({{2}}, 1);
  Var* out = hierarchical_encode(t, sentences, {{0}}, emb, hier);
  CHECK(out->rows() == 1);
  CHECK(out->cols() == 6);  // 2 * hidden
  CHECK_THROWS_AS(hierarchical_encode(t, sentences, {}, emb, hier), DataError);
  CHECK_THROWS_AS(hierarchical_encode(t, sentences, {{}}, emb, hier), DataError);
}

TEST_CASE("head_tail_slice follows the ceil rule and trims overlap from the tail") {
  std::vector<int> toks(100);
  for (int i = 0; i < 100; ++i) toks[static_cast<size_t>(i)] = i + 1;
  const auto [h, t] = head_tail_slice(toks, 0.1);
  REQUIRE(h.size() == 10);
  REQUIRE(t.size() == 10);
  CHECK(h.front() == 1);
  CHECK(h.back() == 10);
  CHECK(t.front() == 91);
  CHECK(t.back() == 100);

  std::vector<int> ten(10);
  for (int i = 0; i < 10; ++i) ten[static_cast<size_t>(i)] = i + 1;
  const auto [h5, t5] = head_tail_slice(ten, 0.5);
  CHECK(h5 == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(t5 == std::vector<int>{6, 7, 8, 9, 10});

  const std::vector<int> three = {1, 2, 3};
  const auto [h2, t1] = head_tail_slice(three, 0.5);
  CHECK(h2 == std::vector<int>{1, 2});
  CHECK(t1 == std::vector<int>{3});

  CHECK_THROWS_AS(head_tail_slice(std::vector<int>{}, 0.1), DataError);
  CHECK_THROWS_AS(head_tail_slice(three, 0.6), ConfigError);
  const auto [h80, t80] = head_tail_slice(ten, 0.8, false);
  CHECK(h80.size() == 8);
  CHECK(t80.empty());
}

TEST_CASE("context_window pads out-of-range slots") {
  // first chapter, w=1, both -> [pad, S1, S2]
  Window w1 = context_window(3, 0, 1, Direction::Both);
  CHECK(w1.slots == std::vector<int>{-1, 0, 1});
  CHECK(w1.cur_pos == 1);
  // middle chapter, w=3, previous -> [S_{i-3..i-1}, S_i]
  Window w2 = context_window(9, 5, 3, Direction::Previous);
  CHECK(w2.slots == std::vector<int>{2, 3, 4, 5});
  CHECK(w2.cur_pos == 3);
  // single-chapter article, w=2, both -> [pad,pad,S1,pad,pad]
  Window w3 = context_window(1, 0, 2, Direction::Both);
  CHECK(w3.slots == std::vector<int>{-1, -1, 0, -1, -1});
  CHECK(w3.cur_pos == 2);
  // next direction puts the current chapter first
  Window w4 = context_window(4, 1, 2, Direction::Next);
  CHECK(w4.slots == std::vector<int>{1, 2, 3});
  CHECK(w4.cur_pos == 0);
}

TEST_CASE("reorder_context modes") {
  Window win;
  win.slots = {-1, 0, 1};
  win.cur_pos = 1;
  const Window same = reorder_context(win, ReorderMode::ArticleOrder, 9);
  CHECK(same.slots == win.slots);
  CHECK(same.cur_pos == 1);
  const Window first = reorder_context(win, ReorderMode::CurrentFirstOrdered, 9);
  CHECK(first.slots == std::vector<int>{0, -1, 1});
  CHECK(first.cur_pos == 0);
  const Window shuf1 = reorder_context(win, ReorderMode::CurrentFirstShuffled, 9);
  const Window shuf2 = reorder_context(win, ReorderMode::CurrentFirstShuffled, 9);
  CHECK(shuf1.slots == shuf2.slots);  // deterministic under the seed
  CHECK(shuf1.slots[0] == 0);
}

TEST_CASE("fusion with window 0 is bitwise identical to the non-contextual baseline") {
  Rng drng(11);
  const EncodedCorpus data = tiny_data(drng, 3, 4, 8);
  const NeuralVocab vocab = tiny_vocab(8);
  std::vector<TrainExample> batch;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 4; ++c) batch.push_back({a, c, 0, 0});

  auto logits_of = [&](ArchKind kind, uint64_t seed) {
    ModelSpec spec;
    spec.kind = kind;
    spec.window = 0;
    spec.caps = SeqCaps{4, 5, 3, 8};
    if (kind == ArchKind::FuseTitleContent) spec.fusion_encoder = FusionEncoder::Cnn;
    NeuralModel model(spec, tiny_hyper(), vocab);
    model.init_params(seed);
    Tape t;
    return model.forward(t, data, batch, false, nullptr)->val.a;
  };

  SUBCASE("fuse-title w0 == cnn-title") {
    CHECK(logits_of(ArchKind::FuseTitle, 99) == logits_of(ArchKind::CnnTitle, 99));
  }
  SUBCASE("fuse-content w0 == hier-content") {
    CHECK(logits_of(ArchKind::FuseContent, 123) == logits_of(ArchKind::HierContent, 123));
  }
  SUBCASE("fuse-title-content w0 == manual concat classifier") {
    // same parameter draws: embedding, title cnn, hierarchy, dense
    const Hyper hy = tiny_hyper();
    Rng rng(321);
    EmbeddingTable emb;
    emb.init(static_cast<int>(vocab.size()), hy.embed_dim, rng);
    CnnParams cnn;
    cnn.init("title_cnn", hy.embed_dim, hy.cnn_filters, hy.cnn_heights, rng);
    HierParams hier;
    hier.init("hier", hy.embed_dim, hy.lstm_hidden, false, rng);
    DenseParams dn;
    dn.init("dense", cnn.out_dim() + 2 * hy.lstm_hidden, kNumLabels, rng);

    Tape t;
    std::vector<std::vector<int>> titles;
    std::vector<std::vector<int>> sent_seqs;
    std::vector<std::vector<int>> groups;
    for (const auto& ex : batch) {
      const ChapterTokens& ct =
          data.articles[static_cast<size_t>(ex.article)][static_cast<size_t>(ex.chapter)];
      titles.push_back(ct.title);
      std::vector<int> rows;
      for (const auto& s : ct.sentences) {
        rows.push_back(static_cast<int>(sent_seqs.size()));
        sent_seqs.push_back(s);
      }
      groups.push_back(rows);
    }
    Var* tv = cnn_encode(t, TokenBatch::pack(titles, 2), emb, cnn);
    Var* cv = hierarchical_encode(t, TokenBatch::pack(sent_seqs, 1), groups, emb, hier);
    Var* manual = dense(t, dn, t.concat_cols({tv, cv}));
    CHECK(logits_of(ArchKind::FuseTitleContent, 321) == manual->val.a);
  }
}

TEST_CASE("embedding padding row stays zero through training updates") {
  Rng drng(13);
  const EncodedCorpus data = tiny_data(drng, 6, 4, 6, "tag");
  NeuralVocab vocab = tiny_vocab(6, "tag");
  ModelSpec spec;
  spec.kind = ArchKind::CnnTitle;
  spec.caps = SeqCaps{4, 5, 3, 8};
  Hyper hy = tiny_hyper();
  hy.max_epochs = 3;
  hy.patience = 3;
  hy.dropout = 0.5;
  NeuralModel model(spec, hy, vocab);
  model.init_params(7);
  std::vector<TrainExample> train, valid;
  Rng lr(99);
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 4; ++c) {
      TrainExample ex{a, c, static_cast<int>(lr.below(kNumLabels)), 0};
      (a < 5 ? train : valid).push_back(ex);
    }
  train_neural(model, data, train, valid, default_macro_classes());
  Param* emb = model.params()[0];
  for (int j = 0; j < emb->w.cols; ++j) CHECK(emb->w.at(0, j) == 0.0);
}

TEST_CASE("forward pass is pure: repeated evaluation gives identical scores") {
  Rng drng(17);
  const EncodedCorpus data = tiny_data(drng, 2, 5, 9);
  ModelSpec spec;
  spec.kind = ArchKind::FuseTitle;
  spec.window = 2;
  spec.direction = Direction::Both;
  spec.caps = SeqCaps{4, 5, 3, 8};
  NeuralModel model(spec, tiny_hyper(), tiny_vocab(9));
  model.init_params(5);
  std::vector<TrainExample> batch = {{0, 2, -1, 4}, {1, 0, -1, 5}};
  const Mat p1 = model.predict_probs(data, batch);
  const Mat p2 = model.predict_probs(data, batch);
  CHECK(p1.a == p2.a);
  for (int i = 0; i < p1.rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < p1.cols; ++j) sum += p1.at(i, j);
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("model refuses a corpus encoded under a different fit tag") {
  Rng drng(19);
  const EncodedCorpus data = tiny_data(drng, 1, 3, 5, "other-tag");
  ModelSpec spec;
  spec.kind = ArchKind::CnnTitle;
  spec.caps = SeqCaps{4, 5, 3, 8};
  NeuralModel model(spec, tiny_hyper(), tiny_vocab(5, "train-tag"));
  model.init_params(1);
  Tape t;
  std::vector<TrainExample> batch = {{0, 0, -1, 0}};
  CHECK_THROWS_AS(model.forward(t, data, batch, false, nullptr), InternalError);
}

TEST_CASE("dropout-off training is deterministic across reruns") {
  Rng drng(23);
  const EncodedCorpus data = tiny_data(drng, 8, 4, 7, "tag");
  NeuralVocab vocab = tiny_vocab(7, "tag");
  auto run = [&] {
    ModelSpec spec;
    spec.kind = ArchKind::CnnTitle;
    spec.caps = SeqCaps{4, 5, 3, 8};
    Hyper hy = tiny_hyper();
    hy.dropout = 0.0;
    hy.max_epochs = 4;
    hy.patience = 4;
    NeuralModel model(spec, hy, vocab);
    model.init_params(31);
    std::vector<TrainExample> train, valid;
    Rng lr(7);
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 4; ++c) {
        TrainExample ex{a, c, static_cast<int>(lr.below(kNumLabels)), 0};
        (a < 6 ? train : valid).push_back(ex);
      }
    return train_neural(model, data, train, valid, default_macro_classes()).train_loss;
  };
  CHECK(run() == run());
}
