#include "secfn/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace secfn {

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Previous: return "previous";
    case Direction::Next: return "next";
    case Direction::Both: return "both";
  }
  return "?";
}

Direction parse_direction(const std::string& s) {
  if (s == "previous") return Direction::Previous;
  if (s == "next") return Direction::Next;
  if (s == "both") return Direction::Both;
  throw ConfigError("unknown direction '" + s + "' (previous|next|both)");
}

const char* reorder_name(ReorderMode m) {
  switch (m) {
    case ReorderMode::ArticleOrder: return "article_order";
    case ReorderMode::CurrentFirstOrdered: return "current_first_context_ordered";
    case ReorderMode::CurrentFirstShuffled: return "current_first_context_shuffled";
  }
  return "?";
}

ReorderMode parse_reorder(const std::string& s) {
  if (s == "article_order") return ReorderMode::ArticleOrder;
  if (s == "current_first_context_ordered") return ReorderMode::CurrentFirstOrdered;
  if (s == "current_first_context_shuffled") return ReorderMode::CurrentFirstShuffled;
  throw ConfigError("unknown reorder mode '" + s + "'");
}

Window context_window(int n_chapters, int chapter, int w, Direction d) {
  if (chapter < 0 || chapter >= n_chapters)
    throw InternalError("context_window: chapter index out of range");
  if (w < 0) throw ConfigError("context_window: negative window");
  Window win;
  if (d == Direction::Both || d == Direction::Previous) {
    for (int k = w; k >= 1; --k) win.slots.push_back(chapter - k >= 0 ? chapter - k : -1);
  }
  win.cur_pos = static_cast<int>(win.slots.size());
  win.slots.push_back(chapter);
  if (d == Direction::Both || d == Direction::Next) {
    for (int k = 1; k <= w; ++k) win.slots.push_back(chapter + k < n_chapters ? chapter + k : -1);
  }
  return win;
}

Window reorder_context(const Window& win, ReorderMode mode, uint64_t seed) {
  if (win.cur_pos < 0 || win.cur_pos >= static_cast<int>(win.slots.size()))
    throw InternalError("reorder_context: no current slot");
  if (mode == ReorderMode::ArticleOrder) return win;
  Window out;
  out.cur_pos = 0;
  out.slots.push_back(win.slots[static_cast<size_t>(win.cur_pos)]);
  std::vector<int> rest;
  for (int i = 0; i < static_cast<int>(win.slots.size()); ++i)
    if (i != win.cur_pos) rest.push_back(win.slots[static_cast<size_t>(i)]);
  if (mode == ReorderMode::CurrentFirstShuffled) {
    Rng rng(seed);
    rng.shuffle(rest);
  }
  out.slots.insert(out.slots.end(), rest.begin(), rest.end());
  return out;
}

const char* arch_name(ArchKind k) {
  switch (k) {
    case ArchKind::CnnTitle: return "cnn-title";
    case ArchKind::BilstmContent: return "bilstm-content";
    case ArchKind::HierContent: return "hier-content";
    case ArchKind::HierAttnContent: return "hier-attn-content";
    case ArchKind::HeadTail: return "headtail-content";
    case ArchKind::FuseContent: return "fuse-content";
    case ArchKind::FuseTitle: return "fuse-title";
    case ArchKind::FuseTitleContent: return "fuse-title-content";
  }
  return "?";
}

ArchKind parse_arch(const std::string& s) {
  for (ArchKind k :
       {ArchKind::CnnTitle, ArchKind::BilstmContent, ArchKind::HierContent,
        ArchKind::HierAttnContent, ArchKind::HeadTail, ArchKind::FuseContent, ArchKind::FuseTitle,
        ArchKind::FuseTitleContent}) {
    if (s == arch_name(k)) return k;
  }
  throw ConfigError("unknown architecture '" + s + "'");
}

bool arch_is_contextual(ArchKind k) {
  return k == ArchKind::FuseContent || k == ArchKind::FuseTitle ||
         k == ArchKind::FuseTitleContent;
}

void Hyper::validate() const {
  if (learning_rate <= 0.0 || batch_size < 1 || lstm_hidden < 1 || cnn_filters < 1 ||
      embed_dim < 1 || max_epochs < 1 || patience < 1)
    throw ConfigError("hyperparameters must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (cnn_heights.empty()) throw ConfigError("cnn_heights must be nonempty");
}

void ModelSpec::validate() const {
  if (window < 0 || window > 3) throw ConfigError("fusion window must be in 0..3");
  if (kind == ArchKind::FuseTitleContent && fusion_encoder != FusionEncoder::Cnn)
    throw ConfigError("title+content fusion requires the cnn fusion encoder");
  if (!arch_is_contextual(kind) && window != 0)
    throw ConfigError("window > 0 requires a context-fusion architecture");
  if (kind == ArchKind::HeadTail) {
    const double limit = head_and_tail ? 0.5 : 1.0;
    if (!(head_p > 0.0) || head_p > limit)
      throw ConfigError("head/tail proportion out of range");
  }
  if (reorder != ReorderMode::ArticleOrder && !arch_is_contextual(kind))
    throw ConfigError("context reorder requires a context-fusion architecture");
}

std::string ModelSpec::to_string() const {
  std::ostringstream os;
  os << arch_name(kind) << " window=" << window << " direction=" << direction_name(direction)
     << " fusion=" << (fusion_encoder == FusionEncoder::Bilstm ? "bilstm" : "cnn")
     << " head_p=" << head_p << " head_and_tail=" << (head_and_tail ? 1 : 0)
     << " reorder=" << reorder_name(reorder) << " reorder_seed=" << reorder_seed
     << " title_cap=" << caps.title_cap << " sent_cap=" << caps.sent_cap
     << " max_sents=" << caps.max_sents << " flat_cap=" << caps.flat_cap;
  return os.str();
}

ModelSpec ModelSpec::from_string(const std::string& s) {
  std::istringstream is(s);
  std::string archs;
  is >> archs;
  ModelSpec spec;
  spec.kind = parse_arch(archs);
  std::string kv;
  while (is >> kv) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("bad model spec token '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "window") spec.window = std::stoi(val);
    else if (key == "direction") spec.direction = parse_direction(val);
    else if (key == "fusion")
      spec.fusion_encoder = val == "cnn" ? FusionEncoder::Cnn : FusionEncoder::Bilstm;
    else if (key == "head_p") spec.head_p = std::stod(val);
    else if (key == "head_and_tail") spec.head_and_tail = val == "1";
    else if (key == "reorder") spec.reorder = parse_reorder(val);
    else if (key == "reorder_seed") spec.reorder_seed = std::stoull(val);
    else if (key == "title_cap") spec.caps.title_cap = std::stoi(val);
    else if (key == "sent_cap") spec.caps.sent_cap = std::stoi(val);
    else if (key == "max_sents") spec.caps.max_sents = std::stoi(val);
    else if (key == "flat_cap") spec.caps.flat_cap = std::stoi(val);
    else throw DataError("unknown model spec key '" + key + "'");
  }
  spec.validate();
  return spec;
}

NeuralVocab build_neural_vocab(const Corpus& corpus, const std::vector<int>& article_indices,
                               const StopwordSet& stopwords, bool strip_title_nums,
                               const std::string& fit_tag) {
  NeuralVocab v;
  v.fit_tag = fit_tag;
  for (int ai : article_indices) {
    const Article& a = corpus[static_cast<size_t>(ai)];
    for (const Chapter& c : a.chapters) {
      const std::string title = strip_title_nums ? strip_index_numbers(c.title) : c.title;
      for (const auto& tok : tokenize_normalize(title, stopwords))
        if (v.ids.find(tok) == v.ids.end()) v.add(tok);
      for (const auto& tok : tokenize_normalize(c.content, stopwords))
        if (v.ids.find(tok) == v.ids.end()) v.add(tok);
    }
  }
  return v;
}

namespace {

std::vector<int> to_ids(const std::vector<std::string>& toks, const NeuralVocab& vocab,
                        int cap) {
  std::vector<int> out;
  out.reserve(std::min<size_t>(toks.size(), static_cast<size_t>(cap)));
  for (const auto& t : toks) {
    if (static_cast<int>(out.size()) >= cap) break;
    out.push_back(vocab.id_of(t));
  }
  return out;
}

}  // namespace

EncodedCorpus encode_corpus(const Corpus& corpus, const NeuralVocab& vocab,
                            const StopwordSet& stopwords, bool strip_title_nums,
                            const SeqCaps& caps) {
  EncodedCorpus out;
  out.fit_tag = vocab.fit_tag;
  out.articles.reserve(corpus.size());
  for (const Article& a : corpus) {
    std::vector<ChapterTokens> chapters;
    chapters.reserve(a.chapters.size());
    for (const Chapter& c : a.chapters) {
      ChapterTokens ct;
      const std::string title = strip_title_nums ? strip_index_numbers(c.title) : c.title;
      ct.title = to_ids(tokenize_normalize(title, stopwords), vocab, caps.title_cap);
      std::vector<std::string> sents =
          c.sentences ? *c.sentences : split_sentences(c.content);
      for (const auto& s : sents) {
        if (static_cast<int>(ct.sentences.size()) >= caps.max_sents) break;
        auto toks = tokenize_normalize(s, stopwords);
        if (toks.empty()) continue;
        ct.sentences.push_back(to_ids(toks, vocab, caps.sent_cap));
      }
      if (ct.sentences.empty()) ct.sentences.push_back({});  // all-padding sentence
      std::vector<std::string> flat_toks = tokenize_normalize(c.content, stopwords);
      ct.flat.reserve(flat_toks.size());
      for (const auto& t : flat_toks) ct.flat.push_back(vocab.id_of(t));
      chapters.push_back(std::move(ct));
    }
    out.articles.push_back(std::move(chapters));
  }
  return out;
}

NeuralModel::NeuralModel(ModelSpec spec, Hyper hyper, NeuralVocab vocab)
    : spec_(std::move(spec)), hyper_(std::move(hyper)), vocab_(std::move(vocab)) {
  spec_.validate();
  hyper_.validate();
}

void NeuralModel::init_params(uint64_t seed) {
  Rng rng(seed);
  emb_.init(vocab_.size(), hyper_.embed_dim, rng);
  const int h = hyper_.lstm_hidden;
  const int slot_n = spec_.slot_count();
  int slot_dim = 0;
  switch (spec_.kind) {
    case ArchKind::CnnTitle:
    case ArchKind::FuseTitle:
      title_cnn_.init("title_cnn", hyper_.embed_dim, hyper_.cnn_filters, hyper_.cnn_heights, rng);
      slot_dim = title_cnn_.out_dim();
      break;
    case ArchKind::BilstmContent:
      flat_bilstm_.init("flat", hyper_.embed_dim, h, rng);
      slot_dim = flat_bilstm_.out_dim();
      break;
    case ArchKind::HierContent:
    case ArchKind::HierAttnContent:
    case ArchKind::FuseContent:
      hier_.init("hier", hyper_.embed_dim, h, spec_.kind == ArchKind::HierAttnContent, rng);
      slot_dim = hier_.out_dim();
      break;
    case ArchKind::HeadTail:
      head_enc_.init("head", hyper_.embed_dim, h, rng);
      if (spec_.head_and_tail) tail_enc_.init("tail", hyper_.embed_dim, h, rng);
      slot_dim = spec_.head_and_tail ? head_enc_.out_dim() + tail_enc_.out_dim()
                                     : head_enc_.out_dim();
      break;
    case ArchKind::FuseTitleContent:
      title_cnn_.init("title_cnn", hyper_.embed_dim, hyper_.cnn_filters, hyper_.cnn_heights, rng);
      hier_.init("hier", hyper_.embed_dim, h, false, rng);
      slot_dim = title_cnn_.out_dim() + hier_.out_dim();
      break;
  }
  readout_dim_ = slot_dim;
  if (arch_is_contextual(spec_.kind) && slot_n > 1) {
    if (spec_.fusion_encoder == FusionEncoder::Bilstm) {
      fusion_bilstm_.init("fusion", slot_dim, h, rng);
      readout_dim_ = fusion_bilstm_.out_dim();
    } else {
      std::vector<int> heights;
      for (int i = 1; i <= slot_n; ++i) heights.push_back(i);
      fusion_cnn_.init("fusion_cnn", slot_dim, hyper_.cnn_filters, heights, rng);
      readout_dim_ = fusion_cnn_.out_dim();
    }
  }
  dense_.init("dense", readout_dim_, kNumLabels, rng);
  built_ = true;
}

std::vector<Param*> NeuralModel::params() {
  if (!built_) throw InternalError("NeuralModel: params requested before init");
  std::vector<Param*> out;
  out.push_back(&emb_.table);
  switch (spec_.kind) {
    case ArchKind::CnnTitle:
    case ArchKind::FuseTitle:
      title_cnn_.collect(out);
      break;
    case ArchKind::BilstmContent:
      flat_bilstm_.collect(out);
      break;
    case ArchKind::HierContent:
    case ArchKind::HierAttnContent:
    case ArchKind::FuseContent:
      hier_.collect(out);
      break;
    case ArchKind::HeadTail:
      head_enc_.collect(out);
      if (spec_.head_and_tail) tail_enc_.collect(out);
      break;
    case ArchKind::FuseTitleContent:
      title_cnn_.collect(out);
      hier_.collect(out);
      break;
  }
  if (arch_is_contextual(spec_.kind) && spec_.slot_count() > 1) {
    if (spec_.fusion_encoder == FusionEncoder::Bilstm)
      fusion_bilstm_.collect(out);
    else
      fusion_cnn_.collect(out);
  }
  dense_.collect(out);
  return out;
}

int NeuralModel::micro_batch_size() const {
  if (hyper_.micro_batch > 0) return hyper_.micro_batch;
  switch (spec_.kind) {
    case ArchKind::CnnTitle:
    case ArchKind::FuseTitle:
      return 128;
    case ArchKind::BilstmContent:
    case ArchKind::HeadTail:
      return 32;
    default:
      return 8;
  }
}

namespace {

// Title batch for a list of chapters, padded at least to the max CNN height.
TokenBatch title_batch(const EncodedCorpus& data, const std::vector<std::pair<int, int>>& who,
                       const std::vector<int>& heights) {
  int min_len = 1;
  for (int h : heights) min_len = std::max(min_len, h);
  std::vector<std::vector<int>> seqs;
  seqs.reserve(who.size());
  for (const auto& [ai, ci] : who)
    seqs.push_back(data.articles[static_cast<size_t>(ai)][static_cast<size_t>(ci)].title);
  return TokenBatch::pack(seqs, min_len);
}

// Flattened sentence batch + per-chapter sentence row groups.
std::pair<TokenBatch, std::vector<std::vector<int>>> hier_batch(
    const EncodedCorpus& data, const std::vector<std::pair<int, int>>& who) {
  std::vector<std::vector<int>> seqs;
  std::vector<std::vector<int>> groups;
  groups.reserve(who.size());
  for (const auto& [ai, ci] : who) {
    const auto& ct = data.articles[static_cast<size_t>(ai)][static_cast<size_t>(ci)];
    std::vector<int> rows;
    rows.reserve(ct.sentences.size());
    for (const auto& s : ct.sentences) {
      rows.push_back(static_cast<int>(seqs.size()));
      seqs.push_back(s);
    }
    groups.push_back(std::move(rows));
  }
  return {TokenBatch::pack(seqs, 1), std::move(groups)};
}

std::vector<int> capped(const std::vector<int>& v, int cap) {
  if (static_cast<int>(v.size()) <= cap) return v;
  return std::vector<int>(v.begin(), v.begin() + cap);
}

}  // namespace

Var* NeuralModel::encode_unique_chapters(Tape& t, const EncodedCorpus& data,
                                         const std::vector<std::pair<int, int>>& uniq) {
  switch (spec_.kind) {
    case ArchKind::CnnTitle:
    case ArchKind::FuseTitle: {
      return cnn_encode(t, title_batch(data, uniq, title_cnn_.heights), emb_, title_cnn_);
    }
    case ArchKind::HierContent:
    case ArchKind::HierAttnContent:
    case ArchKind::FuseContent: {
      auto [sents, groups] = hier_batch(data, uniq);
      return hierarchical_encode(t, sents, groups, emb_, hier_);
    }
    case ArchKind::FuseTitleContent: {
      Var* titles = cnn_encode(t, title_batch(data, uniq, title_cnn_.heights), emb_, title_cnn_);
      auto [sents, groups] = hier_batch(data, uniq);
      Var* contents = hierarchical_encode(t, sents, groups, emb_, hier_);
      return t.concat_cols({titles, contents});
    }
    default:
      throw InternalError("encode_unique_chapters: not a slot architecture");
  }
}

Var* NeuralModel::slot_matrix(Tape& t, const EncodedCorpus& data,
                              const std::vector<TrainExample>& batch, int* cur_pos_out) {
  const int slot_n = spec_.slot_count();
  std::vector<std::pair<int, int>> uniq;
  std::map<std::pair<int, int>, int> row_of;
  std::vector<int> gather;
  gather.reserve(batch.size() * static_cast<size_t>(slot_n));
  int cur_pos = -1;
  for (const TrainExample& ex : batch) {
    const auto& chapters = data.articles[static_cast<size_t>(ex.article)];
    Window win = context_window(static_cast<int>(chapters.size()), ex.chapter, spec_.window,
                                spec_.direction);
    win = reorder_context(win, spec_.reorder, derive_seed(spec_.reorder_seed, ex.reorder_salt));
    if (cur_pos < 0)
      cur_pos = win.cur_pos;
    else if (cur_pos != win.cur_pos)
      throw InternalError("slot_matrix: inconsistent current-slot position in batch");
    for (int s : win.slots) {
      if (s < 0) {
        gather.push_back(-1);
        continue;
      }
      const std::pair<int, int> key{ex.article, s};
      auto it = row_of.find(key);
      if (it == row_of.end()) {
        it = row_of.emplace(key, static_cast<int>(uniq.size())).first;
        uniq.push_back(key);
      }
      gather.push_back(it->second);
    }
  }
  *cur_pos_out = cur_pos;
  Var* enc = encode_unique_chapters(t, data, uniq);
  return t.gather_rows(enc, gather);  // (batch * slot_n) x slot_dim
}

Var* NeuralModel::readout(Tape& t, const EncodedCorpus& data,
                          const std::vector<TrainExample>& batch) {
  const int b = static_cast<int>(batch.size());
  switch (spec_.kind) {
    case ArchKind::CnnTitle: {
      std::vector<std::pair<int, int>> who;
      who.reserve(batch.size());
      for (const auto& ex : batch) who.emplace_back(ex.article, ex.chapter);
      return cnn_encode(t, title_batch(data, who, title_cnn_.heights), emb_, title_cnn_);
    }
    case ArchKind::BilstmContent: {
      std::vector<std::vector<int>> seqs;
      seqs.reserve(batch.size());
      for (const auto& ex : batch)
        seqs.push_back(capped(
            data.articles[static_cast<size_t>(ex.article)][static_cast<size_t>(ex.chapter)].flat,
            spec_.caps.flat_cap));
      return bilstm_encode(t, TokenBatch::pack(seqs, 1), emb_, flat_bilstm_).final;
    }
    case ArchKind::HierContent:
    case ArchKind::HierAttnContent: {
      std::vector<std::pair<int, int>> who;
      who.reserve(batch.size());
      for (const auto& ex : batch) who.emplace_back(ex.article, ex.chapter);
      auto [sents, groups] = hier_batch(data, who);
      return hierarchical_encode(t, sents, groups, emb_, hier_);
    }
    case ArchKind::HeadTail: {
      std::vector<std::vector<int>> heads, tails;
      heads.reserve(batch.size());
      tails.reserve(batch.size());
      for (const auto& ex : batch) {
        const auto& flat =
            data.articles[static_cast<size_t>(ex.article)][static_cast<size_t>(ex.chapter)].flat;
        if (flat.empty()) {
          heads.push_back({});
          tails.push_back({});
          continue;
        }
        auto [h, tl] = head_tail_slice(flat, spec_.head_p, spec_.head_and_tail);
        heads.push_back(capped(h, spec_.caps.flat_cap));
        tails.push_back(capped(tl, spec_.caps.flat_cap));
      }
      Var* hv = bilstm_encode(t, TokenBatch::pack(heads, 1), emb_, head_enc_).final;
      if (!spec_.head_and_tail) return hv;
      Var* tv = bilstm_encode(t, TokenBatch::pack(tails, 1), emb_, tail_enc_).final;
      return t.concat_cols({hv, tv});
    }
    case ArchKind::FuseContent:
    case ArchKind::FuseTitle:
    case ArchKind::FuseTitleContent: {
      int cur_pos = 0;
      Var* slots = slot_matrix(t, data, batch, &cur_pos);
      const int slot_n = spec_.slot_count();
      if (slot_n == 1) return slots;  // degenerate window: slot vector feeds dense directly
      if (spec_.fusion_encoder == FusionEncoder::Bilstm) {
        std::vector<Var*> steps;
        std::vector<Mat> masks;
        steps.reserve(static_cast<size_t>(slot_n));
        Mat ones(b, 1);
        for (int i = 0; i < b; ++i) ones.at(i, 0) = 1.0;
        for (int s = 0; s < slot_n; ++s) {
          std::vector<int> idx(static_cast<size_t>(b));
          for (int e = 0; e < b; ++e) idx[static_cast<size_t>(e)] = e * slot_n + s;
          steps.push_back(t.gather_rows(slots, idx));
          masks.push_back(ones);
        }
        BiLstmOut out = bilstm_run(t, fusion_bilstm_, steps, masks);
        return out.per_step[static_cast<size_t>(cur_pos)];
      }
      return cnn_over_rows(t, fusion_cnn_, slots, b, slot_n);
    }
  }
  throw InternalError("readout: unhandled architecture");
}

Var* NeuralModel::forward(Tape& t, const EncodedCorpus& data,
                          const std::vector<TrainExample>& batch, bool train, Rng* dropout_rng) {
  if (!built_) throw InternalError("NeuralModel: forward before init");
  if (batch.empty()) throw InternalError("NeuralModel: empty batch");
  if (vocab_.fit_tag != data.fit_tag)
    throw InternalError("NeuralModel: corpus encoded with vocabulary '" + data.fit_tag +
                        "' but model was fitted on '" + vocab_.fit_tag + "'");
  Var* r = readout(t, data, batch);
  if (train && hyper_.dropout > 0.0) {
    if (!dropout_rng) throw InternalError("NeuralModel: training forward needs an RNG");
    const double keep = 1.0 - hyper_.dropout;
    Mat mask(r->rows(), r->cols());
    for (double& x : mask.a) x = dropout_rng->uniform() < keep ? 1.0 : 0.0;
    r = t.dropout(r, mask, keep);
  }
  return dense(t, dense_, r);
}

Mat NeuralModel::predict_probs(const EncodedCorpus& data,
                               const std::vector<TrainExample>& batch) {
  Mat probs(static_cast<int>(batch.size()), kNumLabels);
  const int chunk = micro_batch_size();
  for (size_t start = 0; start < batch.size(); start += static_cast<size_t>(chunk)) {
    const size_t end = std::min(batch.size(), start + static_cast<size_t>(chunk));
    std::vector<TrainExample> part(batch.begin() + static_cast<long>(start),
                                   batch.begin() + static_cast<long>(end));
    Tape t;
    Var* logits = forward(t, data, part, false, nullptr);
    for (size_t i = start; i < end; ++i) {
      const double* row = logits->val.row(static_cast<int>(i - start));
      double mx = row[0];
      for (int j = 1; j < kNumLabels; ++j) mx = std::max(mx, row[j]);
      double z = 0.0;
      double* out = probs.row(static_cast<int>(i));
      for (int j = 0; j < kNumLabels; ++j) {
        out[j] = std::exp(row[j] - mx);
        z += out[j];
      }
      for (int j = 0; j < kNumLabels; ++j) out[j] /= z;
    }
  }
  return probs;
}

std::vector<Label> NeuralModel::predict(const EncodedCorpus& data,
                                        const std::vector<TrainExample>& batch) {
  const Mat probs = predict_probs(data, batch);
  std::vector<Label> out;
  out.reserve(batch.size());
  for (int i = 0; i < probs.rows; ++i) {
    const double* row = probs.row(i);
    int best = 0;
    for (int j = 1; j < kNumLabels; ++j)
      if (row[j] > row[best]) best = j;
    out.push_back(label_from_id(best));
  }
  return out;
}

}  // namespace secfn
