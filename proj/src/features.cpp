#include "secfn/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "secfn/rng.hpp"

namespace secfn {

double SparseVector::dot(const SparseVector& o) const {
  double s = 0.0;
  size_t i = 0, j = 0;
  while (i < entries.size() && j < o.entries.size()) {
    if (entries[i].first == o.entries[j].first) {
      s += entries[i].second * o.entries[j].second;
      ++i;
      ++j;
    } else if (entries[i].first < o.entries[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& [idx, w] : entries) s += w * w;
  return std::sqrt(s);
}

int Vocabulary::id_of(const std::string& term) const {
  auto it = term_to_id.find(term);
  return it == term_to_id.end() ? -1 : it->second;
}

int Vocabulary::require_id(const std::string& term) const {
  const int id = id_of(term);
  if (id < 0) throw DataError("unknown term '" + term + "'");
  return id;
}

Vocabulary build_vocabulary(const std::vector<TokenDoc>& docs, const std::vector<Label>& labels,
                            const std::string& fit_tag) {
  if (docs.size() != labels.size())
    throw InternalError("build_vocabulary: docs/labels size mismatch");
  Vocabulary v;
  v.fit_tag = fit_tag;
  v.n_docs = static_cast<int64_t>(docs.size());
  for (size_t d = 0; d < docs.size(); ++d) {
    ++v.n_docs_per_class[label_id(labels[d])];
    std::set<std::string> uniq(docs[d].begin(), docs[d].end());
    for (const std::string& t : uniq) {
      auto [it, inserted] = v.term_to_id.emplace(t, static_cast<int>(v.id_to_term.size()));
      if (inserted) {
        v.id_to_term.push_back(t);
        v.doc_freq.push_back(0);
        v.class_term_doc.emplace_back();
      }
      ++v.doc_freq[static_cast<size_t>(it->second)];
      ++v.class_term_doc[static_cast<size_t>(it->second)][label_id(labels[d])];
    }
  }
  return v;
}

double chi_square(const Vocabulary& vocab, int term_id, Label cls) {
  if (term_id < 0 || term_id >= vocab.size()) throw DataError("chi_square: unknown term id");
  const double a = static_cast<double>(vocab.class_term_doc[static_cast<size_t>(term_id)][label_id(cls)]);
  const double df = static_cast<double>(vocab.doc_freq[static_cast<size_t>(term_id)]);
  const double nc = static_cast<double>(vocab.n_docs_per_class[label_id(cls)]);
  const double n = static_cast<double>(vocab.n_docs);
  const double b = df - a;
  const double c = nc - a;
  const double d = n - a - b - c;
  const double m1 = a + b, m2 = c + d, m3 = a + c, m4 = b + d;
  if (m1 == 0.0 || m2 == 0.0 || m3 == 0.0 || m4 == 0.0) return 0.0;
  const double det = a * d - b * c;
  return n * det * det / (m1 * m2 * m3 * m4);
}

double chi_square(const Vocabulary& vocab, const std::string& term, Label cls) {
  return chi_square(vocab, vocab.require_id(term), cls);
}

namespace {

double entropy(const std::array<double, kNumLabels>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double info_gain(const Vocabulary& vocab, int term_id) {
  if (term_id < 0 || term_id >= vocab.size()) throw DataError("info_gain: unknown term id");
  const double n = static_cast<double>(vocab.n_docs);
  if (n == 0.0) return 0.0;
  std::array<double, kNumLabels> cls{}, with{}, without{};
  double df = static_cast<double>(vocab.doc_freq[static_cast<size_t>(term_id)]);
  for (int l = 0; l < kNumLabels; ++l) {
    cls[static_cast<size_t>(l)] = static_cast<double>(vocab.n_docs_per_class[static_cast<size_t>(l)]);
    with[static_cast<size_t>(l)] =
        static_cast<double>(vocab.class_term_doc[static_cast<size_t>(term_id)][static_cast<size_t>(l)]);
    without[static_cast<size_t>(l)] = cls[static_cast<size_t>(l)] - with[static_cast<size_t>(l)];
  }
  const double h_c = entropy(cls, n);
  const double p_t = df / n;
  const double ig = h_c - p_t * entropy(with, df) - (1.0 - p_t) * entropy(without, n - df);
  return std::max(0.0, ig);
}

double info_gain(const Vocabulary& vocab, const std::string& term) {
  return info_gain(vocab, vocab.require_id(term));
}

double weighted_chi(const Vocabulary& vocab, int term_id) {
  if (term_id < 0 || term_id >= vocab.size()) throw DataError("weighted_chi: unknown term id");
  const double n = static_cast<double>(vocab.n_docs);
  if (n == 0.0) return 0.0;
  double s = 0.0;
  for (Label l : all_labels()) {
    const double p = static_cast<double>(vocab.n_docs_per_class[label_id(l)]) / n;
    if (p > 0.0) s += p * chi_square(vocab, term_id, l);
  }
  return s;
}

Vocabulary select_features(const Vocabulary& vocab, SelectionMethod method, int top_k,
                           std::vector<std::string>* warnings) {
  if (method == SelectionMethod::None) return vocab;
  if (top_k < 1) throw ConfigError("select_features: top_k must be >= 1");
  const int v_size = vocab.size();
  int keep = top_k;
  if (top_k > v_size) {
    if (warnings)
      warnings->push_back("select_features: top_k " + std::to_string(top_k) +
                          " exceeds vocabulary size " + std::to_string(v_size) +
                          "; keeping all terms");
    keep = v_size;
  }
  std::vector<std::pair<double, int>> scored(static_cast<size_t>(v_size));
  for (int t = 0; t < v_size; ++t) {
    double best = 0.0;
    if (method == SelectionMethod::Chi) {
      for (Label l : all_labels())
        if (vocab.n_docs_per_class[label_id(l)] > 0) best = std::max(best, chi_square(vocab, t, l));
    } else {
      best = info_gain(vocab, t);
    }
    scored[static_cast<size_t>(t)] = {best, t};
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return vocab.id_to_term[static_cast<size_t>(x.second)] <
           vocab.id_to_term[static_cast<size_t>(y.second)];
  });
  Vocabulary out;
  out.fit_tag = vocab.fit_tag;
  out.n_docs = vocab.n_docs;
  out.n_docs_per_class = vocab.n_docs_per_class;
  for (int i = 0; i < keep; ++i) {
    const int old_id = scored[static_cast<size_t>(i)].second;
    out.term_to_id.emplace(vocab.id_to_term[static_cast<size_t>(old_id)], i);
    out.id_to_term.push_back(vocab.id_to_term[static_cast<size_t>(old_id)]);
    out.doc_freq.push_back(vocab.doc_freq[static_cast<size_t>(old_id)]);
    out.class_term_doc.push_back(vocab.class_term_doc[static_cast<size_t>(old_id)]);
  }
  return out;
}

SparseVector tfidf_vectorize(const TokenDoc& tokens, const Vocabulary& vocab) {
  std::map<int, double> tf;
  for (const std::string& t : tokens) {
    const int id = vocab.id_of(t);
    if (id >= 0) tf[id] += 1.0;
  }
  SparseVector v;
  v.dim = vocab.size();
  double norm2 = 0.0;
  for (const auto& [id, count] : tf) {
    const double idf =
        std::log((1.0 + static_cast<double>(vocab.n_docs)) /
                 (1.0 + static_cast<double>(vocab.doc_freq[static_cast<size_t>(id)]))) +
        1.0;
    const double w = count * idf;
    v.entries.emplace_back(id, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& [id, w] : v.entries) w *= inv;
  }
  return v;
}

double relative_position(const Article& article, int chapter_index) {
  if (chapter_index < 0 || chapter_index >= static_cast<int>(article.chapters.size()))
    throw InternalError("relative_position: chapter index out of range");
  int total = 0;
  for (const Chapter& c : article.chapters)
    if (!c.label || *c.label != Label::Other) ++total;
  if (total == 0)
    throw DataError("relative_position: article '" + article.id + "' has only Other chapters");
  int pos = 0;  // 1-based ordinal among non-Other chapters, up to chapter_index
  for (int i = 0; i <= chapter_index; ++i) {
    const Chapter& c = article.chapters[static_cast<size_t>(i)];
    if (!c.label || *c.label != Label::Other) ++pos;
  }
  return static_cast<double>(pos) / static_cast<double>(total);
}

namespace {

// bucket = number of edges <= value; values above the last edge land in the
// last bucket by construction.
template <class T>
size_t bucket_of(const std::vector<T>& edges, T value) {
  size_t b = 0;
  while (b < edges.size() && edges[b] <= value) ++b;
  return b;
}

template <class T>
void check_edges(const std::vector<T>& edges, const char* what) {
  for (size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i - 1] < edges[i]))
      throw ConfigError(std::string("additional-feature bin edges for ") + what +
                        " must be strictly increasing");
}

}  // namespace

AdditionalCodes::AdditionalCodes(const AdditionalConfig& cfg) : cfg_(cfg) {
  if (cfg.code_dim < 1) throw ConfigError("additional code_dim must be >= 1");
  check_edges(cfg.loc_bins, "loc");
  check_edges(cfg.cite_bins, "cite");
  check_edges(cfg.ft_bins, "ft");
  Rng rng(cfg.seed);
  auto draw = [&](size_t buckets, std::vector<std::vector<double>>& out) {
    out.resize(buckets);
    for (auto& code : out) {
      code.resize(static_cast<size_t>(cfg_.code_dim));
      for (double& x : code) x = rng.uniform();
    }
  };
  draw(cfg.loc_bins.size() + 1, loc_codes_);
  draw(cfg.cite_bins.size() + 1, cite_codes_);
  draw(cfg.ft_bins.size() + 1, ft_codes_);
}

std::vector<double> AdditionalCodes::encode(double loc, int cites, int figtabs,
                                            const EnabledCharacteristics& enabled) const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(cfg_.code_dim) * static_cast<size_t>(enabled.count()));
  if (enabled.loc) {
    const auto& code = loc_codes_[bucket_of(cfg_.loc_bins, loc)];
    out.insert(out.end(), code.begin(), code.end());
  }
  if (enabled.cite) {
    const auto& code = cite_codes_[bucket_of(cfg_.cite_bins, cites)];
    out.insert(out.end(), code.begin(), code.end());
  }
  if (enabled.ft) {
    const auto& code = ft_codes_[bucket_of(cfg_.ft_bins, figtabs)];
    out.insert(out.end(), code.begin(), code.end());
  }
  return out;
}

SparseVector concat_features(const SparseVector& lexical, const std::vector<double>& additional) {
  SparseVector out;
  out.dim = lexical.dim + static_cast<int>(additional.size());
  out.entries = lexical.entries;
  for (size_t j = 0; j < additional.size(); ++j)
    if (additional[j] != 0.0)
      out.entries.emplace_back(lexical.dim + static_cast<int>(j), additional[j]);
  return out;
}

std::pair<SparseVector, std::vector<double>> split_features(const SparseVector& v, int lexical_dim,
                                                            int additional_len) {
  if (v.dim != lexical_dim + additional_len)
    throw InternalError("split_features: dimension mismatch");
  SparseVector lex;
  lex.dim = lexical_dim;
  std::vector<double> add(static_cast<size_t>(additional_len), 0.0);
  for (const auto& [idx, w] : v.entries) {
    if (idx < lexical_dim)
      lex.entries.emplace_back(idx, w);
    else
      add[static_cast<size_t>(idx - lexical_dim)] = w;
  }
  return {lex, add};
}

uint64_t FeatureConfig::digest() const {
  std::ostringstream os;
  os << "selection=" << static_cast<int>(selection) << ";top_k=" << top_k
     << ";strip=" << strip_title_numbers << ";code_dim=" << additional.code_dim
     << ";seed=" << additional.seed << ";loc=";
  for (double e : additional.loc_bins) os << e << ",";
  os << ";cite=";
  for (int e : additional.cite_bins) os << e << ",";
  os << ";ft=";
  for (int e : additional.ft_bins) os << e << ",";
  os << ";stop=";
  for (const auto& s : stopwords) os << s << ",";
  return fnv1a(os.str());
}

std::vector<std::pair<std::string, double>> context_chi_analysis(const Corpus& corpus,
                                                                 Label target_class, int offset,
                                                                 const StopwordSet& stopwords) {
  if (offset == 0) throw ConfigError("context_chi_analysis: offset must be nonzero");
  bool target_present = false;
  std::vector<TokenDoc> docs;
  std::vector<Label> labels;  // binary: Introduction = "is target", Other = "not target"
  for (const Article& a : corpus) {
    const int n = static_cast<int>(a.chapters.size());
    for (int i = 0; i < n; ++i) {
      const Chapter& anchor = a.chapters[static_cast<size_t>(i)];
      if (anchor.label && *anchor.label == target_class) target_present = true;
      const int j = i + offset;
      if (j < 0 || j >= n) continue;
      if (!anchor.label) continue;
      docs.push_back(tokenize_normalize(
          strip_index_numbers(a.chapters[static_cast<size_t>(j)].title), stopwords));
      labels.push_back(*anchor.label == target_class ? Label::Introduction : Label::Other);
    }
  }
  if (!target_present)
    throw DataError("context_chi_analysis: target class '" + label_name(target_class) +
                    "' absent from corpus");
  if (docs.empty()) return {};
  Vocabulary vocab = build_vocabulary(docs, labels, "context-analysis");
  std::vector<std::pair<std::string, double>> out;
  out.reserve(static_cast<size_t>(vocab.size()));
  for (int t = 0; t < vocab.size(); ++t)
    out.emplace_back(vocab.id_to_term[static_cast<size_t>(t)],
                     chi_square(vocab, t, Label::Introduction));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return out;
}

}  // namespace secfn
