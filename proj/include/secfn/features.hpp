#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "secfn/corpus.hpp"
#include "secfn/label.hpp"
#include "secfn/text.hpp"

namespace secfn {

struct SparseVector {
  int dim = 0;
  std::vector<std::pair<int, double>> entries;  // strictly increasing indices

  double dot(const SparseVector& o) const;
  double norm() const;
};

// Term statistics over one training split. fit_tag records which split the
// vocabulary was fitted on; evaluation paths check it to prevent leakage.
struct Vocabulary {
  std::map<std::string, int> term_to_id;
  std::vector<std::string> id_to_term;
  std::vector<int64_t> doc_freq;
  std::vector<std::array<int64_t, kNumLabels>> class_term_doc;
  int64_t n_docs = 0;
  std::array<int64_t, kNumLabels> n_docs_per_class{};
  std::string fit_tag;

  int size() const { return static_cast<int>(id_to_term.size()); }
  int id_of(const std::string& term) const;  // -1 when absent
  int require_id(const std::string& term) const;  // throws DataError when absent
};

using TokenDoc = std::vector<std::string>;

Vocabulary build_vocabulary(const std::vector<TokenDoc>& docs,
                            const std::vector<Label>& labels,
                            const std::string& fit_tag);

// chi^2 over the 2x2 document contingency table; 0 when any marginal is 0.
double chi_square(const Vocabulary& vocab, int term_id, Label cls);
double chi_square(const Vocabulary& vocab, const std::string& term, Label cls);

// Information gain with natural-log entropies; within [0, H(C)].
double info_gain(const Vocabulary& vocab, int term_id);
double info_gain(const Vocabulary& vocab, const std::string& term);

// Class-prior-weighted chi^2: sum_c p(c) chi^2(term, c).
double weighted_chi(const Vocabulary& vocab, int term_id);

enum class SelectionMethod { Chi, Ig, None };

// Keeps top_k terms by max-over-classes score, ties lexicographic; ids are
// re-densified in (score desc, term asc) order. top_k > V keeps all and warns.
Vocabulary select_features(const Vocabulary& vocab, SelectionMethod method, int top_k,
                           std::vector<std::string>* warnings = nullptr);

// tf * (ln((1+N)/(1+df)) + 1), L2-normalized; OOV tokens dropped.
SparseVector tfidf_vectorize(const TokenDoc& tokens, const Vocabulary& vocab);

// Ordinal among non-Other chapters / count of non-Other chapters. An Other
// chapter inherits the nearest preceding non-Other position (0 if none).
double relative_position(const Article& article, int chapter_index);

struct AdditionalConfig {
  std::vector<double> loc_bins = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<int> cite_bins = {0, 1, 2, 3, 6, 11};
  std::vector<int> ft_bins = {0, 1, 2, 3, 5};
  int code_dim = 10;
  uint64_t seed = 42;
};

struct EnabledCharacteristics {
  bool loc = false;
  bool cite = false;
  bool ft = false;

  int count() const { return (loc ? 1 : 0) + (cite ? 1 : 0) + (ft ? 1 : 0); }
};

// Per-bucket code vectors, drawn once from the seeded generator at
// construction. Equal config => bitwise-equal codes.
class AdditionalCodes {
 public:
  explicit AdditionalCodes(const AdditionalConfig& cfg);

  std::vector<double> encode(double loc, int cites, int figtabs,
                             const EnabledCharacteristics& enabled) const;

  const AdditionalConfig& config() const { return cfg_; }

 private:
  AdditionalConfig cfg_;
  std::vector<std::vector<double>> loc_codes_, cite_codes_, ft_codes_;
};

SparseVector concat_features(const SparseVector& lexical, const std::vector<double>& additional);

// Slice the first `dim` indices out of a concatenated vector (inverse of
// concat_features together with the tail).
std::pair<SparseVector, std::vector<double>> split_features(const SparseVector& v, int lexical_dim,
                                                            int additional_len);

struct FeatureConfig {
  StopwordSet stopwords = default_stopwords();
  SelectionMethod selection = SelectionMethod::Chi;
  int top_k = 5357;
  bool strip_title_numbers = true;
  AdditionalConfig additional;

  uint64_t digest() const;
};

// chi^2 ranking of neighbor-title terms at a chapter offset (negative =
// previous chapters) against "anchor chapter has target_class".
std::vector<std::pair<std::string, double>> context_chi_analysis(const Corpus& corpus,
                                                                 Label target_class, int offset,
                                                                 const StopwordSet& stopwords);

}  // namespace secfn
