#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "secfn/label.hpp"

namespace secfn {

struct Chapter {
  int ordinal = 0;  // 1-based position in the article
  std::string title;
  std::string content;
  std::optional<std::vector<std::string>> sentences;
  int n_citations = 0;   // explicit field wins; otherwise count_citations(content)
  int n_figtables = 0;   // explicit field wins; otherwise count_figtables(content)
  std::optional<Label> label;

  bool operator==(const Chapter&) const = default;
};

struct Article {
  std::string id;
  std::optional<int> year;
  std::optional<std::string> venue;
  std::vector<Chapter> chapters;

  bool operator==(const Article&) const = default;
};

using Corpus = std::vector<Article>;

enum class CorpusFormat { Jsonl, Xmlish };

struct ParseOptions {
  CorpusFormat format = CorpusFormat::Jsonl;
  bool strict = true;  // lenient mode skips malformed records with a warning
};

// Parses and validates a corpus. In lenient mode malformed records are
// reported through `warnings` and skipped; strict mode throws DataError.
Corpus parse_corpus(const std::string& path, const ParseOptions& opts,
                    std::vector<std::string>* warnings = nullptr);
Corpus parse_corpus_stream(std::istream& in, const std::string& origin,
                           const ParseOptions& opts,
                           std::vector<std::string>* warnings = nullptr);

void serialize_corpus(const Corpus& corpus, std::ostream& out);
void serialize_corpus(const Corpus& corpus, const std::string& path);

void validate_article(const Article& a);  // invariant check, throws DataError

struct AnnotationPair {
  struct Item {
    std::string item_id;
    Label a;
    Label b;
  };
  std::vector<Item> items;
};

AnnotationPair load_annotation_pairs(const std::string& path);  // CSV: id,label_a,label_b

// Cohen's kappa over the two label sequences. p_e = 1 with perfect agreement
// returns exactly 1.0; p_e = 1 otherwise is a DataError.
double cohen_kappa(const AnnotationPair& pair);

struct CorpusStats {
  std::array<int64_t, kNumLabels> label_counts{};
  int64_t articles = 0;
  int64_t chapters = 0;
};

// strict: every chapter must be labeled, offenders listed in the error.
CorpusStats corpus_stats(const Corpus& corpus, bool strict = true);

}  // namespace secfn
