#include "secfn/pipeline.hpp"

namespace secfn {

const char* pipeline_input_name(FeaturePipeline::Input in) {
  switch (in) {
    case FeaturePipeline::Input::Content: return "content";
    case FeaturePipeline::Input::Title: return "title";
    case FeaturePipeline::Input::TitleContent: return "title+content";
  }
  return "?";
}

FeaturePipeline::Input parse_pipeline_input(const std::string& s) {
  if (s == "content") return FeaturePipeline::Input::Content;
  if (s == "title") return FeaturePipeline::Input::Title;
  if (s == "title+content") return FeaturePipeline::Input::TitleContent;
  throw ConfigError("unknown feature input '" + s + "' (content|title|title+content)");
}

int FeaturePipeline::lexical_dim() const {
  switch (input) {
    case Input::Content: return content_vocab.size();
    case Input::Title: return title_vocab.size();
    case Input::TitleContent: return title_vocab.size() + content_vocab.size();
  }
  return 0;
}

int FeaturePipeline::dim() const {
  return lexical_dim() + config.additional.code_dim * enabled.count();
}

SparseVector FeaturePipeline::vectorize(const Article& article, int chapter_index,
                                        const AdditionalCodes& codes) const {
  const Chapter& c = article.chapters[static_cast<size_t>(chapter_index)];
  SparseVector lex;
  if (input == Input::Title || input == Input::TitleContent) {
    const std::string title =
        config.strip_title_numbers ? strip_index_numbers(c.title) : c.title;
    lex = tfidf_vectorize(tokenize_normalize(title, config.stopwords), title_vocab);
  }
  if (input == Input::Content) {
    lex = tfidf_vectorize(tokenize_normalize(c.content, config.stopwords), content_vocab);
  } else if (input == Input::TitleContent) {
    const SparseVector cv =
        tfidf_vectorize(tokenize_normalize(c.content, config.stopwords), content_vocab);
    // content vector appended behind the title block
    SparseVector merged;
    merged.dim = lex.dim + cv.dim;
    merged.entries = lex.entries;
    for (const auto& [idx, w] : cv.entries) merged.entries.emplace_back(lex.dim + idx, w);
    lex = std::move(merged);
  }
  if (enabled.count() == 0) return lex;
  const double loc = relative_position(article, chapter_index);
  const std::vector<double> add = codes.encode(loc, c.n_citations, c.n_figtables, enabled);
  return concat_features(lex, add);
}

FeaturePipeline fit_pipeline(const Corpus& corpus, const std::vector<int>& train_articles,
                             FeaturePipeline::Input input, const FeatureConfig& config,
                             const EnabledCharacteristics& enabled, const std::string& fit_tag,
                             std::vector<std::string>* warnings) {
  FeaturePipeline p;
  p.input = input;
  p.config = config;
  p.enabled = enabled;
  p.fit_tag = fit_tag;

  std::vector<TokenDoc> title_docs, content_docs;
  std::vector<Label> labels;
  for (int ai : train_articles) {
    const Article& a = corpus[static_cast<size_t>(ai)];
    for (const Chapter& c : a.chapters) {
      if (!c.label)
        throw DataError("fit_pipeline: unlabeled chapter in training article '" + a.id + "'");
      labels.push_back(*c.label);
      if (input != FeaturePipeline::Input::Content) {
        const std::string title =
            config.strip_title_numbers ? strip_index_numbers(c.title) : c.title;
        title_docs.push_back(tokenize_normalize(title, config.stopwords));
      }
      if (input != FeaturePipeline::Input::Title)
        content_docs.push_back(tokenize_normalize(c.content, config.stopwords));
    }
  }
  if (labels.empty()) throw DataError("fit_pipeline: no training chapters");
  if (input != FeaturePipeline::Input::Content) {
    // titles keep their full term set (no selection)
    p.title_vocab = build_vocabulary(title_docs, labels, fit_tag);
  }
  if (input != FeaturePipeline::Input::Title) {
    Vocabulary v = build_vocabulary(content_docs, labels, fit_tag);
    if (config.selection != SelectionMethod::None)
      v = select_features(v, config.selection, config.top_k, warnings);
    p.content_vocab = std::move(v);
  }
  return p;
}

}  // namespace secfn
