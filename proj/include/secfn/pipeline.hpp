#pragma once

#include <optional>
#include <string>
#include <vector>

#include "secfn/corpus.hpp"
#include "secfn/features.hpp"

namespace secfn {

// Fitted lexical + additional-characteristic featurizer for the classical
// models. Vocabularies are fitted on a training split and tagged with it;
// evaluation harnesses check the tag before vectorizing held-out data.
struct FeaturePipeline {
  enum class Input { Content, Title, TitleContent };

  Input input = Input::Content;
  FeatureConfig config;
  EnabledCharacteristics enabled;
  Vocabulary title_vocab;    // used for Title and TitleContent
  Vocabulary content_vocab;  // used for Content and TitleContent
  std::string fit_tag;

  int lexical_dim() const;
  int dim() const;

  // Vectorize one chapter. Additional characteristics use the explicit
  // per-chapter counts and label-aware relative position.
  SparseVector vectorize(const Article& article, int chapter_index,
                         const AdditionalCodes& codes) const;
};

const char* pipeline_input_name(FeaturePipeline::Input in);
FeaturePipeline::Input parse_pipeline_input(const std::string& s);

// Fits vocabularies on the given training articles.
FeaturePipeline fit_pipeline(const Corpus& corpus, const std::vector<int>& train_articles,
                             FeaturePipeline::Input input, const FeatureConfig& config,
                             const EnabledCharacteristics& enabled, const std::string& fit_tag,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace secfn
