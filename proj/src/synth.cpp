#include "secfn/synth.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "secfn/rng.hpp"
#include "secfn/text.hpp"

namespace secfn {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::vector<std::string>& title_pool(Label l) {
  static const std::vector<std::vector<std::string>> kPools = {
      {"Introduction", "Overview"},
      {"Related Work", "Background", "Previous Studies"},
      {"Method", "Approach", "Proposed Model", "Algorithm Design"},
      {"Experiments", "Results", "Evaluation", "Results and Discussion"},
      {"Conclusion", "Summary", "Conclusion and Future Work"},
      {"Appendix", "Acknowledgments", "Notation"},
  };
  return kPools[static_cast<size_t>(label_id(l))];
}

const std::vector<std::string>& generic_titles() {
  static const std::vector<std::string> kGeneric = {"Details", "Analysis", "General Study",
                                                    "Considerations", "Further Notes"};
  return kGeneric;
}

const std::vector<std::string>& content_pool(Label l) {
  static const std::vector<std::vector<std::string>> kPools = {
      {"motivation", "goal", "challenge", "scope", "question"},
      {"literature", "survey", "earlier", "comparison", "existing"},
      {"algorithm", "framework", "equation", "definition", "architecture"},
      {"accuracy", "dataset", "baseline", "score", "metric"},
      {"future", "takeaway", "contribution", "direction", "finding"},
      {"supplementary", "appendix", "proof", "notation", "material"},
  };
  return kPools[static_cast<size_t>(label_id(l))];
}

const std::vector<std::string>& noise_vocab() {
  static const std::vector<std::string> kNoise = {
      "system",   "data",     "value",    "case",     "function", "level",   "form",
      "process",  "term",     "part",     "point",    "order",    "group",   "number",
      "word",     "type",     "area",     "fact",     "result",   "state",   "effect",
      "idea",     "unit",     "field",    "line",     "step",     "task",    "work",
      "way",      "example",  "feature",  "input",    "output",   "text",    "set",
      "note",     "table",    "section",  "sample",   "test",     "source",  "target",
      "structure","pattern",  "rate",     "size",     "range",    "label",   "item",
      "paper",    "model",    "approach", "study",    "method",   "problem", "analysis",
      "training", "language", "corpus",   "document", "sentence", "token",   "signal",
      "measure",  "degree",   "aspect",   "view",     "stage",    "phase",   "context"};
  return kNoise;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> kFiller = {"the", "of", "and", "in",  "for", "with",
                                                   "on",  "to", "a",   "is",  "are", "this",
                                                   "that", "we", "it",  "as"};
  return kFiller;
}

std::string pick(Rng& rng, const std::vector<std::string>& pool) {
  return pool[static_cast<size_t>(rng.below(pool.size()))];
}

// Zipf-flavored pick: low indices much more likely.
std::string pick_skewed(Rng& rng, const std::vector<std::string>& pool) {
  const double u = rng.uniform();
  const size_t idx = static_cast<size_t>(u * u * static_cast<double>(pool.size()));
  return pool[std::min(idx, pool.size() - 1)];
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string make_sentence(Rng& rng, Label cls, const SynthConfig& cfg) {
  std::vector<std::string> words;
  const int len = static_cast<int>(rng.range(7, 13));
  for (int i = 0; i < len; ++i) {
    if (rng.uniform() < 0.35)
      words.push_back(pick(rng, filler_words()));
    else
      words.push_back(pick_skewed(rng, noise_vocab()));
  }
  if (rng.uniform() < cfg.content_signal)
    words[static_cast<size_t>(rng.below(words.size()))] = pick(rng, content_pool(cls));
  if (rng.uniform() < cfg.content_leak) {
    const Label other = label_from_id(static_cast<int>(rng.below(kNumLabels)));
    words[static_cast<size_t>(rng.below(words.size()))] = pick(rng, content_pool(other));
  }
  std::string s = capitalize(words[0]);
  for (size_t i = 1; i < words.size(); ++i) s += " " + words[i];
  s += ".";
  return s;
}

// Citation and figure/table markers with class-dependent rates.
void add_markers(Rng& rng, Label cls, std::vector<std::string>& sentences) {
  int cites = 0, figs = 0, tabs = 0;
  switch (cls) {
    case Label::Introduction: cites = static_cast<int>(rng.range(2, 5)); break;
    case Label::RelatedWork: cites = static_cast<int>(rng.range(4, 9)); break;
    case Label::Method:
      cites = static_cast<int>(rng.range(0, 2));
      figs = static_cast<int>(rng.range(0, 2));
      break;
    case Label::EvalResult:
      cites = static_cast<int>(rng.range(0, 2));
      figs = static_cast<int>(rng.range(1, 3));
      tabs = static_cast<int>(rng.range(1, 3));
      break;
    case Label::Conclusion: cites = static_cast<int>(rng.range(0, 1)); break;
    case Label::Other: break;
  }
  int next_ref = 1;
  for (int i = 0; i < cites && !sentences.empty(); ++i) {
    std::string& s = sentences[static_cast<size_t>(rng.below(sentences.size()))];
    s.insert(s.size() - 1, " [" + std::to_string(next_ref++) + "]");
  }
  for (int i = 0; i < figs && !sentences.empty(); ++i) {
    std::string& s = sentences[static_cast<size_t>(rng.below(sentences.size()))];
    s.insert(s.size() - 1, " as shown in Figure " + std::to_string(i + 1));
  }
  for (int i = 0; i < tabs && !sentences.empty(); ++i) {
    std::string& s = sentences[static_cast<size_t>(rng.below(sentences.size()))];
    s.insert(s.size() - 1, " reported in Table " + std::to_string(i + 1));
  }
}

std::string make_title(Rng& rng, Label cls, int ordinal, const SynthConfig& cfg) {
  std::string body = rng.uniform() < cfg.title_ambiguity ? pick(rng, generic_titles())
                                                         : pick(rng, title_pool(cls));
  std::string prefix = std::to_string(ordinal);
  if (rng.uniform() < 0.5) prefix += ".";
  return prefix + " " + body;
}

}  // namespace

SynthResult generate_synth(const SynthConfig& cfg) {
  if (cfg.n_articles < 1) throw ConfigError("synth: n_articles must be positive");
  if (cfg.year_min > cfg.year_max) throw ConfigError("synth: bad year range");
  Rng rng(cfg.seed);
  SynthResult res;
  res.bookkeeping.seed = cfg.seed;
  res.bookkeeping.n_articles = cfg.n_articles;

  for (int ai = 0; ai < cfg.n_articles; ++ai) {
    Article art;
    char idbuf[64];
    std::snprintf(idbuf, sizeof(idbuf), "synth%llu-%05d",
                  static_cast<unsigned long long>(cfg.seed), ai);
    art.id = idbuf;
    // later years carry more papers, like a growing conference series
    const double u = rng.uniform();
    const double skew = std::sqrt(u);
    art.year = cfg.year_min +
               static_cast<int>(skew * static_cast<double>(cfg.year_max - cfg.year_min) + 0.5);
    art.venue = "SynthConf";
    const double year_frac = static_cast<double>(*art.year - cfg.year_min) /
                             std::max(1.0, static_cast<double>(cfg.year_max - cfg.year_min));

    std::vector<Label> plan;
    plan.push_back(Label::Introduction);
    const double p_related = 0.4 + 0.5 * year_frac;  // related work spreads over time
    if (rng.uniform() < p_related) plan.push_back(Label::RelatedWork);
    plan.push_back(Label::Method);
    if (rng.uniform() < 0.35) plan.push_back(Label::Method);
    plan.push_back(Label::EvalResult);
    if (rng.uniform() < 0.15 + 0.35 * year_frac) plan.push_back(Label::EvalResult);
    plan.push_back(Label::Conclusion);
    if (rng.uniform() < cfg.p_other) {
      const size_t pos = 1 + static_cast<size_t>(rng.below(plan.size() - 1));
      plan.insert(plan.begin() + static_cast<long>(pos), Label::Other);
    }

    auto& year_row = res.bookkeeping.per_year[*art.year];
    ++year_row.papers;
    for (size_t ci = 0; ci < plan.size(); ++ci) {
      const Label cls = plan[ci];
      Chapter ch;
      ch.ordinal = static_cast<int>(ci) + 1;
      ch.title = make_title(rng, cls, ch.ordinal, cfg);
      std::vector<std::string> sentences;
      const int n_sent = static_cast<int>(rng.range(4, 8));
      for (int s = 0; s < n_sent; ++s) sentences.push_back(make_sentence(rng, cls, cfg));
      add_markers(rng, cls, sentences);
      std::string content = sentences[0];
      for (size_t s = 1; s < sentences.size(); ++s) content += " " + sentences[s];
      ch.content = std::move(content);
      ch.sentences = std::move(sentences);
      ch.n_citations = count_citations(ch.content);
      ch.n_figtables = count_figtables(ch.content);
      ch.label = cls;
      art.chapters.push_back(std::move(ch));
      ++res.bookkeeping.class_counts[static_cast<size_t>(label_id(cls))];
      ++year_row.class_counts[static_cast<size_t>(label_id(cls))];
    }
    res.corpus.push_back(std::move(art));
  }
  return res;
}

void write_bookkeeping(const SynthBookkeeping& bk, const std::string& path) {
  ordered_json j;
  j["seed"] = bk.seed;
  j["n_articles"] = bk.n_articles;
  ordered_json counts;
  for (Label l : all_labels())
    counts[label_name(l)] = bk.class_counts[static_cast<size_t>(label_id(l))];
  j["class_counts"] = counts;
  ordered_json years;
  for (const auto& [year, row] : bk.per_year) {
    ordered_json yr;
    yr["papers"] = row.papers;
    ordered_json yc;
    for (Label l : all_labels())
      yc[label_name(l)] = row.class_counts[static_cast<size_t>(label_id(l))];
    yr["class_counts"] = yc;
    years[std::to_string(year)] = yr;
  }
  j["per_year"] = years;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write bookkeeping sidecar: " + path);
  out << j.dump(2) << "\n";
}

SynthBookkeeping read_bookkeeping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open bookkeeping sidecar: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("malformed bookkeeping sidecar: " + path);
  SynthBookkeeping bk;
  bk.seed = j.at("seed").get<uint64_t>();
  bk.n_articles = j.at("n_articles").get<int>();
  for (Label l : all_labels())
    bk.class_counts[static_cast<size_t>(label_id(l))] =
        j.at("class_counts").at(label_name(l)).get<int64_t>();
  for (const auto& [year, row] : j.at("per_year").items()) {
    SynthBookkeeping::YearRow yr;
    yr.papers = row.at("papers").get<int64_t>();
    for (Label l : all_labels())
      yr.class_counts[static_cast<size_t>(label_id(l))] =
          row.at("class_counts").at(label_name(l)).get<int64_t>();
    bk.per_year[std::stoi(year)] = yr;
  }
  return bk;
}

}  // namespace secfn
