#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "secfn/corpus.hpp"
#include "secfn/rng.hpp"
#include "secfn/synth.hpp"
#include "secfn/text.hpp"

using namespace secfn;

TEST_CASE("tokenize_normalize applies the stated pipeline") {
  StopwordSet stop{"the", "were"};
  CHECK(tokenize_normalize("", stop).empty());
  const auto toks = tokenize_normalize("The Models were trained", stop);
  REQUIRE(toks.size() == 2);
  CHECK(toks[0] == "model");
  CHECK(toks[1] == "train");
  const auto sec = tokenize_normalize("Section 3.2", {});
  REQUIRE(sec.size() == 1);
  CHECK(sec[0] == "section");
}

TEST_CASE("porter stemming matches published traces") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("cats") == "cat");
  CHECK(porter_stem("agreed") == "agre");
  CHECK(porter_stem("plastered") == "plaster");
  CHECK(porter_stem("motoring") == "motor");
  CHECK(porter_stem("conflated") == "conflat");
  CHECK(porter_stem("hopping") == "hop");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("conditional") == "condit");
  CHECK(porter_stem("triplicate") == "triplic");
  CHECK(porter_stem("formative") == "form");
  CHECK(porter_stem("revival") == "reviv");
  CHECK(porter_stem("adjustable") == "adjust");
  CHECK(porter_stem("effective") == "effect");
  CHECK(porter_stem("probate") == "probat");
  CHECK(porter_stem("controlling") == "control");
  CHECK(porter_stem("related") == "relat");
  CHECK(porter_stem("introduction") == "introduct");
}

TEST_CASE("strip_index_numbers removes leading enumerators only") {
  CHECK(strip_index_numbers("3.2 Data Acquisition") == "Data Acquisition");
  CHECK(strip_index_numbers("Conclusion") == "Conclusion");
  CHECK(strip_index_numbers("IV. Experiments") == "Experiments");
  CHECK(strip_index_numbers("A) Background") == "Background");
  CHECK(strip_index_numbers("1 Introduction") == "Introduction");
  CHECK(strip_index_numbers("3.2.1 Details") == "Details");
  CHECK(strip_index_numbers("A Survey of Methods") == "A Survey of Methods");
  CHECK(strip_index_numbers("If Only") == "If Only");
  CHECK(strip_index_numbers("42") == "42");  // enumerator alone is kept
}

TEST_CASE("count_citations counts marker groups") {
  CHECK(count_citations("") == 0);
  CHECK(count_citations("as shown in [3] and [5,7]") == 3);
  CHECK(count_citations("proposed by (Sollaci & Pereira, 2004) and (Kim, 2014)") == 2);
  CHECK(count_citations("see (Kim, 2014; Yang, 2016)") == 2);
  CHECK(count_citations("bad brackets [notanumber] and (no year here)") == 0);
  CHECK(count_citations("array index a[3] counts, sadly ambiguous") == 1);
}

TEST_CASE("count_figtables dedups by kind and number") {
  CHECK(count_figtables("") == 0);
  CHECK(count_figtables("Table 1 and Table 1 then Figure 2") == 2);
  CHECK(count_figtables("Fig. 3 and Figure 3") == 1);
  CHECK(count_figtables("figure 1, FIGURE 2, Table 2") == 3);
  CHECK(count_figtables("prefigure 9 is not a figure")== 0);
  const std::string x = "Figure 1 and Table 4.";
  CHECK(count_figtables(x + " " + x) == count_figtables(x));  // duplication idempotence
}

namespace {

Corpus parse_string(const std::string& text, bool strict = true,
                    std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  ParseOptions opts;
  opts.strict = strict;
  return parse_corpus_stream(in, "<test>", opts, warnings);
}

const char* kThreeChapterLine =
    R"({"id":"a1","year":2001,"chapters":[{"ordinal":1,"title":"Intro","content":"Text one."},{"ordinal":2,"title":"Method","content":"Text two."},{"ordinal":3,"title":"End","content":"Text three."}]})";

}  // namespace

TEST_CASE("parse_corpus round trips and validates") {
  Corpus c = parse_string(kThreeChapterLine);
  REQUIRE(c.size() == 1);
  REQUIRE(c[0].chapters.size() == 3);
  CHECK(c[0].chapters[0].ordinal == 1);
  CHECK(c[0].chapters[1].ordinal == 2);
  CHECK(c[0].chapters[2].ordinal == 3);
  CHECK(*c[0].year == 2001);

  std::ostringstream out;
  serialize_corpus(c, out);
  Corpus again = parse_string(out.str());
  CHECK(again == c);
}

TEST_CASE("parse errors name the offending line") {
  CHECK_THROWS_WITH_AS(parse_string(R"({"id":"a1","year":2001})"),
                       doctest::Contains("<test>:1"), DataError);
  CHECK_THROWS_AS(parse_string(R"({"id":"a1","chapters":[]})"), DataError);
  // ordinals must be 1..n in order
  CHECK_THROWS_AS(
      parse_string(
          R"({"id":"a1","chapters":[{"ordinal":2,"title":"t","content":"c"}]})"),
      DataError);
  // duplicate ids
  const std::string dup = std::string(kThreeChapterLine) + "\n" + kThreeChapterLine + "\n";
  CHECK_THROWS_AS(parse_string(dup), DataError);
}

TEST_CASE("lenient mode skips malformed lines with warnings") {
  std::string text;
  for (int i = 0; i < 5; ++i) {
    std::string line = kThreeChapterLine;
    line.replace(line.find("a1"), 2, "a" + std::to_string(i));
    text += line + "\n";
  }
  text += "{\"bad\": true}\n";
  CHECK_THROWS_AS(parse_string(text), DataError);
  std::vector<std::string> warnings;
  Corpus c = parse_string(text, false, &warnings);
  CHECK(c.size() == 5);
  int skipped = 0;
  for (const auto& w : warnings)
    if (w.find("skipped") != std::string::npos) ++skipped;
  CHECK(skipped == 1);
}

TEST_CASE("unknown keys are ignored with a warning") {
  std::string line = kThreeChapterLine;
  line.insert(1, "\"mystery\":1,");
  std::vector<std::string> warnings;
  Corpus c = parse_string(line, true, &warnings);
  CHECK(c.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("mystery") != std::string::npos);
}

TEST_CASE("missing counts default to the content heuristics") {
  Corpus c = parse_string(
      R"({"id":"a1","chapters":[{"ordinal":1,"title":"t","content":"see [1,2] and Table 3"}]})");
  CHECK(c[0].chapters[0].n_citations == 2);
  CHECK(c[0].chapters[0].n_figtables == 1);
  // explicit fields win
  Corpus e = parse_string(
      R"({"id":"a1","chapters":[{"ordinal":1,"title":"t","content":"see [1,2]","n_citations":9,"n_figtables":4}]})");
  CHECK(e[0].chapters[0].n_citations == 9);
  CHECK(e[0].chapters[0].n_figtables == 4);
}

TEST_CASE("xmlish adapter maps to the same model") {
  const std::string xml = R"(<article id="x1" year="1999" venue="ACL">
  <chapter ordinal="1" title="1 Introduction" label="introduction">Hello  [1] world.</chapter>
  <chapter ordinal="2" title="2 Methods" label="method">We use &lt;tags&gt; &amp; math.</chapter>
</article>)";
  std::istringstream in(xml);
  ParseOptions opts;
  opts.format = CorpusFormat::Xmlish;
  Corpus c = parse_corpus_stream(in, "<x>", opts);
  REQUIRE(c.size() == 1);
  REQUIRE(c[0].chapters.size() == 2);
  CHECK(c[0].id == "x1");
  CHECK(*c[0].year == 1999);
  CHECK(c[0].chapters[0].title == "1 Introduction");
  CHECK(c[0].chapters[0].n_citations == 1);
  CHECK(c[0].chapters[1].content == "We use <tags> & math.");
  CHECK(*c[0].chapters[1].label == Label::Method);
}

TEST_CASE("cohen_kappa hand cases") {
  AnnotationPair perfect;
  for (int i = 0; i < 10; ++i)
    perfect.items.push_back({"i" + std::to_string(i), Label::Method, Label::Method});
  CHECK(cohen_kappa(perfect) == 1.0);

  // counts XX=5, XY=1, YX=1, YY=3 -> kappa = 0.28/0.48
  AnnotationPair pair;
  auto add = [&](Label a, Label b, int n) {
    for (int i = 0; i < n; ++i)
      pair.items.push_back({"i" + std::to_string(pair.items.size()), a, b});
  };
  add(Label::Introduction, Label::Introduction, 5);
  add(Label::Introduction, Label::Method, 1);
  add(Label::Method, Label::Introduction, 1);
  add(Label::Method, Label::Method, 3);
  CHECK(cohen_kappa(pair) == doctest::Approx(0.28 / 0.48).epsilon(1e-9));

  // p_e = 1 with p_o < 1 is undefined
  AnnotationPair degenerate;
  degenerate.items.push_back({"a", Label::Method, Label::Method});
  degenerate.items.push_back({"b", Label::Method, Label::Method});
  CHECK(cohen_kappa(degenerate) == 1.0);
}

TEST_CASE("cohen_kappa symmetry and label-permutation invariance") {
  Rng rng(11);
  AnnotationPair pair, swapped, permuted;
  // permutation of the six labels
  const int perm[6] = {3, 5, 0, 2, 1, 4};
  for (int i = 0; i < 300; ++i) {
    const Label a = label_from_id(static_cast<int>(rng.below(6)));
    const Label b = rng.uniform() < 0.6 ? a : label_from_id(static_cast<int>(rng.below(6)));
    pair.items.push_back({"x", a, b});
    swapped.items.push_back({"x", b, a});
    permuted.items.push_back({"x", label_from_id(perm[label_id(a)]),
                              label_from_id(perm[label_id(b)])});
  }
  const double k = cohen_kappa(pair);
  CHECK(cohen_kappa(swapped) == doctest::Approx(k).epsilon(1e-12));
  CHECK(cohen_kappa(permuted) == doctest::Approx(k).epsilon(1e-12));
}

TEST_CASE("corpus_stats tallies and strictness") {
  CorpusStats empty = corpus_stats({}, true);
  CHECK(empty.articles == 0);
  for (Label l : all_labels()) CHECK(empty.label_counts[label_id(l)] == 0);

  Corpus c;
  for (int i = 0; i < 2; ++i) {
    Article a;
    a.id = "a" + std::to_string(i);
    const Label plan[3] = {Label::Introduction, Label::Method, Label::Conclusion};
    for (int j = 0; j < 3; ++j) {
      Chapter ch;
      ch.ordinal = j + 1;
      ch.title = "t";
      ch.content = "c";
      ch.label = plan[j];
      a.chapters.push_back(ch);
    }
    c.push_back(a);
  }
  const CorpusStats st = corpus_stats(c, true);
  CHECK(st.articles == 2);
  CHECK(st.chapters == 6);
  CHECK(st.label_counts[label_id(Label::Introduction)] == 2);
  CHECK(st.label_counts[label_id(Label::Method)] == 2);
  CHECK(st.label_counts[label_id(Label::Conclusion)] == 2);
  int64_t total = 0;
  for (Label l : all_labels()) total += st.label_counts[label_id(l)];
  CHECK(total == st.chapters);

  c[1].chapters[2].label.reset();
  CHECK_THROWS_WITH_AS(corpus_stats(c, true), doctest::Contains("a1"), DataError);
  CHECK(corpus_stats(c, false).label_counts[label_id(Label::Conclusion)] == 1);
}

TEST_CASE("synth bookkeeping matches corpus_stats") {
  SynthConfig cfg;
  cfg.n_articles = 40;
  cfg.seed = 9;
  const SynthResult res = generate_synth(cfg);
  const CorpusStats st = corpus_stats(res.corpus, true);
  CHECK(st.articles == 40);
  for (Label l : all_labels())
    CHECK(st.label_counts[label_id(l)] == res.bookkeeping.class_counts[label_id(l)]);
  // serialization round trip on a generated corpus
  std::ostringstream out;
  serialize_corpus(res.corpus, out);
  Corpus again = parse_string(out.str());
  CHECK(again == res.corpus);
}

TEST_CASE("sentence splitter breaks on terminators followed by capitals") {
  const auto s = split_sentences("First part. Second thing? Yes! And 3.5 stays. end");
  REQUIRE(s.size() == 4);
  CHECK(s[0] == "First part.");
  CHECK(s[1] == "Second thing?");
  CHECK(s[2] == "Yes!");
  CHECK(s[3] == "And 3.5 stays. end");
}
