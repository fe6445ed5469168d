#include "secfn/corpus.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "secfn/text.hpp"

namespace secfn {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::set<std::string> kArticleKeys = {"id", "year", "venue", "chapters"};
const std::set<std::string> kChapterKeys = {"ordinal",     "title",       "content", "sentences",
                                            "n_citations", "n_figtables", "label"};

void warn(std::vector<std::string>* warnings, const std::string& msg) {
  if (warnings) warnings->push_back(msg);
}

Chapter chapter_from_json(const json& j, const std::string& where,
                          std::vector<std::string>* warnings) {
  if (!j.is_object()) throw DataError(where + ": chapter is not an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kChapterKeys.count(it.key()))
      warn(warnings, where + ": ignoring unknown chapter key '" + it.key() + "'");
  Chapter c;
  if (!j.contains("ordinal") || !j["ordinal"].is_number_integer())
    throw DataError(where + ": chapter missing integer 'ordinal'");
  c.ordinal = j["ordinal"].get<int>();
  c.title = j.value("title", std::string());
  c.content = j.value("content", std::string());
  if (j.contains("sentences")) {
    if (!j["sentences"].is_array()) throw DataError(where + ": 'sentences' is not an array");
    std::vector<std::string> sents;
    for (const auto& s : j["sentences"]) {
      if (!s.is_string()) throw DataError(where + ": sentence is not a string");
      sents.push_back(s.get<std::string>());
    }
    c.sentences = std::move(sents);
  }
  if (j.contains("n_citations")) {
    if (!j["n_citations"].is_number_integer() || j["n_citations"].get<long>() < 0)
      throw DataError(where + ": 'n_citations' must be a nonnegative integer");
    c.n_citations = j["n_citations"].get<int>();
  } else {
    c.n_citations = count_citations(c.content);
  }
  if (j.contains("n_figtables")) {
    if (!j["n_figtables"].is_number_integer() || j["n_figtables"].get<long>() < 0)
      throw DataError(where + ": 'n_figtables' must be a nonnegative integer");
    c.n_figtables = j["n_figtables"].get<int>();
  } else {
    c.n_figtables = count_figtables(c.content);
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw DataError(where + ": 'label' is not a string");
    c.label = parse_label(j["label"].get<std::string>());
  }
  return c;
}

Article article_from_json(const json& j, const std::string& where,
                          std::vector<std::string>* warnings) {
  if (!j.is_object()) throw DataError(where + ": record is not an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kArticleKeys.count(it.key()))
      warn(warnings, where + ": ignoring unknown article key '" + it.key() + "'");
  Article a;
  if (!j.contains("id") || !j["id"].is_string())
    throw DataError(where + ": article missing string 'id'");
  a.id = j["id"].get<std::string>();
  if (j.contains("year")) {
    if (!j["year"].is_number_integer()) throw DataError(where + ": 'year' is not an integer");
    a.year = j["year"].get<int>();
  }
  if (j.contains("venue")) {
    if (!j["venue"].is_string()) throw DataError(where + ": 'venue' is not a string");
    a.venue = j["venue"].get<std::string>();
  }
  if (!j.contains("chapters") || !j["chapters"].is_array())
    throw DataError(where + ": article missing 'chapters' array");
  for (const auto& cj : j["chapters"])
    a.chapters.push_back(chapter_from_json(cj, where, warnings));
  validate_article(a);
  return a;
}

// --- xmlish -----------------------------------------------------------------
// A deliberately small adapter: <article ...> wrapping <chapter ...>text</chapter>
// elements, attributes double-quoted, entities &lt; &gt; &amp; &quot; decoded.

std::string xml_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    if (s.compare(i, 4, "&lt;") == 0) {
      out.push_back('<');
      i += 3;
    } else if (s.compare(i, 4, "&gt;") == 0) {
      out.push_back('>');
      i += 3;
    } else if (s.compare(i, 5, "&amp;") == 0) {
      out.push_back('&');
      i += 4;
    } else if (s.compare(i, 6, "&quot;") == 0) {
      out.push_back('"');
      i += 5;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

std::map<std::string, std::string> parse_attrs(const std::string& tag,
                                               const std::string& where) {
  std::map<std::string, std::string> attrs;
  size_t i = 0;
  while (i < tag.size()) {
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    if (i >= tag.size()) break;
    size_t eq = tag.find('=', i);
    if (eq == std::string::npos) throw DataError(where + ": malformed attribute in <" + tag + ">");
    std::string key = tag.substr(i, eq - i);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    size_t q0 = tag.find('"', eq);
    if (q0 == std::string::npos) throw DataError(where + ": unquoted attribute value");
    size_t q1 = tag.find('"', q0 + 1);
    if (q1 == std::string::npos) throw DataError(where + ": unterminated attribute value");
    attrs[key] = xml_unescape(tag.substr(q0 + 1, q1 - q0 - 1));
    i = q1 + 1;
  }
  return attrs;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<Article> parse_xmlish(std::istream& in, const std::string& origin,
                                  const ParseOptions& opts,
                                  std::vector<std::string>* warnings) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<Article> out;
  size_t pos = 0;
  int article_no = 0;
  while (true) {
    size_t a0 = text.find("<article", pos);
    if (a0 == std::string::npos) break;
    ++article_no;
    const std::string where = origin + ": article element " + std::to_string(article_no);
    size_t a0end = text.find('>', a0);
    if (a0end == std::string::npos) throw DataError(where + ": unterminated <article> tag");
    size_t a1 = text.find("</article>", a0end);
    if (a1 == std::string::npos) throw DataError(where + ": missing </article>");
    auto attrs = parse_attrs(text.substr(a0 + 8, a0end - a0 - 8), where);
    Article art;
    try {
      if (!attrs.count("id")) throw DataError(where + ": article missing id attribute");
      art.id = attrs["id"];
      if (attrs.count("year")) art.year = std::stoi(attrs["year"]);
      if (attrs.count("venue")) art.venue = attrs["venue"];
      size_t cpos = a0end + 1;
      int auto_ordinal = 0;
      while (true) {
        size_t c0 = text.find("<chapter", cpos);
        if (c0 == std::string::npos || c0 > a1) break;
        size_t c0end = text.find('>', c0);
        size_t c1 = text.find("</chapter>", c0end);
        if (c0end == std::string::npos || c1 == std::string::npos || c1 > a1)
          throw DataError(where + ": malformed <chapter> element");
        auto cattrs = parse_attrs(text.substr(c0 + 8, c0end - c0 - 8), where);
        Chapter ch;
        ++auto_ordinal;
        ch.ordinal = cattrs.count("ordinal") ? std::stoi(cattrs["ordinal"]) : auto_ordinal;
        ch.title = cattrs.count("title") ? cattrs["title"] : "";
        ch.content = trim(xml_unescape(text.substr(c0end + 1, c1 - c0end - 1)));
        ch.n_citations = cattrs.count("n_citations") ? std::stoi(cattrs["n_citations"])
                                                     : count_citations(ch.content);
        ch.n_figtables = cattrs.count("n_figtables") ? std::stoi(cattrs["n_figtables"])
                                                     : count_figtables(ch.content);
        if (cattrs.count("label")) ch.label = parse_label(cattrs["label"]);
        art.chapters.push_back(std::move(ch));
        cpos = c1 + 10;
      }
      validate_article(art);
      out.push_back(std::move(art));
    } catch (const DataError& e) {
      if (opts.strict) throw;
      warn(warnings, std::string(e.what()) + " (record skipped)");
    }
    pos = a1 + 10;
  }
  return out;
}

}  // namespace

void validate_article(const Article& a) {
  if (a.id.empty()) throw DataError("article with empty id");
  if (a.chapters.empty()) throw DataError("article '" + a.id + "' has an empty chapter list");
  for (size_t i = 0; i < a.chapters.size(); ++i) {
    const Chapter& c = a.chapters[i];
    if (c.ordinal != static_cast<int>(i) + 1)
      throw DataError("article '" + a.id + "': chapter ordinals must be 1.." +
                      std::to_string(a.chapters.size()) + " in order (got " +
                      std::to_string(c.ordinal) + " at position " + std::to_string(i + 1) + ")");
    if (c.title.empty() && c.content.empty())
      throw DataError("article '" + a.id + "' chapter " + std::to_string(c.ordinal) +
                      ": title may be empty only if content is nonempty");
    if (c.n_citations < 0 || c.n_figtables < 0)
      throw DataError("article '" + a.id + "' chapter " + std::to_string(c.ordinal) +
                      ": counts must be nonnegative");
  }
}

Corpus parse_corpus_stream(std::istream& in, const std::string& origin,
                           const ParseOptions& opts, std::vector<std::string>* warnings) {
  Corpus corpus;
  std::set<std::string> ids;
  if (opts.format == CorpusFormat::Xmlish) {
    corpus = parse_xmlish(in, origin, opts, warnings);
    for (const auto& a : corpus) {
      if (!ids.insert(a.id).second) throw DataError(origin + ": duplicate article id '" + a.id + "'");
    }
    return corpus;
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    try {
      json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded()) throw DataError(where + ": malformed JSON");
      Article a = article_from_json(j, where, warnings);
      if (!ids.insert(a.id).second) {
        if (opts.strict) throw DataError(where + ": duplicate article id '" + a.id + "'");
        warn(warnings, where + ": duplicate article id '" + a.id + "' (record skipped)");
        continue;
      }
      corpus.push_back(std::move(a));
    } catch (const DataError& e) {
      if (opts.strict) throw;
      warn(warnings, std::string(e.what()) + " (record skipped)");
    }
  }
  return corpus;
}

Corpus parse_corpus(const std::string& path, const ParseOptions& opts,
                    std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return parse_corpus_stream(in, path, opts, warnings);
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Article& a : corpus) {
    ordered_json j;
    j["id"] = a.id;
    if (a.year) j["year"] = *a.year;
    if (a.venue) j["venue"] = *a.venue;
    j["chapters"] = ordered_json::array();
    for (const Chapter& c : a.chapters) {
      ordered_json cj;
      cj["ordinal"] = c.ordinal;
      cj["title"] = c.title;
      cj["content"] = c.content;
      if (c.sentences) cj["sentences"] = *c.sentences;
      cj["n_citations"] = c.n_citations;
      cj["n_figtables"] = c.n_figtables;
      if (c.label) cj["label"] = label_name(*c.label);
      j["chapters"].push_back(std::move(cj));
    }
    out << j.dump() << "\n";
  }
}

void serialize_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  serialize_corpus(corpus, out);
}

AnnotationPair load_annotation_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotation file: " + path);
  AnnotationPair pair;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (line_no == 1 && t.rfind("item_id,", 0) == 0) continue;  // header
    std::stringstream ss(t);
    std::string id, la, lb;
    if (!std::getline(ss, id, ',') || !std::getline(ss, la, ',') || !std::getline(ss, lb))
      throw DataError(path + ":" + std::to_string(line_no) + ": expected id,label_a,label_b");
    pair.items.push_back({trim(id), parse_label(trim(la)), parse_label(trim(lb))});
  }
  if (pair.items.empty()) throw DataError(path + ": no annotation items");
  return pair;
}

double cohen_kappa(const AnnotationPair& pair) {
  if (pair.items.empty()) throw DataError("cohen_kappa: empty annotation pair");
  const double n = static_cast<double>(pair.items.size());
  std::array<int64_t, kNumLabels> marg_a{}, marg_b{};
  int64_t agree = 0;
  for (const auto& it : pair.items) {
    ++marg_a[label_id(it.a)];
    ++marg_b[label_id(it.b)];
    if (it.a == it.b) ++agree;
  }
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (int l = 0; l < kNumLabels; ++l)
    p_e += (static_cast<double>(marg_a[l]) / n) * (static_cast<double>(marg_b[l]) / n);
  if (p_e >= 1.0) {
    if (agree == static_cast<int64_t>(pair.items.size())) return 1.0;
    throw DataError("cohen_kappa: chance agreement is 1 with imperfect observed agreement");
  }
  if (p_o == 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

CorpusStats corpus_stats(const Corpus& corpus, bool strict) {
  CorpusStats st;
  std::vector<std::string> offenders;
  for (const Article& a : corpus) {
    ++st.articles;
    for (const Chapter& c : a.chapters) {
      ++st.chapters;
      if (c.label) {
        ++st.label_counts[label_id(*c.label)];
      } else if (strict) {
        if (offenders.empty() || offenders.back() != a.id) offenders.push_back(a.id);
      }
    }
  }
  if (!offenders.empty()) {
    std::string msg = "corpus_stats: unlabeled chapters in articles:";
    for (const auto& id : offenders) msg += " " + id;
    throw DataError(msg);
  }
  return st;
}

}  // namespace secfn
