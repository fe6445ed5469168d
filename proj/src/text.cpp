#include "secfn/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

namespace secfn {

const StopwordSet& default_stopwords() {
  static const StopwordSet kStop = {
      "a",     "an",    "and",   "are",   "as",    "at",    "be",    "been",
      "but",   "by",    "can",   "do",    "for",   "from",  "has",   "have",
      "in",    "into",  "is",    "it",    "its",   "of",    "on",    "or",
      "our",   "such",  "that",  "the",   "their", "then",  "there", "these",
      "they",  "this",  "to",    "was",   "we",    "were",  "what",  "when",
      "which", "while", "will",  "with",  "also",  "all",   "not",   "no",
      "than",  "so",    "more",  "most",  "other", "some",  "each",  "both",
      "between", "through", "during", "only", "own",  "same",  "very", "s",
      "t",     "just",  "now",   "i",     "he",    "she",   "his",   "her",
      "them",  "those", "over",  "under", "again", "using", "used",  "use"};
  return kStop;
}

namespace {

// ---------------------------------------------------------------------------
// Porter stemmer, transcribed from the 1980 algorithm definition.
// ---------------------------------------------------------------------------
class Porter {
 public:
  explicit Porter(std::string w) : b_(std::move(w)), k_(static_cast<int>(b_.size()) - 1) {}

  std::string run() {
    if (k_ <= 1) return b_;  // words of length <= 2 are left alone
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return b_.substr(0, static_cast<size_t>(k_) + 1);
  }

 private:
  std::string b_;
  int k_ = -1;  // offset of last character of the current stem
  int j_ = 0;   // offset used by the condition tests

  bool cons(int i) const {
    switch (b_[static_cast<size_t>(i)]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return (i == 0) ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // Measure of the stem b[0..j_]: the m in [C](VC)^m[V].
  int m() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool double_cons(int j) const {
    if (j < 1) return false;
    if (b_[static_cast<size_t>(j)] != b_[static_cast<size_t>(j - 1)]) return false;
    return cons(j);
  }

  // cvc(i) is true when i-2..i is consonant-vowel-consonant and the final
  // consonant is not w, x or y.
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    const char ch = b_[static_cast<size_t>(i)];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(const char* s) {
    const int len = static_cast<int>(std::char_traits<char>::length(s));
    if (len > k_ + 1) return false;
    if (b_.compare(static_cast<size_t>(k_ - len + 1), static_cast<size_t>(len), s) != 0)
      return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(const char* s) {
    const int len = static_cast<int>(std::char_traits<char>::length(s));
    b_.replace(static_cast<size_t>(j_ + 1), b_.size(), s);
    k_ = j_ + len;
  }

  void r(const char* s) {
    if (m() > 0) set_to(s);
  }

  void step1ab() {
    if (b_[static_cast<size_t>(k_)] == 's') {
      if (ends("sses")) {
        k_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (b_[static_cast<size_t>(k_ - 1)] != 's') {
        --k_;
      }
    }
    if (ends("eed")) {
      if (m() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_cons(k_)) {
        const char ch = b_[static_cast<size_t>(k_)];
        if (ch != 'l' && ch != 's' && ch != 'z') --k_;
      } else {
        j_ = k_;
        if (m() == 1 && cvc(k_)) set_to("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[static_cast<size_t>(k_)] = 'i';
  }

  void step2() {
    switch (b_[static_cast<size_t>(k_ - 1)]) {
      case 'a':
        if (ends("ational")) { r("ate"); break; }
        if (ends("tional")) { r("tion"); break; }
        break;
      case 'c':
        if (ends("enci")) { r("ence"); break; }
        if (ends("anci")) { r("ance"); break; }
        break;
      case 'e':
        if (ends("izer")) { r("ize"); break; }
        break;
      case 'l':
        if (ends("abli")) { r("able"); break; }
        if (ends("alli")) { r("al"); break; }
        if (ends("entli")) { r("ent"); break; }
        if (ends("eli")) { r("e"); break; }
        if (ends("ousli")) { r("ous"); break; }
        break;
      case 'o':
        if (ends("ization")) { r("ize"); break; }
        if (ends("ation")) { r("ate"); break; }
        if (ends("ator")) { r("ate"); break; }
        break;
      case 's':
        if (ends("alism")) { r("al"); break; }
        if (ends("iveness")) { r("ive"); break; }
        if (ends("fulness")) { r("ful"); break; }
        if (ends("ousness")) { r("ous"); break; }
        break;
      case 't':
        if (ends("aliti")) { r("al"); break; }
        if (ends("iviti")) { r("ive"); break; }
        if (ends("biliti")) { r("ble"); break; }
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (b_[static_cast<size_t>(k_)]) {
      case 'e':
        if (ends("icate")) { r("ic"); break; }
        if (ends("ative")) { r(""); break; }
        if (ends("alize")) { r("al"); break; }
        break;
      case 'i':
        if (ends("iciti")) { r("ic"); break; }
        break;
      case 'l':
        if (ends("ical")) { r("ic"); break; }
        if (ends("ful")) { r(""); break; }
        break;
      case 's':
        if (ends("ness")) { r(""); break; }
        break;
      default:
        break;
    }
  }

  void step4() {
    switch (b_[static_cast<size_t>(k_ - 1)]) {
      case 'a':
        if (ends("al")) break;
        return;
      case 'c':
        if (ends("ance")) break;
        if (ends("ence")) break;
        return;
      case 'e':
        if (ends("er")) break;
        return;
      case 'i':
        if (ends("ic")) break;
        return;
      case 'l':
        if (ends("able")) break;
        if (ends("ible")) break;
        return;
      case 'n':
        if (ends("ant")) break;
        if (ends("ement")) break;
        if (ends("ment")) break;
        if (ends("ent")) break;
        return;
      case 'o':
        if (ends("ion") && j_ >= 0 &&
            (b_[static_cast<size_t>(j_)] == 's' || b_[static_cast<size_t>(j_)] == 't'))
          break;
        if (ends("ou")) break;
        return;
      case 's':
        if (ends("ism")) break;
        return;
      case 't':
        if (ends("ate")) break;
        if (ends("iti")) break;
        return;
      case 'u':
        if (ends("ous")) break;
        return;
      case 'v':
        if (ends("ive")) break;
        return;
      case 'z':
        if (ends("ize")) break;
        return;
      default:
        return;
    }
    if (m() > 1) k_ = j_;
  }

  void step5() {
    j_ = k_;
    if (b_[static_cast<size_t>(k_)] == 'e') {
      const int a = m();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    if (b_[static_cast<size_t>(k_)] == 'l' && double_cons(k_) && m() > 1) --k_;
  }
};

bool is_alnum_ascii(unsigned char c) { return std::isalnum(c) != 0; }

bool all_digits(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool is_roman_numeral(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    switch (c) {
      case 'I': case 'V': case 'X': case 'L': case 'C': case 'D': case 'M':
        break;
      default:
        return false;
    }
  }
  return true;
}

}  // namespace

std::string porter_stem(const std::string& word) {
  return Porter(word).run();
}

std::vector<std::string> tokenize_normalize(const std::string& text,
                                            const StopwordSet& stopwords) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::string tok;
    tok.reserve(cur.size());
    for (unsigned char c : cur) tok.push_back(static_cast<char>(std::tolower(c)));
    cur.clear();
    if (all_digits(tok)) return;
    if (stopwords.count(tok)) return;
    out.push_back(porter_stem(tok));
  };
  for (unsigned char c : text) {
    if (is_alnum_ascii(c)) {
      cur.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string strip_index_numbers(const std::string& title) {
  size_t i = 0;
  while (i < title.size() && std::isspace(static_cast<unsigned char>(title[i]))) ++i;
  size_t j = i;
  while (j < title.size() && !std::isspace(static_cast<unsigned char>(title[j]))) ++j;
  const std::string head = title.substr(i, j - i);
  if (head.empty()) return title;

  bool enumerator = false;
  // "3", "3.", "3.2", "3.2.1"
  {
    bool ok = !head.empty();
    bool saw_digit = false;
    for (size_t p = 0; p < head.size() && ok; ++p) {
      if (std::isdigit(static_cast<unsigned char>(head[p]))) {
        saw_digit = true;
      } else if (head[p] == '.') {
        if (p == 0 || head[p - 1] == '.') ok = false;
      } else {
        ok = false;
      }
    }
    if (ok && saw_digit) enumerator = true;
  }
  // "IV." / "IV)" and "A." / "A)"
  if (!enumerator && head.size() >= 2 &&
      (head.back() == '.' || head.back() == ')')) {
    const std::string body = head.substr(0, head.size() - 1);
    if (is_roman_numeral(body) ||
        (body.size() == 1 && std::isalpha(static_cast<unsigned char>(body[0]))))
      enumerator = true;
  }
  if (!enumerator) return title;

  size_t rest = j;
  while (rest < title.size() && std::isspace(static_cast<unsigned char>(title[rest]))) ++rest;
  if (rest >= title.size()) return title;  // enumerator alone is kept
  return title.substr(rest);
}

int count_citations(const std::string& content) {
  int count = 0;
  const size_t n = content.size();
  for (size_t i = 0; i < n; ++i) {
    if (content[i] == '[') {
      const size_t close = content.find(']', i + 1);
      if (close == std::string::npos) continue;
      const std::string inside = content.substr(i + 1, close - i - 1);
      int nums = 0;
      bool valid = !inside.empty();
      size_t p = 0;
      while (p < inside.size() && valid) {
        while (p < inside.size() && inside[p] == ' ') ++p;
        size_t q = p;
        while (q < inside.size() && std::isdigit(static_cast<unsigned char>(inside[q]))) ++q;
        if (q == p) {
          valid = false;
          break;
        }
        ++nums;
        p = q;
        while (p < inside.size() && inside[p] == ' ') ++p;
        if (p < inside.size()) {
          if (inside[p] == ',') {
            ++p;
          } else {
            valid = false;
          }
        }
      }
      if (valid && nums > 0) {
        count += nums;
        i = close;
      }
    } else if (content[i] == '(') {
      const size_t close = content.find(')', i + 1);
      if (close == std::string::npos) continue;
      const std::string inside = content.substr(i + 1, close - i - 1);
      // Split on ';' and count each "... Name..., year" segment.
      size_t start = 0;
      int hits = 0;
      bool any_bad = false;
      while (start <= inside.size()) {
        size_t sep = inside.find(';', start);
        const std::string seg =
            inside.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
        // segment must end with ", <4-digit year>" and contain a capitalized word
        size_t comma = seg.rfind(',');
        bool ok = comma != std::string::npos;
        if (ok) {
          std::string tail = seg.substr(comma + 1);
          size_t t0 = tail.find_first_not_of(' ');
          size_t t1 = tail.find_last_not_of(' ');
          ok = t0 != std::string::npos && t1 - t0 == 3;
          if (ok)
            for (size_t t = t0; t <= t1; ++t)
              if (!std::isdigit(static_cast<unsigned char>(tail[t]))) ok = false;
        }
        if (ok) {
          bool has_name = false;
          for (size_t t = 0; t + 1 < comma; ++t) {
            if (std::isupper(static_cast<unsigned char>(seg[t])) &&
                std::isalpha(static_cast<unsigned char>(seg[t + 1]))) {
              has_name = true;
              break;
            }
          }
          ok = has_name;
        }
        if (ok)
          ++hits;
        else
          any_bad = true;
        if (sep == std::string::npos) break;
        start = sep + 1;
      }
      if (hits > 0 && !any_bad) {
        count += hits;
        i = close;
      }
    }
  }
  return count;
}

int count_figtables(const std::string& content) {
  std::set<std::pair<int, long>> seen;  // (kind, number); kind 0=figure 1=table
  std::string low;
  low.reserve(content.size());
  for (unsigned char c : content) low.push_back(static_cast<char>(std::tolower(c)));
  const size_t n = low.size();
  size_t i = 0;
  auto word_start = [&](size_t p) {
    return p == 0 || !std::isalpha(static_cast<unsigned char>(low[p - 1]));
  };
  while (i < n) {
    int kind = -1;
    size_t after = 0;
    if (word_start(i) && low.compare(i, 6, "figure") == 0) {
      kind = 0;
      after = i + 6;
    } else if (word_start(i) && low.compare(i, 3, "fig") == 0 &&
               (i + 3 >= n || !std::isalpha(static_cast<unsigned char>(low[i + 3])))) {
      kind = 0;
      after = i + 3;
      if (after < n && low[after] == '.') ++after;
    } else if (word_start(i) && low.compare(i, 5, "table") == 0) {
      kind = 1;
      after = i + 5;
    }
    if (kind >= 0) {
      size_t p = after;
      while (p < n && (low[p] == ' ' || low[p] == '\t')) ++p;
      size_t q = p;
      while (q < n && std::isdigit(static_cast<unsigned char>(low[q]))) ++q;
      if (q > p) {
        seen.emplace(kind, std::stol(low.substr(p, q - p)));
        i = q;
        continue;
      }
      i = after;
      continue;
    }
    ++i;
  }
  return static_cast<int>(seen.size());
}

std::vector<std::string> split_sentences(const std::string& content) {
  std::vector<std::string> out;
  std::string cur;
  const size_t n = content.size();
  for (size_t i = 0; i < n; ++i) {
    cur.push_back(content[i]);
    if (content[i] == '.' || content[i] == '?' || content[i] == '!') {
      size_t j = i + 1;
      while (j < n && (content[j] == '.' || content[j] == '?' || content[j] == '!')) {
        cur.push_back(content[j]);
        ++j;
      }
      size_t k = j;
      while (k < n && std::isspace(static_cast<unsigned char>(content[k]))) ++k;
      if (k < n && std::isupper(static_cast<unsigned char>(content[k])) && k > j) {
        out.push_back(cur);
        cur.clear();
        i = k - 1;
        continue;
      }
      i = j - 1;
    }
  }
  // trim leading space of kept tail
  size_t s = cur.find_first_not_of(" \t\n\r");
  if (s != std::string::npos) out.push_back(cur.substr(s));
  return out;
}

}  // namespace secfn
