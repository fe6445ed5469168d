#pragma once

#include <set>
#include <string>
#include <vector>

namespace secfn {

using StopwordSet = std::set<std::string>;

const StopwordSet& default_stopwords();

// Porter (1980) suffix-stripping stemmer. Expects a lowercase word.
std::string porter_stem(const std::string& word);

// Lowercase, split on non-alphanumeric runs, drop pure-digit tokens and
// stopwords (matched before stemming), stem the rest. Order preserved.
std::vector<std::string> tokenize_normalize(const std::string& text,
                                            const StopwordSet& stopwords);

// Remove a leading enumerator ("3", "3.2", "IV.", "A)") from a chapter title.
std::string strip_index_numbers(const std::string& title);

// Citation markers: bracketed numeric groups "[3]", "[5,7]" (each number
// counts once) and parenthesized author-year groups "(Kim, 2014)".
int count_citations(const std::string& content);

// Distinct (kind, number) identifiers among "Figure n" / "Fig. n" / "Table n",
// case-insensitive.
int count_figtables(const std::string& content);

// Heuristic splitter used when a corpus carries no sentence list: break after
// [.?!] runs followed by whitespace and an uppercase letter.
std::vector<std::string> split_sentences(const std::string& content);

}  // namespace secfn
