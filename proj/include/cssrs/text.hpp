#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cssrs {

// One token plus its byte span [begin,end) in the original text. Spans let
// normalization splice replacements back without disturbing surrounding
// punctuation or whitespace.
struct Token {
  std::string text;   // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

// Lowercase, split on whitespace and punctuation, keep intra-word
// apostrophes ("don't" stays one token; a curly U+2019 is normalized to ').
// Non-ASCII letters pass through unchanged.
std::vector<Token> tokenize(std::string_view text);

std::vector<std::string> tokenize_words(std::string_view text);

// ASCII case folding; bytes >= 0x80 untouched.
std::string casefold(std::string_view s);

std::string trim(std::string_view s);

// Sentence rule: a run of {. ! ?} followed by whitespace or end of text
// terminates a sentence, except when the '.' closes a known abbreviation
// ("e.g.", "dr.", ...). A segment counts only if it contains a letter or
// digit.
std::size_t count_sentences(std::string_view text);

std::vector<std::string> split_sentences(std::string_view text);

}  // namespace cssrs
