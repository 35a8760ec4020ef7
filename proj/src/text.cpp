#include "cssrs/text.hpp"

#include <array>
#include <cctype>

namespace cssrs {

namespace {

struct Codepoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

// Permissive UTF-8 decode; invalid bytes become single-byte codepoints so the
// tokenizer never throws on mangled input.
std::vector<Codepoint> decode_utf8(std::string_view s) {
  std::vector<Codepoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    char32_t cp = c;
    std::size_t len = 1;
    if (c >= 0xf0 && i + 3 < s.size()) {
      cp = ((c & 0x07u) << 18) | ((s[i + 1] & 0x3fu) << 12) | ((s[i + 2] & 0x3fu) << 6) |
           (s[i + 3] & 0x3fu);
      len = 4;
    } else if (c >= 0xe0 && i + 2 < s.size()) {
      cp = ((c & 0x0fu) << 12) | ((s[i + 1] & 0x3fu) << 6) | (s[i + 2] & 0x3fu);
      len = 3;
    } else if (c >= 0xc0 && i + 1 < s.size()) {
      cp = ((c & 0x1fu) << 6) | (s[i + 1] & 0x3fu);
      len = 2;
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

bool is_space_cp(char32_t c) {
  if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') return true;
  if (c == 0x00a0 || c == 0x3000 || c == 0x2028 || c == 0x2029 || c == 0x200b) return true;
  return c >= 0x2000 && c <= 0x200a;
}

bool is_apostrophe_cp(char32_t c) { return c == U'\'' || c == 0x2019; }

bool is_separator_cp(char32_t c) {
  if (c < 0x80) {
    return std::ispunct(static_cast<unsigned char>(c)) && !is_apostrophe_cp(c);
  }
  // General punctuation, quotes and dashes; everything else non-ASCII is a
  // word character.
  if (c >= 0x2010 && c <= 0x2027 && c != 0x2019) return true;
  if (c == 0x00a1 || c == 0x00bf || c == 0x00ab || c == 0x00bb) return true;
  if (c >= 0x2030 && c <= 0x205e) return true;
  return false;
}

bool is_word_cp(char32_t c) {
  return !is_space_cp(c) && !is_separator_cp(c) && !is_apostrophe_cp(c);
}

void append_lower_cp(std::string& out, std::string_view src, const Codepoint& cp) {
  if (cp.value < 0x80) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(cp.value))));
  } else if (cp.value == 0x2019) {
    out.push_back('\'');
  } else {
    out.append(src.substr(cp.begin, cp.end - cp.begin));
  }
}

const std::array<std::string_view, 12> kAbbreviations = {
    "e.g.", "i.e.", "etc.", "vs.", "dr.", "mr.", "mrs.", "ms.", "st.", "prof.", "jr.", "sr."};

// Word ending at `end` (exclusive), including the trailing dot, matches the
// abbreviation guard list?
bool ends_with_abbreviation(std::string_view text, std::size_t end) {
  for (std::string_view abbr : kAbbreviations) {
    if (end < abbr.size()) continue;
    std::size_t start = end - abbr.size();
    if (start > 0) {
      unsigned char prev = static_cast<unsigned char>(text[start - 1]);
      if (!std::isspace(prev) && !std::ispunct(prev)) continue;
    }
    bool match = true;
    for (std::size_t k = 0; k < abbr.size(); ++k) {
      if (std::tolower(static_cast<unsigned char>(text[start + k])) != abbr[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

bool has_letter_or_digit(std::string_view s) {
  for (unsigned char c : s) {
    if (std::isalnum(c) || c >= 0x80) return true;
  }
  return false;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const std::vector<Codepoint> cps = decode_utf8(text);
  Token cur;
  bool open = false;
  auto flush = [&]() {
    if (open && !cur.text.empty()) tokens.push_back(cur);
    cur = Token{};
    open = false;
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const Codepoint& cp = cps[i];
    if (is_word_cp(cp.value)) {
      if (!open) {
        open = true;
        cur.begin = cp.begin;
      }
      append_lower_cp(cur.text, text, cp);
      cur.end = cp.end;
    } else if (is_apostrophe_cp(cp.value) && open && i + 1 < cps.size() &&
               is_word_cp(cps[i + 1].value)) {
      // intra-word apostrophe
      cur.text.push_back('\'');
      cur.end = cp.end;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  for (Token& t : tokenize(text)) out.push_back(std::move(t.text));
  return out;
}

std::string casefold(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t run_end = i + 1;
      while (run_end < text.size() &&
             (text[run_end] == '.' || text[run_end] == '!' || text[run_end] == '?'))
        ++run_end;
      bool boundary = run_end >= text.size() ||
                      std::isspace(static_cast<unsigned char>(text[run_end]));
      if (boundary && c == '.' && run_end == i + 1 && ends_with_abbreviation(text, run_end)) {
        boundary = false;
      }
      if (boundary) {
        std::string seg = trim(text.substr(start, run_end - start));
        if (has_letter_or_digit(seg)) sentences.push_back(std::move(seg));
        start = run_end;
      }
      i = run_end;
    } else {
      ++i;
    }
  }
  std::string tail = trim(text.substr(start));
  if (has_letter_or_digit(tail)) sentences.push_back(std::move(tail));
  return sentences;
}

std::size_t count_sentences(std::string_view text) { return split_sentences(text).size(); }

}  // namespace cssrs
