#include "srclink/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_set>

#include "srclink/error.hpp"
#include "utf8.hpp"

namespace srclink::text {

namespace {

// Common English function words. Words that are also frequent German function
// words (in, an, so, was, will, also, am) are left out.
constexpr std::array<std::string_view, 150> kFunctionWords = {
    "the",     "of",       "and",        "to",      "a",       "is",      "that",      "for",
    "it",      "as",       "with",       "be",      "by",      "on",      "not",       "he",
    "i",       "this",     "are",        "or",      "his",     "from",    "at",        "which",
    "but",     "have",     "were",       "had",     "they",    "you",     "she",       "there",
    "their",   "been",     "has",        "her",     "more",    "we",      "if",        "would",
    "all",     "what",     "its",        "when",    "can",     "who",     "them",      "than",
    "some",    "could",    "these",      "into",    "then",    "only",    "other",     "our",
    "any",     "my",       "me",         "him",     "your",    "those",   "such",      "may",
    "should",  "must",     "might",      "shall",   "do",      "does",    "did",       "done",
    "being",   "having",   "about",      "after",   "before",  "above",   "below",     "between",
    "through", "during",   "without",    "within",  "upon",    "under",   "over",      "again",
    "further", "once",     "here",       "where",   "why",     "how",     "both",      "each",
    "few",     "most",     "own",        "same",    "very",    "just",    "because",   "until",
    "while",   "against",  "among",      "whether", "though",  "although", "however",  "therefore",
    "thus",    "whom",     "whose",      "itself",  "themselves", "himself", "herself", "ourselves",
    "yourself", "myself",  "us",         "nor",     "off",     "out",     "up",        "down",
    "too",     "yet",      "ever",       "every",   "either",  "neither", "onto",      "toward",
    "towards", "via",      "per",        "across",  "along",   "around",  "behind",    "beside",
    "beyond",  "despite",  "near",       "since",   "unless",  "whereas",
};

bool is_ascii_space(char c) {
  return c == ' ' || (c >= '\t' && c <= '\r');
}

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_block_tag(std::string_view name) {
  static const std::unordered_set<std::string_view> kBlock = {
      "address", "article", "aside",   "blockquote", "body",     "br",      "button",
      "caption", "dd",      "details", "dialog",     "div",      "dl",      "dt",
      "fieldset", "figcaption", "figure", "footer",  "form",     "h1",      "h2",
      "h3",      "h4",      "h5",      "h6",         "head",     "header",  "hgroup",
      "hr",      "html",    "li",      "main",       "nav",      "ol",      "option",
      "p",       "pre",     "section", "select",     "summary",  "table",   "tbody",
      "td",      "textarea", "tfoot",  "th",         "thead",    "tr",      "ul",
  };
  return kBlock.contains(name);
}

// Elements whose content is never visible text.
bool is_hidden_tag(std::string_view name) {
  return name == "script" || name == "style" || name == "noscript" || name == "template" ||
         name == "title";
}

bool istarts_with(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

// Decodes a character reference at html[i] == '&'. Returns false when it is
// not a recognised reference; on success appends to out and advances i.
bool decode_entity(std::string_view html, std::size_t& i, std::string& out) {
  const std::size_t semi = html.find(';', i + 1);
  if (semi == std::string_view::npos || semi - i > 10) return false;
  const std::string_view body = html.substr(i + 1, semi - i - 1);
  char32_t cp = 0;
  if (!body.empty() && body[0] == '#') {
    const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
    const std::string_view digits = body.substr(hex ? 2 : 1);
    if (digits.empty()) return false;
    std::uint32_t value = 0;
    for (char c : digits) {
      int d;
      if (c >= '0' && c <= '9') {
        d = c - '0';
      } else if (hex && c >= 'a' && c <= 'f') {
        d = c - 'a' + 10;
      } else if (hex && c >= 'A' && c <= 'F') {
        d = c - 'A' + 10;
      } else {
        return false;
      }
      value = value * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      if (value > 0x10FFFF) return false;
    }
    cp = value == 0 ? 0xFFFD : value;
  } else {
    static const std::array<std::pair<std::string_view, char32_t>, 16> kNamed = {{
        {"amp", '&'},      {"lt", '<'},       {"gt", '>'},      {"quot", '"'},
        {"apos", '\''},    {"nbsp", ' '},     {"ndash", 0x2013}, {"mdash", 0x2014},
        {"hellip", 0x2026}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
        {"rdquo", 0x201D}, {"copy", 0xA9},    {"reg", 0xAE},    {"shy", 0xAD},
    }};
    const auto it = std::find_if(kNamed.begin(), kNamed.end(),
                                 [&](const auto& e) { return e.first == body; });
    if (it == kNamed.end()) return false;
    cp = it->second;
  }
  utf8::append(out, cp == 0xA0 ? char32_t{' '} : cp);
  i = semi + 1;
  return true;
}

// Position just past the '>' closing a tag that starts at html[i] == '<',
// honouring quoted attribute values. npos when unterminated.
std::size_t tag_end(std::string_view html, std::size_t i) {
  char quote = 0;
  for (std::size_t j = i + 1; j < html.size(); ++j) {
    const char c = html[j];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return j + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::size_t count_words(std::string_view raw) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : raw) {
    if (is_ascii_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !all_digits(current)) tokens.push_back(current);
    current.clear();
  };
  std::size_t i = 0;
  while (i < raw.size()) {
    const char32_t cp = utf8::next(raw, i);
    if (utf8::is_space(cp)) {
      flush();
    } else if (!utf8::is_non_word(cp) && cp != 0xFFFD) {
      utf8::append(current, utf8::to_lower(cp));
    }
  }
  flush();
  return tokens;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_ascii_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string extract_webpage_text(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '&') {
      if (!decode_entity(html, i, out)) {
        out.push_back(c);
        ++i;
      }
      continue;
    }
    if (c != '<') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      const std::size_t close = html.find("-->", i + 4);
      i = close == std::string_view::npos ? html.size() : close + 3;
      continue;
    }
    if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
      const std::size_t close = html.find('>', i);
      i = close == std::string_view::npos ? html.size() : close + 1;
      continue;
    }
    std::size_t name_start = i + 1;
    const bool closing = name_start < html.size() && html[name_start] == '/';
    if (closing) ++name_start;
    std::size_t name_end = name_start;
    while (name_end < html.size() && std::isalnum(static_cast<unsigned char>(html[name_end]))) {
      ++name_end;
    }
    const std::size_t end = tag_end(html, i);
    if (name_end == name_start || !std::isalpha(static_cast<unsigned char>(html[name_start])) ||
        end == std::string_view::npos) {
      // Not a tag ("a < b", stray bracket): keep as text.
      out.push_back(c);
      ++i;
      continue;
    }
    std::string name(html.substr(name_start, name_end - name_start));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    i = end;
    if (!closing && is_hidden_tag(name)) {
      const bool self_closing = html[end - 2] == '/';
      if (!self_closing) {
        const std::string close_tag = "</" + name;
        std::size_t j = i;
        while (j < html.size() && !istarts_with(html, j, close_tag)) ++j;
        if (j < html.size()) {
          const std::size_t close_end = tag_end(html, j);
          i = close_end == std::string_view::npos ? html.size() : close_end;
        } else {
          i = html.size();
        }
      }
      out.push_back(' ');
      continue;
    }
    if (is_block_tag(name)) out.push_back(' ');
  }
  return collapse_whitespace(out);
}

std::span<const std::string_view> english_function_words() {
  return kFunctionWords;
}

bool is_probably_english(std::span<const std::string> tokens, double min_ratio) {
  if (tokens.empty()) {
    throw ContractViolation("is_probably_english: empty token sequence");
  }
  static const std::unordered_set<std::string_view> kSet(kFunctionWords.begin(),
                                                         kFunctionWords.end());
  const auto hits = std::count_if(tokens.begin(), tokens.end(),
                                  [](const std::string& t) { return kSet.contains(t); });
  return static_cast<double>(hits) / static_cast<double>(tokens.size()) >= min_ratio;
}

}  // namespace srclink::text
