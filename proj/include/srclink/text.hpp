#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srclink::text {

// Number of whitespace-delimited words in raw text.
std::size_t count_words(std::string_view raw);

// Lowercase terms with every non-alphanumeric character removed. Terms that end
// up empty or consist only of digits are dropped. Order is preserved.
//
// Input is treated as UTF-8. ASCII and Latin-1 letters are lowercased; other
// non-ASCII code points are kept when they are letters of an alphabetic script
// and removed when they fall in punctuation or symbol blocks.
std::vector<std::string> tokenize(std::string_view raw);

// Visible text of an HTML document: markup, comments, and script/style bodies
// removed, block boundaries turned into a space, common character references
// decoded, whitespace collapsed. Plain text only has its whitespace collapsed.
std::string extract_webpage_text(std::string_view html);

// Collapse whitespace runs to a single space and trim both ends.
std::string collapse_whitespace(std::string_view s);

// The built-in English function-word list used by is_probably_english.
std::span<const std::string_view> english_function_words();

inline constexpr double kEnglishFunctionWordRatio = 0.05;

// True when at least 5% of tokens are English function words.
// Throws ContractViolation on an empty token sequence.
bool is_probably_english(std::span<const std::string> tokens,
                         double min_ratio = kEnglishFunctionWordRatio);

}  // namespace srclink::text
