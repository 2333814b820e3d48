#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace srclink {

// Lowercased, whitespace-collapsed form as a UTF-32 string. Both LCS and the
// length comparisons in dedup operate on this form.
std::u32string normalize_for_overlap(std::string_view text);

// Length in code points of the longest common contiguous substring of the
// normalized forms of a and b. Linear time via a suffix automaton.
std::size_t lcs_length(std::string_view a, std::string_view b);
std::size_t lcs_length(const std::u32string& a, const std::u32string& b);

}  // namespace srclink
