#include "srclink/lcs.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "utf8.hpp"

namespace srclink {

namespace {

// Suffix automaton over UTF-32 text. Transitions are small sorted vectors:
// natural-language alphabets are small, so binary search beats hash maps here.
class SuffixAutomaton {
 public:
  explicit SuffixAutomaton(const std::u32string& s) {
    states_.reserve(2 * s.size() + 1);
    states_.push_back({});
    for (char32_t c : s) extend(c);
  }

  std::size_t longest_common_substring(const std::u32string& t) const {
    std::int32_t state = 0;
    std::size_t length = 0;
    std::size_t best = 0;
    for (char32_t c : t) {
      while (state != 0 && find(state, c) < 0) {
        state = states_[state].link;
        length = states_[state].len;
      }
      const std::int32_t next = find(state, c);
      if (next >= 0) {
        state = next;
        ++length;
      }
      best = std::max(best, length);
    }
    return best;
  }

 private:
  struct State {
    std::size_t len = 0;
    std::int32_t link = -1;
    std::vector<std::pair<char32_t, std::int32_t>> next;
  };

  std::int32_t find(std::int32_t state, char32_t c) const {
    const auto& edges = states_[state].next;
    const auto it = std::lower_bound(edges.begin(), edges.end(), c,
                                     [](const auto& e, char32_t key) { return e.first < key; });
    return it != edges.end() && it->first == c ? it->second : -1;
  }

  void set(std::int32_t state, char32_t c, std::int32_t target) {
    auto& edges = states_[state].next;
    const auto it = std::lower_bound(edges.begin(), edges.end(), c,
                                     [](const auto& e, char32_t key) { return e.first < key; });
    if (it != edges.end() && it->first == c) {
      it->second = target;
    } else {
      edges.insert(it, {c, target});
    }
  }

  void extend(char32_t c) {
    const auto cur = static_cast<std::int32_t>(states_.size());
    states_.push_back({states_[last_].len + 1, -1, {}});
    std::int32_t p = last_;
    while (p != -1 && find(p, c) < 0) {
      set(p, c, cur);
      p = states_[p].link;
    }
    if (p == -1) {
      states_[cur].link = 0;
    } else {
      const std::int32_t q = find(p, c);
      if (states_[p].len + 1 == states_[q].len) {
        states_[cur].link = q;
      } else {
        const auto clone = static_cast<std::int32_t>(states_.size());
        State copy = states_[q];
        copy.len = states_[p].len + 1;
        states_.push_back(std::move(copy));
        while (p != -1 && find(p, c) == q) {
          set(p, c, clone);
          p = states_[p].link;
        }
        states_[q].link = clone;
        states_[cur].link = clone;
      }
    }
    last_ = cur;
  }

  std::vector<State> states_;
  std::int32_t last_ = 0;
};

}  // namespace

std::u32string normalize_for_overlap(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = utf8::next(text, i);
    if (utf8::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(utf8::to_lower(cp));
  }
  return out;
}

std::size_t lcs_length(const std::u32string& a, const std::u32string& b) {
  if (a.empty() || b.empty()) return 0;
  // Build on the shorter string; scan the longer one.
  if (a.size() > b.size()) return SuffixAutomaton(b).longest_common_substring(a);
  return SuffixAutomaton(a).longest_common_substring(b);
}

std::size_t lcs_length(std::string_view a, std::string_view b) {
  return lcs_length(normalize_for_overlap(a), normalize_for_overlap(b));
}

}  // namespace srclink
