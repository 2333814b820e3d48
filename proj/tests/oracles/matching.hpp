#pragma once

// Checks a 1:1 link resolution against the rules it must satisfy.

#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Link {
  std::string article, webpage;
  auto operator<=>(const Link&) const = default;
};

// Empty when `out` is a valid resolution of `in`; otherwise one message per problem.
inline std::vector<std::string> check_one_to_one(const std::vector<Link>& in, const std::vector<Link>& out) {
  std::vector<std::string> problems;
  const std::set<Link> distinct(in.begin(), in.end());
  std::map<std::string, int> deg_a, deg_w;
  for (const auto& l : distinct) {
    ++deg_a[l.article];
    ++deg_w[l.webpage];
  }
  std::set<std::string> used_a, used_w;
  for (const auto& l : out) {
    if (!distinct.count(l)) problems.push_back("not an input link: " + l.article + "," + l.webpage);
    if (!used_a.insert(l.article).second) problems.push_back("article twice: " + l.article);
    if (!used_w.insert(l.webpage).second) problems.push_back("webpage twice: " + l.webpage);
  }
  const std::set<Link> out_set(out.begin(), out.end());
  for (const auto& l : distinct) {
    const bool unique = deg_a[l.article] == 1 && deg_w[l.webpage] == 1;
    if (unique && !out_set.count(l)) problems.push_back("unique pair dropped: " + l.article + "," + l.webpage);
    if (!used_a.count(l.article) && !used_w.count(l.webpage)) {
      problems.push_back("not maximal, free link: " + l.article + "," + l.webpage);
    }
  }
  return problems;
}

}  // namespace oracle
