#pragma once

// Vocabulary and weights straight from their definitions, using ordered maps
// of strings instead of indices.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using TokenDoc = std::vector<std::string>;
using TermWeights = std::map<std::string, double>;

struct BruteVocab {
  std::map<std::string, int> df;  // combined document frequency of kept terms
  int n_docs = 0;
};

inline BruteVocab brute_vocabulary(const std::vector<TokenDoc>& articles, const std::vector<TokenDoc>& webpages,
                                   double max_df) {
  std::map<std::string, int> df_a, df_w;
  for (const auto& d : articles) {
    for (const auto& t : std::set<std::string>(d.begin(), d.end())) ++df_a[t];
  }
  for (const auto& d : webpages) {
    for (const auto& t : std::set<std::string>(d.begin(), d.end())) ++df_w[t];
  }
  BruteVocab v;
  v.n_docs = static_cast<int>(articles.size() + webpages.size());
  for (const auto& [t, a] : df_a) {
    auto it = df_w.find(t);
    if (it == df_w.end()) continue;
    const int df = a + it->second;
    if (static_cast<double>(df) / v.n_docs <= max_df) v.df[t] = df;
  }
  return v;
}

// scheme: 0 binary, 1 tf, 2 tfidf (smooth idf)
inline TermWeights brute_weights(const TokenDoc& doc, const BruteVocab& v, int scheme) {
  std::map<std::string, int> tf;
  for (const auto& t : doc) {
    if (v.df.count(t)) ++tf[t];
  }
  TermWeights w;
  for (const auto& [t, n] : tf) {
    if (scheme == 0) {
      w[t] = 1.0;
    } else if (scheme == 1) {
      w[t] = n;
    } else {
      const double idf = std::log((1.0 + v.n_docs) / (1.0 + v.df.at(t))) + 1.0;
      w[t] = (1.0 + std::log(static_cast<double>(n))) * idf;
    }
  }
  return w;
}

}  // namespace oracle
