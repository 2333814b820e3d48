#include "srclink/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "srclink/error.hpp"
#include "srclink/random.hpp"
#include "srclink/text.hpp"

namespace srclink {

namespace {

constexpr std::size_t kFunctionHead = 40;
constexpr std::size_t kTopicSize = 40;
constexpr std::size_t kSignatureTerms = 5;

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent) : cdf_(n) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cdf_[r] = total;
    }
    for (auto& c : cdf_) c /= total;
  }

  std::size_t operator()(rng::Engine& engine) const {
    const double u = rng::uniform01(engine);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

std::vector<std::string> pseudo_words(std::size_t count, rng::Engine& engine,
                                      std::unordered_set<std::string>& taken) {
  static constexpr std::string_view kOnsets = "bdfgklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  static constexpr std::string_view kCodas = "nrslx";
  std::vector<std::string> words;
  words.reserve(count);
  while (words.size() < count) {
    const std::size_t syllables = 2 + rng::uniform_below(engine, 3);
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w.push_back(kOnsets[rng::uniform_below(engine, kOnsets.size())]);
      w.push_back(kVowels[rng::uniform_below(engine, kVowels.size())]);
      if (rng::uniform01(engine) < 0.3) w.push_back(kCodas[rng::uniform_below(engine, kCodas.size())]);
    }
    if (taken.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

// Joins tokens into capitalised sentences of 8-20 words, with the occasional
// comma or number so the tokenizer has something to strip.
std::string render(const std::vector<std::string>& tokens, rng::Engine& engine) {
  std::string out;
  std::size_t left_in_sentence = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool start = left_in_sentence == 0;
    if (start) left_in_sentence = 8 + rng::uniform_below(engine, 13);
    if (!out.empty()) out += ' ';
    std::string word = tokens[i];
    if (start) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    out += word;
    --left_in_sentence;
    const bool end = left_in_sentence == 0 || i + 1 == tokens.size();
    if (end) {
      out += '.';
    } else if (rng::uniform01(engine) < 0.04) {
      out += ',';
    } else if (rng::uniform01(engine) < 0.01) {
      out += ' ' + std::to_string(1 + rng::uniform_below(engine, 2020)) + "%";
    }
  }
  return out;
}

}  // namespace

SynthCorpus generate_synthetic(const SynthParams& p) {
  if (p.n_pairs < 2) throw ContractViolation("synthetic corpus needs at least 2 pairs");
  if (!(p.rho >= 0.0 && p.rho <= 1.0)) throw ContractViolation("rho must be in [0, 1]");
  if (p.background_size <= kFunctionHead || p.n_topics == 0 || p.technical_size < kTopicSize) {
    throw ContractViolation("synthetic vocabulary sizes too small");
  }
  rng::Engine engine(p.seed);

  std::unordered_set<std::string> taken;
  std::vector<std::string> background;
  const auto function_words = text::english_function_words();
  for (std::size_t i = 0; i < kFunctionHead; ++i) {
    background.emplace_back(function_words[i]);
    taken.emplace(function_words[i]);
  }
  for (const auto& w : function_words) taken.emplace(w);
  for (auto& w : pseudo_words(p.background_size - kFunctionHead, engine, taken)) background.push_back(std::move(w));
  const std::vector<std::string> technical = pseudo_words(p.technical_size, engine, taken);

  // Fixed synonym map: every content word maps to a background content word.
  std::unordered_map<std::string, std::string> synonym;
  auto background_content = [&] {
    return background[kFunctionHead + rng::uniform_below(engine, background.size() - kFunctionHead)];
  };
  for (std::size_t i = kFunctionHead; i < background.size(); ++i) synonym[background[i]] = background_content();
  for (const auto& w : technical) synonym[w] = background_content();

  std::vector<std::vector<std::size_t>> topics(p.n_topics);
  for (auto& topic : topics) {
    std::vector<std::size_t> all(technical.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < kTopicSize; ++i) {
      const std::size_t j = i + rng::uniform_below(engine, all.size() - i);
      std::swap(all[i], all[j]);
      topic.push_back(all[i]);
    }
  }

  const ZipfSampler background_zipf(background.size(), 1.0);
  const ZipfSampler topic_zipf(kTopicSize, 1.0);

  const std::size_t n_articles = p.n_distractors + p.n_pairs;
  std::vector<std::size_t> id_order(n_articles);
  std::iota(id_order.begin(), id_order.end(), 0);
  rng::shuffle(std::span<std::size_t>(id_order), engine);

  SynthCorpus corpus;
  std::vector<std::vector<std::string>> article_tokens;
  for (std::size_t a = 0; a < n_articles; ++a) {
    const std::size_t length = 150 + rng::uniform_below(engine, 101);
    std::vector<std::size_t> doc_topics = {rng::uniform_below(engine, topics.size())};
    if (rng::uniform01(engine) < 0.5) doc_topics.push_back(rng::uniform_below(engine, topics.size()));
    std::vector<std::size_t> signature;
    for (std::size_t s = 0; s < kSignatureTerms; ++s) signature.push_back(rng::uniform_below(engine, technical.size()));

    std::vector<std::string> tokens;
    tokens.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
      const double u = rng::uniform01(engine);
      if (u < 0.55) {
        tokens.push_back(background[background_zipf(engine)]);
      } else if (u < 0.85) {
        const auto& topic = topics[doc_topics[rng::uniform_below(engine, doc_topics.size())]];
        tokens.push_back(technical[topic[topic_zipf(engine)]]);
      } else {
        tokens.push_back(technical[signature[rng::uniform_below(engine, signature.size())]]);
      }
    }
    corpus.articles.push_back(
        make_document(std::to_string(20000000 + id_order[a]), DocKind::article, render(tokens, engine)));
    article_tokens.push_back(std::move(tokens));
  }

  // The first n_pairs generated articles get webpages; ids are shuffled above.
  for (std::size_t a = 0; a < p.n_pairs; ++a) {
    std::vector<std::string> page;
    auto filler = [&] {
      const std::size_t sentences = 2 + rng::uniform_below(engine, 4);
      for (std::size_t s = 0; s < sentences; ++s) {
        const std::size_t words = 10 + rng::uniform_below(engine, 9);
        for (std::size_t w = 0; w < words; ++w) page.push_back(background[background_zipf(engine)]);
      }
    };
    filler();
    for (const auto& tok : article_tokens[a]) {
      const auto it = synonym.find(tok);
      if (it != synonym.end() && rng::uniform01(engine) < p.rho) {
        page.push_back(it->second);
      } else {
        page.push_back(tok);
      }
    }
    filler();
    char url[64];
    std::snprintf(url, sizeof url, "https://news.example.org/story/%06zu-%08llx", a,
                  static_cast<unsigned long long>(engine() & 0xffffffffULL));
    corpus.webpages.push_back(make_document(url, DocKind::webpage, render(page, engine)));
    corpus.links.push_back({corpus.articles[a].id, url});
  }
  return corpus;
}

CorpusManifest synthetic_manifest(const SynthParams& params, std::uint64_t split_seed) {
  SynthCorpus corpus = generate_synthetic(params);
  CorpusManifest m = build_manifest(std::move(corpus.articles), std::move(corpus.webpages), corpus.links,
                                    FilterParams{}, split_seed);
  const nlohmann::ordered_json extra = {
      {"synthetic",
       {{"n_distractors", params.n_distractors},
        {"n_pairs", params.n_pairs},
        {"rho", params.rho},
        {"seed", params.seed},
        {"n_topics", params.n_topics},
        {"background_size", params.background_size},
        {"technical_size", params.technical_size}}},
  };
  m.extra_json = extra.dump();
  return m;
}

}  // namespace srclink
