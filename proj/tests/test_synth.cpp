#include <set>
#include <string>

#include "doctest.h"
#include "srclink/error.hpp"
#include "srclink/synth.hpp"
#include "srclink/text.hpp"

using namespace srclink;

TEST_CASE("synthetic corpus shape") {
  SynthParams p;
  p.n_distractors = 50;
  p.n_pairs = 20;
  p.seed = 1;
  const SynthCorpus c = generate_synthetic(p);
  CHECK(c.articles.size() == 70);
  CHECK(c.webpages.size() == 20);
  CHECK(c.links.size() == 20);
  std::set<std::string> ids;
  for (const auto& a : c.articles) {
    ids.insert(a.id);
    CHECK(a.word_count >= 150);
    CHECK(a.kind == DocKind::article);
  }
  CHECK(ids.size() == 70);
  for (const auto& w : c.webpages) {
    CHECK(w.word_count >= 150);
    CHECK(text::is_probably_english(w.tokens));
  }
}

TEST_CASE("synthetic corpus is a pure function of its parameters") {
  SynthParams p;
  p.n_distractors = 10;
  p.n_pairs = 5;
  p.seed = 99;
  const SynthCorpus a = generate_synthetic(p);
  const SynthCorpus b = generate_synthetic(p);
  for (std::size_t i = 0; i < a.articles.size(); ++i) CHECK(a.articles[i].raw_text == b.articles[i].raw_text);
  for (std::size_t i = 0; i < a.webpages.size(); ++i) CHECK(a.webpages[i].raw_text == b.webpages[i].raw_text);
  CHECK(a.links == b.links);
  p.seed = 100;
  CHECK(generate_synthetic(p).articles[0].raw_text != a.articles[0].raw_text);
}

TEST_CASE("rho controls how much of a webpage is rewritten") {
  SynthParams p;
  p.n_distractors = 0;
  p.n_pairs = 10;
  p.seed = 4;
  auto shared_fraction = [&](double rho) {
    p.rho = rho;
    const SynthCorpus c = generate_synthetic(p);
    double total = 0;
    for (std::size_t i = 0; i < c.webpages.size(); ++i) {
      const std::set<std::string> art(c.articles[i].tokens.begin(), c.articles[i].tokens.end());
      std::size_t shared = 0;
      for (const auto& t : c.webpages[i].tokens) shared += art.count(t);
      total += static_cast<double>(shared) / c.webpages[i].tokens.size();
    }
    return total / c.webpages.size();
  };
  const double low = shared_fraction(0.0);
  const double high = shared_fraction(0.9);
  CHECK(low > high);
}

TEST_CASE("synthetic manifest records its parameters") {
  const CorpusManifest m = synthetic_manifest(SynthParams{.n_distractors = 30, .n_pairs = 10, .seed = 2}, 2);
  CHECK(m.links.size() == 10);
  CHECK(m.distractors.size() == 30);
  CHECK(m.extra_json.find("\"n_pairs\":10") != std::string::npos);
}

TEST_CASE("synthetic parameter checks") {
  SynthParams p;
  p.n_pairs = 1;
  CHECK_THROWS_AS(generate_synthetic(p), ContractViolation);
  p.n_pairs = 10;
  p.rho = 1.5;
  CHECK_THROWS_AS(generate_synthetic(p), ContractViolation);
}
