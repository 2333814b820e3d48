#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "srclink/corpus.hpp"
#include "srclink/error.hpp"
#include "srclink/synth.hpp"
#include "support.hpp"

using namespace srclink;

namespace {

SynthCorpus small_corpus() {
  SynthParams p;
  p.n_distractors = 15;
  p.n_pairs = 12;
  p.seed = 3;
  return generate_synthetic(p);
}

std::string german_text() {
  std::string s;
  for (int i = 0; i < 20; ++i) s += "Die Forscher haben die Daten der Studie sorgfältig ausgewertet. ";
  return s;
}

}  // namespace

TEST_CASE("build_manifest filters, resolves and splits") {
  SynthCorpus c = small_corpus();
  // A short page, a German page, and a duplicate of page 0, all linked to real articles.
  c.webpages.push_back(make_document("short", DocKind::webpage, "too short to keep"));
  c.webpages.push_back(make_document("german", DocKind::webpage, german_text()));
  c.webpages.push_back(make_document("dup0", DocKind::webpage, c.webpages[0].raw_text + " Share this."));
  c.links.push_back({c.articles[1].id, "short"});
  c.links.push_back({c.articles[2].id, "german"});
  c.links.push_back({c.links[0].article_id, "dup0"});
  c.links.push_back({"no-such-article", c.webpages[1].id});
  c.articles.push_back(make_document("tiny", DocKind::article, "short abstract"));

  IngestReport report;
  const CorpusManifest m = build_manifest(c.articles, c.webpages, c.links, FilterParams{}, 9, &report);
  CHECK(report.articles_in == 28);
  CHECK(report.articles_short == 1);
  CHECK(report.webpages_short == 1);
  CHECK(report.webpages_non_english == 1);
  CHECK(report.webpages_duplicate == 1);
  CHECK(report.dangling_links == 3);
  CHECK(report.resolved_links == 12);

  CHECK(m.links.size() == 12);
  CHECK(m.webpages.size() == 12);
  CHECK(m.articles.size() == 27);
  CHECK(m.distractors.size() == 15);
  CHECK(std::count(m.split.begin(), m.split.end(), Partition::train) == 8);
  // The longer duplicate is the representative.
  CHECK(std::any_of(m.links.begin(), m.links.end(), [](const KnownLink& l) { return l.webpage_id == "dup0"; }));
  CHECK(std::is_sorted(m.articles.begin(), m.articles.end(),
                       [](const Document& a, const Document& b) { return a.id < b.id; }));
  CHECK_NOTHROW(validate_manifest(m));
}

TEST_CASE("build_manifest without the language filter keeps the German page") {
  SynthCorpus c = small_corpus();
  c.webpages.push_back(make_document("german", DocKind::webpage, german_text()));
  c.links.push_back({c.articles[14].id, "german"});  // a distractor article
  FilterParams params;
  params.english_filter = false;
  const CorpusManifest m = build_manifest(c.articles, c.webpages, c.links, params, 1);
  CHECK(m.links.size() == 13);
}

TEST_CASE("build_manifest needs two surviving links") {
  SynthCorpus c = small_corpus();
  c.links.resize(1);
  CHECK_THROWS_AS(build_manifest(c.articles, c.webpages, c.links, FilterParams{}, 1), ValidationError);
}

TEST_CASE("manifest write/read round trip") {
  const CorpusManifest m = synthetic_manifest(SynthParams{.n_distractors = 10, .n_pairs = 8, .seed = 4}, 4);
  const auto dir = testing::scratch_dir("manifest_rt");
  write_manifest(m, dir);
  for (const char* f : {"articles.jsonl", "webpages.jsonl", "links.csv", "split.csv", "manifest.json"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
  }
  const CorpusManifest r = read_manifest(dir);
  REQUIRE(r.articles.size() == m.articles.size());
  for (std::size_t i = 0; i < m.articles.size(); ++i) {
    CHECK(r.articles[i].id == m.articles[i].id);
    CHECK(r.articles[i].tokens == m.articles[i].tokens);
  }
  REQUIRE(r.webpages.size() == m.webpages.size());
  for (std::size_t i = 0; i < m.webpages.size(); ++i) CHECK(r.webpages[i].tokens == m.webpages[i].tokens);
  CHECK(r.links == m.links);
  CHECK(r.split == m.split);
  CHECK(r.distractors == m.distractors);
  CHECK(r.seed == 4);
  CHECK(r.extra_json.find("\"synthetic\"") != std::string::npos);
  CHECK(testing::slurp(dir / "split.csv").rfind("article_id,webpage_id,partition\n", 0) == 0);
}

TEST_CASE("validate_manifest names offending ids") {
  CorpusManifest m = synthetic_manifest(SynthParams{.n_distractors = 5, .n_pairs = 6, .seed = 8}, 8);
  m.links.push_back({"ghost-article", m.webpages[0].id});
  m.split.push_back(Partition::test);
  try {
    validate_manifest(m);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const auto& ids = e.offending_ids();
    CHECK(std::find(ids.begin(), ids.end(), "ghost-article") != ids.end());
  }

  CorpusManifest bad_split = synthetic_manifest(SynthParams{.n_distractors = 5, .n_pairs = 6, .seed = 8}, 8);
  bad_split.split.pop_back();
  CHECK_THROWS_AS(validate_manifest(bad_split), ValidationError);
}

TEST_CASE("read_manifest reports missing files") {
  CHECK_THROWS_AS(read_manifest(testing::scratch_dir("manifest_empty")), IoError);
}
