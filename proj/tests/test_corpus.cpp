#include <algorithm>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles/matching.hpp"
#include "srclink/corpus.hpp"
#include "srclink/error.hpp"
#include "support.hpp"

using namespace srclink;

namespace {

std::vector<oracle::Link> as_oracle(const std::vector<KnownLink>& links) {
  std::vector<oracle::Link> out;
  for (const auto& l : links) out.push_back({l.article_id, l.webpage_id});
  return out;
}

Document page(const std::string& id, const std::string& text) {
  return make_document(id, DocKind::webpage, text);
}

}  // namespace

TEST_CASE("make_document tokenizes and counts") {
  const Document d = make_document("42", DocKind::article, "Two words, 3 tokens?");
  CHECK(d.id == "42");
  CHECK(d.kind == DocKind::article);
  CHECK(d.word_count == 4);
  CHECK(d.tokens == std::vector<std::string>{"two", "words", "tokens"});
}

TEST_CASE("kind and partition names round-trip") {
  CHECK(parse_doc_kind(to_string(DocKind::webpage)) == DocKind::webpage);
  CHECK(parse_partition(to_string(Partition::test)) == Partition::test);
  CHECK_THROWS_AS(parse_doc_kind("blog"), ContractViolation);
}

TEST_CASE("PubMed XML import") {
  const PubmedImport imported = import_pubmed_xml(testing::fixture("pubmed_small.xml"));
  CHECK(imported.skipped_without_pmid == 1);
  REQUIRE(imported.documents.size() == 2);
  CHECK(imported.documents[0].id == "31000001");
  CHECK(imported.documents[0].raw_text ==
        "Coffee consumption and cardiovascular outcomes. Coffee is widely consumed. Moderate intake was "
        "associated with lower risk.");
  CHECK(imported.documents[1].id == "31000002");
  CHECK(imported.documents[1].raw_text == "Sleep & memory in adolescents");
  CHECK(imported.documents[1].kind == DocKind::article);
}

TEST_CASE("malformed PubMed XML reports the byte offset") {
  const std::string xml = "<PubmedArticleSet><PubmedArticle><MedlineCitation></PubmedArticle>";
  try {
    parse_pubmed_xml(xml);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 0);
    CHECK(e.offset() <= xml.size());
  }
  CHECK_THROWS_AS(parse_pubmed_xml("<other/>"), ParseError);
  CHECK_THROWS_AS(import_pubmed_xml(testing::fixture("missing.xml")), IoError);
}

TEST_CASE("JSONL round trip and HTML extraction of webpages") {
  const auto dir = testing::scratch_dir("corpus_jsonl");
  {
    std::ofstream out(dir / "in.jsonl");
    out << R"({"id":"a1","kind":"article","text":"Plain <b>article</b> text"})" << '\n'
        << '\n'
        << R"({"id":"http://x/1","kind":"webpage","text":"<p>Hello&nbsp;there</p><script>x()</script>"})" << '\n';
  }
  const auto docs = import_jsonl(dir / "in.jsonl");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].raw_text == "Plain <b>article</b> text");
  CHECK(docs[1].raw_text == "Hello there");
  CHECK(docs[1].kind == DocKind::webpage);

  write_jsonl(dir / "out.jsonl", docs);
  const auto again = import_jsonl(dir / "out.jsonl");
  REQUIRE(again.size() == 2);
  CHECK(again[0].raw_text == docs[0].raw_text);
  CHECK(again[1].raw_text == docs[1].raw_text);
}

TEST_CASE("JSONL errors carry the line number") {
  const auto dir = testing::scratch_dir("corpus_jsonl_bad");
  {
    std::ofstream out(dir / "bad.jsonl");
    out << R"({"id":"a1","kind":"article","text":"ok"})" << '\n' << R"({"id":"a2","kind":"article"})" << '\n';
  }
  try {
    import_jsonl(dir / "bad.jsonl");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
}

TEST_CASE("links CSV round trip and header check") {
  const auto dir = testing::scratch_dir("corpus_links");
  const std::vector<KnownLink> links = {{"1", "https://a.org/x?y=1,2"}, {"2", "https://b.org/\"q\""}};
  write_links_csv(dir / "links.csv", links);
  CHECK(read_links_csv(dir / "links.csv") == links);
  {
    std::ofstream out(dir / "bad.csv");
    out << "pmid,url\n1,x\n";
  }
  CHECK_THROWS_AS(read_links_csv(dir / "bad.csv"), ParseError);
}

TEST_CASE("dedup keeps the longest of a near-duplicate group") {
  const std::string story =
      "Scientists found that people who drink coffee every day have a lower risk of heart disease than those who "
      "do not, according to a large study.";
  const std::vector<Document> pages = {
      page("w1", story),
      page("w2", story + " Read more on our site."),
      page("w3", "A completely different report about ocean temperatures and coral reefs in the Pacific."),
      page("w4", story),  // same text but linked to another article: never compared with w1/w2
  };
  const std::vector<KnownLink> links = {{"A", "w1"}, {"A", "w2"}, {"A", "w3"}, {"B", "w4"}};
  const DedupResult r = dedup_webpages(pages, links);
  CHECK(r.removed_ids == std::vector<std::string>{"w1"});
  REQUIRE(r.retained.size() == 3);
  CHECK(r.retained[0].id == "w2");
  CHECK(r.retained[1].id == "w3");
  CHECK(r.retained[2].id == "w4");
}

TEST_CASE("dedup groups transitively and breaks length ties by id") {
  const std::string base(200, 'x');
  const std::vector<Document> pages = {
      page("c", base + "aaaaaaaaaa"),
      page("b", "aaaaaaaaaa" + base),
      page("a", base + "bbbbbbbbbb"),
  };
  const std::vector<KnownLink> links = {{"A", "a"}, {"A", "b"}, {"A", "c"}};
  const DedupResult r = dedup_webpages(pages, links);
  REQUIRE(r.retained.size() == 1);
  CHECK(r.retained[0].id == "a");
  CHECK(r.removed_ids == std::vector<std::string>{"b", "c"});
}

TEST_CASE("dedup threshold is strict and residual overlap is reported") {
  // lcs = 10 of 20 code points: exactly half, so not merged at fraction 0.5.
  const std::vector<Document> pages = {page("p", "abcdefghij0123456789"), page("q", "abcdefghijzyxwvutsrq")};
  const std::vector<KnownLink> links = {{"A", "p"}, {"A", "q"}};
  const DedupResult r = dedup_webpages(pages, links);
  CHECK(r.removed_ids.empty());
  REQUIRE(r.residual_violations.size() == 1);
  CHECK(r.residual_violations[0].first == "p");
  CHECK(r.residual_violations[0].overlap == doctest::Approx(0.5));

  DedupOptions lower;
  lower.fraction = 0.49;
  CHECK(dedup_webpages(pages, links, lower).removed_ids.size() == 1);
}

TEST_CASE("dedup random representative rule is seeded") {
  const std::string base(300, 'y');
  std::vector<Document> pages;
  std::vector<KnownLink> links;
  for (int i = 0; i < 6; ++i) {
    pages.push_back(page("p" + std::to_string(i), base + std::string(i, 'z')));
    links.push_back({"A", "p" + std::to_string(i)});
  }
  DedupOptions opts;
  opts.rule = RepresentativeRule::random;
  std::set<std::string> kept;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    opts.seed = seed;
    const auto r1 = dedup_webpages(pages, links, opts);
    const auto r2 = dedup_webpages(pages, links, opts);
    REQUIRE(r1.retained.size() == 1);
    CHECK(r1.retained[0].id == r2.retained[0].id);
    kept.insert(r1.retained[0].id);
  }
  CHECK(kept.size() > 1);
}

TEST_CASE("dedup rejects bad input") {
  const std::vector<Document> pages = {page("p", "x"), page("p", "y")};
  CHECK_THROWS_AS(dedup_webpages(pages, {}), ContractViolation);
  DedupOptions bad;
  bad.fraction = 0.0;
  CHECK_THROWS_AS(dedup_webpages({}, {}, bad), ContractViolation);
}

TEST_CASE("resolve_one_to_one prefers unique pairs, then the longest webpage") {
  const std::vector<Document> pages = {
      page("u1", "one two three"),
      page("w_long", "one two three four five"),
      page("w_short", "one two"),
      page("t1", "same length"),
      page("t0", "same length"),
  };
  const std::vector<KnownLink> links = {
      {"A", "u1"},                                   // unique pair
      {"B", "w_long"}, {"B", "w_short"},             // B takes the longer page
      {"C", "t1"},     {"C", "t0"},                  // tie: smaller id
      {"D", "w_long"},                               // w_long already taken by B
      {"A", "u1"},                                   // duplicate link counts once
  };
  const auto out = resolve_one_to_one(links, pages);
  const std::vector<KnownLink> expected = {{"A", "u1"}, {"B", "w_long"}, {"C", "t0"}};
  CHECK(out == expected);
  CHECK(oracle::check_one_to_one(as_oracle(links), as_oracle(out)).empty());
  CHECK_THROWS_AS(resolve_one_to_one(std::vector<KnownLink>{{"A", "ghost"}}, pages), ContractViolation);
}

TEST_CASE("resolve_one_to_one passes the invariant checker on random multigraphs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_articles = 2 + rng() % 15;
    const std::size_t n_pages = 2 + rng() % 15;
    std::vector<Document> pages;
    for (std::size_t w = 0; w < n_pages; ++w) {
      pages.push_back(page("w" + std::to_string(w), std::string(1 + rng() % 5, 'x') + " y"));
    }
    std::vector<KnownLink> links;
    const std::size_t n_links = rng() % 40;
    for (std::size_t i = 0; i < n_links; ++i) {
      links.push_back({"a" + std::to_string(rng() % n_articles), "w" + std::to_string(rng() % n_pages)});
    }
    const auto out = resolve_one_to_one(links, pages);
    const auto problems = oracle::check_one_to_one(as_oracle(links), as_oracle(out));
    CHECK_MESSAGE(problems.empty(), "trial " << trial << ": " << (problems.empty() ? "" : problems.front()));
  }
}

TEST_CASE("split_links sizes and determinism") {
  std::vector<KnownLink> links;
  for (int i = 0; i < 3573; ++i) links.push_back({std::to_string(i), "w" + std::to_string(i)});
  const auto split = split_links(links, 0.7, 123);
  CHECK(std::count(split.begin(), split.end(), Partition::train) == 2501);
  CHECK(std::count(split.begin(), split.end(), Partition::test) == 1072);
  CHECK(split_links(links, 0.7, 123) == split);
  CHECK(split_links(links, 0.7, 124) != split);

  const std::vector<KnownLink> two = {{"1", "a"}, {"2", "b"}};
  for (double f : {0.01, 0.5, 0.99}) {
    const auto s = split_links(two, f, 0);
    CHECK(std::count(s.begin(), s.end(), Partition::train) == 1);
  }
  CHECK_THROWS_AS(split_links(std::vector<KnownLink>{{"1", "a"}}, 0.7, 0), ContractViolation);
  CHECK_THROWS_AS(split_links(two, 1.0, 0), ContractViolation);
}

TEST_CASE("split_links is frozen for a fixed seed") {
  std::vector<KnownLink> links;
  for (int i = 0; i < 10; ++i) links.push_back({std::to_string(i), "w" + std::to_string(i)});
  const auto split = split_links(links, 0.7, 2024);
  std::string pattern;
  for (auto p : split) pattern += p == Partition::train ? 'T' : '.';
  CHECK(pattern.size() == 10);
  CHECK(std::count(pattern.begin(), pattern.end(), 'T') == 7);
  // Recorded from the first run; guards the shuffle against silent changes.
  CHECK(pattern == "TTTT..TTT.");
}
