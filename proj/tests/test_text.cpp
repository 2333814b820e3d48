#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles/html_regex.hpp"
#include "srclink/error.hpp"
#include "srclink/text.hpp"
#include "support.hpp"

using namespace srclink;
using Tokens = std::vector<std::string>;

TEST_CASE("count_words splits on ASCII whitespace only") {
  CHECK(text::count_words("") == 0);
  CHECK(text::count_words("  one\ttwo\nthree  ") == 3);
  CHECK(text::count_words("a,b c-d") == 2);
  CHECK(text::count_words("123 456") == 2);
}

TEST_CASE("tokenize lowercases and strips punctuation") {
  CHECK(text::tokenize("Hello, World! e-mail") == Tokens{"hello", "world", "email"});
  CHECK(text::tokenize("") == Tokens{});
  CHECK(text::tokenize("   ...  ") == Tokens{});
}

TEST_CASE("tokenize drops digit-only tokens but keeps alphanumerics") {
  CHECK(text::tokenize("In 2019, 40,000 adults (n=12) took COVID19") ==
        Tokens{"in", "adults", "n12", "took", "covid19"});
}

TEST_CASE("tokenize handles non-ASCII letters") {
  CHECK(text::tokenize("Ärzte ÜBER Straße") == Tokens{"ärzte", "über", "straße"});
  CHECK(text::tokenize("ΑΒΓ Дом") == Tokens{"αβγ", "дом"});
  // Curly quote and em dash are punctuation.
  CHECK(text::tokenize("it’s—fine") == Tokens{"itsfine"});
  CHECK(text::tokenize("no break") == Tokens{"no", "break"});
}

TEST_CASE("tokenize survives invalid UTF-8") {
  const std::string bad = std::string("ab") + char(0xff) + "cd " + char(0xc3);
  CHECK(text::tokenize(bad) == Tokens{"abcd"});
}

TEST_CASE("collapse_whitespace") {
  CHECK(text::collapse_whitespace("  a \t\n b  ") == "a b");
  CHECK(text::collapse_whitespace("") == "");
}

TEST_CASE("function-word list is 150 unique lowercase words without German homographs") {
  const auto words = text::english_function_words();
  CHECK(words.size() == 150);
  std::set<std::string_view> unique(words.begin(), words.end());
  CHECK(unique.size() == 150);
  for (auto w : words) {
    CHECK(!w.empty());
    CHECK(text::tokenize(w) == Tokens{std::string(w)});
  }
  for (auto german : {"in", "an", "so", "was", "will", "also", "am", "die", "der", "und"}) {
    CHECK_MESSAGE(!unique.count(german), german);
  }
}

TEST_CASE("language filter separates the labelled fixtures") {
  for (int i = 1; i <= 5; ++i) {
    const auto en = text::tokenize(testing::slurp(testing::fixture("lang/en_" + std::to_string(i) + ".txt")));
    const auto de = text::tokenize(testing::slurp(testing::fixture("lang/de_" + std::to_string(i) + ".txt")));
    CHECK_MESSAGE(text::is_probably_english(en), "en_" << i);
    CHECK_MESSAGE(!text::is_probably_english(de), "de_" << i);
  }
}

TEST_CASE("language filter threshold is inclusive") {
  Tokens t(20, "zzz");
  t[0] = "the";  // 1/20 = 0.05
  CHECK(text::is_probably_english(t));
  t.push_back("zzz");
  CHECK(!text::is_probably_english(t));
  CHECK_THROWS_AS(text::is_probably_english(Tokens{}), ContractViolation);
}

TEST_CASE("extract_webpage_text agrees with a regex stripper on well-formed fixtures") {
  for (const char* name : {"01_news.html", "02_blog.html", "03_table.html", "04_entities.html", "05_nested.html",
                           "06_noscript.html", "08_list.html", "09_comments.html", "10_plain_mixed.html"}) {
    const std::string html = testing::slurp(testing::fixture(std::string("html/") + name));
    CHECK_MESSAGE(text::extract_webpage_text(html) == oracle::strip_html(html), name);
  }
}

TEST_CASE("extract_webpage_text on hand-checked pages") {
  CHECK(text::extract_webpage_text(testing::slurp(testing::fixture("html/01_news.html"))) ==
        "Home Health Three cups a day linked to lower risk Researchers followed 40,000 adults for ten years and "
        "found that moderate coffee drinkers had fewer cardiac events. The study, published in a cardiology "
        "journal, adjusted for smoking & diet. (c) Daily Herald");
  // Quoted '>' inside an attribute must not end the tag.
  CHECK(text::extract_webpage_text(testing::slurp(testing::fixture("html/07_attributes.html"))) ==
        "Attributes with angle brackets inside quotes should not end the tag. Figure shows growth.");
}

TEST_CASE("extract_webpage_text edge cases") {
  CHECK(text::extract_webpage_text("plain   text\n") == "plain text");
  CHECK(text::extract_webpage_text("a < b and c > d") == "a < b and c > d");
  CHECK(text::extract_webpage_text("x &unknown; y &#x41;&#66;") == "x &unknown; y AB");
  CHECK(text::extract_webpage_text("<p>one</p><p>two</p>") == "one two");
  CHECK(text::extract_webpage_text("in<b>line</b>") == "inline");
  CHECK(text::extract_webpage_text("<SCRIPT>var x;</SCRIPT>kept") == "kept");
  CHECK(text::extract_webpage_text("<script>never closed") == "");
  CHECK(text::extract_webpage_text("<!-- open comment") == "");
}
