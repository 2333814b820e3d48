#include <string>
#include <vector>

#include "doctest.h"
#include "srclink/config_file.hpp"
#include "srclink/error.hpp"
#include "support.hpp"

using namespace srclink;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.offset();
  }
  return 0;
}

}  // namespace

TEST_CASE("a file without sections is one experiment") {
  const auto configs = parse_config(
      "# comment\n"
      "manifest = data/m   # trailing comment\n"
      "scheme = tf\n"
      "tsvd_k = 50\n"
      "cca_dims = 20\n"
      "seed = 9\n"
      "max_df = 0.5\n",
      "/base");
  REQUIRE(configs.size() == 1);
  const auto& c = configs[0];
  CHECK(c.manifest_path == std::filesystem::path("/base/data/m"));
  CHECK(c.scheme == WeightingScheme::tf);
  CHECK(c.reduction == Reduction::tsvd);
  CHECK(c.tsvd_k == 50u);
  CHECK(c.cca_dims == 20u);
  CHECK(c.seed == 9);
  CHECK(c.max_df == 0.5);
  CHECK(c.train_fraction == 0.7);
}

TEST_CASE("experiment sections inherit top-level values") {
  const auto configs = parse_config(
      "manifest = /abs/m\nseed = 3\n"
      "[experiment]\nscheme = binary\n"
      "[experiment]\nscheme = tfidf\nreduction = tsvd\ntsvd_k = 10\nseed = 4\n");
  REQUIRE(configs.size() == 2);
  CHECK(configs[0].scheme == WeightingScheme::binary);
  CHECK(configs[0].reduction == Reduction::threshold_only);
  CHECK(configs[0].seed == 3);
  CHECK(configs[1].tsvd_k == 10u);
  CHECK(configs[1].seed == 4);
  CHECK(configs[1].manifest_path == std::filesystem::path("/abs/m"));
}

TEST_CASE("grid presets match the library grids") {
  ExperimentConfig base;
  base.manifest_path = "m";
  const auto p1 = parse_config("manifest = m\n[grid]\npreset = phase1\n");
  const auto lib1 = phase1_grid(base);
  REQUIRE(p1.size() == lib1.size());
  CHECK(p1.size() == 18);
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(experiment_id(p1[i]) == experiment_id(lib1[i]));

  const auto p2 = parse_config("manifest = m\n[grid]\npreset = phase2\n");
  const auto lib2 = phase2_grid(base);
  REQUIRE(p2.size() == lib2.size());
  CHECK(p2.size() == 25);
  for (std::size_t i = 0; i < p2.size(); ++i) CHECK(experiment_id(p2[i]) == experiment_id(lib2[i]));
}

TEST_CASE("custom grid expansion order") {
  const auto g = parse_config(
      "manifest = m\n[grid]\nschemes = tf, tfidf\ntsvd_k = 10, 20\ncca_dims = 5, 15\ninclude_no_cca = false\n"
      "include_threshold = yes\n");
  std::vector<std::string> ids;
  for (const auto& c : g) ids.push_back(experiment_id(c));
  const std::vector<std::string> expected = {
      "tf_threshold",     "tfidf_threshold",  "tf_tsvd10_cca5",  "tfidf_tsvd10_cca5",
      "tf_tsvd20_cca5",   "tf_tsvd20_cca15",  "tfidf_tsvd20_cca5", "tfidf_tsvd20_cca15",
  };
  CHECK(ids == expected);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("manifest = m\nbogus = 1\n") == 2);
  CHECK(error_line("scheme = tf\nscheme = tfidf\n") == 2);
  CHECK(error_line("\n\n[nonsense]\n") == 3);
  CHECK(error_line("[grid\n") == 1);
  CHECK(error_line("just words\n") == 1);
  CHECK(error_line("seed = -1\n") == 1);
  CHECK(error_line("scheme = bm25\n") == 1);
  CHECK(error_line("tsvd_k = 10\ncca_dims = 20\n") == 1);  // cca_dims > tsvd_k
  CHECK(error_line("[experiment]\npreset = phase1\n") == 2);
  CHECK(error_line("[grid]\ninclude_threshold = maybe\n") == 2);
  CHECK(error_line("[grid]\nschemes = tf\ninclude_threshold = false\n") == 1);
  CHECK_THROWS_AS(load_config(testing::fixture("no-such.cfg")), IoError);
}
