#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "csv.hpp"
#include "srclink/corpus.hpp"
#include "srclink/error.hpp"
#include "srclink/text.hpp"

namespace srclink {

namespace detail {
std::vector<Document> read_documents_jsonl(const std::filesystem::path& path, bool extract_html);
}

namespace {

void sort_by_id(std::vector<Document>& docs) {
  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.id < b.id; });
}

// Keeps the first document for each id.
std::vector<Document> unique_by_id(std::vector<Document> docs) {
  std::unordered_set<std::string> seen;
  std::vector<Document> out;
  out.reserve(docs.size());
  for (auto& d : docs) {
    if (seen.insert(d.id).second) out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::string> compute_distractors(const std::vector<Document>& articles,
                                             const std::vector<KnownLink>& links) {
  std::unordered_set<std::string_view> linked;
  for (const auto& l : links) linked.insert(l.article_id);
  std::vector<std::string> out;
  for (const auto& a : articles) {
    if (!linked.contains(a.id)) out.push_back(a.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CorpusManifest build_manifest(std::vector<Document> articles, std::vector<Document> webpages,
                              std::span<const KnownLink> raw_links, const FilterParams& params,
                              std::uint64_t seed, IngestReport* report) {
  IngestReport r;
  r.articles_in = articles.size();
  r.webpages_in = webpages.size();
  r.raw_links = raw_links.size();

  articles = unique_by_id(std::move(articles));
  webpages = unique_by_id(std::move(webpages));

  std::erase_if(articles, [&](const Document& d) {
    const bool short_doc = d.word_count < params.min_words;
    r.articles_short += short_doc;
    return short_doc;
  });
  std::erase_if(webpages, [&](const Document& d) {
    if (d.word_count < params.min_words) {
      ++r.webpages_short;
      return true;
    }
    if (params.english_filter && (d.tokens.empty() || !text::is_probably_english(d.tokens))) {
      ++r.webpages_non_english;
      return true;
    }
    return false;
  });

  std::unordered_set<std::string_view> article_ids;
  for (const auto& a : articles) article_ids.insert(a.id);
  std::unordered_set<std::string_view> webpage_ids;
  for (const auto& w : webpages) webpage_ids.insert(w.id);

  std::vector<KnownLink> links;
  for (const auto& l : raw_links) {
    if (article_ids.contains(l.article_id) && webpage_ids.contains(l.webpage_id)) {
      links.push_back(l);
    } else {
      ++r.dangling_links;
    }
  }

  DedupOptions dedup_options;
  dedup_options.fraction = params.dedup_fraction;
  dedup_options.residual_overlap = params.residual_overlap;
  DedupResult dedup = dedup_webpages(webpages, links, dedup_options);
  r.webpages_duplicate = dedup.removed_ids.size();
  r.residual_violations = dedup.residual_violations.size();
  const std::unordered_set<std::string> removed(dedup.removed_ids.begin(), dedup.removed_ids.end());
  std::erase_if(links, [&](const KnownLink& l) { return removed.contains(l.webpage_id); });

  CorpusManifest manifest;
  manifest.links = resolve_one_to_one(links, dedup.retained);
  r.resolved_links = manifest.links.size();
  if (report) *report = r;
  if (manifest.links.size() < 2) {
    throw ValidationError("fewer than 2 links survive filtering; cannot split", {});
  }
  manifest.split = split_links(manifest.links, params.train_fraction, seed);

  std::unordered_set<std::string_view> linked_webpages;
  for (const auto& l : manifest.links) linked_webpages.insert(l.webpage_id);
  for (auto& w : dedup.retained) {
    if (linked_webpages.contains(w.id)) manifest.webpages.push_back(std::move(w));
  }
  manifest.articles = std::move(articles);
  sort_by_id(manifest.articles);
  sort_by_id(manifest.webpages);
  manifest.distractors = compute_distractors(manifest.articles, manifest.links);
  manifest.seed = seed;
  manifest.filter_params = params;
  return manifest;
}

void validate_manifest(const CorpusManifest& m) {
  std::vector<std::string> bad;
  auto check_docs = [&](const std::vector<Document>& docs, DocKind kind,
                        std::unordered_set<std::string_view>& ids) {
    for (const auto& d : docs) {
      if (d.kind != kind || !ids.insert(d.id).second || d.word_count < m.filter_params.min_words) {
        bad.push_back(d.id);
      }
    }
  };
  std::unordered_set<std::string_view> article_ids;
  std::unordered_set<std::string_view> webpage_ids;
  check_docs(m.articles, DocKind::article, article_ids);
  check_docs(m.webpages, DocKind::webpage, webpage_ids);
  if (!bad.empty()) throw ValidationError("documents with wrong kind, duplicate id, or too few words", bad);

  std::unordered_set<std::string_view> linked_articles;
  std::unordered_set<std::string_view> linked_webpages;
  for (const auto& l : m.links) {
    if (!article_ids.contains(l.article_id) || !linked_articles.insert(l.article_id).second) {
      bad.push_back(l.article_id);
    }
    if (!webpage_ids.contains(l.webpage_id) || !linked_webpages.insert(l.webpage_id).second) {
      bad.push_back(l.webpage_id);
    }
  }
  if (!bad.empty()) throw ValidationError("links are dangling or not one-to-one", bad);

  if (m.split.size() != m.links.size()) {
    throw ValidationError("split has " + std::to_string(m.split.size()) + " entries for " +
                              std::to_string(m.links.size()) + " links",
                          {});
  }
  for (const auto& id : m.distractors) {
    if (!article_ids.contains(id) || linked_articles.contains(id)) bad.push_back(id);
  }
  if (!bad.empty()) throw ValidationError("distractors must be unlinked articles", bad);
}

void write_manifest(const CorpusManifest& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_jsonl(dir / "articles.jsonl", m.articles);
  write_jsonl(dir / "webpages.jsonl", m.webpages);
  write_links_csv(dir / "links.csv", m.links);
  {
    std::ofstream out(dir / "split.csv");
    if (!out) throw IoError("cannot write " + (dir / "split.csv").string());
    out << "article_id,webpage_id,partition\n";
    for (std::size_t i = 0; i < m.links.size(); ++i) {
      out << csv::quote(m.links[i].article_id) << ',' << csv::quote(m.links[i].webpage_id) << ','
          << to_string(m.split[i]) << '\n';
    }
  }
  const auto n_train =
      static_cast<std::size_t>(std::count(m.split.begin(), m.split.end(), Partition::train));
  nlohmann::ordered_json meta;
  meta["seed"] = m.seed;
  meta["filter_params"] = {
      {"min_words", m.filter_params.min_words},
      {"dedup_fraction", m.filter_params.dedup_fraction},
      {"residual_overlap", m.filter_params.residual_overlap},
      {"english_filter", m.filter_params.english_filter},
      {"train_fraction", m.filter_params.train_fraction},
  };
  meta["counts"] = {
      {"articles", m.articles.size()},   {"webpages", m.webpages.size()},
      {"links", m.links.size()},         {"train", n_train},
      {"test", m.links.size() - n_train}, {"distractors", m.distractors.size()},
  };
  meta["extra"] = nlohmann::ordered_json::parse(m.extra_json);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << meta.dump(2) << '\n';
}

CorpusManifest read_manifest(const std::filesystem::path& dir) {
  CorpusManifest m;
  {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("cannot open " + (dir / "manifest.json").string());
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(in);
      m.seed = meta.at("seed").get<std::uint64_t>();
      const auto& fp = meta.at("filter_params");
      m.filter_params.min_words = fp.at("min_words").get<std::size_t>();
      m.filter_params.dedup_fraction = fp.at("dedup_fraction").get<double>();
      m.filter_params.residual_overlap = fp.at("residual_overlap").get<double>();
      m.filter_params.english_filter = fp.at("english_filter").get<bool>();
      m.filter_params.train_fraction = fp.at("train_fraction").get<double>();
      if (meta.contains("extra")) m.extra_json = meta["extra"].dump();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("manifest.json: " + std::string(e.what()), 0);
    }
  }
  m.articles = detail::read_documents_jsonl(dir / "articles.jsonl", false);
  m.webpages = detail::read_documents_jsonl(dir / "webpages.jsonl", false);
  m.links = read_links_csv(dir / "links.csv");

  std::ifstream in(dir / "split.csv");
  if (!in) throw IoError("cannot open " + (dir / "split.csv").string());
  const auto rows = csv::read(in, {"article_id", "webpage_id", "partition"});
  std::map<KnownLink, Partition> by_link;
  for (const auto& row : rows) {
    try {
      by_link[KnownLink{row[0], row[1]}] = parse_partition(row[2]);
    } catch (const ContractViolation& e) {
      throw ParseError("split.csv: " + std::string(e.what()), 0);
    }
  }
  std::vector<std::string> missing;
  for (const auto& l : m.links) {
    const auto it = by_link.find(l);
    if (it == by_link.end()) {
      missing.push_back(l.webpage_id);
    } else {
      m.split.push_back(it->second);
    }
  }
  if (!missing.empty() || rows.size() != m.links.size()) {
    throw ValidationError("split.csv does not match links.csv", missing);
  }
  m.distractors = compute_distractors(m.articles, m.links);
  validate_manifest(m);
  return m;
}

}  // namespace srclink
