#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace srclink {

enum class DocKind { article, webpage };

std::string_view to_string(DocKind kind);
DocKind parse_doc_kind(std::string_view s);

struct Document {
  std::string id;  // PMID for articles, URL for webpages
  DocKind kind = DocKind::article;
  std::string raw_text;
  std::vector<std::string> tokens;
  std::size_t word_count = 0;
};

// Tokenizes and counts words; the only way documents are built in this library.
Document make_document(std::string id, DocKind kind, std::string raw_text);

struct KnownLink {
  std::string article_id;
  std::string webpage_id;

  auto operator<=>(const KnownLink&) const = default;
};

enum class Partition { train, test };

std::string_view to_string(Partition p);
Partition parse_partition(std::string_view s);

struct FilterParams {
  std::size_t min_words = 100;
  double dedup_fraction = 0.5;
  double residual_overlap = 0.1;
  bool english_filter = true;
  double train_fraction = 0.7;
};

// ---- importers -----------------------------------------------------------

struct PubmedImport {
  std::vector<Document> documents;
  std::size_t skipped_without_pmid = 0;
};

// E-utilities efetch XML (PubmedArticleSet). Text is title + " " + abstract.
PubmedImport import_pubmed_xml(const std::filesystem::path& path);
PubmedImport parse_pubmed_xml(std::string xml);

// JSONL, one {"id","kind","text"} object per line. Webpage text is passed
// through text::extract_webpage_text.
std::vector<Document> import_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, std::span<const Document> docs);

// CSV with required header `article_id,webpage_id`.
std::vector<KnownLink> read_links_csv(const std::filesystem::path& path);
void write_links_csv(const std::filesystem::path& path, std::span<const KnownLink> links);

// ---- cleaning and linking -----------------------------------------------

enum class RepresentativeRule { longest, random };

struct DedupOptions {
  double fraction = 0.5;
  double residual_overlap = 0.1;
  RepresentativeRule rule = RepresentativeRule::longest;
  std::uint64_t seed = 0;  // used by RepresentativeRule::random only
};

struct OverlapPair {
  std::string first;
  std::string second;
  double overlap = 0.0;  // lcs / longer normalized length
};

struct DedupResult {
  std::vector<Document> retained;       // input order
  std::vector<std::string> removed_ids; // sorted
  // Retained pairs within a shared-article group whose overlap still exceeds
  // residual_overlap. Empty on clean corpora.
  std::vector<OverlapPair> residual_violations;
};

// Collapses near-duplicate webpages among those linked to the same article.
DedupResult dedup_webpages(std::span<const Document> webpages, std::span<const KnownLink> links,
                           const DedupOptions& options = {});

// 1:1 links: pairs whose ids are each unique in `links` first, then, per
// remaining article in sorted order, the unused linked webpage with the most
// words (ties to the smaller id). Identical duplicate pairs count once.
std::vector<KnownLink> resolve_one_to_one(std::span<const KnownLink> links,
                                          std::span<const Document> webpages);

// One partition per link; |train| = round(train_fraction * n), clamped so both
// partitions are non-empty.
std::vector<Partition> split_links(std::span<const KnownLink> links, double train_fraction,
                                   std::uint64_t seed);

// ---- manifest ------------------------------------------------------------

struct CorpusManifest {
  std::vector<Document> articles;
  std::vector<Document> webpages;
  std::vector<KnownLink> links;
  std::vector<Partition> split;  // parallel to links
  std::vector<std::string> distractors;
  std::uint64_t seed = 0;
  FilterParams filter_params;
  // Free-form provenance recorded in manifest.json (e.g. synthetic parameters).
  std::string extra_json = "{}";
};

struct IngestReport {
  std::size_t articles_in = 0;
  std::size_t webpages_in = 0;
  std::size_t articles_short = 0;
  std::size_t webpages_short = 0;
  std::size_t webpages_non_english = 0;
  std::size_t webpages_duplicate = 0;
  std::size_t residual_violations = 0;
  std::size_t raw_links = 0;
  std::size_t dangling_links = 0;
  std::size_t resolved_links = 0;
};

// Length and language filters, dedup, 1:1 resolution, split. Distractors are
// every admitted article without a resolved link; only linked webpages are kept.
CorpusManifest build_manifest(std::vector<Document> articles, std::vector<Document> webpages,
                              std::span<const KnownLink> raw_links, const FilterParams& params,
                              std::uint64_t seed, IngestReport* report = nullptr);

// Throws ValidationError naming offending ids.
void validate_manifest(const CorpusManifest& manifest);

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& dir);
CorpusManifest read_manifest(const std::filesystem::path& dir);

}  // namespace srclink
