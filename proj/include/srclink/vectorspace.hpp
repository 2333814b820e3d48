#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srclink/corpus.hpp"

namespace srclink {

enum class WeightingScheme { binary, tf, tfidf };

std::string_view to_string(WeightingScheme s);
WeightingScheme parse_weighting_scheme(std::string_view s);

// smooth: ln((1 + N) / (1 + df)) + 1     raw: ln(N / df)
enum class IdfVariant { smooth, raw };

std::string_view to_string(IdfVariant v);
IdfVariant parse_idf_variant(std::string_view s);

// Sorted (index, value) pairs stored as two parallel arrays.
struct SparseVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  double squared_norm() const;
  bool operator==(const SparseVector&) const = default;
};

double dot(const SparseVector& a, const SparseVector& b);

class Vocabulary {
 public:
  Vocabulary() = default;
  // terms must be sorted and unique; doc_freq parallel to terms.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq,
             std::size_t n_docs, double max_df, IdfVariant idf_variant = IdfVariant::smooth);

  std::size_t size() const { return terms_.size(); }
  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }
  std::uint32_t doc_freq(std::uint32_t index) const { return doc_freq_.at(index); }
  std::size_t n_docs() const { return n_docs_; }
  double max_df() const { return max_df_; }
  IdfVariant idf_variant() const { return idf_variant_; }
  double idf(std::uint32_t index) const { return idf_.at(index); }

  const std::vector<std::string>& terms() const { return terms_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> terms_;
  std::vector<std::uint32_t> doc_freq_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
  std::size_t n_docs_ = 0;
  double max_df_ = 1.0;
  IdfVariant idf_variant_ = IdfVariant::smooth;
};

inline constexpr double kDefaultMaxDf = 0.85;

// Terms present in at least one article and one webpage whose combined
// document frequency ratio is <= max_df. Throws EmptyVocabularyError.
Vocabulary build_vocabulary(std::span<const Document> articles, std::span<const Document> webpages,
                            double max_df = kDefaultMaxDf,
                            IdfVariant idf_variant = IdfVariant::smooth);

// Sublinear TF-IDF weight: (1 + ln tf) * idf.
double tfidf_weight(std::uint32_t tf, double idf);

SparseVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocab,
                       WeightingScheme scheme);
SparseVector vectorize(const Document& doc, const Vocabulary& vocab, WeightingScheme scheme);
std::vector<SparseVector> vectorize_corpus(std::span<const Document> docs, const Vocabulary& vocab,
                                           WeightingScheme scheme);

// vocab.tsv (term, index, doc_freq) and vocab.meta.json next to it.
void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& dir);
Vocabulary read_vocabulary(const std::filesystem::path& dir);

// Binary format: "EVSP1", u64 n_rows, u64 dim, then per row u64 nnz,
// u32 indices[nnz], f64 values[nnz]; little-endian.
void write_vectors(const std::filesystem::path& path, std::span<const SparseVector> rows);
std::vector<SparseVector> read_vectors(const std::filesystem::path& path);
// One {"dim","indices","values"} object per line.
void write_vectors_jsonl(const std::filesystem::path& path, std::span<const SparseVector> rows);

}  // namespace srclink
