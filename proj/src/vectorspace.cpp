#include "srclink/vectorspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include "json.hpp"

#include "srclink/binio.hpp"
#include "srclink/error.hpp"

namespace srclink {

std::string_view to_string(WeightingScheme s) {
  switch (s) {
    case WeightingScheme::binary:
      return "binary";
    case WeightingScheme::tf:
      return "tf";
    case WeightingScheme::tfidf:
      return "tfidf";
  }
  return "?";
}

WeightingScheme parse_weighting_scheme(std::string_view s) {
  if (s == "binary") return WeightingScheme::binary;
  if (s == "tf") return WeightingScheme::tf;
  if (s == "tfidf" || s == "tf-idf") return WeightingScheme::tfidf;
  throw ContractViolation("unknown weighting scheme: " + std::string(s));
}

std::string_view to_string(IdfVariant v) {
  return v == IdfVariant::smooth ? "smooth" : "raw";
}

IdfVariant parse_idf_variant(std::string_view s) {
  if (s == "smooth") return IdfVariant::smooth;
  if (s == "raw") return IdfVariant::raw;
  throw ContractViolation("unknown idf variant: " + std::string(s));
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      s += a.values[i++] * b.values[j++];
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq,
                       std::size_t n_docs, double max_df, IdfVariant idf_variant)
    : terms_(std::move(terms)),
      doc_freq_(std::move(doc_freq)),
      n_docs_(n_docs),
      max_df_(max_df),
      idf_variant_(idf_variant) {
  if (terms_.size() != doc_freq_.size()) throw ContractViolation("terms/doc_freq size mismatch");
  if (!std::is_sorted(terms_.begin(), terms_.end()) ||
      std::adjacent_find(terms_.begin(), terms_.end()) != terms_.end()) {
    throw ContractViolation("vocabulary terms must be sorted and unique");
  }
  idf_.reserve(terms_.size());
  const auto n = static_cast<double>(n_docs_);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto df = static_cast<double>(doc_freq_[i]);
    if (doc_freq_[i] == 0 || doc_freq_[i] > n_docs_) {
      throw ContractViolation("doc_freq out of range for term " + terms_[i]);
    }
    idf_.push_back(idf_variant_ == IdfVariant::smooth ? std::log((1.0 + n) / (1.0 + df)) + 1.0
                                                      : std::log(n / df));
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Document frequency of each term over a collection.
std::unordered_map<std::string_view, std::uint32_t> document_frequencies(
    std::span<const Document> docs) {
  std::unordered_map<std::string_view, std::uint32_t> df;
  std::unordered_set<std::string_view> seen;
  for (const auto& d : docs) {
    seen.clear();
    for (const auto& t : d.tokens) {
      if (seen.insert(t).second) ++df[t];
    }
  }
  return df;
}

}  // namespace

Vocabulary build_vocabulary(std::span<const Document> articles, std::span<const Document> webpages,
                            double max_df, IdfVariant idf_variant) {
  if (articles.empty() || webpages.empty()) {
    throw ContractViolation("build_vocabulary needs non-empty article and webpage collections");
  }
  if (!(max_df > 0.0 && max_df <= 1.0)) throw ContractViolation("max_df must be in (0, 1]");

  const auto article_df = document_frequencies(articles);
  const auto webpage_df = document_frequencies(webpages);
  const std::size_t n_docs = articles.size() + webpages.size();

  std::map<std::string_view, std::uint32_t> kept;
  for (const auto& [term, adf] : article_df) {
    const auto it = webpage_df.find(term);
    if (it == webpage_df.end()) continue;
    const std::uint32_t df = adf + it->second;
    if (static_cast<double>(df) <= max_df * static_cast<double>(n_docs)) kept.emplace(term, df);
  }
  if (kept.empty()) throw EmptyVocabularyError();

  std::vector<std::string> terms;
  std::vector<std::uint32_t> doc_freq;
  terms.reserve(kept.size());
  doc_freq.reserve(kept.size());
  for (const auto& [term, df] : kept) {
    terms.emplace_back(term);
    doc_freq.push_back(df);
  }
  return Vocabulary(std::move(terms), std::move(doc_freq), n_docs, max_df, idf_variant);
}

double tfidf_weight(std::uint32_t tf, double idf) {
  return (1.0 + std::log(static_cast<double>(tf))) * idf;
}

SparseVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocab,
                       WeightingScheme scheme) {
  std::vector<std::uint32_t> hits;
  hits.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (const auto idx = vocab.index_of(t)) hits.push_back(*idx);
  }
  std::sort(hits.begin(), hits.end());

  SparseVector v;
  v.dim = static_cast<std::uint32_t>(vocab.size());
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    const auto tf = static_cast<std::uint32_t>(j - i);
    double value = 1.0;
    if (scheme == WeightingScheme::tf) {
      value = tf;
    } else if (scheme == WeightingScheme::tfidf) {
      value = tfidf_weight(tf, vocab.idf(hits[i]));
    }
    // raw IDF is zero for a term in every document; keep entries non-zero.
    if (value != 0.0) {
      v.indices.push_back(hits[i]);
      v.values.push_back(value);
    }
    i = j;
  }
  return v;
}

SparseVector vectorize(const Document& doc, const Vocabulary& vocab, WeightingScheme scheme) {
  return vectorize(doc.tokens, vocab, scheme);
}

std::vector<SparseVector> vectorize_corpus(std::span<const Document> docs, const Vocabulary& vocab,
                                           WeightingScheme scheme) {
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(vectorize(d, vocab, scheme));
  return out;
}

// ---- persistence ---------------------------------------------------------------

void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream tsv(dir / "vocab.tsv");
  if (!tsv) throw IoError("cannot write " + (dir / "vocab.tsv").string());
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    tsv << vocab.term(i) << '\t' << i << '\t' << vocab.doc_freq(i) << '\n';
  }
  nlohmann::ordered_json meta = {
      {"n_docs", vocab.n_docs()},
      {"max_df", vocab.max_df()},
      {"idf_variant", to_string(vocab.idf_variant())},
  };
  std::ofstream out(dir / "vocab.meta.json");
  if (!out) throw IoError("cannot write " + (dir / "vocab.meta.json").string());
  out << meta.dump(2) << '\n';
}

Vocabulary read_vocabulary(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "vocab.meta.json");
  if (!meta_in) throw IoError("cannot open " + (dir / "vocab.meta.json").string());
  std::size_t n_docs;
  double max_df;
  IdfVariant variant;
  try {
    const auto meta = nlohmann::json::parse(meta_in);
    n_docs = meta.at("n_docs").get<std::size_t>();
    max_df = meta.at("max_df").get<double>();
    variant = parse_idf_variant(meta.at("idf_variant").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("vocab.meta.json: " + std::string(e.what()), 0);
  }

  std::ifstream tsv(dir / "vocab.tsv");
  if (!tsv) throw IoError("cannot open " + (dir / "vocab.tsv").string());
  std::vector<std::string> terms;
  std::vector<std::uint32_t> doc_freq;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(tsv, line)) {
    ++line_no;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("vocab.tsv: expected 3 tab-separated fields", line_no);
    try {
      if (std::stoul(line.substr(t1 + 1, t2 - t1 - 1)) != terms.size()) {
        throw ParseError("vocab.tsv: indices must be dense and in order", line_no);
      }
      terms.push_back(line.substr(0, t1));
      doc_freq.push_back(static_cast<std::uint32_t>(std::stoul(line.substr(t2 + 1))));
    } catch (const std::logic_error&) {
      throw ParseError("vocab.tsv: bad number", line_no);
    }
  }
  return Vocabulary(std::move(terms), std::move(doc_freq), n_docs, max_df, variant);
}

void write_vectors(const std::filesystem::path& path, std::span<const SparseVector> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::uint64_t dim = rows.empty() ? 0 : rows.front().dim;
  binio::write_magic(out, "EVSP1");
  binio::write<std::uint64_t>(out, rows.size());
  binio::write<std::uint64_t>(out, dim);
  for (const auto& r : rows) {
    if (r.dim != dim) throw ContractViolation("write_vectors: rows have different dimensions");
    binio::write<std::uint64_t>(out, r.nnz());
    binio::write_array<std::uint32_t>(out, r.indices);
    binio::write_array<double>(out, r.values);
  }
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<SparseVector> read_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binio::expect_magic(in, "EVSP1");
  const auto n_rows = binio::read<std::uint64_t>(in);
  const auto dim = binio::read<std::uint64_t>(in);
  std::vector<SparseVector> rows;
  rows.reserve(n_rows);
  for (std::uint64_t r = 0; r < n_rows; ++r) {
    SparseVector v;
    v.dim = static_cast<std::uint32_t>(dim);
    const auto nnz = binio::read<std::uint64_t>(in);
    if (nnz > dim) throw ParseError("EVSP1 row has more entries than dimensions", r);
    v.indices.resize(nnz);
    v.values.resize(nnz);
    for (auto& idx : v.indices) idx = binio::read<std::uint32_t>(in);
    for (auto& val : v.values) val = binio::read<double>(in);
    for (std::size_t i = 0; i < nnz; ++i) {
      if (v.indices[i] >= dim || (i > 0 && v.indices[i] <= v.indices[i - 1])) {
        throw ParseError("EVSP1 row indices must be increasing and < dim", r);
      }
    }
    rows.push_back(std::move(v));
  }
  return rows;
}

void write_vectors_jsonl(const std::filesystem::path& path, std::span<const SparseVector> rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : rows) {
    const nlohmann::ordered_json obj = {{"dim", r.dim}, {"indices", r.indices}, {"values", r.values}};
    out << obj.dump() << '\n';
  }
}

}  // namespace srclink
