#include "srclink/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/detail/rapidxml.hpp>
#include "json.hpp"

#include "csv.hpp"
#include "srclink/error.hpp"
#include "srclink/lcs.hpp"
#include "srclink/random.hpp"
#include "srclink/text.hpp"

namespace srclink {

namespace rx = boost::property_tree::detail::rapidxml;

std::string_view to_string(DocKind kind) {
  return kind == DocKind::article ? "article" : "webpage";
}

DocKind parse_doc_kind(std::string_view s) {
  if (s == "article") return DocKind::article;
  if (s == "webpage") return DocKind::webpage;
  throw ContractViolation("unknown document kind: " + std::string(s));
}

std::string_view to_string(Partition p) {
  return p == Partition::train ? "train" : "test";
}

Partition parse_partition(std::string_view s) {
  if (s == "train") return Partition::train;
  if (s == "test") return Partition::test;
  throw ContractViolation("unknown partition: " + std::string(s));
}

Document make_document(std::string id, DocKind kind, std::string raw_text) {
  Document doc;
  doc.id = std::move(id);
  doc.kind = kind;
  doc.word_count = text::count_words(raw_text);
  doc.tokens = text::tokenize(raw_text);
  doc.raw_text = std::move(raw_text);
  return doc;
}

// ---- PubMed XML ------------------------------------------------------------

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return content;
}

using XmlNode = rx::xml_node<char>;

const XmlNode* child(const XmlNode* node, const char* name) {
  return node ? node->first_node(name) : nullptr;
}

// Concatenated character data of a node and its descendants (titles and
// abstracts carry inline markup such as <i> and <sup>).
void collect_text(const XmlNode* node, std::string& out) {
  for (const XmlNode* c = node->first_node(); c; c = c->next_sibling()) {
    if (c->type() == rx::node_data || c->type() == rx::node_cdata) {
      out.append(c->value(), c->value_size());
    } else if (c->type() == rx::node_element) {
      collect_text(c, out);
    }
  }
}

std::string node_text(const XmlNode* node) {
  std::string out;
  if (node) collect_text(node, out);
  return out;
}

}  // namespace

PubmedImport parse_pubmed_xml(std::string xml) {
  xml.push_back('\0');
  rx::xml_document<char> doc;
  try {
    doc.parse<rx::parse_default>(xml.data());
  } catch (const rx::parse_error& e) {
    const auto offset = static_cast<std::size_t>(e.where<char>() - xml.data());
    throw ParseError(std::string("malformed PubMed XML: ") + e.what(), offset);
  }
  const XmlNode* root = doc.first_node("PubmedArticleSet");
  if (!root) throw ParseError("missing PubmedArticleSet root element", 0);

  PubmedImport result;
  for (const XmlNode* rec = root->first_node("PubmedArticle"); rec;
       rec = rec->next_sibling("PubmedArticle")) {
    const XmlNode* citation = child(rec, "MedlineCitation");
    const std::string pmid = text::collapse_whitespace(node_text(child(citation, "PMID")));
    if (pmid.empty()) {
      ++result.skipped_without_pmid;
      continue;
    }
    const XmlNode* article = child(citation, "Article");
    std::string body = node_text(child(article, "ArticleTitle"));
    if (const XmlNode* abstract = child(article, "Abstract")) {
      for (const XmlNode* part = abstract->first_node("AbstractText"); part;
           part = part->next_sibling("AbstractText")) {
        body += ' ';
        body += node_text(part);
      }
    }
    result.documents.push_back(
        make_document(pmid, DocKind::article, text::collapse_whitespace(body)));
  }
  return result;
}

PubmedImport import_pubmed_xml(const std::filesystem::path& path) {
  return parse_pubmed_xml(read_file(path));
}

// ---- JSONL -------------------------------------------------------------------

namespace detail {

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path, bool extract_html) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
      const auto kind = parse_doc_kind(obj.at("kind").get<std::string>());
      std::string body = obj.at("text").get<std::string>();
      if (kind == DocKind::webpage && extract_html) body = text::extract_webpage_text(body);
      docs.push_back(make_document(obj.at("id").get<std::string>(), kind, std::move(body)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    } catch (const ContractViolation& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  return docs;
}

}  // namespace detail

std::vector<Document> import_jsonl(const std::filesystem::path& path) {
  return detail::read_documents_jsonl(path, true);
}

void write_jsonl(const std::filesystem::path& path, std::span<const Document> docs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& d : docs) {
    const nlohmann::json obj = {{"id", d.id}, {"kind", to_string(d.kind)}, {"text", d.raw_text}};
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("error writing " + path.string());
}

// ---- links CSV -----------------------------------------------------------------

std::vector<KnownLink> read_links_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<KnownLink> links;
  for (auto& row : csv::read(in, {"article_id", "webpage_id"})) {
    links.push_back({std::move(row[0]), std::move(row[1])});
  }
  return links;
}

void write_links_csv(const std::filesystem::path& path, std::span<const KnownLink> links) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "article_id,webpage_id\n";
  for (const auto& l : links) out << csv::quote(l.article_id) << ',' << csv::quote(l.webpage_id) << '\n';
}

// ---- dedup -------------------------------------------------------------------

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

DedupResult dedup_webpages(std::span<const Document> webpages, std::span<const KnownLink> links,
                           const DedupOptions& options) {
  if (!(options.fraction > 0.0 && options.fraction <= 1.0)) {
    throw ContractViolation("dedup fraction must be in (0, 1]");
  }
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < webpages.size(); ++i) {
    if (!index.emplace(webpages[i].id, i).second) {
      throw ContractViolation("duplicate webpage id: " + webpages[i].id);
    }
  }

  std::map<std::string_view, std::set<std::size_t>> groups;
  for (const auto& link : links) {
    const auto it = index.find(link.webpage_id);
    if (it != index.end()) groups[link.article_id].insert(it->second);
  }

  std::vector<std::u32string> normalized(webpages.size());
  std::vector<bool> have_normalized(webpages.size(), false);
  auto norm = [&](std::size_t i) -> const std::u32string& {
    if (!have_normalized[i]) {
      normalized[i] = normalize_for_overlap(webpages[i].raw_text);
      have_normalized[i] = true;
    }
    return normalized[i];
  };

  struct Evaluated {
    std::size_t a, b;
    double overlap;
  };
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<Evaluated> evaluated;
  DisjointSets sets(webpages.size());
  for (const auto& [article, members] : groups) {
    const std::vector<std::size_t> m(members.begin(), members.end());
    for (std::size_t x = 0; x < m.size(); ++x) {
      for (std::size_t y = x + 1; y < m.size(); ++y) {
        const auto key = std::minmax(m[x], m[y]);
        if (!seen.insert(key).second) continue;
        const auto& a = norm(key.first);
        const auto& b = norm(key.second);
        const std::size_t longer = std::max(a.size(), b.size());
        const std::size_t common = lcs_length(a, b);
        const double overlap = longer == 0 ? 1.0 : static_cast<double>(common) / longer;
        if (static_cast<double>(common) > options.fraction * static_cast<double>(longer) ||
            longer == 0) {
          sets.unite(key.first, key.second);
        }
        evaluated.push_back({key.first, key.second, overlap});
      }
    }
  }

  // Components with more than one member, keyed by root.
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (const auto& e : evaluated) {
    components[sets.find(e.a)];
  }
  for (std::size_t i = 0; i < webpages.size(); ++i) {
    const auto it = components.find(sets.find(i));
    if (it != components.end()) it->second.push_back(i);
  }

  std::vector<std::vector<std::size_t>> multi;
  for (auto& [root, members] : components) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return webpages[a].id < webpages[b].id; });
    multi.push_back(std::move(members));
  }
  // Component order by smallest id keeps the random rule independent of input order.
  std::sort(multi.begin(), multi.end(), [&](const auto& a, const auto& b) {
    return webpages[a.front()].id < webpages[b.front()].id;
  });

  std::vector<bool> removed(webpages.size(), false);
  rng::Engine engine(options.seed);
  for (const auto& members : multi) {
    std::size_t keep = members.front();
    if (options.rule == RepresentativeRule::random) {
      keep = members[rng::uniform_below(engine, members.size())];
    } else {
      for (std::size_t i : members) {
        const std::size_t li = norm(i).size();
        const std::size_t lk = norm(keep).size();
        if (li > lk || (li == lk && webpages[i].id < webpages[keep].id)) keep = i;
      }
    }
    for (std::size_t i : members) {
      if (i != keep) removed[i] = true;
    }
  }

  DedupResult result;
  for (std::size_t i = 0; i < webpages.size(); ++i) {
    if (removed[i]) {
      result.removed_ids.push_back(webpages[i].id);
    } else {
      result.retained.push_back(webpages[i]);
    }
  }
  std::sort(result.removed_ids.begin(), result.removed_ids.end());
  for (const auto& e : evaluated) {
    if (!removed[e.a] && !removed[e.b] && e.overlap > options.residual_overlap) {
      auto [first, second] = std::minmax(webpages[e.a].id, webpages[e.b].id);
      result.residual_violations.push_back({first, second, e.overlap});
    }
  }
  std::sort(result.residual_violations.begin(), result.residual_violations.end(),
            [](const auto& x, const auto& y) {
              return std::tie(x.first, x.second) < std::tie(y.first, y.second);
            });
  return result;
}

// ---- 1:1 resolution ------------------------------------------------------------

std::vector<KnownLink> resolve_one_to_one(std::span<const KnownLink> links,
                                          std::span<const Document> webpages) {
  std::unordered_map<std::string_view, std::size_t> words;
  for (const auto& w : webpages) words.emplace(w.id, w.word_count);

  std::vector<KnownLink> unique(links.begin(), links.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  std::map<std::string_view, std::size_t> article_count;
  std::unordered_map<std::string_view, std::size_t> webpage_count;
  for (const auto& l : unique) {
    if (!words.contains(l.webpage_id)) {
      throw ContractViolation("link references unknown webpage: " + l.webpage_id);
    }
    ++article_count[l.article_id];
    ++webpage_count[l.webpage_id];
  }

  std::vector<KnownLink> result;
  std::set<std::string_view> used_articles;
  std::set<std::string_view> used_webpages;
  for (const auto& l : unique) {
    if (article_count[l.article_id] == 1 && webpage_count[l.webpage_id] == 1) {
      result.push_back(l);
      used_articles.insert(l.article_id);
      used_webpages.insert(l.webpage_id);
    }
  }

  // `unique` is sorted by article id, so each article's candidates are contiguous.
  for (std::size_t i = 0; i < unique.size();) {
    std::size_t j = i;
    while (j < unique.size() && unique[j].article_id == unique[i].article_id) ++j;
    if (!used_articles.contains(unique[i].article_id)) {
      const KnownLink* best = nullptr;
      for (std::size_t c = i; c < j; ++c) {
        if (used_webpages.contains(unique[c].webpage_id)) continue;
        if (!best || words[unique[c].webpage_id] > words[best->webpage_id]) best = &unique[c];
      }
      if (best) {
        result.push_back(*best);
        used_articles.insert(best->article_id);
        used_webpages.insert(best->webpage_id);
      }
    }
    i = j;
  }
  std::sort(result.begin(), result.end());
  return result;
}

// ---- split -------------------------------------------------------------------

std::vector<Partition> split_links(std::span<const KnownLink> links, double train_fraction,
                                   std::uint64_t seed) {
  if (links.size() < 2) throw ContractViolation("split_links needs at least 2 links");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ContractViolation("train_fraction must be in (0, 1)");
  }
  const std::size_t n = links.size();
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::Engine engine(seed);
  rng::shuffle(std::span<std::size_t>(order), engine);

  std::vector<Partition> split(n, Partition::test);
  for (std::size_t i = 0; i < n_train; ++i) split[order[i]] = Partition::train;
  return split;
}

}  // namespace srclink
