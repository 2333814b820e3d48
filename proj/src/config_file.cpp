#include "srclink/config_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "srclink/error.hpp"

namespace srclink {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Entries = std::map<std::string, Entry>;

struct Section {
  std::string kind;  // "", "experiment" or "grid"
  std::size_t line = 0;
  Entries entries;
};

const std::set<std::string> kCommonKeys = {
    "manifest", "seed",        "max_df",    "train_fraction", "idf_variant",
    "tsvd_n_iter", "tsvd_oversampling", "cca_epsilon", "top_k",
};
const std::set<std::string> kExperimentKeys = {"scheme", "reduction", "tsvd_k", "cca_dims"};
const std::set<std::string> kGridKeys = {"preset",   "schemes",           "tsvd_k",
                                         "cca_dims", "include_threshold", "include_no_cca"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T>
T parse_number(const Entry& e, const std::string& key) {
  T value{};
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParseError("bad value for " + key + ": " + e.value, e.line);
  return value;
}

bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw ParseError("bad boolean for " + key + ": " + e.value, e.line);
}

std::vector<std::size_t> parse_size_list(const Entry& e, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(e.value)) out.push_back(parse_number<std::size_t>({item, e.line}, key));
  return out;
}

template <typename Fn>
auto parse_enum(const Entry& e, Fn fn) {
  try {
    return fn(e.value);
  } catch (const ContractViolation& ex) {
    throw ParseError(ex.what(), e.line);
  }
}

void apply_common(ExperimentConfig& c, const Entries& entries, const std::filesystem::path& base_dir) {
  for (const auto& [key, e] : entries) {
    if (key == "manifest") {
      const std::filesystem::path p(e.value);
      c.manifest_path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(e, key);
    } else if (key == "max_df") {
      c.max_df = parse_number<double>(e, key);
    } else if (key == "train_fraction") {
      c.train_fraction = parse_number<double>(e, key);
    } else if (key == "idf_variant") {
      c.idf_variant = parse_enum(e, parse_idf_variant);
    } else if (key == "tsvd_n_iter") {
      c.tsvd_n_iter = parse_number<std::size_t>(e, key);
    } else if (key == "tsvd_oversampling") {
      c.tsvd_oversampling = parse_number<std::size_t>(e, key);
    } else if (key == "cca_epsilon") {
      c.cca_epsilon = parse_number<double>(e, key);
    } else if (key == "top_k") {
      c.top_k = parse_number<std::size_t>(e, key);
    }
  }
}

void apply_experiment(ExperimentConfig& c, const Entries& entries) {
  bool reduction_given = false;
  for (const auto& [key, e] : entries) {
    if (key == "scheme") {
      c.scheme = parse_enum(e, parse_weighting_scheme);
    } else if (key == "reduction") {
      c.reduction = parse_enum(e, parse_reduction);
      reduction_given = true;
    } else if (key == "tsvd_k") {
      c.tsvd_k = parse_number<std::size_t>(e, key);
    } else if (key == "cca_dims") {
      c.cca_dims = parse_number<std::size_t>(e, key);
    }
  }
  if (c.tsvd_k && !reduction_given) c.reduction = Reduction::tsvd;
}

void check_valid(const ExperimentConfig& c, std::size_t line) {
  try {
    validate(c);
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), line);
  }
}

std::vector<ExperimentConfig> expand_grid(const ExperimentConfig& base, const Section& section) {
  std::vector<WeightingScheme> schemes = {WeightingScheme::binary, WeightingScheme::tf,
                                          WeightingScheme::tfidf};
  std::vector<std::size_t> ks;
  std::vector<std::size_t> cca;
  bool include_threshold = true;
  bool include_no_cca = true;

  const Entries& entries = section.entries;
  if (const auto it = entries.find("preset"); it != entries.end()) {
    if (it->second.value == "phase1") {
      ks = kStandardTsvdComponents;
    } else if (it->second.value == "phase2") {
      schemes = {WeightingScheme::tfidf};
      ks = kStandardTsvdComponents;
      cca = kStandardCcaDims;
      include_threshold = false;
    } else {
      throw ParseError("unknown grid preset: " + it->second.value, it->second.line);
    }
  }
  for (const auto& [key, e] : entries) {
    if (key == "schemes") {
      schemes.clear();
      for (const auto& item : split_list(e.value)) {
        schemes.push_back(parse_enum(Entry{item, e.line}, parse_weighting_scheme));
      }
    } else if (key == "tsvd_k") {
      ks = parse_size_list(e, key);
    } else if (key == "cca_dims") {
      cca = parse_size_list(e, key);
    } else if (key == "include_threshold") {
      include_threshold = parse_bool(e, key);
    } else if (key == "include_no_cca") {
      include_no_cca = parse_bool(e, key);
    }
  }

  std::vector<ExperimentConfig> out;
  ExperimentConfig c = base;
  if (include_threshold) {
    for (auto scheme : schemes) {
      c.scheme = scheme;
      c.reduction = Reduction::threshold_only;
      c.tsvd_k.reset();
      c.cca_dims.reset();
      out.push_back(c);
    }
  }
  for (std::size_t k : ks) {
    for (auto scheme : schemes) {
      c.scheme = scheme;
      c.reduction = Reduction::tsvd;
      c.tsvd_k = k;
      c.cca_dims.reset();
      if (cca.empty() || include_no_cca) out.push_back(c);
      for (std::size_t d : cca) {
        if (d > k) continue;
        c.cca_dims = d;
        out.push_back(c);
      }
    }
  }
  if (out.empty()) throw ParseError("grid expands to no experiments", section.line);
  for (const auto& cfg : out) check_valid(cfg, section.line);
  return out;
}

}  // namespace

std::vector<ExperimentConfig> parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<Section> sections(1);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", line_no);
      const std::string kind = trim(line.substr(1, line.size() - 2));
      if (kind != "experiment" && kind != "grid") throw ParseError("unknown section [" + kind + "]", line_no);
      sections.push_back({kind, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    Section& section = sections.back();
    const bool known = kCommonKeys.contains(key) ||
                       (section.kind == "grid" ? kGridKeys.contains(key) : kExperimentKeys.contains(key));
    if (!known) throw ParseError("unknown key: " + key, line_no);
    if (!section.entries.emplace(key, Entry{value, line_no}).second) {
      throw ParseError("duplicate key: " + key, line_no);
    }
  }

  ExperimentConfig defaults;
  apply_common(defaults, sections.front().entries, base_dir);

  std::vector<ExperimentConfig> configs;
  if (sections.size() == 1) {
    apply_experiment(defaults, sections.front().entries);
    check_valid(defaults, 1);
    configs.push_back(defaults);
    return configs;
  }
  for (std::size_t s = 1; s < sections.size(); ++s) {
    ExperimentConfig c = defaults;
    apply_common(c, sections[s].entries, base_dir);
    if (sections[s].kind == "experiment") {
      apply_experiment(c, sections.front().entries);
      apply_experiment(c, sections[s].entries);
      check_valid(c, sections[s].line);
      configs.push_back(c);
    } else {
      const auto expanded = expand_grid(c, sections[s]);
      configs.insert(configs.end(), expanded.begin(), expanded.end());
    }
  }
  return configs;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace srclink
