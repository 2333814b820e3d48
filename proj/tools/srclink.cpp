// srclink: command-line front end for the linking pipeline.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "srclink/align.hpp"
#include "srclink/config_file.hpp"
#include "srclink/corpus.hpp"
#include "srclink/decompose.hpp"
#include "srclink/error.hpp"
#include "srclink/experiment.hpp"
#include "srclink/synth.hpp"
#include "srclink/vectorspace.hpp"

namespace fs = std::filesystem;
using namespace srclink;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = ".";
  std::size_t threads = 1;
};

// Experiment options shared by vectorize / fit-* / rank / eval / grid.
struct ExperimentFlags {
  std::string manifest;
  std::string scheme = "tfidf";
  std::optional<std::size_t> tsvd_k;
  std::optional<std::size_t> cca_dims;
  double max_df = kDefaultMaxDf;
  double train_fraction = 0.7;
  std::string idf = "smooth";
  std::size_t n_iter = 7;
  double epsilon = kDefaultCcaEpsilon;
  std::size_t top_k = kDefaultTopK;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--manifest", f.manifest, "Manifest directory");
  cmd->add_option("--scheme", f.scheme, "binary | tf | tfidf")->capture_default_str();
  cmd->add_option("--tsvd-k", f.tsvd_k, "T-SVD components (implies reduction tsvd)");
  cmd->add_option("--cca-dims", f.cca_dims, "CCA dimensions (requires --tsvd-k)");
  cmd->add_option("--max-df", f.max_df)->capture_default_str();
  cmd->add_option("--train-fraction", f.train_fraction)->capture_default_str();
  cmd->add_option("--idf", f.idf, "smooth | raw")->capture_default_str();
  cmd->add_option("--tsvd-iter", f.n_iter)->capture_default_str();
  cmd->add_option("--cca-epsilon", f.epsilon)->capture_default_str();
  cmd->add_option("--top-k", f.top_k)->capture_default_str();
}

ExperimentConfig to_config(const ExperimentFlags& f, const Globals& g) {
  ExperimentConfig c;
  c.scheme = parse_weighting_scheme(f.scheme);
  c.reduction = f.tsvd_k ? Reduction::tsvd : Reduction::threshold_only;
  c.tsvd_k = f.tsvd_k;
  c.cca_dims = f.cca_dims;
  c.max_df = f.max_df;
  c.train_fraction = f.train_fraction;
  c.seed = g.seed;
  c.manifest_path = f.manifest;
  c.idf_variant = parse_idf_variant(f.idf);
  c.tsvd_n_iter = f.n_iter;
  c.cca_epsilon = f.epsilon;
  c.top_k = f.top_k;
  return c;
}

// --config wins over flags; a config file may hold several experiments.
std::vector<ExperimentConfig> resolve_configs(const ExperimentFlags& f, const Globals& g) {
  if (!g.config.empty()) return load_config(g.config);
  if (f.manifest.empty()) throw ContractViolation("--manifest or --config is required");
  return {to_config(f, g)};
}

ExperimentConfig single_config(const ExperimentFlags& f, const Globals& g) {
  auto configs = resolve_configs(f, g);
  if (configs.size() != 1) throw ContractViolation("expected exactly one experiment in the config");
  validate(configs.front());
  return configs.front();
}

fs::path out_dir(const Globals& g) {
  fs::create_directories(g.out);
  return g.out;
}

std::vector<Document> import_documents(const fs::path& path) {
  if (path.extension() == ".xml") {
    auto imported = import_pubmed_xml(path);
    if (imported.skipped_without_pmid) {
      std::cerr << "skipped " << imported.skipped_without_pmid << " records without PMID\n";
    }
    return std::move(imported.documents);
  }
  return import_jsonl(path);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

EmbeddingMatrix gather_projected(const TsvdModel& model, const std::vector<SparseVector>& all,
                                 const std::vector<std::size_t>& rows) {
  std::vector<SparseVector> picked;
  picked.reserve(rows.size());
  for (std::size_t r : rows) picked.push_back(all[r]);
  return project(model, picked);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link webpages to the research articles they cite"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for splits, T-SVD and the synthetic generator")->capture_default_str();
  app.add_option("--config", g.config, "Experiment or grid config file");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Ranking threads (0 = all cores)")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build a manifest from document dumps and a links CSV");
  std::string articles_path, webpages_path, links_path;
  FilterParams filters;
  bool no_english = false;
  ingest->add_option("--articles", articles_path, "PubMed efetch XML or JSONL")->required();
  ingest->add_option("--webpages", webpages_path, "JSONL")->required();
  ingest->add_option("--links", links_path, "CSV article_id,webpage_id")->required();
  ingest->add_option("--min-words", filters.min_words)->capture_default_str();
  ingest->add_option("--dedup-fraction", filters.dedup_fraction)->capture_default_str();
  ingest->add_option("--train-fraction", filters.train_fraction)->capture_default_str();
  ingest->add_flag("--no-english-filter", no_english);

  // dedup
  auto* dedup = app.add_subcommand("dedup", "Collapse near-duplicate webpages sharing an article");
  std::string dedup_pages_path, dedup_links;
  DedupOptions dedup_options;
  bool random_rep = false;
  dedup->add_option("--webpages", dedup_pages_path, "JSONL")->required();
  dedup->add_option("--links", dedup_links, "CSV")->required();
  dedup->add_option("--fraction", dedup_options.fraction)->capture_default_str();
  dedup->add_flag("--random-representative", random_rep, "Pick representatives at random (uses --seed)");

  // split
  auto* split = app.add_subcommand("split", "Partition links into train/test");
  std::string split_links_path;
  double split_fraction = 0.7;
  split->add_option("--links", split_links_path, "CSV")->required();
  split->add_option("--train-fraction", split_fraction)->capture_default_str();

  ExperimentFlags vec_flags, tsvd_flags, cca_flags, rank_flags, eval_flags;
  auto* vectorize_cmd = app.add_subcommand("vectorize", "Fit the vocabulary and write sparse vectors");
  add_experiment_flags(vectorize_cmd, vec_flags);
  auto* fit_tsvd_cmd = app.add_subcommand("fit-tsvd", "Fit T-SVD on the training stack");
  add_experiment_flags(fit_tsvd_cmd, tsvd_flags);
  auto* fit_cca_cmd = app.add_subcommand("fit-cca", "Fit CCA on T-SVD projected training pairs");
  add_experiment_flags(fit_cca_cmd, cca_flags);
  auto* rank_cmd = app.add_subcommand("rank", "Rank candidates for every test webpage");
  add_experiment_flags(rank_cmd, rank_flags);
  auto* eval_cmd = app.add_subcommand("eval", "Run experiments and print summaries");
  add_experiment_flags(eval_cmd, eval_flags);

  auto* grid = app.add_subcommand("grid", "Run a grid of experiments and write grid.csv + curves");
  std::string preset;
  std::string grid_manifest;
  grid->add_option("--preset", preset, "phase1 | phase2 (when no --config)")
      ->check(CLI::IsMember({"phase1", "phase2"}));
  grid->add_option("--manifest", grid_manifest, "Manifest directory for --preset");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic linked corpus as a manifest");
  SynthParams sp;
  synth->add_option("--distractors", sp.n_distractors)->capture_default_str();
  synth->add_option("--pairs", sp.n_pairs)->capture_default_str();
  synth->add_option("--rho", sp.rho, "Fraction of content tokens rewritten")->capture_default_str();
  synth->add_option("--topics", sp.n_topics)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  const RunOptions run_options{g.threads};

  try {
    if (*ingest) {
      filters.english_filter = !no_english;
      IngestReport report;
      auto manifest = build_manifest(import_documents(articles_path), import_jsonl(webpages_path),
                                     read_links_csv(links_path), filters, g.seed, &report);
      write_manifest(manifest, out_dir(g));
      const nlohmann::ordered_json j = {
          {"articles_in", report.articles_in},       {"webpages_in", report.webpages_in},
          {"articles_short", report.articles_short}, {"webpages_short", report.webpages_short},
          {"webpages_non_english", report.webpages_non_english},
          {"webpages_duplicate", report.webpages_duplicate},
          {"residual_violations", report.residual_violations},
          {"raw_links", report.raw_links},           {"dangling_links", report.dangling_links},
          {"resolved_links", report.resolved_links},
      };
      std::cout << j.dump(2) << '\n';
    } else if (*dedup) {
      dedup_options.seed = g.seed;
      dedup_options.rule = random_rep ? RepresentativeRule::random : RepresentativeRule::longest;
      const auto pages = import_jsonl(dedup_pages_path);
      const auto links = read_links_csv(dedup_links);
      const auto result = dedup_webpages(pages, links, dedup_options);
      const fs::path dir = out_dir(g);
      write_jsonl(dir / "webpages.jsonl", result.retained);
      std::ofstream removed(dir / "removed.txt");
      for (const auto& id : result.removed_ids) removed << id << '\n';
      for (const auto& v : result.residual_violations) {
        std::cerr << "residual overlap " << v.overlap << ": " << v.first << " / " << v.second << '\n';
      }
      std::cout << "retained " << result.retained.size() << ", removed " << result.removed_ids.size() << '\n';
    } else if (*split) {
      const auto links = read_links_csv(split_links_path);
      const auto parts = split_links(links, split_fraction, g.seed);
      std::ofstream out(out_dir(g) / "split.csv");
      out << "article_id,webpage_id,partition\n";
      for (std::size_t i = 0; i < links.size(); ++i) {
        out << csv_field(links[i].article_id) << ',' << csv_field(links[i].webpage_id) << ','
            << to_string(parts[i]) << '\n';
      }
    } else if (*vectorize_cmd) {
      const auto config = single_config(vec_flags, g);
      auto ctx = ExperimentContext::load(config.manifest_path);
      const fs::path dir = out_dir(g);
      write_vocabulary(ctx.vocabulary(config), dir);
      write_vectors(dir / "articles.evsp", ctx.article_vectors(config));
      write_vectors(dir / "webpages.evsp", ctx.webpage_vectors(config));
      std::cout << "vocabulary " << ctx.vocabulary(config).size() << " terms\n";
    } else if (*fit_tsvd_cmd) {
      const auto config = single_config(tsvd_flags, g);
      if (!config.tsvd_k) throw ContractViolation("fit-tsvd needs --tsvd-k");
      auto ctx = ExperimentContext::load(config.manifest_path);
      const TsvdModel& model = ctx.tsvd(config);
      write_tsvd(model, out_dir(g) / "tsvd.bin");
      std::cout << "top singular value " << model.singular_values(0) << '\n';
    } else if (*fit_cca_cmd) {
      const auto config = single_config(cca_flags, g);
      if (!config.cca_dims) throw ContractViolation("fit-cca needs --tsvd-k and --cca-dims");
      auto ctx = ExperimentContext::load(config.manifest_path);
      const auto& s = ctx.split(config.train_fraction, config.seed);
      std::vector<std::size_t> web_rows, art_rows;
      for (std::size_t i : s.train) {
        web_rows.push_back(ctx.webpage_index(ctx.manifest().links[i].webpage_id));
        art_rows.push_back(ctx.article_index(ctx.manifest().links[i].article_id));
      }
      const TsvdModel& model = ctx.tsvd(config);
      const CcaModel cca = fit_cca(gather_projected(model, ctx.webpage_vectors(config), web_rows),
                                   gather_projected(model, ctx.article_vectors(config), art_rows),
                                   *config.cca_dims, config.cca_epsilon);
      const fs::path dir = out_dir(g);
      write_tsvd(model, dir / "tsvd.bin");
      write_cca(cca, dir / "cca.bin");
      std::cout << "leading correlation " << cca.correlations(0) << '\n';
    } else if (*rank_cmd) {
      const auto config = single_config(rank_flags, g);
      auto ctx = ExperimentContext::load(config.manifest_path);
      const auto output = run_experiment_detailed(ctx, config, run_options);
      const fs::path dir = out_dir(g);
      write_rankings_jsonl(dir / ("rankings_" + experiment_id(config) + ".jsonl"), output.rankings);
      std::cout << summary_json(output.summary) << '\n';
      if (output.summary.status != RunStatus::ok) return 2;
    } else if (*eval_cmd) {
      const auto configs = resolve_configs(eval_flags, g);
      const auto rows = run_grid(configs, run_options);
      for (const auto& row : rows) std::cout << summary_json(row) << '\n';
    } else if (*grid) {
      std::vector<ExperimentConfig> configs;
      if (!g.config.empty()) {
        configs = load_config(g.config);
      } else {
        if (preset.empty() || grid_manifest.empty()) {
          throw ContractViolation("grid needs --config, or --preset with --manifest");
        }
        ExperimentConfig base;
        base.seed = g.seed;
        base.manifest_path = grid_manifest;
        configs = preset == "phase1" ? phase1_grid(base) : phase2_grid(base);
      }
      const auto rows = run_grid(configs, run_options);
      write_grid_report(out_dir(g), rows);
      write_grid_csv(std::cout, rows);
    } else if (*synth) {
      sp.seed = g.seed;
      const auto manifest = synthetic_manifest(sp, g.seed);
      write_manifest(manifest, out_dir(g));
      std::cout << "articles " << manifest.articles.size() << ", webpages " << manifest.webpages.size()
                << ", links " << manifest.links.size() << ", distractors " << manifest.distractors.size()
                << '\n';
    }
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
