#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "srclink/corpus.hpp"

namespace srclink {

// Synthetic linked corpus standing in for the non-redistributable one.
//
// Articles mix a Zipfian background vocabulary (headed by English function
// words), words from one or two topics, and a few document-specific rare
// terms. Each linked webpage rewrites its article: a fraction rho of content
// tokens is swapped through a fixed synonym map, and filler sentences of
// background words are added around it.
struct SynthParams {
  std::size_t n_distractors = 2000;
  std::size_t n_pairs = 300;
  double rho = 0.3;
  std::uint64_t seed = 0;
  std::size_t n_topics = 100;
  std::size_t background_size = 3000;
  std::size_t technical_size = 6000;
};

struct SynthCorpus {
  std::vector<Document> articles;
  std::vector<Document> webpages;
  std::vector<KnownLink> links;
};

SynthCorpus generate_synthetic(const SynthParams& params);

// Runs the corpus pipeline on a generated corpus; the parameters are recorded
// under "extra.synthetic" in manifest.json.
CorpusManifest synthetic_manifest(const SynthParams& params, std::uint64_t split_seed);

}  // namespace srclink
