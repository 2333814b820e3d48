#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "srclink/experiment.hpp"

namespace srclink {

// Line-oriented `key = value` text with `#` comments.
//
// Keys before any section are defaults for every experiment. Each
// `[experiment]` section adds one configuration; each `[grid]` section expands
// to many (keys: preset = phase1|phase2, schemes, tsvd_k, cca_dims,
// include_threshold, include_no_cca, plus any default key). List values are
// comma-separated. Unknown keys and malformed values raise ParseError with
// the line number. Relative manifest paths resolve against base_dir.
std::vector<ExperimentConfig> parse_config(std::string_view text,
                                           const std::filesystem::path& base_dir = {});
std::vector<ExperimentConfig> load_config(const std::filesystem::path& path);

}  // namespace srclink
