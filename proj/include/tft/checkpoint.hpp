#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "data/pipeline.hpp"
#include "tft/params.hpp"

namespace tft {

// Self-describing model container: canonical parameter paths with shapes and
// row-major values, plus the config, the normalization statistics and the
// data schema needed to rebuild samples at inference time. JSON on disk;
// doubles survive the round trip losslessly.
struct Checkpoint {
  TftConfig config;
  TftParams params;
  data::NormStats norm;
  std::string target;
  std::vector<std::string> covariates;
  std::uint64_t init_seed = 0;
};

void save_checkpoint(const std::filesystem::path& file, Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace tft
