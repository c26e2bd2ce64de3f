#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "data/pipeline.hpp"
#include "data/transient.hpp"

namespace data {

// On-disk corpus layout:
//   <dir>/manifest.json          cases, split membership, norm stats
//   <dir>/cases/<case_id>.csv    time_s,<signal>,... columns
//   <dir>/cases/<case_id>.json   sidecar metadata record
struct CorpusOnDisk {
  GeneratorConfig generator;
  std::uint64_t seed = 0;
  std::vector<TransientCase> cases;
  SplitResult split;
  NormStats norm;
};

void save_corpus(const std::filesystem::path& dir, const CorpusOnDisk& corpus);
CorpusOnDisk load_corpus(const std::filesystem::path& dir);

void write_case_csv(const std::filesystem::path& file, const TransientCase& c);
TransientCase read_case_csv(const std::filesystem::path& csv_file,
                            const std::filesystem::path& sidecar_file);

// 17-significant-digit decimal formatting; round-trips doubles exactly.
std::string format_double(double v);

}  // namespace data
