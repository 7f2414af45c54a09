#pragma once

#include "congnet/instance_gen.hpp"
#include "congnet/optim.hpp"

namespace congnet {

struct ExperimentConfig {
  std::optional<std::string> instance_file;
  std::optional<GeneratorSpec> generator;
  TrainConfig train;
  int num_seeds = 1;
  uint64_t base_seed = 0;
  std::string out_dir = ".";
  Json raw;  // the source document, kept for the digest

  static ExperimentConfig from_json(const Json& j);
};

struct SeedResult {
  uint64_t seed = 0;
  TheoremReport report;
  bool error = false;
  std::string error_message;
  double wall_ms = 0.0;
};

struct RunRecord {
  uint64_t config_digest = 0;
  std::string toolkit_version;
  std::vector<SeedResult> seeds;
  double wall_ms = 0.0;

  bool all_passed() const;
};

Json run_record_to_json(const RunRecord& rec);
std::string run_record_csv(const RunRecord& rec);

// Runs verify_theorem1 for every derived seed, writes record.json and
// summary.csv under cfg.out_dir. Failures are recorded per seed; the
// campaign always completes.
RunRecord run_campaign(const ExperimentConfig& cfg);

}  // namespace congnet
