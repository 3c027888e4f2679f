#pragma once

#include <fstream>
#include <string>

#include "hlas/env.hpp"
#include "hlas/net.hpp"
#include "hlas/trainer.hpp"

namespace hlas {

inline constexpr int kCheckpointFormatVersion = 1;

// Self-describing training artifact: everything needed to resume training or
// evaluate the policy, minus the environment itself (which is rebuilt from
// the experiment config carried by digest).
struct Checkpoint {
  std::string config_digest;
  std::uint64_t seed = 0;
  double best_avg_return = 0.0;  // NaN until the first 100-episode average
  TrainerSnapshot trainer;
  PolicyParams policy;  // arch + weights + log_std + obs_scales
  AdamState adam;
};

// JSON, weight matrices row-major, doubles in shortest round-trip form so
// save -> load -> save is byte-stable and load reproduces every bit.
void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

// Shortest decimal form that parses back to the same double ("nan"/"inf"
// spelled out; the JSON serializer would turn them into null).
std::string num_str(double v);

// Append-only iteration metrics; a '#' header line carries the config digest
// and seed so any two logs with equal digest+seed line up row-for-row.
class TrainingLog {
 public:
  TrainingLog(const std::string& path, const std::string& config_digest,
              std::uint64_t seed, bool append);
  void add(const IterationMetrics& m);

 private:
  std::ofstream out_;
};

// Per-dt trajectory rows in the fixed column order; termination_cause is
// blank except on the row that ends the episode.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::string& path, const std::string& config_digest,
                   std::uint64_t seed);
  void add(const ReentryEnv::TraceRow& row);
  ReentryEnv::TraceSink sink();

 private:
  std::ofstream out_;
};

}  // namespace hlas
