#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "monotonn/data.hpp"
#include "monotonn/errors.hpp"
#include "monotonn/loss.hpp"
#include "monotonn/model.hpp"

namespace monotonn {

enum class TrainRegime { kWeighted, kSwitching };

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 64;
  int epochs = 50;
  double penalty_weight = 1.0;
  TrainRegime regime = TrainRegime::kWeighted;
  /// Switching regime: minibatches per phase. Phases alternate between
  /// optimizing the empirical risk alone and the penalty term alone,
  /// starting with the empirical phase. The per-phase overrides allow
  /// asymmetric schedules; 0 means "use switch_frequency".
  int switch_frequency = 0;
  int empirical_phase_steps = 0;
  int penalty_phase_steps = 0;
  std::uint64_t seed = 0;
  bool shuffle = true;
  /// Train on the empirical risk only, ignoring the penalty machinery
  /// entirely. penalty_weight 0 under the weighted regime takes the same
  /// code path, so the two are bit-identical under the same seed.
  bool plain = false;
  /// Per-epoch monotonicity probes: fixed random subsample of the
  /// training set, capped at this size.
  int probe_size = 500;
  int probe_resolution = 20;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;       // 1-based
  double empirical = 0.0;  // mean per-example risk seen this epoch
  double penalty = 0.0;    // mean per-example hinge (probe estimate when not computed in steps)
  std::vector<double> mk;  // per monotone feature, on the probe set
  double seconds = 0.0;    // wall-clock since training started, probes included
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::vector<int> mk_features;  // feature index per mk column
  double train_seconds = 0.0;    // optimization time only
  double total_seconds = 0.0;    // including per-epoch metric probes
};

struct TrainResult {
  MlpModel model;
  TrainLog log;
};

/// Divergent training: carries the last finite parameters and the log up
/// to the failed step.
class TrainDivergence : public NumericError {
 public:
  TrainDivergence(const std::string& what, MlpModel checkpoint, TrainLog log)
      : NumericError(what), checkpoint(std::move(checkpoint)), log(std::move(log)) {}
  MlpModel checkpoint;
  TrainLog log;
};

/// One epoch's batch index sequence: a partition of [0, n) into
/// consecutive chunks of batch_size (last one may be short), over indices
/// shuffled deterministically by seed when shuffle is set.
std::vector<std::vector<int>> minibatches(int n, int batch_size, std::uint64_t seed, bool shuffle);

/// Minibatch SGD on the combined objective. Deterministic given the
/// config seed. Steps move parameters by exactly -learning_rate * gradient.
TrainResult train(const MlpModel& model, const Dataset& ds, const MonotoneSpec& spec,
                  const TrainConfig& config);

void write_train_log_csv(const TrainLog& log, const std::string& path);

}  // namespace monotonn
