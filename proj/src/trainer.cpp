#include "monotonn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>

#include "monotonn/metrics.hpp"

namespace monotonn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

double elapsed_seconds(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning rate must be positive");
  if (batch_size < 1) throw ConfigError("train: batch size must be positive");
  if (epochs < 1) throw ConfigError("train: epoch count must be positive");
  if (penalty_weight < 0.0) throw ConfigError("train: penalty weight must be nonnegative");
  if (regime == TrainRegime::kSwitching && !plain) {
    const int emp = empirical_phase_steps > 0 ? empirical_phase_steps : switch_frequency;
    const int pen = penalty_phase_steps > 0 ? penalty_phase_steps : switch_frequency;
    if (emp < 1 || pen < 1) {
      throw ConfigError("train: switching regime requires a positive switch frequency");
    }
  }
  if (probe_size < 1) throw ConfigError("train: probe size must be positive");
  if (probe_resolution < 2) throw ConfigError("train: probe resolution must be at least 2");
}

std::vector<std::vector<int>> minibatches(int n, int batch_size, std::uint64_t seed, bool shuffle) {
  if (batch_size < 1) throw ConfigError("minibatches: batch size must be positive");
  if (batch_size > n) throw ConfigError("minibatches: batch size exceeds dataset size");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  if (shuffle) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
  }
  std::vector<std::vector<int>> batches;
  for (int at = 0; at < n; at += batch_size) {
    const int end = std::min(at + batch_size, n);
    batches.emplace_back(idx.begin() + at, idx.begin() + end);
  }
  return batches;
}

TrainResult train(const MlpModel& model, const Dataset& ds, const MonotoneSpec& spec,
                  const TrainConfig& config) {
  config.validate();
  if (ds.n() == 0) throw ConfigError("train: empty dataset");
  if (ds.dim() != model.input_dim()) {
    throw ConfigError("train: dataset width does not match model input dimension");
  }
  const bool classification = ds.task == TaskKind::kClassification;
  if (classification && model.output_activation != OutputActivation::kSigmoid) {
    throw ConfigError("train: classification data needs a sigmoid-output model");
  }
  if (!classification && model.output_activation != OutputActivation::kIdentity) {
    throw ConfigError("train: regression data needs an identity-output model");
  }
  spec.validate(static_cast<int>(ds.dim()));
  if (config.batch_size > ds.n()) {
    throw ConfigError("train: batch size exceeds dataset size");
  }

  // Penalty machinery is bypassed entirely when it cannot contribute, so
  // weighted training at weight 0 is the plain path, bit for bit.
  const bool plain = config.plain ||
                     (config.regime == TrainRegime::kWeighted && config.penalty_weight == 0.0);
  const bool switching = !plain && config.regime == TrainRegime::kSwitching;
  const int emp_phase = config.empirical_phase_steps > 0 ? config.empirical_phase_steps
                                                         : config.switch_frequency;
  const int pen_phase = config.penalty_phase_steps > 0 ? config.penalty_phase_steps
                                                       : config.switch_frequency;

  MlpModel current = model;
  Eigen::VectorXd theta = get_parameters(current);
  const Eigen::Index param_count = theta.size();

  ObjectiveProgram empirical_prog(current, ds.task, spec, ObjectiveProgram::Kind::kEmpirical);
  std::unique_ptr<ObjectiveProgram> penalty_prog;
  std::unique_ptr<ObjectiveProgram> total_prog;
  if (switching) {
    penalty_prog = std::make_unique<ObjectiveProgram>(current, ds.task, spec,
                                                      ObjectiveProgram::Kind::kPenalty);
  } else if (!plain) {
    total_prog = std::make_unique<ObjectiveProgram>(current, ds.task, spec,
                                                    ObjectiveProgram::Kind::kTotal);
  }

  // Fixed probe subset for the per-epoch monotonicity columns.
  const int probe_n = static_cast<int>(std::min<Eigen::Index>(config.probe_size, ds.n()));
  std::vector<int> probe_idx(static_cast<std::size_t>(ds.n()));
  std::iota(probe_idx.begin(), probe_idx.end(), 0);
  {
    std::mt19937_64 rng(derive_seed(config.seed, 0x70726f6265ULL));  // probe stream
    std::shuffle(probe_idx.begin(), probe_idx.end(), rng);
    probe_idx.resize(static_cast<std::size_t>(probe_n));
    std::sort(probe_idx.begin(), probe_idx.end());
  }
  Eigen::MatrixXd probe(probe_n, ds.dim());
  for (int i = 0; i < probe_n; ++i) probe.row(i) = ds.features.row(probe_idx[static_cast<std::size_t>(i)]);

  TrainLog log;
  for (const MonotoneEntry& e : spec.entries) log.mk_features.push_back(e.feature_index);

  const auto started = std::chrono::steady_clock::now();
  double train_seconds = 0.0;
  Eigen::VectorXd grad(param_count);
  Eigen::VectorXd x(ds.dim());
  long long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto epoch_started = std::chrono::steady_clock::now();
    const std::vector<std::vector<int>> batches = minibatches(
        static_cast<int>(ds.n()), config.batch_size,
        derive_seed(config.seed, static_cast<std::uint64_t>(epoch)), config.shuffle);

    double emp_sum = 0.0;
    long long emp_count = 0;
    double pen_sum = 0.0;
    long long pen_count = 0;

    for (const std::vector<int>& batch : batches) {
      ObjectiveProgram* prog = &empirical_prog;
      double c_emp = 0.0;
      double c_pen = 0.0;
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      if (plain) {
        c_emp = inv_b;
      } else if (switching) {
        const long long phase_pos = step % (emp_phase + pen_phase);
        if (phase_pos < emp_phase) {
          c_emp = inv_b;
        } else {
          prog = penalty_prog.get();
          c_pen = config.penalty_weight * inv_b;
        }
      } else {
        prog = total_prog.get();
        c_emp = inv_b;
        c_pen = config.penalty_weight * inv_b;
      }

      // On any numeric failure, abort with the parameters as of the last
      // completed step.
      auto diverged = [&](const char* why) {
        set_parameters(current, theta);
        log.train_seconds = train_seconds + elapsed_seconds(epoch_started);
        log.total_seconds = elapsed_seconds(started);
        return TrainDivergence(std::string("train: diverged at epoch ") +
                                   std::to_string(epoch + 1) + ", step " +
                                   std::to_string(step + 1) + ": " + why,
                               current, log);
      };
      grad.setZero();
      try {
        prog->set_theta(theta);
        for (int i : batch) {
          x = ds.features.row(i);
          const ObjectiveProgram::Values v = prog->eval(x, ds.labels[i], c_emp, c_pen, &grad);
          emp_sum += v.empirical;
          ++emp_count;
          if (prog->kind() != ObjectiveProgram::Kind::kEmpirical) {
            pen_sum += v.penalty;
            ++pen_count;
          }
        }
        if (!grad.allFinite()) throw NumericError("train: non-finite gradient");
        const Eigen::VectorXd next = theta - config.learning_rate * grad;
        if (!next.allFinite()) throw NumericError("train: parameter update overflowed");
        theta = next;
      } catch (const EvalError& e) {
        throw diverged(e.what());
      } catch (const NumericError& e) {
        throw diverged(e.what());
      }
      ++step;
    }
    train_seconds += elapsed_seconds(epoch_started);
    set_parameters(current, theta);

    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.empirical = emp_count > 0 ? emp_sum / static_cast<double>(emp_count) : 0.0;
    if (pen_count > 0) {
      rec.penalty = pen_sum / static_cast<double>(pen_count);
    } else {
      // Penalty never evaluated during this epoch's steps; estimate the
      // per-example mean on the probe set instead.
      rec.penalty = penalty(current, probe, spec) / static_cast<double>(probe_n);
    }
    const MonotonicityReport probe_report =
        monotonicity_metric([&](const Eigen::VectorXd& p) { return score(current, p); }, probe,
                            spec, config.probe_resolution);
    for (const FeatureMonotonicity& fm : probe_report.features) rec.mk.push_back(fm.mk);
    rec.seconds = elapsed_seconds(started);
    log.epochs.push_back(std::move(rec));
  }

  log.train_seconds = train_seconds;
  log.total_seconds = elapsed_seconds(started);
  return {std::move(current), std::move(log)};
}

void write_train_log_csv(const TrainLog& log, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("train log: cannot open '" + path + "' for writing");
  f << "epoch,empirical,penalty";
  for (int idx : log.mk_features) f << ",mk_" << idx;
  f << ",seconds\n";
  char buf[64];
  for (const EpochRecord& r : log.epochs) {
    f << r.epoch;
    std::snprintf(buf, sizeof(buf), "%.17g", r.empirical);
    f << "," << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", r.penalty);
    f << "," << buf;
    for (double mk : r.mk) {
      std::snprintf(buf, sizeof(buf), "%.17g", mk);
      f << "," << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.3f", r.seconds);
    f << "," << buf << "\n";
  }
  if (!f) throw IoError("train log: write to '" + path + "' failed");
}

}  // namespace monotonn
