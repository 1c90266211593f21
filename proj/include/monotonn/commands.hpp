#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "monotonn/data.hpp"
#include "monotonn/loss.hpp"
#include "monotonn/trainer.hpp"

namespace monotonn {

/// Shared dataset selection: either a canonical CSV or the census file
/// pair. Exactly one source must be set.
struct DataOptions {
  std::string data_path;         // canonical CSV
  std::string adult_train_path;  // original census layout
  std::string adult_test_path;
  std::string task;  // "", "regression" or "classification" (CSV override)
};

struct LoadedData {
  Dataset train;
  std::optional<Dataset> test;  // census pair only
  bool adult = false;
};

LoadedData load_data(const DataOptions& opts);

/// Spec string: comma-separated `feature:+1` / `feature:-1` entries where
/// feature is a column name or 0-based index. Empty string picks the
/// dataset's convention (census trio, or a `y` column).
MonotoneSpec resolve_monotone_spec(const std::string& monotone, const Dataset& train, bool adult);

struct GenerateOptions {
  int n = 10000;
  std::uint64_t seed = 0;
  double noise_std = 0.0;
  std::string out;
};

void cmd_generate(const GenerateOptions& opts);

struct TrainOptions {
  DataOptions data;
  std::string monotone;
  std::string hidden_dims = "32,11";
  std::string activation = "tanh";
  std::string init_scheme = "glorot";
  TrainConfig config;
  std::string out;       // model file
  std::string log_path;  // optional epoch log CSV
  bool quiet = false;
};

void cmd_train(const TrainOptions& opts);

struct EvaluateOptions {
  DataOptions data;
  std::string model_path;
  std::string monotone;
  std::string eval_split = "test";  // census pair: "train" or "test"
  int grid_resolution = 20;
  std::string out;        // JSON report
  std::string mk_csv;     // optional per-feature M_k export
  std::string delta_csv;  // optional per-sample indicator export
  bool quiet = false;
};

void cmd_evaluate(const EvaluateOptions& opts);

struct ContourOptions {
  std::string model_path;  // unused when analytic
  int resolution = 41;
  bool analytic = false;  // export the target sin(x)+e^y instead of a model
  std::string out;
};

void cmd_export_contour(const ContourOptions& opts);

struct TrendsOptions {
  DataOptions data;
  std::string model_path;
  std::string feature;  // name or index
  int anchors = 10;
  std::uint64_t seed = 0;
  int grid_resolution = 20;
  std::string out;
};

void cmd_export_trends(const TrendsOptions& opts);

}  // namespace monotonn
