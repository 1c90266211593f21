#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace monotonn {

enum class TaskKind { kRegression, kClassification };

enum class FeatureKind { kContinuous, kOneHot };

struct FeatureInfo {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  /// One-hot group id; -1 for continuous features.
  int group = -1;
  /// Min-max scaling recorded at fit time (continuous features only).
  double scale_min = 0.0;
  double scale_max = 1.0;
};

/// Immutable after construction; safe to share across threads.
struct Dataset {
  Eigen::MatrixXd features;  // n x D
  Eigen::VectorXd labels;    // length n
  TaskKind task = TaskKind::kRegression;
  std::vector<FeatureInfo> feature_info;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  /// Index of a named feature, or -1 when absent.
  int feature_index(const std::string& name) const;
};

/// Checks the dataset invariants: finite entries, labels matching the
/// task, and (on a fitting split) one-hot groups summing to one.
void validate_dataset(const Dataset& ds, bool fitting_split);

struct SyntheticSpec {
  int n = 10000;
  std::uint64_t seed = 0;
  double noise_std = 0.0;
};

/// Two uniform features on [0,1]^2, label sin(x) + e^y plus optional
/// Gaussian noise. The monotone feature is y (index 1), non-decreasing.
Dataset generate_synthetic(const SyntheticSpec& spec);

struct AdultLoadInfo {
  int train_rows_read = 0;
  int test_rows_read = 0;
  int train_rows_dropped = 0;  // rows containing missing '?' fields
  int test_rows_dropped = 0;
  int width = 0;  // realized encoded feature count
  std::vector<std::string> warnings;
};

struct AdultData {
  Dataset train;
  Dataset test;
  AdultLoadInfo info;
};

/// Census income files in the original comma+space layout. The test
/// file's comment line and trailing label periods are handled. Rows with
/// missing '?' values are dropped. Categorical columns are one-hot
/// encoded on training categories (unknown test categories become an
/// all-zero group, with a warning); continuous columns are min-max
/// scaled with statistics fitted on the training split. The redundant
/// education string column is dropped in favour of education-num.
AdultData load_adult(const std::string& train_path, const std::string& test_path);

/// Deterministic disjoint split; first part holds round(fraction * n) rows.
std::pair<Dataset, Dataset> split(const Dataset& ds, double fraction, std::uint64_t seed);

/// Canonical dataset cache. Columns are the feature names plus a final
/// `label` column; one-hot columns keep their `column=value` names so the
/// group structure survives a round trip.
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path, std::optional<TaskKind> task = std::nullopt);

}  // namespace monotonn
