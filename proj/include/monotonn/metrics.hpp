#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "monotonn/data.hpp"
#include "monotonn/loss.hpp"
#include "monotonn/model.hpp"

namespace monotonn {

/// Evenly spaced sweep over [lo, hi): first point lo, last point below hi.
struct SweepGrid {
  int feature_index = 0;
  std::vector<double> points;

  static SweepGrid uniform(int feature_index, double lo, double hi, int resolution);
};

struct FeatureMonotonicity {
  int feature_index = 0;
  double mk = 0.0;
  /// Per-sample indicator: 1 when every forward difference of the
  /// direction-folded score along the sweep is >= -tolerance.
  std::vector<std::uint8_t> delta;
  /// (sample index, grid segment) of each violated forward difference.
  std::vector<std::pair<int, int>> violations;
};

struct MonotonicityReport {
  std::vector<FeatureMonotonicity> features;
  double mean_mk() const;
};

using ScoreFn = std::function<double(const Eigen::VectorXd&)>;

/// Per-sample one-dimensional sweeps: clone the sample, move feature k
/// through the grid with every other coordinate frozen, and count the
/// fraction of samples whose folded score never decreases.
MonotonicityReport monotonicity_metric(const ScoreFn& score_fn, const Eigen::MatrixXd& features,
                                       const MonotoneSpec& spec, int resolution = 20,
                                       double tolerance = 1e-9);

/// As above, scoring with the model's pre-activation output.
MonotonicityReport monotonicity_metric(const MlpModel& model, const Dataset& ds,
                                       const MonotoneSpec& spec, int resolution = 20,
                                       double tolerance = 1e-9);

/// Mann-Whitney AUC with average-rank tie handling: the probability a
/// random positive outscores a random negative, ties counted half.
double auc(const Eigen::Ref<const Eigen::VectorXd>& scores,
           const Eigen::Ref<const Eigen::VectorXd>& labels);

struct TrendCurve {
  int anchor_index = 0;
  std::vector<double> grid;
  std::vector<double> score;
};

/// One curve per anchor row: model score along the sweep of one feature
/// with the anchor's other coordinates frozen.
std::vector<TrendCurve> conditioned_trends(const MlpModel& model,
                                           const Eigen::Ref<const Eigen::MatrixXd>& anchors,
                                           const SweepGrid& grid);

double pearson_correlation(const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& b);

/// CSV exports; UTF-8, LF line endings.
void write_mk_csv(const MonotonicityReport& report, const std::string& path);
void write_delta_csv(const MonotonicityReport& report, const std::string& path);
void write_trends_csv(const std::vector<TrendCurve>& curves, int feature_index,
                      const std::string& path);

}  // namespace monotonn
