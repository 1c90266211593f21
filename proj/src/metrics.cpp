#include "monotonn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "monotonn/errors.hpp"

namespace monotonn {

SweepGrid SweepGrid::uniform(int feature_index, double lo, double hi, int resolution) {
  if (resolution < 2) throw ConfigError("sweep grid: resolution must be at least 2");
  if (!(lo < hi)) throw ConfigError("sweep grid: lo must be below hi");
  SweepGrid g;
  g.feature_index = feature_index;
  g.points.resize(static_cast<std::size_t>(resolution));
  const double step = (hi - lo) / static_cast<double>(resolution);
  for (int t = 0; t < resolution; ++t) {
    g.points[static_cast<std::size_t>(t)] = lo + step * static_cast<double>(t);
  }
  for (std::size_t t = 1; t < g.points.size(); ++t) {
    if (!(g.points[t] > g.points[t - 1])) {
      throw ConfigError("sweep grid: range too narrow for the requested resolution");
    }
  }
  return g;
}

double MonotonicityReport::mean_mk() const {
  if (features.empty()) return 0.0;
  double sum = 0.0;
  for (const FeatureMonotonicity& f : features) sum += f.mk;
  return sum / static_cast<double>(features.size());
}

MonotonicityReport monotonicity_metric(const ScoreFn& score_fn, const Eigen::MatrixXd& features,
                                       const MonotoneSpec& spec, int resolution,
                                       double tolerance) {
  if (features.rows() == 0) throw ConfigError("monotonicity metric: empty dataset");
  spec.validate(static_cast<int>(features.cols()));
  if (resolution < 2) throw ConfigError("monotonicity metric: resolution must be at least 2");

  MonotonicityReport report;
  const int n = static_cast<int>(features.rows());
  for (const MonotoneEntry& e : spec.entries) {
    const SweepGrid grid = SweepGrid::uniform(e.feature_index, e.sweep_min, e.sweep_max, resolution);
    FeatureMonotonicity fm;
    fm.feature_index = e.feature_index;
    fm.delta.assign(static_cast<std::size_t>(n), 1);
    int monotone = 0;
    Eigen::VectorXd x(features.cols());
    for (int i = 0; i < n; ++i) {
      x = features.row(i);
      bool ok = true;
      double prev = 0.0;
      for (std::size_t t = 0; t < grid.points.size(); ++t) {
        x[e.feature_index] = grid.points[t];
        const double folded = e.direction * score_fn(x);
        if (t > 0 && folded - prev < -tolerance) {
          ok = false;
          fm.violations.emplace_back(i, static_cast<int>(t) - 1);
        }
        prev = folded;
      }
      fm.delta[static_cast<std::size_t>(i)] = ok ? 1 : 0;
      monotone += ok ? 1 : 0;
    }
    fm.mk = static_cast<double>(monotone) / static_cast<double>(n);
    report.features.push_back(std::move(fm));
  }
  return report;
}

MonotonicityReport monotonicity_metric(const MlpModel& model, const Dataset& ds,
                                       const MonotoneSpec& spec, int resolution,
                                       double tolerance) {
  return monotonicity_metric([&model](const Eigen::VectorXd& x) { return score(model, x); },
                             ds.features, spec, resolution, tolerance);
}

double auc(const Eigen::Ref<const Eigen::VectorXd>& scores,
           const Eigen::Ref<const Eigen::VectorXd>& labels) {
  if (scores.size() != labels.size()) throw ConfigError("auc: score/label length mismatch");
  const Eigen::Index n = scores.size();
  if (n == 0) throw ConfigError("auc: empty input");
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw ConfigError("auc: labels must be binary");
    }
    positives += labels[i] == 1.0 ? 1 : 0;
  }
  if (positives == 0 || positives == n) {
    throw NumericError("auc: undefined with a single class");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

  // Average ranks across ties, accumulate ranks of positives.
  double rank_sum_pos = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && scores[order[static_cast<std::size_t>(j + 1)]] ==
                            scores[order[static_cast<std::size_t>(i)]]) {
      ++j;
    }
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (Eigen::Index k = i; k <= j; ++k) {
      if (labels[order[static_cast<std::size_t>(k)]] == 1.0) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(n - positives);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

std::vector<TrendCurve> conditioned_trends(const MlpModel& model,
                                           const Eigen::Ref<const Eigen::MatrixXd>& anchors,
                                           const SweepGrid& grid) {
  if (anchors.rows() == 0) throw ConfigError("conditioned trends: no anchor points");
  if (grid.feature_index < 0 || grid.feature_index >= anchors.cols()) {
    throw ConfigError("conditioned trends: feature index out of range");
  }
  std::vector<TrendCurve> curves;
  curves.reserve(static_cast<std::size_t>(anchors.rows()));
  Eigen::VectorXd x(anchors.cols());
  for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
    TrendCurve c;
    c.anchor_index = static_cast<int>(i);
    c.grid = grid.points;
    c.score.reserve(grid.points.size());
    x = anchors.row(i);
    for (double v : grid.points) {
      x[grid.feature_index] = v;
      c.score.push_back(score(model, x));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

double pearson_correlation(const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw ConfigError("pearson: length mismatch");
  if (a.size() < 2) throw ConfigError("pearson: need at least two samples");
  const double ma = a.mean();
  const double mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma;
  const Eigen::ArrayXd db = b.array() - mb;
  const double va = (da * da).sum();
  const double vb = (db * db).sum();
  if (va == 0.0 || vb == 0.0) {
    throw NumericError("pearson: undefined for zero-variance input");
  }
  return (da * db).sum() / std::sqrt(va * vb);
}

namespace {

void open_or_throw(std::ofstream& f, const std::string& path) {
  f.open(path, std::ios::binary);
  if (!f) throw IoError("metrics: cannot open '" + path + "' for writing");
}

}  // namespace

void write_mk_csv(const MonotonicityReport& report, const std::string& path) {
  std::ofstream f;
  open_or_throw(f, path);
  f << "feature,mk\n";
  char buf[64];
  for (const FeatureMonotonicity& fm : report.features) {
    std::snprintf(buf, sizeof(buf), "%.17g", fm.mk);
    f << fm.feature_index << "," << buf << "\n";
  }
}

void write_delta_csv(const MonotonicityReport& report, const std::string& path) {
  std::ofstream f;
  open_or_throw(f, path);
  f << "feature,sample_id,delta\n";
  for (const FeatureMonotonicity& fm : report.features) {
    for (std::size_t i = 0; i < fm.delta.size(); ++i) {
      f << fm.feature_index << "," << i << "," << static_cast<int>(fm.delta[i]) << "\n";
    }
  }
}

void write_trends_csv(const std::vector<TrendCurve>& curves, int feature_index,
                      const std::string& path) {
  std::ofstream f;
  open_or_throw(f, path);
  f << "sample_id,feature,grid_value,score\n";
  char buf[64];
  for (const TrendCurve& c : curves) {
    for (std::size_t t = 0; t < c.grid.size(); ++t) {
      f << c.anchor_index << "," << feature_index << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", c.grid[t]);
      f << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", c.score[t]);
      f << buf << "\n";
    }
  }
}

}  // namespace monotonn
