#include "monotonn/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "monotonn/errors.hpp"
#include "monotonn/metrics.hpp"

namespace monotonn {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int resolve_feature(const std::string& token, const Dataset& ds) {
  const int by_name = ds.feature_index(token);
  if (by_name >= 0) return by_name;
  try {
    std::size_t used = 0;
    const int idx = std::stoi(token, &used);
    if (used == token.size() && idx >= 0 && idx < ds.dim()) return idx;
  } catch (const std::exception&) {
  }
  throw ConfigError("unknown feature '" + token + "'");
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> dims;
  for (const std::string& tok : split_list(s, ',')) {
    try {
      dims.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("invalid hidden layer list '" + s + "'");
    }
  }
  return dims;
}

double elapsed_seconds(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

}  // namespace

LoadedData load_data(const DataOptions& opts) {
  const bool csv = !opts.data_path.empty();
  const bool adult = !opts.adult_train_path.empty() || !opts.adult_test_path.empty();
  if (csv == adult) {
    throw ConfigError("specify either --data or the --adult-train/--adult-test pair");
  }
  LoadedData out;
  if (csv) {
    std::optional<TaskKind> task;
    if (opts.task == "regression") task = TaskKind::kRegression;
    else if (opts.task == "classification") task = TaskKind::kClassification;
    else if (!opts.task.empty()) throw ConfigError("unknown task '" + opts.task + "'");
    out.train = read_dataset_csv(opts.data_path, task);
    return out;
  }
  if (opts.adult_train_path.empty() || opts.adult_test_path.empty()) {
    throw ConfigError("census data needs both --adult-train and --adult-test");
  }
  AdultData adult_data = load_adult(opts.adult_train_path, opts.adult_test_path);
  for (const std::string& w : adult_data.info.warnings) {
    std::cerr << "monotonn: warning: " << w << "\n";
  }
  std::cerr << "monotonn: census data: " << adult_data.train.n() << " train rows ("
            << adult_data.info.train_rows_dropped << " dropped), " << adult_data.test.n()
            << " test rows (" << adult_data.info.test_rows_dropped << " dropped), width "
            << adult_data.info.width << "\n";
  out.train = std::move(adult_data.train);
  out.test = std::move(adult_data.test);
  out.adult = true;
  return out;
}

MonotoneSpec resolve_monotone_spec(const std::string& monotone, const Dataset& train, bool adult) {
  if (monotone.empty()) {
    if (adult) return adult_monotone_spec(train);
    if (train.feature_index("y") >= 0) return synthetic_monotone_spec(train);
    throw ConfigError("no default monotone features for this dataset; pass --monotone");
  }
  std::vector<std::pair<int, int>> dirs;
  for (const std::string& entry : split_list(monotone, ',')) {
    const std::size_t colon = entry.rfind(':');
    if (colon == std::string::npos) {
      throw ConfigError("monotone entry '" + entry + "' must look like feature:+1 or feature:-1");
    }
    const std::string feat = entry.substr(0, colon);
    const std::string dir = entry.substr(colon + 1);
    int d = 0;
    if (dir == "+1" || dir == "1") d = +1;
    else if (dir == "-1") d = -1;
    else throw ConfigError("monotone direction '" + dir + "' must be +1 or -1");
    dirs.emplace_back(resolve_feature(feat, train), d);
  }
  return monotone_spec_from(train, dirs);
}

void cmd_generate(const GenerateOptions& opts) {
  if (opts.out.empty()) throw ConfigError("generate: --out is required");
  SyntheticSpec spec;
  spec.n = opts.n;
  spec.seed = opts.seed;
  spec.noise_std = opts.noise_std;
  const Dataset ds = generate_synthetic(spec);
  write_dataset_csv(ds, opts.out);
}

void cmd_train(const TrainOptions& opts) {
  if (opts.out.empty()) throw ConfigError("train: --out is required");
  const LoadedData data = load_data(opts.data);
  const MonotoneSpec spec = resolve_monotone_spec(opts.monotone, data.train, data.adult);

  std::vector<int> dims;
  dims.push_back(static_cast<int>(data.train.dim()));
  for (int h : parse_dims(opts.hidden_dims)) dims.push_back(h);
  dims.push_back(1);

  InitSpec init;
  init.seed = opts.config.seed;
  if (opts.init_scheme == "glorot") init.scheme = InitSpec::Scheme::kUniformGlorot;
  else if (opts.init_scheme == "normal") init.scheme = InitSpec::Scheme::kNormalScaled;
  else throw ConfigError("unknown init scheme '" + opts.init_scheme + "'");

  const OutputActivation out_act = data.train.task == TaskKind::kClassification
                                       ? OutputActivation::kSigmoid
                                       : OutputActivation::kIdentity;
  const MlpModel model =
      init_mlp(dims, parse_hidden_activation(opts.activation), out_act, init);

  try {
    const TrainResult result = train(model, data.train, spec, opts.config);
    save_model(result.model, opts.out);
    if (!opts.log_path.empty()) write_train_log_csv(result.log, opts.log_path);
    if (!opts.quiet) {
      const EpochRecord& last = result.log.epochs.back();
      std::cout << "trained " << result.log.epochs.size() << " epochs in " << std::fixed
                << std::setprecision(1) << result.log.total_seconds
                << "s; final empirical " << std::setprecision(6) << last.empirical
                << ", penalty " << last.penalty << "\n";
    }
  } catch (const TrainDivergence& e) {
    // Keep the last finite parameters next to the intended output.
    const std::string checkpoint = opts.out + ".checkpoint";
    save_model(e.checkpoint, checkpoint);
    if (!opts.log_path.empty()) write_train_log_csv(e.log, opts.log_path);
    throw NumericError(std::string(e.what()) + " (checkpoint written to " + checkpoint + ")");
  }
}

void cmd_evaluate(const EvaluateOptions& opts) {
  if (opts.out.empty()) throw ConfigError("evaluate: --out is required");
  const auto started = std::chrono::steady_clock::now();
  const LoadedData data = load_data(opts.data);
  const MlpModel model = load_model(opts.model_path);

  const Dataset* eval_ds = &data.train;
  if (data.test.has_value()) {
    if (opts.eval_split == "test") eval_ds = &*data.test;
    else if (opts.eval_split != "train") {
      throw ConfigError("evaluate: --split must be train or test");
    }
  }
  if (eval_ds->dim() != model.input_dim()) {
    throw ConfigError("evaluate: dataset width " + std::to_string(eval_ds->dim()) +
                      " does not match model input dimension " +
                      std::to_string(model.input_dim()));
  }
  const bool classification = eval_ds->task == TaskKind::kClassification;
  if (classification && model.output_activation != OutputActivation::kSigmoid) {
    throw ConfigError("evaluate: classification data but the model has an identity output");
  }
  if (!classification && model.output_activation != OutputActivation::kIdentity) {
    throw ConfigError("evaluate: regression data but the model has a sigmoid output");
  }

  // Sweep ranges always come from the training split.
  const MonotoneSpec spec = resolve_monotone_spec(opts.monotone, data.train, data.adult);

  nlohmann::json report;
  report["task"] = classification ? "classification" : "regression";
  report["n"] = eval_ds->n();
  report["width"] = eval_ds->dim();
  report["split"] = data.test.has_value() ? opts.eval_split : "train";

  if (classification) {
    Eigen::VectorXd scores(eval_ds->n());
    for (Eigen::Index i = 0; i < eval_ds->n(); ++i) {
      const Eigen::VectorXd x = eval_ds->features.row(i);
      scores[i] = score(model, x);
    }
    report["auc"] = auc(scores, eval_ds->labels);
  } else {
    report["mse"] = empirical_risk(model, eval_ds->features, eval_ds->labels, eval_ds->task);
  }

  const MonotonicityReport mono =
      monotonicity_metric(model, *eval_ds, spec, opts.grid_resolution);
  nlohmann::json mk = nlohmann::json::array();
  for (const FeatureMonotonicity& fm : mono.features) {
    mk.push_back({{"feature", fm.feature_index},
                  {"name", eval_ds->feature_info[static_cast<std::size_t>(fm.feature_index)].name},
                  {"mk", fm.mk}});
  }
  report["mk"] = mk;
  report["mean_mk"] = mono.mean_mk();
  report["seconds"] = elapsed_seconds(started);

  if (!opts.mk_csv.empty()) write_mk_csv(mono, opts.mk_csv);
  if (!opts.delta_csv.empty()) write_delta_csv(mono, opts.delta_csv);

  std::ofstream f(opts.out, std::ios::binary);
  if (!f) throw IoError("evaluate: cannot open '" + opts.out + "' for writing");
  f << report.dump(2) << "\n";
  if (!opts.quiet) std::cout << report.dump(2) << "\n";
}

void cmd_export_contour(const ContourOptions& opts) {
  if (opts.out.empty()) throw ConfigError("export-contour: --out is required");
  if (opts.resolution < 2) throw ConfigError("export-contour: resolution must be at least 2");

  MlpModel model;
  if (!opts.analytic) {
    model = load_model(opts.model_path);
    if (model.input_dim() != 2) {
      throw ConfigError("export-contour: model input dimension must be 2, got " +
                        std::to_string(model.input_dim()));
    }
  }
  std::ofstream f(opts.out, std::ios::binary);
  if (!f) throw IoError("export-contour: cannot open '" + opts.out + "' for writing");
  f << "x,y,f\n";
  char buf[64];
  const int r = opts.resolution;
  Eigen::VectorXd p(2);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(r - 1);
      const double y = static_cast<double>(i) / static_cast<double>(r - 1);
      double v;
      if (opts.analytic) {
        v = std::sin(x) + std::exp(y);
      } else {
        p << x, y;
        v = score(model, p);
      }
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      f << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", y);
      f << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      f << buf << "\n";
    }
  }
}

void cmd_export_trends(const TrendsOptions& opts) {
  if (opts.out.empty()) throw ConfigError("export-trends: --out is required");
  if (opts.anchors < 1) throw ConfigError("export-trends: anchor count must be positive");
  const LoadedData data = load_data(opts.data);
  const MlpModel model = load_model(opts.model_path);
  if (data.train.dim() != model.input_dim()) {
    throw ConfigError("export-trends: dataset width does not match model input dimension");
  }
  const int feature = resolve_feature(opts.feature, data.train);

  const int n = static_cast<int>(data.train.n());
  const int count = std::min(opts.anchors, n);
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(opts.seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::MatrixXd anchors(count, data.train.dim());
  for (int i = 0; i < count; ++i) {
    anchors.row(i) = data.train.features.row(idx[static_cast<std::size_t>(i)]);
  }

  const double lo = data.train.features.col(feature).minCoeff();
  const double hi = data.train.features.col(feature).maxCoeff();
  if (!(lo < hi)) throw ConfigError("export-trends: feature has a degenerate range");
  const SweepGrid grid = SweepGrid::uniform(feature, lo, hi, opts.grid_resolution);
  write_trends_csv(conditioned_trends(model, anchors, grid), feature, opts.out);
}

}  // namespace monotonn
