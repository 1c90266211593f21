#include "monotonn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "monotonn/errors.hpp"

namespace monotonn {

int Dataset::feature_index(const std::string& name) const {
  for (std::size_t j = 0; j < feature_info.size(); ++j) {
    if (feature_info[j].name == name) return static_cast<int>(j);
  }
  return -1;
}

void validate_dataset(const Dataset& ds, bool fitting_split) {
  if (ds.features.rows() != ds.labels.size()) {
    throw ConfigError("dataset: feature/label row mismatch");
  }
  if (static_cast<Eigen::Index>(ds.feature_info.size()) != ds.dim()) {
    throw ConfigError("dataset: feature metadata does not match width");
  }
  if (!ds.features.allFinite() || !ds.labels.allFinite()) {
    throw NumericError("dataset: non-finite entries");
  }
  if (ds.task == TaskKind::kClassification) {
    for (Eigen::Index i = 0; i < ds.labels.size(); ++i) {
      if (ds.labels[i] != 0.0 && ds.labels[i] != 1.0) {
        throw ConfigError("dataset: classification label outside {0,1} at row " +
                          std::to_string(i));
      }
    }
  }
  if (!fitting_split) return;

  std::map<int, std::vector<Eigen::Index>> groups;
  for (Eigen::Index j = 0; j < ds.dim(); ++j) {
    const FeatureInfo& fi = ds.feature_info[static_cast<std::size_t>(j)];
    if (fi.kind == FeatureKind::kOneHot) {
      groups[fi.group].push_back(j);
    } else {
      for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const double v = ds.features(i, j);
        if (v < 0.0 || v > 1.0) {
          throw ConfigError("dataset: scaled feature '" + fi.name +
                            "' outside [0,1] on the fitting split");
        }
      }
    }
  }
  for (const auto& [gid, cols] : groups) {
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      double sum = 0.0;
      for (Eigen::Index j : cols) sum += ds.features(i, j);
      if (sum != 1.0) {
        throw ConfigError("dataset: one-hot group " + std::to_string(gid) +
                          " does not sum to 1 at row " + std::to_string(i));
      }
    }
  }
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1) throw ConfigError("synthetic: sample count must be at least 1");
  if (spec.noise_std < 0.0) throw ConfigError("synthetic: noise_std must be nonnegative");

  Dataset ds;
  ds.task = TaskKind::kRegression;
  ds.features.resize(spec.n, 2);
  ds.labels.resize(spec.n);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < spec.n; ++i) {
    const double x = unit(rng);
    const double y = unit(rng);
    ds.features(i, 0) = x;
    ds.features(i, 1) = y;
    double label = std::sin(x) + std::exp(y);
    if (spec.noise_std > 0.0) label += spec.noise_std * noise(rng);
    ds.labels[i] = label;
  }
  ds.feature_info = {{"x", FeatureKind::kContinuous, -1, 0.0, 1.0},
                     {"y", FeatureKind::kContinuous, -1, 0.0, 1.0}};
  return ds;
}

namespace {

// Original census layout. fnlwgt is a sampling weight, not a covariate;
// education duplicates education-num as a string.
struct AdultColumn {
  const char* name;
  enum Kind { kContinuous, kCategorical, kDrop, kLabel } kind;
};

constexpr AdultColumn kAdultColumns[] = {
    {"age", AdultColumn::kContinuous},
    {"workclass", AdultColumn::kCategorical},
    {"fnlwgt", AdultColumn::kDrop},
    {"education", AdultColumn::kDrop},
    {"education-num", AdultColumn::kContinuous},
    {"marital-status", AdultColumn::kCategorical},
    {"occupation", AdultColumn::kCategorical},
    {"relationship", AdultColumn::kCategorical},
    {"race", AdultColumn::kCategorical},
    {"sex", AdultColumn::kCategorical},
    {"capital-gain", AdultColumn::kContinuous},
    {"capital-loss", AdultColumn::kContinuous},
    {"hours-per-week", AdultColumn::kContinuous},
    {"native-country", AdultColumn::kCategorical},
    {"income", AdultColumn::kLabel},
};
constexpr int kAdultFieldCount = 15;

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct AdultRow {
  std::vector<std::string> fields;
  double label = 0.0;
};

std::vector<AdultRow> read_adult_file(const std::string& path, int* rows_dropped) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("adult: cannot open '" + path + "'");
  std::vector<AdultRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '|') continue;  // blank or the test file's comment line
    AdultRow row;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) row.fields.push_back(trim(field));
    if (static_cast<int>(row.fields.size()) != kAdultFieldCount) {
      throw IoError("adult: " + path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(kAdultFieldCount) + " fields, got " +
                    std::to_string(row.fields.size()));
    }
    std::string label = row.fields.back();
    if (!label.empty() && label.back() == '.') label.pop_back();  // test-file quirk
    if (label == ">50K") {
      row.label = 1.0;
    } else if (label == "<=50K") {
      row.label = 0.0;
    } else {
      throw IoError("adult: " + path + ":" + std::to_string(line_no) + ": unrecognized label '" +
                    row.fields.back() + "'");
    }
    const bool missing = std::any_of(row.fields.begin(), row.fields.end(),
                                     [](const std::string& v) { return v == "?"; });
    if (missing) {
      ++*rows_dropped;
      continue;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_numeric_field(const std::string& v, const char* col) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw IoError(std::string("adult: cannot parse numeric field '") + v + "' in column " + col);
  }
}

}  // namespace

AdultData load_adult(const std::string& train_path, const std::string& test_path) {
  AdultData out;
  int train_dropped = 0;
  int test_dropped = 0;
  const std::vector<AdultRow> train_rows = read_adult_file(train_path, &train_dropped);
  const std::vector<AdultRow> test_rows = read_adult_file(test_path, &test_dropped);
  if (train_rows.empty()) throw IoError("adult: no usable rows in '" + train_path + "'");
  if (test_rows.empty()) throw IoError("adult: no usable rows in '" + test_path + "'");
  out.info.train_rows_read = static_cast<int>(train_rows.size()) + train_dropped;
  out.info.test_rows_read = static_cast<int>(test_rows.size()) + test_dropped;
  out.info.train_rows_dropped = train_dropped;
  out.info.test_rows_dropped = test_dropped;

  // Category vocabularies from the training split, sorted for a stable
  // column order.
  std::map<int, std::vector<std::string>> categories;
  for (int c = 0; c < kAdultFieldCount; ++c) {
    if (kAdultColumns[c].kind != AdultColumn::kCategorical) continue;
    std::set<std::string> values;
    for (const AdultRow& r : train_rows) values.insert(r.fields[static_cast<std::size_t>(c)]);
    categories[c] = {values.begin(), values.end()};
  }

  // Scaling statistics from the training split.
  std::map<int, std::pair<double, double>> ranges;
  for (int c = 0; c < kAdultFieldCount; ++c) {
    if (kAdultColumns[c].kind != AdultColumn::kContinuous) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const AdultRow& r : train_rows) {
      const double v = parse_numeric_field(r.fields[static_cast<std::size_t>(c)], kAdultColumns[c].name);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ranges[c] = {lo, hi};
  }

  // Output layout: continuous columns in file order, then one-hot groups
  // in file order.
  std::vector<FeatureInfo> info;
  std::map<int, int> continuous_offset;
  std::map<int, int> group_offset;
  int group_id = 0;
  for (int c = 0; c < kAdultFieldCount; ++c) {
    if (kAdultColumns[c].kind != AdultColumn::kContinuous) continue;
    continuous_offset[c] = static_cast<int>(info.size());
    info.push_back({kAdultColumns[c].name, FeatureKind::kContinuous, -1, ranges[c].first,
                    ranges[c].second});
  }
  for (int c = 0; c < kAdultFieldCount; ++c) {
    if (kAdultColumns[c].kind != AdultColumn::kCategorical) continue;
    group_offset[c] = static_cast<int>(info.size());
    for (const std::string& v : categories[c]) {
      info.push_back({std::string(kAdultColumns[c].name) + "=" + v, FeatureKind::kOneHot,
                      group_id, 0.0, 1.0});
    }
    ++group_id;
  }
  const int width = static_cast<int>(info.size());
  out.info.width = width;

  std::set<std::string> warned;
  auto encode = [&](const std::vector<AdultRow>& rows, bool is_test) {
    Dataset ds;
    ds.task = TaskKind::kClassification;
    ds.feature_info = info;
    ds.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), width);
    ds.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const AdultRow& r = rows[i];
      ds.labels[static_cast<Eigen::Index>(i)] = r.label;
      for (int c = 0; c < kAdultFieldCount; ++c) {
        const std::string& v = r.fields[static_cast<std::size_t>(c)];
        switch (kAdultColumns[c].kind) {
          case AdultColumn::kContinuous: {
            const auto [lo, hi] = ranges[c];
            const double x = parse_numeric_field(v, kAdultColumns[c].name);
            const double scaled = hi > lo ? (x - lo) / (hi - lo) : 0.0;
            ds.features(static_cast<Eigen::Index>(i), continuous_offset[c]) = scaled;
            break;
          }
          case AdultColumn::kCategorical: {
            const std::vector<std::string>& vocab = categories[c];
            const auto it = std::lower_bound(vocab.begin(), vocab.end(), v);
            if (it != vocab.end() && *it == v) {
              const int j = group_offset[c] + static_cast<int>(it - vocab.begin());
              ds.features(static_cast<Eigen::Index>(i), j) = 1.0;
            } else if (is_test) {
              // Unknown test-time category: leave the group all zeros.
              const std::string key = std::string(kAdultColumns[c].name) + "=" + v;
              if (warned.insert(key).second) {
                out.info.warnings.push_back("unknown test category '" + v + "' in column " +
                                            kAdultColumns[c].name + "; encoded as all zeros");
              }
            } else {
              throw IoError("adult: internal: training category '" + v + "' missing from vocabulary");
            }
            break;
          }
          case AdultColumn::kDrop:
          case AdultColumn::kLabel:
            break;
        }
      }
    }
    return ds;
  };

  out.train = encode(train_rows, false);
  out.test = encode(test_rows, true);
  validate_dataset(out.train, true);
  validate_dataset(out.test, false);
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split: fraction must lie strictly between 0 and 1");
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(ds.n()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const Eigen::Index k = static_cast<Eigen::Index>(
      std::llround(fraction * static_cast<double>(ds.n())));

  auto take = [&](Eigen::Index begin, Eigen::Index count) {
    Dataset part;
    part.task = ds.task;
    part.feature_info = ds.feature_info;
    part.features.resize(count, ds.dim());
    part.labels.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      part.features.row(i) = ds.features.row(idx[static_cast<std::size_t>(begin + i)]);
      part.labels[i] = ds.labels[idx[static_cast<std::size_t>(begin + i)]];
    }
    return part;
  };
  return {take(0, k), take(k, ds.n() - k)};
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("dataset: cannot open '" + path + "' for writing");
  for (const FeatureInfo& fi : ds.feature_info) f << fi.name << ",";
  f << "label\n";
  char buf[64];
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
      f << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", ds.labels[i]);
    f << buf << "\n";
  }
  if (!f) throw IoError("dataset: write to '" + path + "' failed");
}

Dataset read_dataset_csv(const std::string& path, std::optional<TaskKind> task) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("dataset: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw IoError("dataset: '" + path + "' is empty");

  std::vector<std::string> names;
  {
    std::stringstream ss(trim(line));
    std::string field;
    while (std::getline(ss, field, ',')) names.push_back(trim(field));
  }
  if (names.size() < 2 || names.back() != "label") {
    throw IoError("dataset: '" + path + "' header must end with a label column");
  }
  names.pop_back();

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != trim(field).size() && used != field.size()) throw std::invalid_argument(field);
        row.push_back(v);
      } catch (const std::exception&) {
        throw IoError("dataset: " + path + ":" + std::to_string(line_no) +
                      ": cannot parse value '" + field + "'");
      }
    }
    if (row.size() != names.size() + 1) {
      throw IoError("dataset: " + path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(names.size() + 1) + " values, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("dataset: '" + path + "' has no data rows");

  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  ds.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    ds.labels[static_cast<Eigen::Index>(i)] = rows[i].back();
  }

  // Reconstruct metadata: `column=value` names mark one-hot groups.
  std::map<std::string, int> group_ids;
  for (const std::string& name : names) {
    FeatureInfo fi;
    fi.name = name;
    const std::size_t eq = name.find('=');
    if (eq != std::string::npos && eq > 0) {
      const std::string prefix = name.substr(0, eq);
      auto [it, inserted] = group_ids.emplace(prefix, static_cast<int>(group_ids.size()));
      fi.kind = FeatureKind::kOneHot;
      fi.group = it->second;
    } else {
      const Eigen::Index j = static_cast<Eigen::Index>(ds.feature_info.size());
      fi.scale_min = ds.features.col(j).minCoeff();
      fi.scale_max = ds.features.col(j).maxCoeff();
    }
    ds.feature_info.push_back(std::move(fi));
  }

  if (task.has_value()) {
    ds.task = *task;
  } else {
    const bool binary = (ds.labels.array() == 0.0 || ds.labels.array() == 1.0).all();
    ds.task = binary ? TaskKind::kClassification : TaskKind::kRegression;
  }
  validate_dataset(ds, false);
  return ds;
}

}  // namespace monotonn
