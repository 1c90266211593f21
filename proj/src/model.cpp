#include "monotonn/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "monotonn/errors.hpp"

namespace monotonn {

namespace {

double apply_hidden(HiddenActivation a, double v) {
  switch (a) {
    case HiddenActivation::kTanh: return std::tanh(v);
    case HiddenActivation::kSoftplus:
      return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
    case HiddenActivation::kRelu: return v > 0.0 ? v : 0.0;
  }
  return v;
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void validate_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) {
    throw ConfigError("model: layer_dims needs at least an input and an output layer");
  }
  for (int d : dims) {
    if (d < 1) throw ConfigError("model: layer dimensions must be positive");
  }
  if (dims.back() != 1) {
    throw ConfigError("model: scalar output expected (last layer dim must be 1)");
  }
}

constexpr const char* kMagic = "monotonn-mlp";
constexpr int kFormatVersion = 1;

}  // namespace

const char* activation_name(HiddenActivation a) {
  switch (a) {
    case HiddenActivation::kTanh: return "tanh";
    case HiddenActivation::kSoftplus: return "softplus";
    case HiddenActivation::kRelu: return "relu";
  }
  return "?";
}

const char* activation_name(OutputActivation a) {
  return a == OutputActivation::kIdentity ? "identity" : "sigmoid";
}

HiddenActivation parse_hidden_activation(const std::string& name) {
  if (name == "tanh") return HiddenActivation::kTanh;
  if (name == "softplus") return HiddenActivation::kSoftplus;
  if (name == "relu") return HiddenActivation::kRelu;
  throw ConfigError("model: unknown hidden activation '" + name + "'");
}

OutputActivation parse_output_activation(const std::string& name) {
  if (name == "identity") return OutputActivation::kIdentity;
  if (name == "sigmoid") return OutputActivation::kSigmoid;
  throw ConfigError("model: unknown output activation '" + name + "'");
}

MlpModel init_mlp(const std::vector<int>& layer_dims, HiddenActivation hidden,
                  OutputActivation output, const InitSpec& init) {
  validate_dims(layer_dims);
  MlpModel m;
  m.layer_dims = layer_dims;
  m.hidden_activation = hidden;
  m.output_activation = output;

  std::mt19937_64 rng(init.seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    Eigen::MatrixXd w(fan_out, fan_in);
    if (init.scheme == InitSpec::Scheme::kUniformGlorot) {
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (int r = 0; r < fan_out; ++r)
        for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
    } else {
      std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
      for (int r = 0; r < fan_out; ++r)
        for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return m;
}

std::size_t parameter_count(const MlpModel& model) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
    n += static_cast<std::size_t>(model.layer_dims[l] + 1) *
         static_cast<std::size_t>(model.layer_dims[l + 1]);
  }
  return n;
}

Eigen::VectorXd get_parameters(const MlpModel& model) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count(model)));
  Eigen::Index k = 0;
  for (int l = 0; l < model.layer_count(); ++l) {
    const Eigen::MatrixXd& w = model.weights[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) theta[k++] = w(r, c);
    const Eigen::VectorXd& b = model.biases[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 0; r < b.size(); ++r) theta[k++] = b[r];
  }
  return theta;
}

void set_parameters(MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != static_cast<Eigen::Index>(parameter_count(model))) {
    throw ConfigError("model: parameter vector length mismatch");
  }
  Eigen::Index k = 0;
  for (int l = 0; l < model.layer_count(); ++l) {
    Eigen::MatrixXd& w = model.weights[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = theta[k++];
    Eigen::VectorXd& b = model.biases[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = theta[k++];
  }
}

// Scalar loops, accumulating left to right in the same order the tape
// recording uses, so direct evaluation and tape evaluation agree exactly.
ModelOutput forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.input_dim()) {
    throw ConfigError("model: input has dimension " + std::to_string(x.size()) + ", expected " +
                      std::to_string(model.input_dim()));
  }
  Eigen::VectorXd cur = x;
  for (int l = 0; l < model.layer_count(); ++l) {
    const Eigen::MatrixXd& w = model.weights[static_cast<std::size_t>(l)];
    const Eigen::VectorXd& b = model.biases[static_cast<std::size_t>(l)];
    Eigen::VectorXd next(w.rows());
    const bool last = l + 1 == model.layer_count();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double acc = w(r, 0) * cur[0];
      for (Eigen::Index c = 1; c < w.cols(); ++c) acc += w(r, c) * cur[c];
      acc += b[r];
      next[r] = last ? acc : apply_hidden(model.hidden_activation, acc);
    }
    cur.swap(next);
  }
  const double s = cur[0];
  const double out = model.output_activation == OutputActivation::kSigmoid ? stable_sigmoid(s) : s;
  return {s, out};
}

double score(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return forward(model, x).score;
}

namespace {

NodeId record_score_impl(Tape& tape, const MlpModel& model, std::span<const NodeId> x_nodes,
                         const std::function<NodeId(int layer, Eigen::Index r, Eigen::Index c)>& weight,
                         const std::function<NodeId(int layer, Eigen::Index r)>& bias) {
  if (static_cast<int>(x_nodes.size()) != model.input_dim()) {
    throw ConfigError("record_score: x node count does not match model input dim");
  }
  std::vector<NodeId> cur(x_nodes.begin(), x_nodes.end());
  for (int l = 0; l < model.layer_count(); ++l) {
    const Eigen::MatrixXd& w = model.weights[static_cast<std::size_t>(l)];
    const bool last = l + 1 == model.layer_count();
    std::vector<NodeId> next(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      NodeId acc = tape.mul(weight(l, r, 0), cur[0]);
      for (Eigen::Index c = 1; c < w.cols(); ++c) {
        acc = tape.add(acc, tape.mul(weight(l, r, c), cur[static_cast<std::size_t>(c)]));
      }
      acc = tape.add(acc, bias(l, r));
      if (!last) {
        switch (model.hidden_activation) {
          case HiddenActivation::kTanh: acc = tape.tanh(acc); break;
          case HiddenActivation::kSoftplus: acc = tape.softplus(acc); break;
          case HiddenActivation::kRelu: acc = tape.max0(acc); break;
        }
      }
      next[static_cast<std::size_t>(r)] = acc;
    }
    cur.swap(next);
  }
  return cur[0];
}

}  // namespace

NodeId record_score(Tape& tape, const MlpModel& model, std::span<const NodeId> x_nodes) {
  return record_score_impl(
      tape, model, x_nodes,
      [&](int l, Eigen::Index r, Eigen::Index c) {
        return tape.constant(model.weights[static_cast<std::size_t>(l)](r, c));
      },
      [&](int l, Eigen::Index r) {
        return tape.constant(model.biases[static_cast<std::size_t>(l)][r]);
      });
}

NodeId record_score(Tape& tape, const MlpModel& model, std::span<const NodeId> x_nodes,
                    std::span<const NodeId> theta_nodes) {
  if (theta_nodes.size() != parameter_count(model)) {
    throw ConfigError("record_score: theta node count does not match parameter count");
  }
  // Offsets into the flat parameter order.
  std::vector<std::size_t> layer_base(static_cast<std::size_t>(model.layer_count()) + 1, 0);
  for (int l = 0; l < model.layer_count(); ++l) {
    layer_base[static_cast<std::size_t>(l) + 1] =
        layer_base[static_cast<std::size_t>(l)] +
        static_cast<std::size_t>((model.layer_dims[static_cast<std::size_t>(l)] + 1) *
                                 model.layer_dims[static_cast<std::size_t>(l) + 1]);
  }
  return record_score_impl(
      tape, model, x_nodes,
      [&](int l, Eigen::Index r, Eigen::Index c) {
        const std::size_t cols = static_cast<std::size_t>(model.weights[static_cast<std::size_t>(l)].cols());
        return theta_nodes[layer_base[static_cast<std::size_t>(l)] +
                           static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)];
      },
      [&](int l, Eigen::Index r) {
        const Eigen::MatrixXd& w = model.weights[static_cast<std::size_t>(l)];
        return theta_nodes[layer_base[static_cast<std::size_t>(l)] +
                           static_cast<std::size_t>(w.rows() * w.cols()) + static_cast<std::size_t>(r)];
      });
}

Eigen::VectorXd input_gradient(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Tape tape;
  std::vector<NodeId> x_nodes(static_cast<std::size_t>(model.input_dim()));
  for (int j = 0; j < model.input_dim(); ++j) {
    x_nodes[static_cast<std::size_t>(j)] = tape.input("x" + std::to_string(j), x[j]);
  }
  const NodeId s = record_score(tape, model, x_nodes);
  const std::vector<double> grads = slot_gradients(tape, s);
  Eigen::VectorXd out(model.input_dim());
  for (int j = 0; j < model.input_dim(); ++j) out[j] = grads[static_cast<std::size_t>(j)];
  return out;
}

void save_model(const MlpModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // binary: keep LF endings everywhere
  if (!f) throw IoError("model: cannot open '" + path + "' for writing");
  f << kMagic << " " << kFormatVersion << "\n";
  f << "dims";
  for (int d : model.layer_dims) f << " " << d;
  f << "\n";
  f << "hidden " << activation_name(model.hidden_activation) << "\n";
  f << "output " << activation_name(model.output_activation) << "\n";
  const Eigen::VectorXd theta = get_parameters(model);
  char buf[64];
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", theta[i]);
    f << buf << "\n";
  }
  if (!f) throw IoError("model: write to '" + path + "' failed");
}

MlpModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("model: cannot open '" + path + "'");

  std::string magic;
  int version = 0;
  if (!(f >> magic >> version) || magic != kMagic) {
    throw IoError("model: '" + path + "' is not a model file (bad magic)");
  }
  if (version != kFormatVersion) {
    throw IoError("model: unsupported format version " + std::to_string(version));
  }

  std::string line;
  std::getline(f, line);  // rest of header line
  if (!std::getline(f, line) || line.rfind("dims", 0) != 0) {
    throw IoError("model: malformed file (missing dims line)");
  }
  std::vector<int> dims;
  {
    std::istringstream is(line.substr(4));
    int d;
    while (is >> d) dims.push_back(d);
  }
  validate_dims(dims);

  auto read_field = [&](const char* key) {
    if (!std::getline(f, line) || line.rfind(key, 0) != 0) {
      throw IoError(std::string("model: malformed file (missing ") + key + " line)");
    }
    std::string v = line.substr(std::string(key).size());
    const std::size_t pos = v.find_first_not_of(' ');
    return pos == std::string::npos ? std::string() : v.substr(pos);
  };
  const HiddenActivation hidden = parse_hidden_activation(read_field("hidden"));
  const OutputActivation output = parse_output_activation(read_field("output"));

  MlpModel m;
  m.layer_dims = dims;
  m.hidden_activation = hidden;
  m.output_activation = output;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    m.weights.emplace_back(dims[l + 1], dims[l]);
    m.biases.emplace_back(dims[l + 1]);
  }

  const std::size_t expected = parameter_count(m);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(expected));
  std::size_t got = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (got >= expected) {
      throw IoError("model: shape mismatch in '" + path + "': more than " +
                    std::to_string(expected) + " parameters for the declared dims");
    }
    std::size_t consumed = 0;
    double v;
    try {
      v = std::stod(line, &consumed);
    } catch (const std::exception&) {
      throw IoError("model: malformed parameter line '" + line + "'");
    }
    if (consumed != line.size() || !std::isfinite(v)) {
      throw IoError("model: malformed parameter line '" + line + "'");
    }
    theta[static_cast<Eigen::Index>(got++)] = v;
  }
  if (got != expected) {
    throw IoError("model: truncated file '" + path + "': expected " + std::to_string(expected) +
                  " parameters, found " + std::to_string(got));
  }
  set_parameters(m, theta);
  return m;
}

}  // namespace monotonn
