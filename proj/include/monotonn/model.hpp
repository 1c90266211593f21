#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "monotonn/autodiff.hpp"

namespace monotonn {

enum class HiddenActivation { kTanh, kSoftplus, kRelu };
enum class OutputActivation { kIdentity, kSigmoid };

const char* activation_name(HiddenActivation a);
const char* activation_name(OutputActivation a);
HiddenActivation parse_hidden_activation(const std::string& name);
OutputActivation parse_output_activation(const std::string& name);

/// How initial parameters are drawn. The seed fully determines them.
struct InitSpec {
  enum class Scheme { kUniformGlorot, kNormalScaled };
  Scheme scheme = Scheme::kUniformGlorot;
  std::uint64_t seed = 0;
};

/// Feed-forward multilayer perceptron f(x; theta). Weights are stored
/// per layer as [out x in] matrices; the flat parameter order is layer by
/// layer, weights row-major, then the layer's biases.
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  HiddenActivation hidden_activation = HiddenActivation::kTanh;
  OutputActivation output_activation = OutputActivation::kIdentity;

  int input_dim() const { return layer_dims.front(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
};

MlpModel init_mlp(const std::vector<int>& layer_dims, HiddenActivation hidden,
                  OutputActivation output, const InitSpec& init);

std::size_t parameter_count(const MlpModel& model);
Eigen::VectorXd get_parameters(const MlpModel& model);
void set_parameters(MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& theta);

struct ModelOutput {
  double score;   // pre-output-activation
  double output;  // post-output-activation
};

ModelOutput forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Pre-activation score; the quantity the penalty and the monotonicity
/// metric operate on. For sigmoid outputs the score is monotone in the
/// probability, with better-conditioned gradients.
double score(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Exact reverse-mode d score / d x.
Eigen::VectorXd input_gradient(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Records the score onto `tape` from existing input nodes for x, with
/// parameters baked in as constants.
NodeId record_score(Tape& tape, const MlpModel& model, std::span<const NodeId> x_nodes);

/// Records the score with parameters taken from tape inputs, in flat
/// parameter order. Used where the objective must be differentiated with
/// respect to theta.
NodeId record_score(Tape& tape, const MlpModel& model, std::span<const NodeId> x_nodes,
                    std::span<const NodeId> theta_nodes);

/// Plain-text model file: versioned header, then one parameter per line
/// in flat order, printed so that reloading is bit-exact.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace monotonn
