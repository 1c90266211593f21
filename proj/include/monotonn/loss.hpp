#pragma once

#include <Eigen/Dense>
#include <vector>

#include "monotonn/autodiff.hpp"
#include "monotonn/data.hpp"
#include "monotonn/model.hpp"

namespace monotonn {

/// One monotone feature: its index, the trend direction (+1 non-decreasing,
/// -1 non-increasing) and the half-open sweep range [sweep_min, sweep_max)
/// used by the monotonicity metric.
struct MonotoneEntry {
  int feature_index = 0;
  int direction = +1;
  double sweep_min = 0.0;
  double sweep_max = 1.0;
};

struct MonotoneSpec {
  std::vector<MonotoneEntry> entries;

  /// Unique in-range indices, directions in {-1,+1}, sweep_min < sweep_max.
  void validate(int input_dim) const;
};

/// Builds a spec with sweep ranges taken from the column minima/maxima of
/// the given (training) dataset.
MonotoneSpec monotone_spec_from(const Dataset& ds,
                                const std::vector<std::pair<int, int>>& feature_directions);

/// The census experiment's convention: education-num, hours-per-week and
/// capital-gain, all non-decreasing.
MonotoneSpec adult_monotone_spec(const Dataset& train);

/// Synthetic experiment: feature y, non-decreasing.
MonotoneSpec synthetic_monotone_spec(const Dataset& train);

struct LossBreakdown {
  double empirical = 0.0;  // mean per-example risk over the batch
  double penalty = 0.0;    // sum of per-example hinges over the batch
  double total = 0.0;      // empirical + penalty_weight * penalty
};

/// Direction-folded divergence: sum over spec entries of
/// direction * d score / d x_k at x.
double signed_divergence(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                         const MonotoneSpec& spec);

/// Sum over the batch of max(0, -signed_divergence); zero exactly when
/// every point has nonnegative folded divergence.
double penalty(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch,
               const MonotoneSpec& spec);

/// Mean per-example risk: squared error for regression, clamped
/// cross-entropy on the sigmoid of the score for classification.
double empirical_risk(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch,
                      const Eigen::Ref<const Eigen::VectorXd>& labels, TaskKind task);

LossBreakdown total_loss(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch,
                         const Eigen::Ref<const Eigen::VectorXd>& labels, TaskKind task,
                         const MonotoneSpec& spec, double penalty_weight);

/// Exact gradient of total_loss with respect to the flat parameter
/// vector. The penalty part differentiates the input gradient itself
/// (reverse pass re-recorded as a graph), so hinge-active points
/// contribute second-order terms; inactive points contribute nothing.
Eigen::VectorXd parameter_gradient(const MlpModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& batch,
                                   const Eigen::Ref<const Eigen::VectorXd>& labels, TaskKind task,
                                   const MonotoneSpec& spec, double penalty_weight);

/// Reusable per-example objective evaluator. Records the model score with
/// parameters as tape inputs, re-records its reverse pass for the
/// divergence where needed, and assembles the per-example objective
///
///   total = c_emp * risk(x, y) + c_pen * max(0, -div(x))
///
/// with the coefficients as inputs too, so one structure serves a whole
/// training run. For smooth activations the structure is input-independent
/// and replayed per example; relu bakes subgradient branches, so the
/// derivative graph is rebuilt per evaluation instead. Instances hold
/// mutable evaluation state: one per thread.
class ObjectiveProgram {
 public:
  enum class Kind { kEmpirical, kPenalty, kTotal };

  ObjectiveProgram(const MlpModel& model, TaskKind task, const MonotoneSpec& spec, Kind kind);

  struct Values {
    double empirical = 0.0;  // per-example risk (0 for pure-penalty programs)
    double penalty = 0.0;    // per-example hinge (0 for empirical-only programs)
  };

  void set_theta(const Eigen::Ref<const Eigen::VectorXd>& theta);

  /// Evaluates at (x, y) and, when grad is non-null, accumulates the
  /// gradient of the program total with respect to theta into it.
  Values eval(const Eigen::Ref<const Eigen::VectorXd>& x, double y, double c_emp, double c_pen,
              Eigen::VectorXd* grad);

  Kind kind() const { return kind_; }
  bool structure_cached() const { return cacheable_; }

 private:
  struct Assembled {
    Tape tape;
    NodeId emp_node = kNoNode;
    NodeId pen_node = kNoNode;
    NodeId total_node = kNoNode;
    NodeId forward_end = kNoNode;   // last node of the replayed forward pass
    NodeId adjoint_end = kNoNode;   // last node of the derivative graph
  };

  Assembled assemble(const Tape& base) const;
  const char* section_of(NodeId node, const Assembled& a) const;

  Kind kind_;
  TaskKind task_;
  MonotoneSpec spec_;
  int input_dim_;
  std::size_t param_count_;
  bool cacheable_;
  bool needs_penalty_;

  Tape base_;            // pure forward recording (score as output)
  Assembled program_;    // assembled objective; rebuilt per eval when not cacheable
  Eigen::VectorXd theta_;
  std::vector<double> adjoint_;  // backward workspace
};

}  // namespace monotonn
