#include "monotonn/loss.hpp"

#include <cmath>
#include <iostream>
#include <set>
#include <string>

#include "monotonn/errors.hpp"

namespace monotonn {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kProbCeil = 1.0 - 1e-12;

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double hinge(double z) { return z > 0.0 ? z : 0.0; }

// Scalar twin of the recorded cross-entropy: identical operations in
// identical order, so values agree bit-for-bit with tape evaluation.
double clamped_cross_entropy(double score, double y) {
  const double p = stable_sigmoid(score);
  const double pc = kProbFloor + (hinge(p - kProbFloor) - hinge(p - kProbCeil));
  return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

void check_labels(const Eigen::Ref<const Eigen::VectorXd>& labels, TaskKind task) {
  if (task != TaskKind::kClassification) return;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw ConfigError("loss: classification label outside {0,1} at row " + std::to_string(i));
    }
  }
}

}  // namespace

void MonotoneSpec::validate(int input_dim) const {
  if (entries.empty()) {
    throw ConfigError("monotone spec: at least one monotone feature required");
  }
  std::set<int> seen;
  for (const MonotoneEntry& e : entries) {
    if (e.feature_index < 0 || e.feature_index >= input_dim) {
      throw ConfigError("monotone spec: feature index " + std::to_string(e.feature_index) +
                        " outside [0," + std::to_string(input_dim) + ")");
    }
    if (!seen.insert(e.feature_index).second) {
      throw ConfigError("monotone spec: duplicate feature index " +
                        std::to_string(e.feature_index));
    }
    if (e.direction != 1 && e.direction != -1) {
      throw ConfigError("monotone spec: direction must be +1 or -1");
    }
    if (!(e.sweep_min < e.sweep_max)) {
      throw ConfigError("monotone spec: sweep range for feature " +
                        std::to_string(e.feature_index) + " must satisfy min < max");
    }
  }
}

MonotoneSpec monotone_spec_from(const Dataset& ds,
                                const std::vector<std::pair<int, int>>& feature_directions) {
  MonotoneSpec spec;
  for (const auto& [idx, dir] : feature_directions) {
    if (idx < 0 || idx >= ds.dim()) {
      throw ConfigError("monotone spec: feature index " + std::to_string(idx) + " out of range");
    }
    const double lo = ds.features.col(idx).minCoeff();
    const double hi = ds.features.col(idx).maxCoeff();
    spec.entries.push_back({idx, dir, lo, hi});
  }
  spec.validate(static_cast<int>(ds.dim()));
  return spec;
}

MonotoneSpec adult_monotone_spec(const Dataset& train) {
  std::vector<std::pair<int, int>> dirs;
  for (const char* name : {"education-num", "hours-per-week", "capital-gain"}) {
    const int idx = train.feature_index(name);
    if (idx < 0) throw ConfigError(std::string("adult spec: feature '") + name + "' not found");
    dirs.emplace_back(idx, +1);
  }
  return monotone_spec_from(train, dirs);
}

MonotoneSpec synthetic_monotone_spec(const Dataset& train) {
  const int idx = train.feature_index("y");
  if (idx < 0) throw ConfigError("synthetic spec: feature 'y' not found");
  return monotone_spec_from(train, {{idx, +1}});
}

double signed_divergence(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                         const MonotoneSpec& spec) {
  spec.validate(model.input_dim());
  const Eigen::VectorXd g = input_gradient(model, x);
  double div = 0.0;
  for (const MonotoneEntry& e : spec.entries) {
    div += e.direction * g[e.feature_index];
  }
  return div;
}

double penalty(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch,
               const MonotoneSpec& spec) {
  if (batch.rows() == 0) throw ConfigError("penalty: empty batch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const Eigen::VectorXd x = batch.row(i);
    sum += hinge(-signed_divergence(model, x, spec));
  }
  return sum;
}

double empirical_risk(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch,
                      const Eigen::Ref<const Eigen::VectorXd>& labels, TaskKind task) {
  if (batch.rows() == 0) throw ConfigError("empirical_risk: empty batch");
  if (batch.rows() != labels.size()) throw ConfigError("empirical_risk: label count mismatch");
  check_labels(labels, task);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const Eigen::VectorXd x = batch.row(i);
    const double s = score(model, x);
    if (task == TaskKind::kRegression) {
      const double d = s - labels[i];
      sum += d * d;
    } else {
      sum += clamped_cross_entropy(s, labels[i]);
    }
  }
  return sum / static_cast<double>(batch.rows());
}

LossBreakdown total_loss(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch,
                         const Eigen::Ref<const Eigen::VectorXd>& labels, TaskKind task,
                         const MonotoneSpec& spec, double penalty_weight) {
  if (penalty_weight < 0.0) throw ConfigError("total_loss: penalty weight must be nonnegative");
  LossBreakdown b;
  b.empirical = empirical_risk(model, batch, labels, task);
  b.penalty = penalty(model, batch, spec);
  b.total = b.empirical + penalty_weight * b.penalty;
  return b;
}

// ---------------------------------------------------------------------------
// ObjectiveProgram

ObjectiveProgram::ObjectiveProgram(const MlpModel& model, TaskKind task, const MonotoneSpec& spec,
                                   Kind kind)
    : kind_(kind),
      task_(task),
      spec_(spec),
      input_dim_(model.input_dim()),
      param_count_(parameter_count(model)),
      needs_penalty_(kind != Kind::kEmpirical) {
  if (needs_penalty_) {
    spec_.validate(input_dim_);
    if (model.hidden_activation == HiddenActivation::kRelu) {
      static bool warned = false;
      if (!warned) {
        warned = true;
        std::cerr << "monotonn: warning: relu activations make the penalty's parameter "
                     "gradient piecewise; derivative graphs are rebuilt per example\n";
      }
    }
  }
  cacheable_ = !(needs_penalty_ && model.hidden_activation == HiddenActivation::kRelu);

  std::vector<NodeId> x_nodes(static_cast<std::size_t>(input_dim_));
  for (int j = 0; j < input_dim_; ++j) {
    x_nodes[static_cast<std::size_t>(j)] = base_.input("x" + std::to_string(j), 0.0);
  }
  base_.input("y", 0.0);
  base_.input("c_emp", 0.0);
  base_.input("c_pen", 0.0);
  std::vector<NodeId> theta_nodes(param_count_);
  const Eigen::VectorXd theta0 = get_parameters(model);
  for (std::size_t p = 0; p < param_count_; ++p) {
    theta_nodes[p] = base_.input("t" + std::to_string(p), theta0[static_cast<Eigen::Index>(p)]);
  }
  const NodeId s = record_score(base_, model, x_nodes, theta_nodes);
  base_.set_output(s);

  theta_ = theta0;
  if (cacheable_) program_ = assemble(base_);
}

ObjectiveProgram::Assembled ObjectiveProgram::assemble(const Tape& base) const {
  Assembled a;
  NodeId score_node;
  std::vector<NodeId> x_grads;
  if (needs_penalty_) {
    GradientGraph g = backward_as_graph(base, base.output());
    score_node = g.replayed[static_cast<std::size_t>(base.output())];
    for (int j = 0; j < input_dim_; ++j) x_grads.push_back(g.gradient_node(j));
    a.tape = std::move(g.tape);
    a.forward_end = base.size() - 1;
    a.adjoint_end = a.tape.size() - 1;
  } else {
    a.tape = base;
    score_node = base.output();
    a.forward_end = base.size() - 1;
    a.adjoint_end = a.forward_end;
  }
  Tape& t = a.tape;
  const NodeId y = t.slot_node(input_dim_);
  const NodeId c_emp = t.slot_node(input_dim_ + 1);
  const NodeId c_pen = t.slot_node(input_dim_ + 2);

  if (needs_penalty_) {
    NodeId div = kNoNode;
    for (const MonotoneEntry& e : spec_.entries) {
      NodeId g = x_grads[static_cast<std::size_t>(e.feature_index)];
      if (g == kNoNode) continue;  // score provably independent of this feature
      if (e.direction < 0) g = t.neg(g);
      div = div == kNoNode ? g : t.add(div, g);
    }
    if (div == kNoNode) div = t.constant(0.0);
    a.pen_node = t.max0(t.neg(div));
  }

  // Per-example empirical risk; evaluated even for pure-penalty programs
  // so training logs stay complete.
  if (task_ == TaskKind::kRegression) {
    const NodeId d = t.sub(score_node, y);
    a.emp_node = t.mul(d, d);
  } else {
    const NodeId lo = t.constant(kProbFloor);
    const NodeId hi = t.constant(kProbCeil);
    const NodeId one = t.constant(1.0);
    const NodeId p = t.sigmoid(score_node);
    const NodeId pc = t.add(lo, t.sub(t.max0(t.sub(p, lo)), t.max0(t.sub(p, hi))));
    const NodeId pos = t.mul(y, t.log(pc));
    const NodeId neg = t.mul(t.sub(one, y), t.log(t.sub(one, pc)));
    a.emp_node = t.neg(t.add(pos, neg));
  }

  switch (kind_) {
    case Kind::kEmpirical:
      a.total_node = t.mul(c_emp, a.emp_node);
      break;
    case Kind::kPenalty:
      a.total_node = t.mul(c_pen, a.pen_node);
      break;
    case Kind::kTotal:
      a.total_node = t.add(t.mul(c_emp, a.emp_node), t.mul(c_pen, a.pen_node));
      break;
  }
  t.set_output(a.total_node);
  return a;
}

const char* ObjectiveProgram::section_of(NodeId node, const Assembled& a) const {
  if (node < 0) return "objective";
  if (node <= a.forward_end) return "forward pass";
  if (node <= a.adjoint_end) return "divergence differentiation (penalty term)";
  if (a.pen_node != kNoNode && node <= a.pen_node) return "penalty term";
  if (a.emp_node != kNoNode && node <= a.emp_node) return "empirical term";
  return "objective combination";
}

void ObjectiveProgram::set_theta(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != static_cast<Eigen::Index>(param_count_)) {
    throw ConfigError("objective: parameter vector length mismatch");
  }
  theta_ = theta;
  Tape& t = cacheable_ ? program_.tape : base_;
  const int base_slot = input_dim_ + 3;
  for (std::size_t p = 0; p < param_count_; ++p) {
    t.set_input(base_slot + static_cast<int>(p), theta[static_cast<Eigen::Index>(p)]);
  }
}

ObjectiveProgram::Values ObjectiveProgram::eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                                                double y, double c_emp, double c_pen,
                                                Eigen::VectorXd* grad) {
  if (x.size() != input_dim_) throw ConfigError("objective: input dimension mismatch");

  Tape* t = nullptr;
  try {
    if (cacheable_) {
      t = &program_.tape;
      for (int j = 0; j < input_dim_; ++j) t->set_input(j, x[j]);
      t->set_input(input_dim_, y);
      t->set_input(input_dim_ + 1, c_emp);
      t->set_input(input_dim_ + 2, c_pen);
      t->replay();
    } else {
      for (int j = 0; j < input_dim_; ++j) base_.set_input(j, x[j]);
      base_.set_input(input_dim_, y);
      base_.set_input(input_dim_ + 1, c_emp);
      base_.set_input(input_dim_ + 2, c_pen);
      base_.replay();
      program_ = assemble(base_);
      t = &program_.tape;
    }
  } catch (const EvalError& e) {
    throw NumericError(std::string("objective: non-finite value in ") +
                       section_of(static_cast<NodeId>(e.node()), program_) + ": " + e.what());
  }

  Values v;
  v.empirical = program_.emp_node != kNoNode ? t->value(program_.emp_node) : 0.0;
  v.penalty = program_.pen_node != kNoNode ? t->value(program_.pen_node) : 0.0;

  if (grad != nullptr) {
    backward_into(*t, program_.total_node, adjoint_);
    const int base_slot = input_dim_ + 3;
    for (std::size_t p = 0; p < param_count_; ++p) {
      (*grad)[static_cast<Eigen::Index>(p)] +=
          adjoint_[static_cast<std::size_t>(t->slot_node(base_slot + static_cast<int>(p)))];
    }
  }
  return v;
}

Eigen::VectorXd parameter_gradient(const MlpModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& batch,
                                   const Eigen::Ref<const Eigen::VectorXd>& labels, TaskKind task,
                                   const MonotoneSpec& spec, double penalty_weight) {
  if (penalty_weight < 0.0) {
    throw ConfigError("parameter_gradient: penalty weight must be nonnegative");
  }
  if (batch.rows() == 0) throw ConfigError("parameter_gradient: empty batch");
  if (batch.rows() != labels.size()) throw ConfigError("parameter_gradient: label count mismatch");
  check_labels(labels, task);

  ObjectiveProgram prog(model, task, spec, ObjectiveProgram::Kind::kTotal);
  prog.set_theta(get_parameters(model));
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count(model)));
  const double c_emp = 1.0 / static_cast<double>(batch.rows());
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const Eigen::VectorXd x = batch.row(i);
    prog.eval(x, labels[i], c_emp, penalty_weight, &grad);
  }
  if (!grad.allFinite()) {
    throw NumericError("parameter_gradient: non-finite gradient");
  }
  return grad;
}

}  // namespace monotonn
