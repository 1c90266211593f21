#include "monotonn/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "monotonn/errors.hpp"

namespace monotonn {

namespace {

// Stable logistic; exact 0/1 saturation only far outside any range the
// toolkit produces under finite losses.
double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x) without overflow for large |x|.
double stable_softplus(double x) {
  if (x > 0.0) {
    return x + std::log1p(std::exp(-x));
  }
  return std::log1p(std::exp(x));
}

}  // namespace

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::kInput: return "input";
    case OpKind::kConst: return "const";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kDiv: return "div";
    case OpKind::kNeg: return "neg";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kExp: return "exp";
    case OpKind::kSin: return "sin";
    case OpKind::kLog: return "log";
    case OpKind::kMax0: return "max0";
  }
  return "?";
}

int op_arity(OpKind op) {
  switch (op) {
    case OpKind::kInput:
    case OpKind::kConst:
      return 0;
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kDiv:
      return 2;
    default:
      return 1;
  }
}

NodeId Tape::input(std::string name, double value) {
  if (slot_lookup_.contains(name)) {
    throw ConfigError("tape: duplicate input slot '" + name + "'");
  }
  if (!std::isfinite(value)) {
    throw EvalError("tape: non-finite value for input '" + name + "'");
  }
  TapeNode n;
  n.op = OpKind::kInput;
  n.value = value;
  nodes_.push_back(n);
  const NodeId id = static_cast<NodeId>(nodes_.size() - 1);
  slot_lookup_.emplace(name, static_cast<int>(slot_nodes_.size()));
  slot_names_.push_back(std::move(name));
  slot_nodes_.push_back(id);
  return id;
}

NodeId Tape::constant(double value) {
  if (!std::isfinite(value)) {
    throw EvalError("tape: non-finite constant");
  }
  TapeNode n;
  n.op = OpKind::kConst;
  n.value = value;
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::set_output(NodeId id) {
  if (id < 0 || id >= size()) {
    throw ConfigError("tape: output node out of range");
  }
  output_ = id;
}

int Tape::slot_index(std::string_view name) const {
  auto it = slot_lookup_.find(std::string(name));
  return it == slot_lookup_.end() ? -1 : it->second;
}

void Tape::set_input(int slot, double value) {
  if (!std::isfinite(value)) {
    throw EvalError("tape: non-finite value for input slot " + std::to_string(slot));
  }
  nodes_[static_cast<std::size_t>(slot_nodes_[static_cast<std::size_t>(slot)])].value = value;
}

void Tape::set_input(std::string_view name, double value) {
  const int slot = slot_index(name);
  if (slot < 0) {
    throw ConfigError("tape: unknown input slot '" + std::string(name) + "'");
  }
  set_input(slot, value);
}

void Tape::compute(TapeNode& n, NodeId id) {
  const double a = n.parents[0] >= 0 ? nodes_[static_cast<std::size_t>(n.parents[0])].value : 0.0;
  const double b = n.parents[1] >= 0 ? nodes_[static_cast<std::size_t>(n.parents[1])].value : 0.0;
  switch (n.op) {
    case OpKind::kInput:
    case OpKind::kConst:
      return;
    case OpKind::kAdd:
      n.value = a + b;
      n.local_partials[0] = 1.0;
      n.local_partials[1] = 1.0;
      break;
    case OpKind::kSub:
      n.value = a - b;
      n.local_partials[0] = 1.0;
      n.local_partials[1] = -1.0;
      break;
    case OpKind::kMul:
      n.value = a * b;
      n.local_partials[0] = b;
      n.local_partials[1] = a;
      break;
    case OpKind::kDiv:
      n.value = a / b;
      n.local_partials[0] = 1.0 / b;
      n.local_partials[1] = -n.value / b;
      break;
    case OpKind::kNeg:
      n.value = -a;
      n.local_partials[0] = -1.0;
      break;
    case OpKind::kTanh: {
      const double t = std::tanh(a);
      n.value = t;
      n.local_partials[0] = 1.0 - t * t;
      break;
    }
    case OpKind::kSigmoid: {
      const double s = stable_sigmoid(a);
      n.value = s;
      n.local_partials[0] = s * (1.0 - s);
      break;
    }
    case OpKind::kSoftplus:
      n.value = stable_softplus(a);
      n.local_partials[0] = stable_sigmoid(a);
      break;
    case OpKind::kExp:
      n.value = std::exp(a);
      n.local_partials[0] = n.value;
      break;
    case OpKind::kSin:
      n.value = std::sin(a);
      n.local_partials[0] = std::cos(a);
      break;
    case OpKind::kLog:
      n.value = std::log(a);
      n.local_partials[0] = 1.0 / a;
      break;
    case OpKind::kMax0:
      // Subgradient at exactly 0 is 0: the hinge stays inactive on the boundary.
      n.value = a > 0.0 ? a : 0.0;
      n.local_partials[0] = a > 0.0 ? 1.0 : 0.0;
      break;
  }
  if (!std::isfinite(n.value)) {
    throw EvalError("tape: node " + std::to_string(id) + " (" + op_name(n.op) +
                    ") produced a non-finite value", id);
  }
}

NodeId Tape::push(OpKind op, NodeId a, NodeId b) {
  const NodeId next = size();
  if (a < 0 || a >= next || (op_arity(op) == 2 && (b < 0 || b >= next))) {
    throw ConfigError("tape: operand out of range for " + std::string(op_name(op)));
  }
  TapeNode n;
  n.op = op;
  n.parents[0] = a;
  n.parents[1] = op_arity(op) == 2 ? b : kNoNode;
  nodes_.push_back(n);
  compute(nodes_.back(), next);
  return next;
}

void Tape::replay() {
  for (NodeId i = 0; i < size(); ++i) {
    compute(nodes_[static_cast<std::size_t>(i)], i);
  }
}

Tape record(const std::function<NodeId(Tape&)>& build) {
  Tape tape;
  const NodeId out = build(tape);
  if (out < 0 || out >= tape.size()) {
    throw ConfigError("record: builder returned an invalid output node");
  }
  tape.set_output(out);
  return tape;
}

void backward_into(const Tape& tape, NodeId seed, std::vector<double>& adjoint) {
  if (seed < 0 || seed >= tape.size()) {
    throw ConfigError("backward: seed node out of range");
  }
  adjoint.assign(static_cast<std::size_t>(tape.size()), 0.0);
  adjoint[static_cast<std::size_t>(seed)] = 1.0;
  for (NodeId i = seed; i >= 0; --i) {
    const double a = adjoint[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    const TapeNode& n = tape.node(i);
    if (n.parents[0] >= 0) {
      adjoint[static_cast<std::size_t>(n.parents[0])] += a * n.local_partials[0];
    }
    if (n.parents[1] >= 0) {
      adjoint[static_cast<std::size_t>(n.parents[1])] += a * n.local_partials[1];
    }
  }
}

std::vector<double> slot_gradients(const Tape& tape, NodeId seed) {
  std::vector<double> adjoint;
  backward_into(tape, seed, adjoint);
  std::vector<double> out(static_cast<std::size_t>(tape.slot_count()));
  for (int s = 0; s < tape.slot_count(); ++s) {
    out[static_cast<std::size_t>(s)] = adjoint[static_cast<std::size_t>(tape.slot_node(s))];
  }
  return out;
}

std::map<std::string, double> backward(const Tape& tape, NodeId seed) {
  const std::vector<double> grads = slot_gradients(tape, seed);
  std::map<std::string, double> out;
  for (int s = 0; s < tape.slot_count(); ++s) {
    out[tape.slot_name(s)] = grads[static_cast<std::size_t>(s)];
  }
  return out;
}

namespace {

// Emits nodes computing adj * d(node)/d(parents[k]) on `out`, given the
// replayed operands. Returns kNoNode for branches that are exactly zero.
struct AdjointEmitter {
  Tape& out;
  const Tape& src;
  const std::vector<NodeId>& replayed;
  NodeId one = kNoNode;
  NodeId half_pi = kNoNode;

  NodeId const_one() {
    if (one == kNoNode) one = out.constant(1.0);
    return one;
  }
  NodeId const_half_pi() {
    if (half_pi == kNoNode) half_pi = out.constant(std::numbers::pi / 2.0);
    return half_pi;
  }

  NodeId contribution(NodeId i, int k, NodeId adj) {
    const TapeNode& n = src.node(i);
    const NodeId p = replayed[static_cast<std::size_t>(n.parents[k])];
    const NodeId self = replayed[static_cast<std::size_t>(i)];
    switch (n.op) {
      case OpKind::kAdd:
        return adj;
      case OpKind::kSub:
        return k == 0 ? adj : out.neg(adj);
      case OpKind::kMul: {
        const NodeId other = replayed[static_cast<std::size_t>(n.parents[1 - k])];
        return out.mul(adj, other);
      }
      case OpKind::kDiv: {
        const NodeId denom = replayed[static_cast<std::size_t>(n.parents[1])];
        if (k == 0) return out.div(adj, denom);
        // d(a/b)/db = -(a/b)/b
        return out.neg(out.div(out.mul(adj, self), denom));
      }
      case OpKind::kNeg:
        return out.neg(adj);
      case OpKind::kTanh:
        return out.mul(adj, out.sub(const_one(), out.mul(self, self)));
      case OpKind::kSigmoid:
        return out.mul(adj, out.mul(self, out.sub(const_one(), self)));
      case OpKind::kSoftplus:
        return out.mul(adj, out.sigmoid(p));
      case OpKind::kExp:
        return out.mul(adj, self);
      case OpKind::kSin:
        // cos(x) written as sin(x + pi/2) to stay inside the primitive set.
        return out.mul(adj, out.sin(out.add(p, const_half_pi())));
      case OpKind::kLog:
        return out.div(adj, p);
      case OpKind::kMax0:
        // Piecewise-constant subgradient, frozen at the recorded sign.
        return src.node(n.parents[0]).value > 0.0 ? adj : kNoNode;
      default:
        throw EvalError(std::string("backward_as_graph: primitive '") + op_name(n.op) +
                        "' has no recordable derivative");
    }
  }
};

}  // namespace

GradientGraph backward_as_graph(const Tape& src, NodeId seed) {
  if (seed < 0 || seed >= src.size()) {
    throw ConfigError("backward_as_graph: seed node out of range");
  }

  GradientGraph g;
  g.replayed.assign(static_cast<std::size_t>(src.size()), kNoNode);

  // Slot index per source node, for re-creating the named inputs.
  std::vector<int> slot_of(static_cast<std::size_t>(src.size()), -1);
  for (int s = 0; s < src.slot_count(); ++s) {
    slot_of[static_cast<std::size_t>(src.slot_node(s))] = s;
  }

  for (NodeId i = 0; i < src.size(); ++i) {
    const TapeNode& n = src.node(i);
    NodeId copy = kNoNode;
    switch (n.op) {
      case OpKind::kInput:
        copy = g.tape.input(src.slot_name(slot_of[static_cast<std::size_t>(i)]), n.value);
        break;
      case OpKind::kConst:
        copy = g.tape.constant(n.value);
        break;
      default: {
        const NodeId a = g.replayed[static_cast<std::size_t>(n.parents[0])];
        const NodeId b = n.parents[1] >= 0 ? g.replayed[static_cast<std::size_t>(n.parents[1])] : kNoNode;
        switch (n.op) {
          case OpKind::kAdd: copy = g.tape.add(a, b); break;
          case OpKind::kSub: copy = g.tape.sub(a, b); break;
          case OpKind::kMul: copy = g.tape.mul(a, b); break;
          case OpKind::kDiv: copy = g.tape.div(a, b); break;
          case OpKind::kNeg: copy = g.tape.neg(a); break;
          case OpKind::kTanh: copy = g.tape.tanh(a); break;
          case OpKind::kSigmoid: copy = g.tape.sigmoid(a); break;
          case OpKind::kSoftplus: copy = g.tape.softplus(a); break;
          case OpKind::kExp: copy = g.tape.exp(a); break;
          case OpKind::kSin: copy = g.tape.sin(a); break;
          case OpKind::kLog: copy = g.tape.log(a); break;
          case OpKind::kMax0: copy = g.tape.max0(a); break;
          default:
            throw EvalError("backward_as_graph: unexpected op");
        }
        break;
      }
    }
    g.replayed[static_cast<std::size_t>(i)] = copy;
  }

  AdjointEmitter emit{g.tape, src, g.replayed};

  // adj[i]: node on g.tape computing d seed / d src-node-i, or kNoNode when
  // the seed provably does not depend on node i.
  std::vector<NodeId> adj(static_cast<std::size_t>(seed) + 1, kNoNode);
  adj[static_cast<std::size_t>(seed)] = g.tape.constant(1.0);
  for (NodeId i = seed; i >= 0; --i) {
    const NodeId a = adj[static_cast<std::size_t>(i)];
    if (a == kNoNode) continue;
    const TapeNode& n = src.node(i);
    const int arity = op_arity(n.op);
    for (int k = 0; k < arity; ++k) {
      const NodeId contrib = emit.contribution(i, k, a);
      if (contrib == kNoNode) continue;
      NodeId& slot = adj[static_cast<std::size_t>(n.parents[k])];
      slot = slot == kNoNode ? contrib : g.tape.add(slot, contrib);
    }
  }

  g.slot_gradient_nodes.assign(static_cast<std::size_t>(src.slot_count()), kNoNode);
  for (int s = 0; s < src.slot_count(); ++s) {
    const NodeId node = src.slot_node(s);
    if (node <= seed) {
      g.slot_gradient_nodes[static_cast<std::size_t>(s)] = adj[static_cast<std::size_t>(node)];
    }
  }
  g.tape.set_output(g.replayed[static_cast<std::size_t>(seed)]);
  return g;
}

}  // namespace monotonn
