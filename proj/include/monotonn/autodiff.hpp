#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace monotonn {

/// Primitive operations recordable on a tape. Leaves are inputs (named
/// variables) and constants; everything else is unary or binary.
enum class OpKind : std::uint8_t {
  kInput,
  kConst,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kTanh,
  kSigmoid,
  kSoftplus,
  kExp,
  kSin,
  kLog,
  kMax0,
};

const char* op_name(OpKind op);
int op_arity(OpKind op);

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// One recorded operation: its value and the local partial derivatives
/// with respect to each parent, both evaluated at the recorded inputs.
/// Parents always precede the node, so a single reverse sweep suffices.
struct TapeNode {
  double value = 0.0;
  double local_partials[2] = {0.0, 0.0};
  NodeId parents[2] = {kNoNode, kNoNode};
  OpKind op = OpKind::kConst;
};

/// Append-only scalar computation graph. Single writer while recording;
/// immutable afterwards, so concurrent backward passes are safe. Named
/// input slots can be rewritten and the whole tape re-evaluated with
/// replay(), which reproduces values bit-for-bit for identical inputs.
class Tape {
 public:
  NodeId input(std::string name, double value);
  NodeId constant(double value);

  NodeId add(NodeId a, NodeId b) { return push(OpKind::kAdd, a, b); }
  NodeId sub(NodeId a, NodeId b) { return push(OpKind::kSub, a, b); }
  NodeId mul(NodeId a, NodeId b) { return push(OpKind::kMul, a, b); }
  NodeId div(NodeId a, NodeId b) { return push(OpKind::kDiv, a, b); }
  NodeId neg(NodeId a) { return push(OpKind::kNeg, a, kNoNode); }
  NodeId tanh(NodeId a) { return push(OpKind::kTanh, a, kNoNode); }
  NodeId sigmoid(NodeId a) { return push(OpKind::kSigmoid, a, kNoNode); }
  NodeId softplus(NodeId a) { return push(OpKind::kSoftplus, a, kNoNode); }
  NodeId exp(NodeId a) { return push(OpKind::kExp, a, kNoNode); }
  NodeId sin(NodeId a) { return push(OpKind::kSin, a, kNoNode); }
  NodeId log(NodeId a) { return push(OpKind::kLog, a, kNoNode); }
  NodeId max0(NodeId a) { return push(OpKind::kMax0, a, kNoNode); }

  double value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const TapeNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  NodeId size() const { return static_cast<NodeId>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }

  /// Designated scalar output (the last node recorded by record()).
  NodeId output() const { return output_; }
  void set_output(NodeId id);

  int slot_count() const { return static_cast<int>(slot_nodes_.size()); }
  const std::string& slot_name(int slot) const { return slot_names_[static_cast<std::size_t>(slot)]; }
  NodeId slot_node(int slot) const { return slot_nodes_[static_cast<std::size_t>(slot)]; }
  /// Index of a named slot, or -1 when absent.
  int slot_index(std::string_view name) const;

  /// Overwrite an input slot's value. Takes effect on the next replay().
  void set_input(int slot, double value);
  void set_input(std::string_view name, double value);

  /// Recompute every node's value and local partials in tape order.
  void replay();

 private:
  NodeId push(OpKind op, NodeId a, NodeId b);
  void compute(TapeNode& n, NodeId id);

  std::vector<TapeNode> nodes_;
  std::vector<std::string> slot_names_;
  std::vector<NodeId> slot_nodes_;
  std::unordered_map<std::string, int> slot_lookup_;
  NodeId output_ = kNoNode;
};

/// Record an expression built through the supported primitives. The
/// builder receives the fresh tape and returns the output node.
Tape record(const std::function<NodeId(Tape&)>& build);

/// Reverse sweep seeded at `seed`; fills `adjoint` (resized to the tape
/// length) with d seed / d node for every node. Reusable workspace API.
void backward_into(const Tape& tape, NodeId seed, std::vector<double>& adjoint);

/// Derivatives of `seed` with respect to every input slot, in slot order.
/// Inputs the seed does not depend on get 0.
std::vector<double> slot_gradients(const Tape& tape, NodeId seed);

/// Derivatives of `seed` keyed by input-slot name.
std::map<std::string, double> backward(const Tape& tape, NodeId seed);

/// The reverse pass of `src` re-recorded as a tape of its own: a replay
/// of the source computation followed by nodes that compute d seed / d x
/// for every input slot, all expressed in the same primitive set. Running
/// backward over this tape therefore yields second-order derivatives of
/// the source. max0 contributes its subgradient as a branch frozen at the
/// recorded operand sign, so graphs containing max0 upstream of the seed
/// are only differentiable in the piecewise sense.
struct GradientGraph {
  Tape tape;
  /// Source node id -> id of its replay in `tape`.
  std::vector<NodeId> replayed;
  /// Per source input slot: node computing the derivative, or kNoNode
  /// when the seed does not depend on that slot (derivative identically 0).
  std::vector<NodeId> slot_gradient_nodes;

  NodeId gradient_node(int slot) const { return slot_gradient_nodes[static_cast<std::size_t>(slot)]; }
};

GradientGraph backward_as_graph(const Tape& src, NodeId seed);

}  // namespace monotonn
