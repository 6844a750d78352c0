#ifndef TWPARSE_GRAPH_H
#define TWPARSE_GRAPH_H

#include <cstdint>
#include <span>
#include <vector>

#include "twparse/model.h"
#include "twparse/rng.h"
#include "twparse/tensor.h"

namespace twparse {

// One forward computation recorded as a tape; backward() walks it in reverse
// exactly once. Graphs are cheap, single-owner objects: build one per
// sentence, call backward at most once, throw it away.
class Graph {
 public:
  using NodeId = int;

  NodeId input(Tensor value);
  NodeId param(Parameter* p);
  NodeId lookup(Parameter* table, int row);

  NodeId matvec(NodeId W, NodeId x);
  NodeId affine(NodeId W, NodeId x, NodeId b);  // W*x + b
  NodeId add(NodeId a, NodeId b);
  NodeId cmult(NodeId a, NodeId b);
  NodeId scale(NodeId a, double k);
  NodeId tanh_n(NodeId a);
  NodeId logistic(NodeId a);
  NodeId relu(NodeId a);
  NodeId concat(std::span<const NodeId> xs);
  NodeId slice(NodeId a, int start, int len);
  NodeId dropout(NodeId a, double rate, Rng& rng);
  NodeId pick(NodeId a, int index);  // scalar component
  NodeId sum(std::span<const NodeId> scalars);

  // -log softmax(logits)[gold], softmax restricted to `support`
  // (empty support = all entries).
  NodeId pickneglogsoftmax(NodeId logits, int gold, std::vector<int> support = {});

  // alpha * sum_a -p(a) log q(a) + (1-alpha) * (-log q(gold)), with
  // q = softmax(logits) over `support` and p = `target` (indexed like
  // support). gold = -1 is only valid when alpha == 1.
  NodeId distill_loss(NodeId logits, std::vector<int> support,
                      std::vector<double> target, double alpha, int gold);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }

  // Accumulates parameter gradients for a scalar loss node.
  void backward(NodeId loss);

  size_t num_nodes() const { return nodes_.size(); }

  // Count of log q clampings at 1e-12 (near-zero teacher-supported actions).
  static uint64_t clamp_warnings();

 private:
  enum class Op : uint8_t {
    kInput, kParam, kLookup, kMatVec, kAdd, kCMult, kScale,
    kTanh, kLogistic, kRelu, kConcat, kSlice, kDropout, kPick, kSum,
    kNegLogSoftmax, kDistill,
  };

  struct Node {
    Op op;
    int a = -1, b = -1, c = -1;
    std::vector<int> list;
    int index = 0;
    int len = 0;
    double scalar = 0.0;
    Parameter* p = nullptr;
    std::vector<int> support;
    std::vector<double> target;
    std::vector<double> aux;  // op-specific cache (softmax probs, masks)
    Tensor value;
    Tensor grad;
  };

  NodeId push(Node n);
  void check_vec(NodeId id, const char* who) const;

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace twparse

#endif
