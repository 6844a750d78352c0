#include "twparse/graph.h"

#include <atomic>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace twparse {

namespace {
std::atomic<uint64_t> g_clamp_warnings{0};
constexpr double kLogClamp = -27.631021115928547;  // log(1e-12)

// Stable log-softmax over a subset; probs (aux) and logq share support order.
void log_softmax_support_(const Tensor& logits, const std::vector<int>& support,
                          std::vector<double>* logq, std::vector<double>* q) {
  double m = -1e300;
  for (int a : support) m = std::max(m, logits[a]);
  double s = 0.0;
  for (int a : support) s += std::exp(logits[a] - m);
  double logs = std::log(s);
  logq->resize(support.size());
  q->resize(support.size());
  for (size_t i = 0; i < support.size(); ++i) {
    (*logq)[i] = logits[support[i]] - m - logs;
    (*q)[i] = std::exp((*logq)[i]);
  }
}
}  // namespace

std::vector<double> softmax_over(const Tensor& logits, const std::vector<int>& support) {
  std::vector<int> sup = support;
  if (sup.empty())
    for (int i = 0; i < logits.rows; ++i) sup.push_back(i);
  std::vector<double> logq, q;
  log_softmax_support_(logits, sup, &logq, &q);
  return q;
}

uint64_t Graph::clamp_warnings() { return g_clamp_warnings.load(); }

Graph::NodeId Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Graph::check_vec(NodeId id, const char* who) const {
  if (nodes_[id].value.cols != 1)
    throw std::logic_error(std::string(who) + ": expected a column vector");
}

Graph::NodeId Graph::input(Tensor value) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(value);
  return push(std::move(n));
}

Graph::NodeId Graph::param(Parameter* p) {
  Node n;
  n.op = Op::kParam;
  n.p = p;
  n.value = p->value;
  return push(std::move(n));
}

Graph::NodeId Graph::lookup(Parameter* table, int row) {
  if (row < 0 || row >= table->value.rows)
    throw DataError("lookup index " + std::to_string(row) + " out of bounds for " +
                    table->name + " (" + std::to_string(table->value.rows) + " rows)");
  Node n;
  n.op = Op::kLookup;
  n.p = table;
  n.index = row;
  n.value = Tensor(table->value.cols, 1);
  for (int j = 0; j < table->value.cols; ++j) n.value[j] = table->value(row, j);
  return push(std::move(n));
}

Graph::NodeId Graph::matvec(NodeId W, NodeId x) {
  const Tensor& w = nodes_[W].value;
  const Tensor& xv = nodes_[x].value;
  if (w.cols != xv.rows || xv.cols != 1)
    throw std::logic_error("matvec: dimension mismatch " + std::to_string(w.rows) +
                           "x" + std::to_string(w.cols) + " * " +
                           std::to_string(xv.rows));
  Node n;
  n.op = Op::kMatVec;
  n.a = W;
  n.b = x;
  n.value = Tensor(w.rows, 1);
  for (int r = 0; r < w.rows; ++r) {
    double acc = 0.0;
    const double* wr = &w.v[static_cast<size_t>(r) * w.cols];
    for (int c = 0; c < w.cols; ++c) acc += wr[c] * xv[c];
    n.value[r] = acc;
  }
  return push(std::move(n));
}

Graph::NodeId Graph::affine(NodeId W, NodeId x, NodeId b) {
  NodeId wx = matvec(W, x);
  return add(wx, b);
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& av = nodes_[a].value;
  const Tensor& bv = nodes_[b].value;
  if (!av.same_shape(bv)) throw std::logic_error("add: shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.value = av;
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] += bv[i];
  return push(std::move(n));
}

Graph::NodeId Graph::cmult(NodeId a, NodeId b) {
  const Tensor& av = nodes_[a].value;
  const Tensor& bv = nodes_[b].value;
  if (!av.same_shape(bv)) throw std::logic_error("cmult: shape mismatch");
  Node n;
  n.op = Op::kCMult;
  n.a = a;
  n.b = b;
  n.value = av;
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] *= bv[i];
  return push(std::move(n));
}

Graph::NodeId Graph::scale(NodeId a, double k) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.scalar = k;
  n.value = nodes_[a].value;
  for (double& x : n.value.v) x *= k;
  return push(std::move(n));
}

Graph::NodeId Graph::tanh_n(NodeId a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.value = nodes_[a].value;
  for (double& x : n.value.v) x = std::tanh(x);
  return push(std::move(n));
}

Graph::NodeId Graph::logistic(NodeId a) {
  Node n;
  n.op = Op::kLogistic;
  n.a = a;
  n.value = nodes_[a].value;
  for (double& x : n.value.v) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(n));
}

Graph::NodeId Graph::relu(NodeId a) {
  Node n;
  n.op = Op::kRelu;
  n.a = a;
  n.value = nodes_[a].value;
  for (double& x : n.value.v) x = x > 0.0 ? x : 0.0;
  return push(std::move(n));
}

Graph::NodeId Graph::concat(std::span<const NodeId> xs) {
  Node n;
  n.op = Op::kConcat;
  int total = 0;
  for (NodeId id : xs) {
    check_vec(id, "concat");
    total += nodes_[id].value.rows;
    n.list.push_back(id);
  }
  n.value = Tensor(total, 1);
  int at = 0;
  for (NodeId id : xs) {
    const Tensor& xv = nodes_[id].value;
    for (int i = 0; i < xv.rows; ++i) n.value[at++] = xv[i];
  }
  return push(std::move(n));
}

Graph::NodeId Graph::slice(NodeId a, int start, int len) {
  check_vec(a, "slice");
  const Tensor& av = nodes_[a].value;
  if (start < 0 || start + len > av.rows) throw std::logic_error("slice: out of range");
  Node n;
  n.op = Op::kSlice;
  n.a = a;
  n.index = start;
  n.len = len;
  n.value = Tensor(len, 1);
  for (int i = 0; i < len; ++i) n.value[i] = av[start + i];
  return push(std::move(n));
}

Graph::NodeId Graph::dropout(NodeId a, double rate, Rng& rng) {
  if (rate <= 0.0) return a;
  Node n;
  n.op = Op::kDropout;
  n.a = a;
  n.value = nodes_[a].value;
  n.aux.resize(n.value.size());
  double keep = 1.0 - rate;
  for (size_t i = 0; i < n.value.size(); ++i) {
    double m = rng.uniform01() >= rate ? 1.0 / keep : 0.0;
    n.aux[i] = m;
    n.value[i] *= m;
  }
  return push(std::move(n));
}

Graph::NodeId Graph::pick(NodeId a, int index) {
  check_vec(a, "pick");
  Node n;
  n.op = Op::kPick;
  n.a = a;
  n.index = index;
  n.value = Tensor(1, 1);
  n.value[0] = nodes_[a].value[index];
  return push(std::move(n));
}

Graph::NodeId Graph::sum(std::span<const NodeId> scalars) {
  Node n;
  n.op = Op::kSum;
  n.value = Tensor(1, 1);
  for (NodeId id : scalars) {
    n.list.push_back(id);
    n.value[0] += nodes_[id].value[0];
  }
  return push(std::move(n));
}

Graph::NodeId Graph::pickneglogsoftmax(NodeId logits, int gold, std::vector<int> support) {
  check_vec(logits, "pickneglogsoftmax");
  const Tensor& z = nodes_[logits].value;
  if (support.empty())
    for (int i = 0; i < z.rows; ++i) support.push_back(i);
  int gold_pos = -1;
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i] == gold) gold_pos = static_cast<int>(i);
  if (gold_pos < 0) throw std::logic_error("pickneglogsoftmax: gold outside support");

  Node n;
  n.op = Op::kNegLogSoftmax;
  n.a = logits;
  n.index = gold_pos;
  n.support = std::move(support);
  std::vector<double> logq;
  log_softmax_support_(z, n.support, &logq, &n.aux);
  n.value = Tensor(1, 1);
  n.value[0] = -logq[gold_pos];
  return push(std::move(n));
}

Graph::NodeId Graph::distill_loss(NodeId logits, std::vector<int> support,
                                  std::vector<double> target, double alpha, int gold) {
  check_vec(logits, "distill_loss");
  if (support.size() != target.size())
    throw std::logic_error("distill_loss: target/support size mismatch");
  if (gold < 0 && alpha < 1.0)
    throw std::logic_error("distill_loss: gold action required when alpha < 1");
  int gold_pos = -1;
  if (gold >= 0) {
    for (size_t i = 0; i < support.size(); ++i)
      if (support[i] == gold) gold_pos = static_cast<int>(i);
    if (gold_pos < 0) throw std::logic_error("distill_loss: gold outside support");
  }

  Node n;
  n.op = Op::kDistill;
  n.a = logits;
  n.scalar = alpha;
  n.index = gold_pos;
  n.support = std::move(support);
  n.target = std::move(target);
  std::vector<double> logq;
  log_softmax_support_(nodes_[logits].value, n.support, &logq, &n.aux);

  double loss = 0.0;
  std::vector<double> clamp_ind(n.support.size(), 1.0);
  for (size_t i = 0; i < n.support.size(); ++i) {
    double lq = logq[i];
    if (lq < kLogClamp && (n.target[i] > 0.0 || static_cast<int>(i) == gold_pos)) {
      lq = kLogClamp;
      clamp_ind[i] = 0.0;  // clamped terms are constants in the backward pass
      g_clamp_warnings.fetch_add(1, std::memory_order_relaxed);
    }
    if (alpha > 0.0) loss += alpha * (-n.target[i] * lq);
    if (alpha < 1.0 && static_cast<int>(i) == gold_pos) loss += (1.0 - alpha) * (-lq);
  }
  n.aux.insert(n.aux.end(), clamp_ind.begin(), clamp_ind.end());
  n.value = Tensor(1, 1);
  n.value[0] = loss;
  return push(std::move(n));
}

void Graph::backward(NodeId loss) {
  if (backward_done_) throw std::logic_error("backward called twice on one graph");
  backward_done_ = true;
  if (nodes_[loss].value.size() != 1)
    throw std::logic_error("backward: loss must be a scalar");

  for (Node& n : nodes_) n.grad = Tensor(n.value.rows, n.value.cols);
  nodes_[loss].grad[0] = 1.0;

  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = nodes_[id];
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        if (n.p->trainable) {
          for (size_t i = 0; i < g.size(); ++i) n.p->grad.v[i] += g.v[i];
          if (n.p->lookup)
            for (int r = 0; r < n.p->value.rows; ++r) n.p->mark_touched(r);
        }
        break;
      case Op::kLookup:
        if (n.p->trainable) {
          n.p->mark_touched(n.index);
          for (int j = 0; j < g.rows; ++j) n.p->grad(n.index, j) += g[j];
        }
        break;
      case Op::kMatVec: {
        Node& W = nodes_[n.a];
        Node& x = nodes_[n.b];
        const Tensor& wv = W.value;
        for (int r = 0; r < wv.rows; ++r) {
          double gr = g[r];
          if (gr == 0.0) continue;
          double* wgr = &W.grad.v[static_cast<size_t>(r) * wv.cols];
          const double* wr = &wv.v[static_cast<size_t>(r) * wv.cols];
          for (int c = 0; c < wv.cols; ++c) {
            wgr[c] += gr * x.value[c];
            x.grad[c] += gr * wr[c];
          }
        }
        break;
      }
      case Op::kAdd:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad.v[i] += g.v[i];
          nodes_[n.b].grad.v[i] += g.v[i];
        }
        break;
      case Op::kCMult:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad.v[i] += g.v[i] * nodes_[n.b].value.v[i];
          nodes_[n.b].grad.v[i] += g.v[i] * nodes_[n.a].value.v[i];
        }
        break;
      case Op::kScale:
        for (size_t i = 0; i < g.size(); ++i) nodes_[n.a].grad.v[i] += g.v[i] * n.scalar;
        break;
      case Op::kTanh:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[i] * (1.0 - n.value.v[i] * n.value.v[i]);
        break;
      case Op::kLogistic:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[i] * n.value.v[i] * (1.0 - n.value.v[i]);
        break;
      case Op::kRelu:
        for (size_t i = 0; i < g.size(); ++i)
          if (nodes_[n.a].value.v[i] > 0.0) nodes_[n.a].grad.v[i] += g.v[i];
        break;
      case Op::kConcat: {
        int at = 0;
        for (int src : n.list) {
          Node& s = nodes_[src];
          for (int i = 0; i < s.value.rows; ++i) s.grad[i] += g[at++];
        }
        break;
      }
      case Op::kSlice:
        for (int i = 0; i < n.len; ++i) nodes_[n.a].grad[n.index + i] += g[i];
        break;
      case Op::kDropout:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad.v[i] += g.v[i] * n.aux[i];
        break;
      case Op::kPick:
        nodes_[n.a].grad[n.index] += g[0];
        break;
      case Op::kSum:
        for (int src : n.list) nodes_[src].grad[0] += g[0];
        break;
      case Op::kNegLogSoftmax: {
        double gs = g[0];
        Node& z = nodes_[n.a];
        for (size_t i = 0; i < n.support.size(); ++i) {
          double q = n.aux[i];
          double d = q - (static_cast<int>(i) == n.index ? 1.0 : 0.0);
          z.grad[n.support[i]] += gs * d;
        }
        break;
      }
      case Op::kDistill: {
        // aux holds [q..., clamp-indicator...]; clamped terms are constants.
        double gs = g[0];
        double alpha = n.scalar;
        size_t k = n.support.size();
        Node& z = nodes_[n.a];
        double active_mass = 0.0;
        for (size_t i = 0; i < k; ++i)
          if (n.aux[k + i] > 0.5) active_mass += n.target[i];
        for (size_t i = 0; i < k; ++i) {
          double q = n.aux[i];
          double d = 0.0;
          if (alpha > 0.0) {
            double p_here = n.aux[k + i] > 0.5 ? n.target[i] : 0.0;
            d += alpha * (q * active_mass - p_here);
          }
          if (alpha < 1.0 && n.index >= 0 && n.aux[k + n.index] > 0.5)
            d += (1.0 - alpha) * (q - (static_cast<int>(i) == n.index ? 1.0 : 0.0));
          z.grad[n.support[i]] += gs * d;
        }
        break;
      }
    }
  }
}

}  // namespace twparse
