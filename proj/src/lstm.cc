#include "twparse/lstm.h"

namespace twparse {

LstmCell LstmCell::create(ModelParams& m, const std::string& prefix, int input_dim,
                          int hidden_dim, Rng* rng) {
  LstmCell cell;
  cell.input_dim = input_dim;
  cell.hidden_dim = hidden_dim;
  if (m.has(prefix + ".wx")) {
    cell.wx = m.get(prefix + ".wx");
    cell.wh = m.get(prefix + ".wh");
    cell.b = m.get(prefix + ".b");
    cell.h0 = m.get(prefix + ".h0");
    cell.c0 = m.get(prefix + ".c0");
    if (cell.wx->value.cols != input_dim || cell.wx->value.rows != 4 * hidden_dim)
      throw DataError("LSTM cell " + prefix + " has unexpected shape");
    return cell;
  }
  if (!rng) throw std::logic_error("LSTM cell " + prefix + " missing from model");
  cell.wx = m.add_param(prefix + ".wx", 4 * hidden_dim, input_dim);
  cell.wh = m.add_param(prefix + ".wh", 4 * hidden_dim, hidden_dim);
  cell.b = m.add_param(prefix + ".b", 4 * hidden_dim, 1);
  cell.h0 = m.add_param(prefix + ".h0", hidden_dim, 1);
  cell.c0 = m.add_param(prefix + ".c0", hidden_dim, 1);
  m.init_matrix(cell.wx, *rng);
  m.init_matrix(cell.wh, *rng);
  // forget gate bias starts at 1 so early training does not wipe the cell
  for (int i = hidden_dim; i < 2 * hidden_dim; ++i) cell.b->value[i] = 1.0;
  return cell;
}

LstmRun::LstmRun(Graph& g, const LstmCell& cell) : g_(&g), hidden_(cell.hidden_dim) {
  wx_ = g.param(cell.wx);
  wh_ = g.param(cell.wh);
  b_ = g.param(cell.b);
  init_.h = g.param(cell.h0);
  init_.c = g.param(cell.c0);
}

LstmState LstmRun::step(const LstmState& prev, Graph::NodeId x) const {
  Graph& g = *g_;
  Graph::NodeId z = g.add(g.add(g.matvec(wx_, x), g.matvec(wh_, prev.h)), b_);
  Graph::NodeId i = g.logistic(g.slice(z, 0, hidden_));
  Graph::NodeId f = g.logistic(g.slice(z, hidden_, hidden_));
  Graph::NodeId o = g.logistic(g.slice(z, 2 * hidden_, hidden_));
  Graph::NodeId cand = g.tanh_n(g.slice(z, 3 * hidden_, hidden_));
  LstmState next;
  next.c = g.add(g.cmult(f, prev.c), g.cmult(i, cand));
  next.h = g.cmult(o, g.tanh_n(next.c));
  return next;
}

std::vector<LstmState> LstmRun::transduce(const std::vector<Graph::NodeId>& xs) const {
  std::vector<LstmState> out;
  out.reserve(xs.size());
  LstmState st = init_;
  for (Graph::NodeId x : xs) {
    st = step(st, x);
    out.push_back(st);
  }
  return out;
}

}  // namespace twparse
