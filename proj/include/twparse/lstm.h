#ifndef TWPARSE_LSTM_H
#define TWPARSE_LSTM_H

#include <string>
#include <vector>

#include "twparse/graph.h"
#include "twparse/model.h"

namespace twparse {

// Parameter handles for one LSTM direction. Gate layout in the stacked
// matrices is [input; forget; output; candidate].
struct LstmCell {
  Parameter* wx = nullptr;  // 4H x I
  Parameter* wh = nullptr;  // 4H x H
  Parameter* b = nullptr;   // 4H
  Parameter* h0 = nullptr;  // learned initial / empty-sequence state
  Parameter* c0 = nullptr;
  int input_dim = 0;
  int hidden_dim = 0;

  // Fetches the named cell from the model, creating and initializing the
  // tensors if they are not there yet (rng required in that case).
  static LstmCell create(ModelParams& m, const std::string& prefix, int input_dim,
                         int hidden_dim, Rng* rng);
};

struct LstmState {
  Graph::NodeId h = -1;
  Graph::NodeId c = -1;
};

// A cell bound to one graph: parameter nodes created once, then stepped.
class LstmRun {
 public:
  LstmRun(Graph& g, const LstmCell& cell);

  LstmState initial() const { return init_; }
  LstmState step(const LstmState& prev, Graph::NodeId x) const;

  // Hidden states for the whole sequence, one per input.
  std::vector<LstmState> transduce(const std::vector<Graph::NodeId>& xs) const;

 private:
  Graph* g_;
  int hidden_;
  Graph::NodeId wx_, wh_, b_;
  LstmState init_;
};

}  // namespace twparse

#endif
