#ifndef TWPARSE_PARSER_H
#define TWPARSE_PARSER_H

#include <optional>
#include <string>
#include <vector>

#include "twparse/conllu.h"
#include "twparse/embeddings.h"
#include "twparse/graph.h"
#include "twparse/lstm.h"
#include "twparse/model.h"
#include "twparse/transition.h"

namespace twparse {

struct ParserConfig {
  int word_dim = 32;
  int char_dim = 16;
  int char_hidden = 16;
  int upos_dim = 12;
  int input_dim = 48;    // projected token representation / composition output
  int hidden_dim = 48;   // stack and buffer LSTMs
  int action_dim = 16;
  int action_hidden = 24;
  int rel_dim = 12;
  int cls_hidden = 48;
  int word_min_count = 2;
  int epochs = 30;
  double lr = 0.1;
  double decay = 0.05;
  double clip = 5.0;
  double dropout = 0.0;
  uint64_t seed = 1;
  bool verbose = false;
  const Treebank* dev = nullptr;
  const PretrainedEmbeddings* pretrained = nullptr;
};

// Probabilities over the valid actions of one state; support holds inventory
// indices in ascending order and the probabilities sum to 1.
struct ActionDistribution {
  std::vector<int> support;
  std::vector<double> prob;

  double prob_of(int action_index) const {
    for (size_t i = 0; i < support.size(); ++i)
      if (support[i] == action_index) return prob[i];
    return 0.0;
  }
  double sum() const {
    double s = 0.0;
    for (double p : prob) s += p;
    return s;
  }
};

// Greedy transition-based parser in the stack LSTM mold: recurrent summaries
// of the stack, the buffer, and the action history feed a classifier over
// the action inventory; token vectors combine word, character, and UPOS
// embeddings; reduced pairs are merged by a composition function.
class ParserModel {
 public:
  ModelParams params;

  static ParserModel create(const Treebank& tb, const ParserConfig& config, Rng& rng);
  static ParserModel load_file(const std::string& path);
  void save_file(const std::string& path) const;

  const ActionInventory& inventory() const { return inventory_; }

  // Distribution over valid actions; st must carry the history that reached
  // it (every state produced by this codebase does).
  ActionDistribution score_state(const ParserState& st, const Sentence& s);

  Sentence greedy_parse(const Sentence& s);

 private:
  void bind();
  friend class ParserDecoder;

  ActionInventory inventory_;
  int word_dim_ = 0, char_dim_ = 0, char_hidden_ = 0, upos_dim_ = 0, input_dim_ = 0,
      hidden_ = 0, action_dim_ = 0, action_hidden_ = 0, rel_dim_ = 0, cls_hidden_ = 0;
  double dropout_ = 0.0;
  bool has_pretrained_ = false;
  Parameter* word_emb_ = nullptr;
  Parameter* char_emb_ = nullptr;
  Parameter* upos_emb_ = nullptr;
  Parameter* pre_emb_ = nullptr;
  Parameter* action_emb_ = nullptr;
  Parameter* rel_emb_ = nullptr;
  LstmCell char_fwd_, char_bwd_, stack_cell_, buffer_cell_, action_cell_;
  Parameter* root_x_ = nullptr;
  Parameter* in_w_ = nullptr;
  Parameter* in_b_ = nullptr;
  Parameter* comp_w_ = nullptr;
  Parameter* comp_b_ = nullptr;
  Parameter* cls_w1_ = nullptr;
  Parameter* cls_b1_ = nullptr;
  Parameter* cls_w2_ = nullptr;
  Parameter* cls_b2_ = nullptr;
};

// Incremental decode of one sentence: owns the graph, mirrors the parser
// state with LSTM states, exposes per-step logits. Used for inference,
// training (teacher-forced), and ensemble lockstep decoding.
class ParserDecoder {
 public:
  ParserDecoder(ParserModel& m, const Sentence& s, Rng* dropout_rng = nullptr);

  const ParserState& state() const { return st_; }
  const Sentence& sentence() const { return *sent_; }
  Graph& graph() { return g_; }
  bool done() const { return st_.terminal(); }

  std::vector<int> valid() const;
  Graph::NodeId logits();        // classifier output for the current state
  std::vector<double> probs();   // softmax over valid(), same order

  void advance(const Action& a);
  void advance_index(int action_index);

 private:
  Graph::NodeId token_rep(const Token& t);

  ParserModel* m_;
  const Sentence* sent_;
  Rng* dropout_rng_;
  Graph g_;
  ParserState st_;
  std::vector<Graph::NodeId> word_x_;
  std::vector<LstmState> buffer_states_;  // [i] summarizes tokens i..n
  struct StackEntry {
    Graph::NodeId x;
    LstmState state;
  };
  std::vector<StackEntry> stack_;
  LstmState action_state_;
  std::optional<LstmRun> stack_run_, action_run_;
  Graph::NodeId in_w_ = -1, in_b_ = -1, comp_w_ = -1, comp_b_ = -1;
  Graph::NodeId cls_w1_ = -1, cls_b1_ = -1, cls_w2_ = -1, cls_b2_ = -1;
  Graph::NodeId logits_cache_ = -1;
};

struct ParserTrainStats {
  int non_projective_skipped = 0;
  double best_dev_las = 0.0;
  int best_epoch = -1;
};

ParserModel train_parser(const Treebank& tb, const ParserConfig& config,
                         ParserTrainStats* stats = nullptr);

Treebank parse_treebank(ParserModel& model, const Treebank& tb, int jobs = 1);

// Attachment scores of pred against gold over parallel treebanks
// (plain counts; the eval module wraps this in reports).
struct AttachmentCounts {
  size_t tokens = 0;
  size_t head_correct = 0;
  size_t both_correct = 0;
  double uas() const { return tokens ? 100.0 * head_correct / tokens : 0.0; }
  double las() const { return tokens ? 100.0 * both_correct / tokens : 0.0; }
};
AttachmentCounts attachment_counts(const Treebank& gold, const Treebank& pred);

}  // namespace twparse

#endif
