#ifndef TWPARSE_TAGGER_H
#define TWPARSE_TAGGER_H

#include <string>
#include <vector>

#include "twparse/conllu.h"
#include "twparse/embeddings.h"
#include "twparse/graph.h"
#include "twparse/lstm.h"
#include "twparse/model.h"

namespace twparse {

struct TaggerConfig {
  int word_dim = 32;
  int char_dim = 16;
  int char_hidden = 16;
  int input_dim = 48;
  int hidden_dim = 48;
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

// Word-level bi-LSTM UPOS tagger; word representations concatenate a word
// embedding with character LSTM finals (spelling variation is the norm in
// tweets, so the characters carry a lot of the signal).
class TaggerModel {
 public:
  ModelParams params;

  static TaggerModel create(const Treebank& tb, const TaggerConfig& config, Rng& rng);
  static TaggerModel load_file(const std::string& path);
  void save_file(const std::string& path) const;

  Sentence tag_tokens(const Sentence& s);

  // Per-token distributions over the 17 universal tags.
  std::vector<std::vector<double>> tag_probs(const Sentence& s);

  Graph::NodeId build_loss(Graph& g, const Sentence& s, Rng* dropout_rng);

 private:
  void bind();
  std::vector<Graph::NodeId> token_logits(Graph& g, const Sentence& s, Rng* dropout_rng);

  int word_dim_ = 0, char_dim_ = 0, char_hidden_ = 0, input_dim_ = 0, hidden_ = 0;
  double dropout_ = 0.0;
  bool has_pretrained_ = false;
  Parameter* word_emb_ = nullptr;
  Parameter* char_emb_ = nullptr;
  Parameter* pre_emb_ = nullptr;
  LstmCell char_fwd_, char_bwd_, fwd_, bwd_;
  Parameter* in_w_ = nullptr;
  Parameter* in_b_ = nullptr;
  Parameter* out_w_ = nullptr;
  Parameter* out_b_ = nullptr;

  friend struct TaggerTrainAccess;
};

struct TaggerTrainStats {
  double best_dev_accuracy = 0.0;
  int best_epoch = -1;
};

TaggerModel train_tagger(const Treebank& tb, const TaggerConfig& config,
                         TaggerTrainStats* stats = nullptr);

// Tags every sentence with a model that never saw it: sentences are split
// into k folds by index mod k, fold i is tagged by a model trained on the
// rest. Gold tags are kept in MISC as GoldUPOS=... for audit.
Treebank jackknife_tags(const Treebank& tb, int k, const TaggerConfig& config,
                        int jobs = 1);

Treebank tag_treebank(TaggerModel& model, const Treebank& tb, int jobs = 1);

double tagging_accuracy(const Treebank& gold, const Treebank& pred);

}  // namespace twparse

#endif
