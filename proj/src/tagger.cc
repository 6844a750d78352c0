#include "twparse/tagger.h"

#include <array>
#include <iostream>
#include <map>

#include "twparse/optimizer.h"
#include "twparse/parallel.h"
#include "twparse/utf8.h"

namespace twparse {

namespace {

int upos_index(const std::string& tag) {
  for (size_t i = 0; i < kUposTags.size(); ++i)
    if (kUposTags[i] == tag) return static_cast<int>(i);
  return -1;
}

}  // namespace

TaggerModel TaggerModel::create(const Treebank& tb, const TaggerConfig& config, Rng& rng) {
  TaggerModel m;
  std::map<std::string, int> word_counts;
  Vocab& chars = m.params.vocab("chars");
  for (const Sentence& s : tb.sentences) {
    for (const Token& t : s.tokens) {
      ++word_counts[lowercase(t.form)];
      for (const std::string& ch : utf8_chars(t.form)) chars.add(ch);
    }
  }
  Vocab& words = m.params.vocab("words");
  for (const auto& [w, n] : word_counts)
    if (n >= config.word_min_count) words.add(w);

  auto& h = m.params.hyper();
  h["model"] = "tagger";
  h["word_dim"] = config.word_dim;
  h["char_dim"] = config.char_dim;
  h["char_hidden"] = config.char_hidden;
  h["input_dim"] = config.input_dim;
  h["hidden_dim"] = config.hidden_dim;
  h["dropout"] = config.dropout;
  h["pretrained"] = config.pretrained != nullptr;

  m.word_emb_ = m.params.add_lookup("word_emb", static_cast<int>(words.size()),
                                    config.word_dim);
  m.params.init_embedding(m.word_emb_, rng);
  m.char_emb_ = m.params.add_lookup("char_emb", static_cast<int>(chars.size()),
                                    config.char_dim);
  m.params.init_embedding(m.char_emb_, rng);
  m.char_fwd_ = LstmCell::create(m.params, "char_fwd", config.char_dim,
                                 config.char_hidden, &rng);
  m.char_bwd_ = LstmCell::create(m.params, "char_bwd", config.char_dim,
                                 config.char_hidden, &rng);

  int rep_dim = config.word_dim + 2 * config.char_hidden;
  if (config.pretrained) {
    Vocab& pre_words = m.params.vocab("pre_words");
    pre_words = config.pretrained->words;
    m.pre_emb_ = m.params.add_lookup("pre_emb", config.pretrained->table.rows,
                                     config.pretrained->dim);
    m.pre_emb_->value = config.pretrained->table;
    m.pre_emb_->trainable = false;
    rep_dim += config.pretrained->dim;
  }
  m.in_w_ = m.params.add_param("in.w", config.input_dim, rep_dim);
  m.params.init_matrix(m.in_w_, rng);
  m.in_b_ = m.params.add_param("in.b", config.input_dim, 1);
  m.fwd_ = LstmCell::create(m.params, "fwd", config.input_dim, config.hidden_dim, &rng);
  m.bwd_ = LstmCell::create(m.params, "bwd", config.input_dim, config.hidden_dim, &rng);
  m.out_w_ = m.params.add_param("out.w", static_cast<int>(kUposTags.size()),
                                2 * config.hidden_dim);
  m.params.init_matrix(m.out_w_, rng);
  m.out_b_ = m.params.add_param("out.b", static_cast<int>(kUposTags.size()), 1);

  m.word_dim_ = config.word_dim;
  m.char_dim_ = config.char_dim;
  m.char_hidden_ = config.char_hidden;
  m.input_dim_ = config.input_dim;
  m.hidden_ = config.hidden_dim;
  m.dropout_ = config.dropout;
  m.has_pretrained_ = config.pretrained != nullptr;
  return m;
}

void TaggerModel::bind() {
  const auto& h = params.hyper();
  word_dim_ = h.at("word_dim").get<int>();
  char_dim_ = h.at("char_dim").get<int>();
  char_hidden_ = h.at("char_hidden").get<int>();
  input_dim_ = h.at("input_dim").get<int>();
  hidden_ = h.at("hidden_dim").get<int>();
  dropout_ = h.at("dropout").get<double>();
  has_pretrained_ = h.at("pretrained").get<bool>();
  word_emb_ = params.get("word_emb");
  char_emb_ = params.get("char_emb");
  if (has_pretrained_) pre_emb_ = params.get("pre_emb");
  char_fwd_ = LstmCell::create(params, "char_fwd", char_dim_, char_hidden_, nullptr);
  char_bwd_ = LstmCell::create(params, "char_bwd", char_dim_, char_hidden_, nullptr);
  fwd_ = LstmCell::create(params, "fwd", input_dim_, hidden_, nullptr);
  bwd_ = LstmCell::create(params, "bwd", input_dim_, hidden_, nullptr);
  in_w_ = params.get("in.w");
  in_b_ = params.get("in.b");
  out_w_ = params.get("out.w");
  out_b_ = params.get("out.b");
}

TaggerModel TaggerModel::load_file(const std::string& path) {
  TaggerModel m;
  m.params.load(path);
  if (m.params.hyper().value("model", "") != "tagger")
    throw DataError(path + " is not a tagger model");
  m.bind();
  return m;
}

void TaggerModel::save_file(const std::string& path) const { params.save(path); }

std::vector<Graph::NodeId> TaggerModel::token_logits(Graph& g, const Sentence& s,
                                                     Rng* dropout_rng) {
  const Vocab& words = params.vocab("words");
  const Vocab& chars = params.vocab("chars");
  LstmRun char_fwd(g, char_fwd_), char_bwd(g, char_bwd_);
  Graph::NodeId in_w = g.param(in_w_);
  Graph::NodeId in_b = g.param(in_b_);

  std::vector<Graph::NodeId> xs;
  xs.reserve(s.tokens.size());
  for (const Token& t : s.tokens) {
    std::vector<Graph::NodeId> cs;
    for (const std::string& ch : utf8_chars(t.form))
      cs.push_back(g.lookup(char_emb_, chars.get(ch)));
    LstmState f = char_fwd.initial(), b = char_bwd.initial();
    for (size_t i = 0; i < cs.size(); ++i) f = char_fwd.step(f, cs[i]);
    for (size_t i = cs.size(); i > 0; --i) b = char_bwd.step(b, cs[i - 1]);

    std::vector<Graph::NodeId> parts = {
        g.lookup(word_emb_, words.get(lowercase(t.form))), f.h, b.h};
    if (has_pretrained_)
      parts.push_back(g.lookup(pre_emb_, params.vocab("pre_words").get(lowercase(t.form))));
    Graph::NodeId x = g.tanh_n(g.affine(in_w, g.concat(parts), in_b));
    if (dropout_rng && dropout_ > 0.0) x = g.dropout(x, dropout_, *dropout_rng);
    xs.push_back(x);
  }

  LstmRun fwd(g, fwd_), bwd(g, bwd_);
  std::vector<LstmState> fs = fwd.transduce(xs);
  std::vector<Graph::NodeId> rev(xs.rbegin(), xs.rend());
  std::vector<LstmState> bs = bwd.transduce(rev);

  Graph::NodeId out_w = g.param(out_w_);
  Graph::NodeId out_b = g.param(out_b_);
  std::vector<Graph::NodeId> logits;
  logits.reserve(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    std::array<Graph::NodeId, 2> pair = {fs[i].h, bs[xs.size() - 1 - i].h};
    logits.push_back(g.affine(out_w, g.concat(pair), out_b));
  }
  return logits;
}

Sentence TaggerModel::tag_tokens(const Sentence& s) {
  Sentence out = s;
  if (s.tokens.empty()) return out;
  Graph g;
  std::vector<Graph::NodeId> logits = token_logits(g, s, nullptr);
  for (size_t i = 0; i < logits.size(); ++i) {
    const Tensor& z = g.value(logits[i]);
    int best = 0;
    for (int j = 1; j < z.rows; ++j)
      if (z[j] > z[best]) best = j;
    out.tokens[i].upos = kUposTags[best];
  }
  return out;
}

std::vector<std::vector<double>> TaggerModel::tag_probs(const Sentence& s) {
  std::vector<std::vector<double>> out;
  if (s.tokens.empty()) return out;
  Graph g;
  std::vector<Graph::NodeId> logits = token_logits(g, s, nullptr);
  for (Graph::NodeId id : logits) out.push_back(softmax_over(g.value(id), {}));
  return out;
}

Graph::NodeId TaggerModel::build_loss(Graph& g, const Sentence& s, Rng* dropout_rng) {
  std::vector<Graph::NodeId> logits = token_logits(g, s, dropout_rng);
  std::vector<Graph::NodeId> losses;
  for (size_t i = 0; i < logits.size(); ++i) {
    int gold = upos_index(s.tokens[i].upos);
    if (gold < 0)
      throw DataError("train_tagger: token '" + s.tokens[i].form +
                      "' has no gold UPOS");
    losses.push_back(g.pickneglogsoftmax(logits[i], gold));
  }
  return g.sum(losses);
}

double tagging_accuracy(const Treebank& gold, const Treebank& pred) {
  if (gold.sentences.size() != pred.sentences.size())
    throw DataError("tagging_accuracy: sentence count mismatch");
  size_t total = 0, correct = 0;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const Sentence& g = gold.sentences[i];
    const Sentence& p = pred.sentences[i];
    if (g.tokens.size() != p.tokens.size())
      throw DataError("tagging_accuracy: token count mismatch");
    for (size_t j = 0; j < g.tokens.size(); ++j) {
      ++total;
      if (g.tokens[j].upos == p.tokens[j].upos) ++correct;
    }
  }
  return total ? static_cast<double>(correct) / total : 0.0;
}

TaggerModel train_tagger(const Treebank& tb, const TaggerConfig& config,
                         TaggerTrainStats* stats) {
  if (tb.sentences.empty()) throw DataError("train_tagger: empty treebank");
  for (const Sentence& s : tb.sentences)
    for (const Token& t : s.tokens)
      if (upos_index(t.upos) < 0)
        throw DataError("train_tagger: token '" + t.form + "' in sentence '" +
                        s.sent_id() + "' lacks a gold UPOS");

  Rng rng(config.seed);
  TaggerModel model = TaggerModel::create(tb, config, rng);
  SgdTrainer trainer(model.params, {config.lr, config.decay, config.clip});
  const Treebank& dev = config.dev ? *config.dev : tb;

  double best_acc = -1.0;
  int best_epoch = -1;
  std::vector<Tensor> best;
  std::vector<size_t> order(tb.sentences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double total_loss = 0.0;
    for (size_t idx : order) {
      Graph g;
      Graph::NodeId loss = model.build_loss(g, tb.sentences[idx], &rng);
      total_loss += g.value(loss)[0];
      g.backward(loss);
      trainer.update();
    }
    Treebank tagged = tag_treebank(model, dev, 1);
    double acc = tagging_accuracy(dev, tagged);
    if (config.verbose)
      std::cerr << "[train-tagger] epoch " << epoch + 1 << " loss " << total_loss
                << " dev acc " << acc * 100.0 << "\n";
    if (acc > best_acc) {
      best_acc = acc;
      best_epoch = epoch;
      best.clear();
      for (const Parameter* p : model.params.params()) best.push_back(p->value);
    }
    trainer.new_epoch();
  }
  if (!best.empty()) {
    size_t i = 0;
    for (Parameter* p : model.params.params()) p->value = best[i++];
  }
  if (stats) {
    stats->best_dev_accuracy = best_acc;
    stats->best_epoch = best_epoch;
  }
  return model;
}

Treebank tag_treebank(TaggerModel& model, const Treebank& tb, int jobs) {
  Treebank out = tb;
  parallel_for(out.sentences.size(), jobs, [&](size_t i) {
    out.sentences[i] = model.tag_tokens(out.sentences[i]);
  });
  return out;
}

Treebank jackknife_tags(const Treebank& tb, int k, const TaggerConfig& config, int jobs) {
  if (k < 2) throw UsageError("jackknife requires at least 2 folds");
  if (tb.sentences.size() < static_cast<size_t>(k))
    throw DataError("jackknife: treebank has fewer sentences than folds");

  Treebank out = tb;
  parallel_for(static_cast<size_t>(k), jobs, [&](size_t fold) {
    Treebank train;
    train.split_name = tb.split_name;
    for (size_t i = 0; i < tb.sentences.size(); ++i)
      if (i % static_cast<size_t>(k) != fold) train.sentences.push_back(tb.sentences[i]);
    TaggerConfig fold_config = config;
    fold_config.dev = nullptr;
    TaggerModel model = train_tagger(train, fold_config);
    for (size_t i = fold; i < tb.sentences.size(); i += static_cast<size_t>(k)) {
      Sentence tagged = model.tag_tokens(tb.sentences[i]);
      for (size_t j = 0; j < tagged.tokens.size(); ++j) {
        const std::string& gold = tb.sentences[i].tokens[j].upos;
        Token& t = tagged.tokens[j];
        std::string note = "GoldUPOS=" + gold;
        t.misc = t.misc == "_" ? note : t.misc + "|" + note;
      }
      out.sentences[i] = std::move(tagged);
    }
  });
  return out;
}

}  // namespace twparse
