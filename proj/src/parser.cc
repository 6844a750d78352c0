#include "twparse/parser.h"

#include <algorithm>
#include <array>
#include <iostream>
#include <map>

#include "twparse/optimizer.h"
#include "twparse/parallel.h"
#include "twparse/utf8.h"

namespace twparse {

namespace {

int upos_row(const std::string& tag) {
  for (size_t i = 0; i < kUposTags.size(); ++i)
    if (kUposTags[i] == tag) return static_cast<int>(i) + 1;
  return 0;  // "_" and anything non-universal share the UNK row
}

}  // namespace

ParserModel ParserModel::create(const Treebank& tb, const ParserConfig& config, Rng& rng) {
  ParserModel m;
  m.inventory_ = ActionInventory::from_treebank(tb);
  if (m.inventory_.labels().empty())
    throw DataError("parser: treebank carries no dependency labels");

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
  h["model"] = "parser";
  h["labels"] = m.inventory_.labels();
  h["word_dim"] = config.word_dim;
  h["char_dim"] = config.char_dim;
  h["char_hidden"] = config.char_hidden;
  h["upos_dim"] = config.upos_dim;
  h["input_dim"] = config.input_dim;
  h["hidden_dim"] = config.hidden_dim;
  h["action_dim"] = config.action_dim;
  h["action_hidden"] = config.action_hidden;
  h["rel_dim"] = config.rel_dim;
  h["cls_hidden"] = config.cls_hidden;
  h["dropout"] = config.dropout;
  h["pretrained"] = config.pretrained != nullptr;

  int n_actions = m.inventory_.size();
  m.word_emb_ = m.params.add_lookup("word_emb", static_cast<int>(words.size()),
                                    config.word_dim);
  m.params.init_embedding(m.word_emb_, rng);
  m.char_emb_ = m.params.add_lookup("char_emb", static_cast<int>(chars.size()),
                                    config.char_dim);
  m.params.init_embedding(m.char_emb_, rng);
  m.upos_emb_ = m.params.add_lookup("upos_emb",
                                    static_cast<int>(kUposTags.size()) + 1,
                                    config.upos_dim);
  m.params.init_embedding(m.upos_emb_, rng);
  m.action_emb_ = m.params.add_lookup("action_emb", n_actions, config.action_dim);
  m.params.init_embedding(m.action_emb_, rng);
  m.rel_emb_ = m.params.add_lookup("rel_emb", n_actions, config.rel_dim);
  m.params.init_embedding(m.rel_emb_, rng);

  m.char_fwd_ = LstmCell::create(m.params, "char_fwd", config.char_dim,
                                 config.char_hidden, &rng);
  m.char_bwd_ = LstmCell::create(m.params, "char_bwd", config.char_dim,
                                 config.char_hidden, &rng);

  int rep_dim = config.word_dim + 2 * config.char_hidden + config.upos_dim;
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

  m.root_x_ = m.params.add_param("root_x", config.input_dim, 1);
  m.params.init_embedding(m.root_x_, rng);

  m.stack_cell_ = LstmCell::create(m.params, "stack", config.input_dim,
                                   config.hidden_dim, &rng);
  m.buffer_cell_ = LstmCell::create(m.params, "buffer", config.input_dim,
                                    config.hidden_dim, &rng);
  m.action_cell_ = LstmCell::create(m.params, "action", config.action_dim,
                                    config.action_hidden, &rng);

  m.comp_w_ = m.params.add_param("comp.w", config.input_dim,
                                 2 * config.input_dim + config.rel_dim);
  m.params.init_matrix(m.comp_w_, rng);
  m.comp_b_ = m.params.add_param("comp.b", config.input_dim, 1);

  m.cls_w1_ = m.params.add_param("cls.w1", config.cls_hidden,
                                 2 * config.hidden_dim + config.action_hidden);
  m.params.init_matrix(m.cls_w1_, rng);
  m.cls_b1_ = m.params.add_param("cls.b1", config.cls_hidden, 1);
  m.cls_w2_ = m.params.add_param("cls.w2", n_actions, config.cls_hidden);
  m.params.init_matrix(m.cls_w2_, rng);
  m.cls_b2_ = m.params.add_param("cls.b2", n_actions, 1);

  m.word_dim_ = config.word_dim;
  m.char_dim_ = config.char_dim;
  m.char_hidden_ = config.char_hidden;
  m.upos_dim_ = config.upos_dim;
  m.input_dim_ = config.input_dim;
  m.hidden_ = config.hidden_dim;
  m.action_dim_ = config.action_dim;
  m.action_hidden_ = config.action_hidden;
  m.rel_dim_ = config.rel_dim;
  m.cls_hidden_ = config.cls_hidden;
  m.dropout_ = config.dropout;
  m.has_pretrained_ = config.pretrained != nullptr;
  return m;
}

void ParserModel::bind() {
  const auto& h = params.hyper();
  inventory_ = ActionInventory(h.at("labels").get<std::vector<std::string>>());
  word_dim_ = h.at("word_dim").get<int>();
  char_dim_ = h.at("char_dim").get<int>();
  char_hidden_ = h.at("char_hidden").get<int>();
  upos_dim_ = h.at("upos_dim").get<int>();
  input_dim_ = h.at("input_dim").get<int>();
  hidden_ = h.at("hidden_dim").get<int>();
  action_dim_ = h.at("action_dim").get<int>();
  action_hidden_ = h.at("action_hidden").get<int>();
  rel_dim_ = h.at("rel_dim").get<int>();
  cls_hidden_ = h.at("cls_hidden").get<int>();
  dropout_ = h.at("dropout").get<double>();
  has_pretrained_ = h.at("pretrained").get<bool>();
  word_emb_ = params.get("word_emb");
  char_emb_ = params.get("char_emb");
  upos_emb_ = params.get("upos_emb");
  if (has_pretrained_) pre_emb_ = params.get("pre_emb");
  action_emb_ = params.get("action_emb");
  rel_emb_ = params.get("rel_emb");
  char_fwd_ = LstmCell::create(params, "char_fwd", char_dim_, char_hidden_, nullptr);
  char_bwd_ = LstmCell::create(params, "char_bwd", char_dim_, char_hidden_, nullptr);
  stack_cell_ = LstmCell::create(params, "stack", input_dim_, hidden_, nullptr);
  buffer_cell_ = LstmCell::create(params, "buffer", input_dim_, hidden_, nullptr);
  action_cell_ = LstmCell::create(params, "action", action_dim_, action_hidden_, nullptr);
  root_x_ = params.get("root_x");
  in_w_ = params.get("in.w");
  in_b_ = params.get("in.b");
  comp_w_ = params.get("comp.w");
  comp_b_ = params.get("comp.b");
  cls_w1_ = params.get("cls.w1");
  cls_b1_ = params.get("cls.b1");
  cls_w2_ = params.get("cls.w2");
  cls_b2_ = params.get("cls.b2");
}

ParserModel ParserModel::load_file(const std::string& path) {
  ParserModel m;
  m.params.load(path);
  if (m.params.hyper().value("model", "") != "parser")
    throw DataError(path + " is not a parser model");
  m.bind();
  return m;
}

void ParserModel::save_file(const std::string& path) const { params.save(path); }

ParserDecoder::ParserDecoder(ParserModel& m, const Sentence& s, Rng* dropout_rng)
    : m_(&m), sent_(&s), dropout_rng_(dropout_rng) {
  st_ = initial_state(s);
  in_w_ = g_.param(m.in_w_);
  in_b_ = g_.param(m.in_b_);
  comp_w_ = g_.param(m.comp_w_);
  comp_b_ = g_.param(m.comp_b_);
  cls_w1_ = g_.param(m.cls_w1_);
  cls_b1_ = g_.param(m.cls_b1_);
  cls_w2_ = g_.param(m.cls_w2_);
  cls_b2_ = g_.param(m.cls_b2_);

  stack_run_.emplace(g_, m.stack_cell_);
  action_run_.emplace(g_, m.action_cell_);
  LstmRun buffer_run(g_, m.buffer_cell_);

  word_x_.assign(s.tokens.size() + 1, -1);
  for (const Token& t : s.tokens) word_x_[t.id] = token_rep(t);

  buffer_states_.assign(s.tokens.size() + 2, LstmState{});
  buffer_states_[s.tokens.size() + 1] = buffer_run.initial();
  for (int i = static_cast<int>(s.tokens.size()); i >= 1; --i)
    buffer_states_[i] = buffer_run.step(buffer_states_[i + 1], word_x_[i]);

  Graph::NodeId root = g_.param(m.root_x_);
  stack_.push_back({root, stack_run_->step(stack_run_->initial(), root)});
  action_state_ = action_run_->initial();
}

Graph::NodeId ParserDecoder::token_rep(const Token& t) {
  ParserModel& m = *m_;
  const Vocab& words = m.params.vocab("words");
  const Vocab& chars = m.params.vocab("chars");

  std::vector<Graph::NodeId> cs;
  for (const std::string& ch : utf8_chars(t.form))
    cs.push_back(g_.lookup(m.char_emb_, chars.get(ch)));
  LstmRun char_fwd(g_, m.char_fwd_), char_bwd(g_, m.char_bwd_);
  LstmState f = char_fwd.initial(), b = char_bwd.initial();
  for (size_t i = 0; i < cs.size(); ++i) f = char_fwd.step(f, cs[i]);
  for (size_t i = cs.size(); i > 0; --i) b = char_bwd.step(b, cs[i - 1]);

  std::vector<Graph::NodeId> parts = {
      g_.lookup(m.word_emb_, words.get(lowercase(t.form))), f.h, b.h,
      g_.lookup(m.upos_emb_, upos_row(t.upos))};
  if (m.has_pretrained_)
    parts.push_back(
        g_.lookup(m.pre_emb_, m.params.vocab("pre_words").get(lowercase(t.form))));
  Graph::NodeId x = g_.tanh_n(g_.affine(in_w_, g_.concat(parts), in_b_));
  if (dropout_rng_ && m.dropout_ > 0.0) x = g_.dropout(x, m.dropout_, *dropout_rng_);
  return x;
}

std::vector<int> ParserDecoder::valid() const {
  return valid_action_indices(st_, m_->inventory_);
}

Graph::NodeId ParserDecoder::logits() {
  if (logits_cache_ >= 0) return logits_cache_;
  std::array<Graph::NodeId, 3> parts = {stack_.back().state.h,
                                        buffer_states_[st_.buffer_next].h,
                                        action_state_.h};
  Graph::NodeId hidden = g_.tanh_n(g_.affine(cls_w1_, g_.concat(parts), cls_b1_));
  logits_cache_ = g_.affine(cls_w2_, hidden, cls_b2_);
  return logits_cache_;
}

std::vector<double> ParserDecoder::probs() {
  return softmax_over(g_.value(logits()), valid());
}

void ParserDecoder::advance_index(int action_index) {
  advance(m_->inventory_.at(action_index));
}

void ParserDecoder::advance(const Action& a) {
  int idx = m_->inventory_.index_of(a);
  if (idx < 0) throw DataError("action outside the inventory: " + a.to_string());

  switch (a.kind) {
    case ActionKind::Shift: {
      Graph::NodeId x = word_x_[st_.buffer_next];
      stack_.push_back({x, stack_run_->step(stack_.back().state, x)});
      break;
    }
    case ActionKind::LeftArc:
    case ActionKind::RightArc: {
      StackEntry top = stack_.back();
      stack_.pop_back();
      StackEntry second = stack_.back();
      stack_.pop_back();
      Graph::NodeId head_x = a.kind == ActionKind::LeftArc ? top.x : second.x;
      Graph::NodeId dep_x = a.kind == ActionKind::LeftArc ? second.x : top.x;
      std::array<Graph::NodeId, 3> parts = {head_x, dep_x,
                                            g_.lookup(m_->rel_emb_, idx)};
      Graph::NodeId composed =
          g_.tanh_n(g_.affine(comp_w_, g_.concat(parts), comp_b_));
      LstmState below = stack_.empty() ? stack_run_->initial() : stack_.back().state;
      stack_.push_back({composed, stack_run_->step(below, composed)});
      break;
    }
  }
  action_state_ = action_run_->step(action_state_, g_.lookup(m_->action_emb_, idx));
  apply_action_inplace(st_, a);
  logits_cache_ = -1;
}

ActionDistribution ParserModel::score_state(const ParserState& st, const Sentence& s) {
  if (st.terminal()) throw std::logic_error("score_state on a terminal state");
  ParserDecoder dec(*this, s);
  for (const Action& a : st.history) dec.advance(a);
  if (dec.state().stack != st.stack || dec.state().buffer_next != st.buffer_next)
    throw std::logic_error("score_state: state history does not reproduce the state");
  ActionDistribution dist;
  dist.support = dec.valid();
  dist.prob = dec.probs();
  return dist;
}

Sentence ParserModel::greedy_parse(const Sentence& s) {
  ParserDecoder dec(*this, s);
  while (!dec.done()) {
    std::vector<int> support = dec.valid();
    std::vector<double> p = dec.probs();
    size_t best = 0;
    for (size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[best]) best = i;  // ties keep the lowest action index
    dec.advance_index(support[best]);
  }
  return extract_tree(dec.state(), s);
}

AttachmentCounts attachment_counts(const Treebank& gold, const Treebank& pred) {
  if (gold.sentences.size() != pred.sentences.size())
    throw DataError("attachment_counts: sentence count mismatch");
  AttachmentCounts c;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const Sentence& g = gold.sentences[i];
    const Sentence& p = pred.sentences[i];
    if (g.tokens.size() != p.tokens.size())
      throw DataError("attachment_counts: token count mismatch in sentence " +
                      std::to_string(i));
    for (size_t j = 0; j < g.tokens.size(); ++j) {
      ++c.tokens;
      if (g.tokens[j].head == p.tokens[j].head) {
        ++c.head_correct;
        if (g.tokens[j].deprel == p.tokens[j].deprel) ++c.both_correct;
      }
    }
  }
  return c;
}

Treebank parse_treebank(ParserModel& model, const Treebank& tb, int jobs) {
  Treebank out = tb;
  parallel_for(out.sentences.size(), jobs, [&](size_t i) {
    out.sentences[i] = model.greedy_parse(out.sentences[i]);
  });
  return out;
}

ParserModel train_parser(const Treebank& tb, const ParserConfig& config,
                         ParserTrainStats* stats) {
  if (tb.sentences.empty()) throw DataError("train_parser: empty treebank");

  struct Example {
    const Sentence* sent;
    std::vector<Action> actions;
  };
  std::vector<Example> examples;
  int skipped = 0;
  for (const Sentence& s : tb.sentences) {
    try {
      examples.push_back({&s, oracle_sequence(s)});
    } catch (const NonProjectiveError&) {
      ++skipped;
    }
  }
  if (skipped > 0)
    std::cerr << "[train-parser] skipped " << skipped
              << " non-projective sentences\n";
  if (examples.empty()) throw DataError("train_parser: no projective sentences");

  Treebank oracle_tb;
  for (const Example& ex : examples) oracle_tb.sentences.push_back(*ex.sent);

  Rng rng(config.seed);
  ParserModel model = ParserModel::create(oracle_tb, config, rng);
  SgdTrainer trainer(model.params, {config.lr, config.decay, config.clip});
  const Treebank& dev = config.dev ? *config.dev : oracle_tb;

  double best_las = -1.0;
  int best_epoch = -1;
  std::vector<Tensor> best;
  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double total_loss = 0.0;
    for (size_t idx : order) {
      const Example& ex = examples[idx];
      ParserDecoder dec(model, *ex.sent, &rng);
      std::vector<Graph::NodeId> losses;
      losses.reserve(ex.actions.size());
      for (const Action& a : ex.actions) {
        int gold = model.inventory().index_of(a);
        losses.push_back(
            dec.graph().pickneglogsoftmax(dec.logits(), gold, dec.valid()));
        dec.advance(a);
      }
      Graph::NodeId loss = dec.graph().sum(losses);
      total_loss += dec.graph().value(loss)[0];
      dec.graph().backward(loss);
      trainer.update();
    }
    Treebank parsed = parse_treebank(model, dev, 1);
    double las = attachment_counts(dev, parsed).las();
    if (config.verbose)
      std::cerr << "[train-parser] epoch " << epoch + 1 << " loss " << total_loss
                << " dev LAS " << las << "\n";
    if (las > best_las) {
      best_las = las;
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
    stats->non_projective_skipped = skipped;
    stats->best_dev_las = best_las;
    stats->best_epoch = best_epoch;
  }
  return model;
}

}  // namespace twparse
