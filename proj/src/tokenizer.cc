#include "twparse/tokenizer.h"

#include <algorithm>
#include <array>
#include <iostream>
#include <map>
#include <set>

#include "twparse/optimizer.h"
#include "twparse/parallel.h"
#include "twparse/utf8.h"

namespace twparse {

char char_tag_symbol(CharTag t) {
  switch (t) {
    case CharTag::B: return '1';
    case CharTag::I: return '0';
    case CharTag::S: return '$';
  }
  return '?';
}

std::vector<CharTag> derive_char_labels(const std::string& raw, const Sentence& s) {
  std::vector<std::string> chars = utf8_chars(raw);
  std::vector<TokenSpan> spans = align_tokens(raw, s);
  std::vector<CharTag> tags(chars.size(), CharTag::S);
  for (size_t i = 0; i < chars.size(); ++i)
    if (!is_space_char(chars[i])) tags[i] = CharTag::I;
  for (const TokenSpan& sp : spans) {
    for (int i = sp.begin; i < sp.end; ++i) {
      if (is_space_char(chars[i]))
        throw AlignmentFailure(chars[i], "token span covers whitespace");
    }
    tags[sp.begin] = CharTag::B;
  }
  return tags;
}

std::vector<DecodedToken> decode_tokens(const std::string& raw,
                                        const std::vector<CharTag>& tags) {
  std::vector<std::string> chars = utf8_chars(raw);
  if (chars.size() != tags.size())
    throw DataError("decode_tokens: tag/character length mismatch");
  for (size_t i = 0; i < chars.size(); ++i) {
    bool ws = is_space_char(chars[i]);
    if (ws != (tags[i] == CharTag::S))
      throw DataError("decode_tokens: S tag must coincide with whitespace (position " +
                      std::to_string(i) + ")");
  }
  for (size_t i = 0; i < chars.size(); ++i) {
    if (is_space_char(chars[i])) continue;
    if (tags[i] != CharTag::B)
      throw DataError("decode_tokens: first non-whitespace character must be tagged B");
    break;
  }

  std::vector<DecodedToken> out;
  bool after_gap = true;  // a space (or the text start) forces a token start
  for (size_t i = 0; i < chars.size(); ++i) {
    if (tags[i] == CharTag::S) {
      after_gap = true;
      continue;
    }
    if (tags[i] == CharTag::B || after_gap) {
      out.push_back({chars[i], {static_cast<int>(i), static_cast<int>(i) + 1}});
    } else {
      out.back().form += chars[i];
      out.back().span.end = static_cast<int>(i) + 1;
    }
    after_gap = false;
  }
  return out;
}

Sentence tokens_to_sentence(const std::string& raw,
                            const std::vector<DecodedToken>& tokens) {
  Sentence s;
  std::vector<std::string> chars = utf8_chars(raw);
  for (size_t i = 0; i < tokens.size(); ++i) {
    Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = tokens[i].form;
    s.tokens.push_back(std::move(t));
  }
  // tokens glued together in the raw text (split contractions) get a range
  size_t i = 0;
  while (i < tokens.size()) {
    size_t j = i;
    while (j + 1 < tokens.size() && tokens[j + 1].span.begin == tokens[j].span.end) ++j;
    if (j > i) {
      MultiwordRange r;
      r.start = static_cast<int>(i) + 1;
      r.end = static_cast<int>(j) + 1;
      for (int c = tokens[i].span.begin; c < tokens[j].span.end; ++c)
        r.surface_form += chars[c];
      s.ranges.push_back(std::move(r));
    }
    i = j + 1;
  }
  s.set_comment("text", raw);
  return s;
}

TokenizerModel TokenizerModel::create(const std::vector<std::string>& training_raws,
                                      const TokenizerConfig& config, Rng& rng) {
  TokenizerModel m;
  std::map<std::string, int> counts;
  for (const std::string& raw : training_raws)
    for (const std::string& ch : utf8_chars(raw)) ++counts[ch];
  Vocab& chars = m.params.vocab("chars");
  for (const auto& [ch, n] : counts)
    if (n >= config.char_min_count) chars.add(ch);

  m.params.hyper()["model"] = "tokenizer";
  m.params.hyper()["char_dim"] = config.char_dim;
  m.params.hyper()["hidden_dim"] = config.hidden_dim;
  m.params.hyper()["dropout"] = config.dropout;

  m.char_emb_ = m.params.add_lookup("char_emb", static_cast<int>(chars.size()),
                                    config.char_dim);
  m.params.init_embedding(m.char_emb_, rng);
  m.fwd_ = LstmCell::create(m.params, "fwd", config.char_dim, config.hidden_dim, &rng);
  m.bwd_ = LstmCell::create(m.params, "bwd", config.char_dim, config.hidden_dim, &rng);
  m.out_w_ = m.params.add_param("out.w", 2, 2 * config.hidden_dim);
  m.params.init_matrix(m.out_w_, rng);
  m.out_b_ = m.params.add_param("out.b", 2, 1);
  m.char_dim_ = config.char_dim;
  m.hidden_ = config.hidden_dim;
  m.dropout_ = config.dropout;
  return m;
}

void TokenizerModel::bind() {
  char_dim_ = params.hyper().at("char_dim").get<int>();
  hidden_ = params.hyper().at("hidden_dim").get<int>();
  dropout_ = params.hyper().at("dropout").get<double>();
  char_emb_ = params.get("char_emb");
  fwd_ = LstmCell::create(params, "fwd", char_dim_, hidden_, nullptr);
  bwd_ = LstmCell::create(params, "bwd", char_dim_, hidden_, nullptr);
  out_w_ = params.get("out.w");
  out_b_ = params.get("out.b");
}

TokenizerModel TokenizerModel::load_file(const std::string& path) {
  TokenizerModel m;
  m.params.load(path);
  if (m.params.hyper().value("model", "") != "tokenizer")
    throw DataError(path + " is not a tokenizer model");
  m.bind();
  return m;
}

void TokenizerModel::save_file(const std::string& path) const { params.save(path); }

std::vector<Graph::NodeId> TokenizerModel::encode(Graph& g,
                                                  const std::vector<std::string>& chars,
                                                  Rng* dropout_rng) {
  const Vocab& vocab = params.vocab("chars");
  std::vector<Graph::NodeId> xs;
  xs.reserve(chars.size());
  for (const std::string& ch : chars) {
    Graph::NodeId x = g.lookup(char_emb_, vocab.get(ch));
    if (dropout_rng && dropout_ > 0.0) x = g.dropout(x, dropout_, *dropout_rng);
    xs.push_back(x);
  }
  LstmRun fwd(g, fwd_), bwd(g, bwd_);
  std::vector<LstmState> fs = fwd.transduce(xs);
  std::vector<Graph::NodeId> rev(xs.rbegin(), xs.rend());
  std::vector<LstmState> bs = bwd.transduce(rev);

  Graph::NodeId w = g.param(out_w_);
  Graph::NodeId b = g.param(out_b_);
  std::vector<Graph::NodeId> logits;
  logits.reserve(chars.size());
  for (size_t i = 0; i < chars.size(); ++i) {
    std::array<Graph::NodeId, 2> parts = {fs[i].h, bs[chars.size() - 1 - i].h};
    logits.push_back(g.affine(w, g.concat(parts), b));
  }
  return logits;
}

std::vector<CharTag> TokenizerModel::tag_characters(const std::string& raw) {
  std::vector<std::string> chars = utf8_chars(raw);
  if (chars.empty()) return {};
  std::vector<CharTag> tags(chars.size(), CharTag::S);
  bool any_nonspace = false;
  for (const std::string& ch : chars)
    if (!is_space_char(ch)) any_nonspace = true;
  if (!any_nonspace) return tags;

  Graph g;
  std::vector<Graph::NodeId> logits = encode(g, chars, nullptr);
  bool first_nonspace = true;
  for (size_t i = 0; i < chars.size(); ++i) {
    if (is_space_char(chars[i])) continue;
    if (first_nonspace) {
      tags[i] = CharTag::B;  // forced, regardless of the classifier
      first_nonspace = false;
      continue;
    }
    const Tensor& z = g.value(logits[i]);
    tags[i] = z[0] >= z[1] ? CharTag::B : CharTag::I;
  }
  return tags;
}

std::vector<DecodedToken> TokenizerModel::tokenize(const std::string& raw) {
  return decode_tokens(raw, tag_characters(raw));
}

Graph::NodeId TokenizerModel::build_loss(Graph& g, const std::string& raw,
                                         const std::vector<CharTag>& gold,
                                         Rng* dropout_rng) {
  std::vector<std::string> chars = utf8_chars(raw);
  std::vector<Graph::NodeId> logits = encode(g, chars, dropout_rng);
  std::vector<Graph::NodeId> losses;
  for (size_t i = 0; i < chars.size(); ++i) {
    if (gold[i] == CharTag::S) continue;
    losses.push_back(g.pickneglogsoftmax(logits[i], gold[i] == CharTag::B ? 0 : 1));
  }
  if (losses.empty()) return -1;
  return g.sum(losses);
}

double span_f1(const std::vector<TokenSpan>& gold, const std::vector<TokenSpan>& pred) {
  std::set<std::pair<int, int>> gold_set;
  for (const TokenSpan& s : gold) gold_set.insert({s.begin, s.end});
  size_t correct = 0;
  for (const TokenSpan& s : pred)
    if (gold_set.count({s.begin, s.end})) ++correct;
  if (gold.empty() && pred.empty()) return 1.0;
  if (gold.empty() || pred.empty()) return 0.0;
  double p = static_cast<double>(correct) / pred.size();
  double r = static_cast<double>(correct) / gold.size();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

namespace {

double dev_token_f1(TokenizerModel& m,
                    const std::vector<std::pair<std::string, Sentence>>& pairs) {
  size_t gold_total = 0, pred_total = 0, correct = 0;
  for (const auto& [raw, sent] : pairs) {
    std::vector<TokenSpan> gold = align_tokens(raw, sent);
    std::vector<DecodedToken> pred = m.tokenize(raw);
    std::set<std::pair<int, int>> gold_set;
    for (const TokenSpan& s : gold) gold_set.insert({s.begin, s.end});
    for (const DecodedToken& t : pred)
      if (gold_set.count({t.span.begin, t.span.end})) ++correct;
    gold_total += gold.size();
    pred_total += pred.size();
  }
  if (gold_total == 0 && pred_total == 0) return 1.0;
  if (gold_total == 0 || pred_total == 0) return 0.0;
  double p = static_cast<double>(correct) / pred_total;
  double r = static_cast<double>(correct) / gold_total;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

TokenizerModel train_tokenizer(const std::vector<std::pair<std::string, Sentence>>& corpus,
                               const TokenizerConfig& config,
                               TokenizerTrainStats* stats) {
  if (corpus.empty()) throw DataError("train_tokenizer: empty corpus");

  std::vector<std::pair<std::string, std::vector<CharTag>>> examples;
  std::vector<std::string> raws;
  int skipped = 0;
  for (const auto& [raw, sent] : corpus) {
    try {
      examples.push_back({raw, derive_char_labels(raw, sent)});
      raws.push_back(raw);
    } catch (const AlignmentFailure&) {
      ++skipped;
    }
  }
  if (skipped > 0)
    std::cerr << "[train-tokenizer] skipped " << skipped
              << " pairs that failed character alignment\n";
  if (examples.empty()) throw DataError("train_tokenizer: no alignable pairs");

  Rng rng(config.seed);
  TokenizerModel model = TokenizerModel::create(raws, config, rng);
  SgdTrainer trainer(model.params, {config.lr, config.decay, config.clip});

  const std::vector<std::pair<std::string, Sentence>>& dev =
      config.dev ? *config.dev : corpus;

  double best_f1 = -1.0;
  int best_epoch = -1;
  std::vector<Tensor> best;
  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double total_loss = 0.0;
    for (size_t idx : order) {
      Graph g;
      Graph::NodeId loss = model.build_loss(g, examples[idx].first,
                                            examples[idx].second, &rng);
      if (loss < 0) continue;
      total_loss += g.value(loss)[0];
      g.backward(loss);
      trainer.update();
    }
    double f1 = dev_token_f1(model, dev);
    if (config.verbose)
      std::cerr << "[train-tokenizer] epoch " << epoch + 1 << " loss " << total_loss
                << " dev F1 " << f1 * 100.0 << "\n";
    if (f1 > best_f1) {
      best_f1 = f1;
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
    stats->skipped_alignment = skipped;
    stats->best_dev_f1 = best_f1;
    stats->best_epoch = best_epoch;
  }
  return model;
}

TokenizerModel train_tokenizer(const std::vector<std::pair<std::string, Sentence>>& corpus,
                               const TokenizerConfig& config) {
  return train_tokenizer(corpus, config, nullptr);
}

std::vector<Sentence> tokenize_batch(TokenizerModel& model,
                                     const std::vector<std::string>& raws, int jobs) {
  std::vector<Sentence> out(raws.size());
  parallel_for(raws.size(), jobs, [&](size_t i) {
    out[i] = tokens_to_sentence(raws[i], model.tokenize(raws[i]));
  });
  return out;
}

}  // namespace twparse
