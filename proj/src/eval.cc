#include "twparse/eval.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

#include "twparse/common.h"

namespace twparse {

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "metric: " << metric << "\n";
  auto row = [&out](const char* name, double v) {
    if (v >= 0.0) out << "  " << name << std::string(18 - std::string(name).size(), ' ')
                      << fixed1(v) << "\n";
  };
  row("precision", precision);
  row("recall", recall);
  row("f1", f1);
  row("accuracy", accuracy);
  row("uas", uas);
  row("las", las);
  if (tokens_per_second >= 0.0)
    out << "  tokens_per_second " << fixed1(tokens_per_second) << "\n";
  return out.str();
}

std::string EvalReport::to_kv() const {
  std::ostringstream out;
  out << "metric = " << metric << "\n";
  auto row = [&out](const char* name, double v) {
    if (v >= 0.0) out << name << " = " << fixed1(v) << "\n";
  };
  row("precision", precision);
  row("recall", recall);
  row("f1", f1);
  row("accuracy", accuracy);
  row("uas", uas);
  row("las", las);
  row("tokens_per_second", tokens_per_second);
  out << "gold_count = " << gold_count << "\n";
  out << "pred_count = " << pred_count << "\n";
  out << "correct = " << correct << "\n";
  return out.str();
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["metric"] = metric;
  auto set = [&j](const char* name, double v) {
    if (v >= 0.0) j[name] = v;
  };
  set("precision", precision);
  set("recall", recall);
  set("f1", f1);
  set("accuracy", accuracy);
  set("uas", uas);
  set("las", las);
  set("tokens_per_second", tokens_per_second);
  j["gold_count"] = gold_count;
  j["pred_count"] = pred_count;
  j["correct"] = correct;
  return j;
}

namespace {

// Pairs parallel treebanks by sent_id when both sides carry complete unique
// ids, by position otherwise.
std::vector<std::pair<const Sentence*, const Sentence*>> pair_sentences(
    const Treebank& gold, const Treebank& pred) {
  if (gold.sentences.size() != pred.sentences.size())
    throw DataError("parallel treebanks differ in sentence count (" +
                    std::to_string(gold.sentences.size()) + " vs " +
                    std::to_string(pred.sentences.size()) + ")");
  bool by_id = !gold.sentences.empty();
  std::map<std::string, const Sentence*> pred_by_id;
  for (const Sentence& s : pred.sentences) {
    std::string id = s.sent_id();
    if (id.empty() || pred_by_id.count(id)) {
      by_id = false;
      break;
    }
    pred_by_id[id] = &s;
  }
  if (by_id)
    for (const Sentence& s : gold.sentences)
      if (s.sent_id().empty() || !pred_by_id.count(s.sent_id())) {
        by_id = false;
        break;
      }

  std::vector<std::pair<const Sentence*, const Sentence*>> pairs;
  if (by_id) {
    for (const Sentence& s : gold.sentences) pairs.push_back({&s, pred_by_id[s.sent_id()]});
  } else {
    for (size_t i = 0; i < gold.sentences.size(); ++i)
      pairs.push_back({&gold.sentences[i], &pred.sentences[i]});
  }
  return pairs;
}

struct SpanCounts {
  long gold = 0;
  long pred = 0;
  long correct = 0;
};

SpanCounts count_span_matches(const Sentence& gold, const Sentence& pred,
                              const std::string& raw, bool require_tag) {
  std::vector<TokenSpan> gs = align_tokens(raw, gold);
  std::vector<TokenSpan> ps = align_tokens(raw, pred);
  std::map<std::pair<int, int>, const Token*> gold_by_span;
  for (size_t i = 0; i < gs.size(); ++i)
    gold_by_span[{gs[i].begin, gs[i].end}] = &gold.tokens[i];
  SpanCounts c;
  c.gold = static_cast<long>(gs.size());
  c.pred = static_cast<long>(ps.size());
  for (size_t i = 0; i < ps.size(); ++i) {
    auto it = gold_by_span.find({ps[i].begin, ps[i].end});
    if (it == gold_by_span.end()) continue;
    if (!require_tag || it->second->upos == pred.tokens[i].upos) ++c.correct;
  }
  return c;
}

EvalReport span_report(const std::string& metric, const SpanCounts& c) {
  EvalReport r;
  r.metric = metric;
  r.gold_count = c.gold;
  r.pred_count = c.pred;
  r.correct = c.correct;
  r.precision = c.pred ? 100.0 * c.correct / c.pred : 0.0;
  r.recall = c.gold ? 100.0 * c.correct / c.gold : 0.0;
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

std::string raw_of(const Sentence& s) {
  std::string raw = s.text();
  if (raw.empty())
    throw DataError("sentence '" + s.sent_id() +
                    "' lacks the text comment required for span evaluation");
  return raw;
}

}  // namespace

EvalReport token_span_f1(const Sentence& gold, const Sentence& pred,
                         const std::string& raw) {
  return span_report("tokenization", count_span_matches(gold, pred, raw, false));
}

EvalReport token_span_f1(const Treebank& gold, const Treebank& pred) {
  SpanCounts total;
  for (auto [g, p] : pair_sentences(gold, pred)) {
    SpanCounts c = count_span_matches(*g, *p, raw_of(*g), false);
    total.gold += c.gold;
    total.pred += c.pred;
    total.correct += c.correct;
  }
  return span_report("tokenization", total);
}

EvalReport tagging_scores(const Sentence& gold, const Sentence& pred,
                          const std::string* raw) {
  if (raw) return span_report("pos-auto", count_span_matches(gold, pred, *raw, true));
  if (gold.tokens.size() != pred.tokens.size())
    throw DataError("tagging_scores: token count mismatch in gold-token mode");
  EvalReport r;
  r.metric = "pos-gold";
  r.gold_count = r.pred_count = static_cast<long>(gold.tokens.size());
  for (size_t i = 0; i < gold.tokens.size(); ++i)
    if (gold.tokens[i].upos == pred.tokens[i].upos) ++r.correct;
  r.accuracy = r.gold_count ? 100.0 * r.correct / r.gold_count : 0.0;
  return r;
}

EvalReport tagging_accuracy_report(const Treebank& gold, const Treebank& pred) {
  EvalReport r;
  r.metric = "pos-gold";
  for (auto [g, p] : pair_sentences(gold, pred)) {
    if (g->tokens.size() != p->tokens.size())
      throw DataError("tagging: token count mismatch in gold-token mode");
    r.gold_count += static_cast<long>(g->tokens.size());
    for (size_t i = 0; i < g->tokens.size(); ++i)
      if (g->tokens[i].upos == p->tokens[i].upos) ++r.correct;
  }
  r.pred_count = r.gold_count;
  r.accuracy = r.gold_count ? 100.0 * r.correct / r.gold_count : 0.0;
  return r;
}

EvalReport tagging_span_f1(const Treebank& gold, const Treebank& pred) {
  SpanCounts total;
  for (auto [g, p] : pair_sentences(gold, pred)) {
    SpanCounts c = count_span_matches(*g, *p, raw_of(*g), true);
    total.gold += c.gold;
    total.pred += c.pred;
    total.correct += c.correct;
  }
  return span_report("pos-auto", total);
}

EvalReport attachment_scores(const Treebank& gold, const Treebank& pred) {
  EvalReport r;
  r.metric = "attachment";
  long head_correct = 0, both_correct = 0, total = 0;
  for (auto [g, p] : pair_sentences(gold, pred)) {
    if (g->tokens.size() != p->tokens.size())
      throw DataError("attachment_scores: token count mismatch (sent_id '" +
                      g->sent_id() + "')");
    for (size_t i = 0; i < g->tokens.size(); ++i) {
      ++total;
      if (g->tokens[i].head == p->tokens[i].head) {
        ++head_correct;
        if (g->tokens[i].deprel == p->tokens[i].deprel) ++both_correct;
      }
    }
  }
  r.gold_count = r.pred_count = total;
  r.correct = both_correct;
  r.uas = total ? 100.0 * head_correct / total : 0.0;
  r.las = total ? 100.0 * both_correct / total : 0.0;
  return r;
}

EvalReport pipeline_scores(const Treebank& gold, const Treebank& pred) {
  SpanCounts total;
  for (auto [g, p] : pair_sentences(gold, pred)) {
    std::string graw = raw_of(*g);
    std::string praw = raw_of(*p);
    if (graw != praw)
      throw DataError("pipeline_scores: raw text mismatch (sent_id '" + g->sent_id() +
                      "')");
    std::vector<TokenSpan> gs = align_tokens(graw, *g);
    std::vector<TokenSpan> ps = align_tokens(praw, *p);
    total.gold += static_cast<long>(gs.size());
    total.pred += static_cast<long>(ps.size());

    std::map<std::pair<int, int>, size_t> gold_by_span;
    for (size_t i = 0; i < gs.size(); ++i) gold_by_span[{gs[i].begin, gs[i].end}] = i;
    for (size_t i = 0; i < ps.size(); ++i) {
      auto it = gold_by_span.find({ps[i].begin, ps[i].end});
      if (it == gold_by_span.end()) continue;
      size_t gi = it->second;
      if (p->tokens[i].deprel != g->tokens[gi].deprel) continue;
      int ph = p->tokens[i].head;
      int gh = g->tokens[gi].head;
      if (ph == 0 || gh == 0) {
        if (ph == 0 && gh == 0) ++total.correct;
        continue;
      }
      if (ph < 1 || ph > static_cast<int>(ps.size())) continue;
      if (gh < 1 || gh > static_cast<int>(gs.size())) continue;
      // heads must cover the same characters
      if (ps[ph - 1].begin == gs[gh - 1].begin && ps[ph - 1].end == gs[gh - 1].end)
        ++total.correct;
    }
  }
  EvalReport r = span_report("pipeline-las", total);
  return r;
}

double measure_throughput(const std::function<void()>& work, size_t tokens, int runs) {
  work();  // warm-up, excluded from timing
  std::vector<double> times;
  for (int i = 0; i < runs; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    work();
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  double median = times[times.size() / 2];
  return median > 0.0 ? static_cast<double>(tokens) / median : 0.0;
}

}  // namespace twparse
