#ifndef TWPARSE_EVAL_H
#define TWPARSE_EVAL_H

#include <functional>
#include <string>

#include <json.hpp>

#include "twparse/align.h"
#include "twparse/conllu.h"

namespace twparse {

// Scores of one evaluation run. Unused metrics stay negative and are left
// out of the reports; percentages print with one decimal.
struct EvalReport {
  std::string metric;
  double precision = -1.0;
  double recall = -1.0;
  double f1 = -1.0;
  double accuracy = -1.0;
  double uas = -1.0;
  double las = -1.0;
  double tokens_per_second = -1.0;
  long gold_count = 0;
  long pred_count = 0;
  long correct = 0;

  std::string to_table() const;
  std::string to_kv() const;
  nlohmann::json to_json() const;
};

// 0/0 is defined as 0.
double f1_score(double precision, double recall);

// A predicted token is correct iff its character span exactly matches a gold
// token span.
EvalReport token_span_f1(const Sentence& gold, const Sentence& pred,
                         const std::string& raw);
EvalReport token_span_f1(const Treebank& gold, const Treebank& pred);

// Gold-token mode (no raw): per-token accuracy, token counts must agree.
// Auto-token mode (raw given): span-aligned F1, a token scores iff span and
// tag both match.
EvalReport tagging_scores(const Sentence& gold, const Sentence& pred,
                          const std::string* raw);
EvalReport tagging_accuracy_report(const Treebank& gold, const Treebank& pred);
EvalReport tagging_span_f1(const Treebank& gold, const Treebank& pred);

// UAS/LAS over parallel treebanks with identical tokenization, punctuation
// included. Sentences pair by sent_id when both sides carry them.
EvalReport attachment_scores(const Treebank& gold, const Treebank& pred);

// End-to-end LAS F1 over span-aligned tokens: an aligned token scores iff
// its head aligns to the gold head's span and the deprel matches.
EvalReport pipeline_scores(const Treebank& gold, const Treebank& pred);

// Runs `work` once for warm-up, then `runs` timed passes; returns tokens
// per second from the median wall time.
double measure_throughput(const std::function<void()>& work, size_t tokens,
                          int runs = 3);

}  // namespace twparse

#endif
