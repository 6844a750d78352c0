#ifndef TWPARSE_LINT_H
#define TWPARSE_LINT_H

#include <map>
#include <string>
#include <vector>

#include "twparse/conllu.h"

namespace twparse {

// Surface classification of tweet tokens. Deterministic in the form plus
// sentence position (truncation needs the terminal context); the annotation
// decides whether such a token is actually non-syntactic.
enum class TokenClass {
  Emoticon,
  RtMarker,
  AtMention,
  Hashtag,
  Url,
  TruncatedWord,
  Plain,
};

const char* token_class_name(TokenClass c);

bool is_at_mention_form(const std::string& form);
bool is_hashtag_form(const std::string& form);
bool is_url_form(const std::string& form);
bool is_emoticon_form(const std::string& form);

TokenClass classify_token(const Sentence& s, int token_id);

// Replaces at-mentions with "@USER" and URLs with "URL"; idempotent.
std::string anonymize(const std::string& raw);

struct LintRule {
  std::string code;
  enum Severity { Error, Warning } severity;
  std::string description;
};

const std::vector<LintRule>& lint_rules();
const LintRule* lint_rule(const std::string& code);

struct LintHit {
  const LintRule* rule;
  int token_id;
  std::string message;
};

// Convention checks over one annotated sentence. Rules only fire where the
// annotation already marks a token as non-syntactic (deprel discourse/list)
// or the tokens form the retweet construction; the linter judges the
// consistency of a choice, it never mandates one.
std::vector<LintHit> lint_sentence(const Sentence& s);

// Tab-separated report lines: sent_id, token id, code, message.
std::vector<std::string> lint_report(const Treebank& tb);

struct ClassStats {
  struct Row {
    long syntactic = 0;
    long non_syntactic = 0;
  };
  std::map<TokenClass, Row> rows;
  long total_tokens = 0;

  double pct(long n) const { return total_tokens ? 100.0 * n / total_tokens : 0.0; }
  std::string to_table() const;
};

// Per-class token proportions split by syntactic/non-syntactic use, where
// non-syntactic means the token is annotated discourse or list.
ClassStats corpus_stats(const Treebank& tb);

}  // namespace twparse

#endif
