#ifndef TWPARSE_CONLLU_H
#define TWPARSE_CONLLU_H

#include <string>
#include <vector>

#include "twparse/common.h"

namespace twparse {

// The 17-tag universal POS inventory.
extern const std::vector<std::string> kUposTags;
bool is_universal_upos(const std::string& tag);

struct Token {
  int id = 0;                // 1-based within the sentence
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";    // "_" = unannotated
  std::string xpos = "_";    // opaque pass-through
  std::string feats = "_";   // opaque pass-through
  int head = -1;             // -1 = unannotated "_", 0 = root
  std::string deprel = "_";
  std::string deps = "_";    // opaque pass-through
  std::string misc = "_";

  bool operator==(const Token&) const = default;
};

// A surface token covering the syntactic tokens [start, end], e.g. the raw
// "gonna" covering "gon" + "na".
struct MultiwordRange {
  int start = 0;
  int end = 0;
  std::string surface_form;
  std::string misc = "_";

  bool operator==(const MultiwordRange&) const = default;
};

struct Sentence {
  std::vector<std::string> comments;  // verbatim "# ..." lines
  std::vector<Token> tokens;
  std::vector<MultiwordRange> ranges;

  bool operator==(const Sentence&) const = default;

  std::string sent_id() const;
  std::string text() const;
  std::string comment_value(const std::string& key) const;
  void set_comment(const std::string& key, const std::string& value);

  // True once any head is annotated; tree invariants only apply then.
  bool has_heads() const;
  size_t size() const { return tokens.size(); }

  // Concatenation of surface material (range surfaces replace the tokens
  // they cover), whitespace-free. This is what the text comment must match.
  std::string surface_concat() const;
};

struct Treebank {
  std::vector<Sentence> sentences;
  std::string split_name = "unsplit";

  bool operator==(const Treebank&) const = default;

  size_t token_count() const;
};

enum class ViolationCode {
  MalformedLine,
  NonContiguousIds,
  SelfHead,
  HeadOutOfRange,
  InvalidUpos,
  MissingHead,
  ZeroRoots,
  MultipleRoots,
  RootDeprel,
  Cycle,
  BadRange,
  RangeSurfaceMismatch,
  TextMismatch,
};

const char* violation_code_name(ViolationCode code);

struct Violation {
  ViolationCode code;
  int token_id = 0;  // 0 for sentence-level violations
  std::string message;
};

// Empty result iff all Sentence invariants hold.
std::vector<Violation> validate_sentence(const Sentence& s);

struct ConlluOptions {
  // Converts extra head=0 tokens into "parataxis" attachments to the first
  // root instead of rejecting the sentence.
  bool allow_multi_root = false;
};

// Throws DataError (with line numbers) on malformed or invalid input.
Treebank parse_conllu(const std::string& text, const ConlluOptions& opts = {});
Treebank read_conllu_file(const std::string& path, const ConlluOptions& opts = {});

std::string write_conllu(const Treebank& tb);
std::string write_sentence(const Sentence& s);
void write_conllu_file(const std::string& path, const Treebank& tb);

}  // namespace twparse

#endif
