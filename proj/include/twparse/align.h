#ifndef TWPARSE_ALIGN_H
#define TWPARSE_ALIGN_H

#include <string>
#include <vector>

#include "twparse/common.h"
#include "twparse/conllu.h"

namespace twparse {

class AlignmentFailure : public DataError {
 public:
  AlignmentFailure(const std::string& token, const std::string& what)
      : DataError(what), token(token) {}
  std::string token;
};

// Character span of one token in the raw text, in codepoint offsets,
// end-exclusive.
struct TokenSpan {
  int begin = 0;
  int end = 0;

  bool operator==(const TokenSpan&) const = default;
  bool operator<(const TokenSpan& o) const {
    return begin != o.begin ? begin < o.begin : end < o.end;
  }
};

// Aligns the token forms of s to the raw tweet, left to right; whitespace may
// separate tokens, contraction pieces sit back to back. Falls back to
// case-insensitive matching per character. Throws AlignmentFailure naming the
// first token that cannot be matched, or the position of leftover text.
std::vector<TokenSpan> align_tokens(const std::string& raw, const Sentence& s);

// Same, but does not require the tokens to exhaust the raw text.
std::vector<TokenSpan> align_tokens_prefix(const std::string& raw, const Sentence& s);

}  // namespace twparse

#endif
