#include "twparse/align.h"

#include "twparse/utf8.h"

namespace twparse {

namespace {

std::vector<TokenSpan> align_impl(const std::string& raw, const Sentence& s,
                                  bool require_exhausted) {
  std::vector<std::string> chars = utf8_chars(raw);
  std::vector<TokenSpan> spans;
  spans.reserve(s.tokens.size());
  size_t pos = 0;
  for (const Token& t : s.tokens) {
    while (pos < chars.size() && is_space_char(chars[pos])) ++pos;
    std::vector<std::string> form_chars = utf8_chars(t.form);
    TokenSpan span;
    span.begin = static_cast<int>(pos);
    for (const std::string& fc : form_chars) {
      if (pos >= chars.size() ||
          (chars[pos] != fc && utf8_lower(chars[pos]) != utf8_lower(fc))) {
        throw AlignmentFailure(
            t.form, "cannot align token '" + t.form + "' (id " +
                        std::to_string(t.id) + ") at character " +
                        std::to_string(pos) + " of \"" + raw + "\"");
      }
      ++pos;
    }
    span.end = static_cast<int>(pos);
    spans.push_back(span);
  }
  if (require_exhausted) {
    while (pos < chars.size() && is_space_char(chars[pos])) ++pos;
    if (pos < chars.size()) {
      throw AlignmentFailure(
          chars[pos], "unmatched text at character " + std::to_string(pos) +
                          " of \"" + raw + "\" after the last token");
    }
  }
  return spans;
}

}  // namespace

std::vector<TokenSpan> align_tokens(const std::string& raw, const Sentence& s) {
  return align_impl(raw, s, true);
}

std::vector<TokenSpan> align_tokens_prefix(const std::string& raw, const Sentence& s) {
  return align_impl(raw, s, false);
}

}  // namespace twparse
