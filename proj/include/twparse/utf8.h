#ifndef TWPARSE_UTF8_H
#define TWPARSE_UTF8_H

#include <cstdint>
#include <string>
#include <vector>

namespace twparse {

// Byte length of the UTF-8 sequence starting at byte c (1 for malformed bytes,
// so iteration always makes progress).
unsigned utf8_len(char c);

// Splits a UTF-8 string into one std::string per codepoint.
std::vector<std::string> utf8_chars(const std::string& s);

char32_t utf8_codepoint(const std::string& ch);

bool is_space_char(const std::string& ch);

std::string utf8_lower(const std::string& ch);  // ASCII-only lowering

}  // namespace twparse

#endif
