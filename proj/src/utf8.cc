#include "twparse/utf8.h"

namespace twparse {

unsigned utf8_len(char c) {
  unsigned char b = static_cast<unsigned char>(c);
  if (b < 0x80) return 1;
  if ((b & 0xe0) == 0xc0) return 2;
  if ((b & 0xf0) == 0xe0) return 3;
  if ((b & 0xf8) == 0xf0) return 4;
  return 1;
}

std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  for (size_t i = 0; i < s.size();) {
    unsigned len = utf8_len(s[i]);
    if (i + len > s.size()) len = 1;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

char32_t utf8_codepoint(const std::string& ch) {
  if (ch.empty()) return 0;
  unsigned char b0 = static_cast<unsigned char>(ch[0]);
  if (b0 < 0x80) return b0;
  char32_t cp = 0;
  unsigned len = utf8_len(ch[0]);
  if (len == 2) cp = b0 & 0x1f;
  else if (len == 3) cp = b0 & 0x0f;
  else if (len == 4) cp = b0 & 0x07;
  else return b0;
  for (unsigned i = 1; i < len && i < ch.size(); ++i)
    cp = (cp << 6) | (static_cast<unsigned char>(ch[i]) & 0x3f);
  return cp;
}

bool is_space_char(const std::string& ch) {
  char32_t cp = utf8_codepoint(ch);
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x00a0: case 0x1680: case 0x202f: case 0x205f: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

std::string utf8_lower(const std::string& ch) {
  if (ch.size() == 1 && ch[0] >= 'A' && ch[0] <= 'Z') {
    return std::string(1, static_cast<char>(ch[0] - 'A' + 'a'));
  }
  return ch;
}

}  // namespace twparse
