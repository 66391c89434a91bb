#include "clwe/unicode.hpp"

#include <clocale>
#include <cwctype>
#include <locale.h>

namespace clwe {
namespace {

// towlower in the C.UTF-8 locale implements the simple case mapping from
// UnicodeData.txt. Falls back to ASCII-only lowering when the locale is
// missing.
struct Utf8Locale {
  locale_t handle = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
  ~Utf8Locale() {
    if (handle) freelocale(handle);
  }
};

char32_t lower(char32_t cp) {
  static const Utf8Locale loc;
  if (loc.handle) return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc.handle));
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  return cp;
}

// Returns the decoded code point and sequence length, or length 0 on an
// invalid sequence.
std::pair<char32_t, int> decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0, 0};
  }
  if (pos + len > s.size()) return {0, 0};
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) return {0, 0};
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms and surrogates are treated as invalid.
  static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {0, 0};
  return {cp, len};
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::string utf8_lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto [cp, len] = decode(text, pos);
    if (len == 0) {
      out.push_back(text[pos]);
      ++pos;
      continue;
    }
    encode(lower(cp), out);
    pos += static_cast<std::size_t>(len);
  }
  return out;
}

}  // namespace clwe
