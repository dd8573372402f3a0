#include "squadport/unicode.hpp"

#include <cstdint>

#include "squadport/errors.hpp"

namespace squadport::uni {

namespace {

[[noreturn]] void bad_byte(std::size_t pos) {
  throw EncodingError("invalid UTF-8 at byte " + std::to_string(pos));
}

// Decodes one code point starting at s[i]; advances i past it.
char32_t decode_one(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<std::uint8_t>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len;
  char32_t cp;
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
    bad_byte(i);
  }
  if (i + len > s.size()) bad_byte(i);
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<std::uint8_t>(s[i + k]);
    if ((b & 0xC0) != 0x80) bad_byte(i + k);
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len]) bad_byte(i);                  // overlong
  if (cp >= 0xD800 && cp <= 0xDFFF) bad_byte(i);    // surrogate
  if (cp > 0x10FFFF) bad_byte(i);
  i += len;
  return cp;
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) out.push_back(decode_one(s, i));
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
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
  return out;
}

bool is_valid_utf8(std::string_view s) {
  try {
    std::size_t i = 0;
    while (i < s.size()) decode_one(s, i);
    return true;
  } catch (const EncodingError&) {
    return false;
  }
}

std::size_t cp_length(std::string_view s) {
  std::size_t i = 0, n = 0;
  while (i < s.size()) {
    decode_one(s, i);
    ++n;
  }
  return n;
}

bool is_space(char32_t c) {
  switch (c) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x00A0:  // no-break space
    case 0x1680:
    case 0x2028:  // line separator
    case 0x2029:  // paragraph separator
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= U'!' && c <= U'/') || (c >= U':' && c <= U'@') ||
           (c >= U'[' && c <= U'`') || (c >= U'{' && c <= U'~');
  }
  switch (c) {
    case 0x00A1:  // inverted exclamation
    case 0x00AB:  // «
    case 0x00B7:  // middle dot
    case 0x00BB:  // »
    case 0x00BF:  // inverted question
    case 0x0964:  // devanagari danda
    case 0x0965:  // devanagari double danda
    case 0x0970:  // devanagari abbreviation sign
    case 0x0AF0:  // gujarati abbreviation sign
    case 0x1CD3:  // vedic sign nihshvasa
    case 0x3001:  // ideographic comma
    case 0x3002:  // ideographic full stop
      return true;
    default:
      // General punctuation block, minus the space/format characters at its
      // start (U+2000..U+200F) and the invisible operators at U+2060+.
      return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E);
  }
}

char32_t fold_case(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  return c;
}

}  // namespace squadport::uni
