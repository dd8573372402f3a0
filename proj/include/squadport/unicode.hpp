#ifndef SQUADPORT_UNICODE_HPP
#define SQUADPORT_UNICODE_HPP

#include <cstddef>
#include <string>
#include <string_view>

namespace squadport::uni {

// All character offsets in this project count Unicode code points, not bytes.
// Indic scripts are multi-byte in UTF-8, so byte offsets would be meaningless
// against the JSON-visible text. These helpers are the single conversion point
// between the UTF-8 wire/file layer and the code-point processing layer.

/// Decodes strict UTF-8 into code points. Rejects overlong forms, surrogates
/// and values above U+10FFFF. Throws EncodingError.
std::u32string decode_utf8(std::string_view s);

std::string encode_utf8(std::u32string_view s);

bool is_valid_utf8(std::string_view s);

/// Length of a UTF-8 string in code points. Throws EncodingError.
std::size_t cp_length(std::string_view s);

bool is_space(char32_t c);

/// Covers ASCII punctuation plus the common general-punctuation and Indic
/// punctuation ranges (danda, double danda, abbreviation signs). Not the full
/// Unicode P* category, but every code point returned true here is in it.
bool is_punct(char32_t c);

inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

/// ASCII-only case folding; Indic scripts are caseless.
char32_t fold_case(char32_t c);

}  // namespace squadport::uni

#endif  // SQUADPORT_UNICODE_HPP
