#include <doctest.h>

#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

using namespace squadport;

TEST_CASE("utf8 round trip over mixed scripts") {
  const std::string s = "abc शिवाजी பா 123 é";
  CHECK(uni::encode_utf8(uni::decode_utf8(s)) == s);
  CHECK(uni::is_valid_utf8(s));
}

TEST_CASE("utf8 code point length vs byte length") {
  const std::string devanagari = "शिव";  // 3 code points, 9 bytes
  CHECK(devanagari.size() == 9);
  CHECK(uni::cp_length(devanagari) == 3);
}

TEST_CASE("utf8 rejects malformed input") {
  CHECK_THROWS_AS(uni::decode_utf8("\xff\xfe"), EncodingError);
  CHECK_THROWS_AS(uni::decode_utf8("\xc3"), EncodingError);          // truncated
  CHECK_THROWS_AS(uni::decode_utf8("\xc0\xaf"), EncodingError);      // overlong '/'
  CHECK_THROWS_AS(uni::decode_utf8("\xed\xa0\x80"), EncodingError);  // surrogate
  CHECK_FALSE(uni::is_valid_utf8("\x80"));
}

TEST_CASE("utf8 accepts astral plane") {
  const std::u32string cps = uni::decode_utf8("\U0001F600");
  REQUIRE(cps.size() == 1);
  CHECK(cps[0] == 0x1F600);
}

TEST_CASE("character classes") {
  CHECK(uni::is_space(U' '));
  CHECK(uni::is_space(0x00A0));
  CHECK_FALSE(uni::is_space(U'x'));
  CHECK(uni::is_punct(U'.'));
  CHECK(uni::is_punct(0x0964));  // danda
  CHECK(uni::is_punct(0x2026));  // ellipsis
  CHECK_FALSE(uni::is_punct(U'5'));
  CHECK_FALSE(uni::is_punct(0x0936));  // SHA is a letter
  CHECK(uni::fold_case(U'A') == U'a');
  CHECK(uni::fold_case(0x0936) == 0x0936);
}
