#include "squadport/languages.hpp"

#include <fstream>

#include <json.hpp>

#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

namespace squadport {

namespace {

constexpr std::array<char32_t, 10> digit_run(char32_t zero) {
  std::array<char32_t, 10> d{};
  for (int i = 0; i < 10; ++i) d[i] = zero + static_cast<char32_t>(i);
  return d;
}

constexpr char32_t kAsciiZero = U'0';

}  // namespace

std::string_view to_string(LanguageFamily family) {
  switch (family) {
    case LanguageFamily::IndoAryan: return "Indo-Aryan";
    case LanguageFamily::Dravidian: return "Dravidian";
    case LanguageFamily::Other: return "Other";
  }
  return "?";
}

LanguageFamily family_from_string(std::string_view s) {
  if (s == "Indo-Aryan") return LanguageFamily::IndoAryan;
  if (s == "Dravidian") return LanguageFamily::Dravidian;
  if (s == "Other") return LanguageFamily::Other;
  throw Error("unknown language family '" + std::string(s) + "'");
}

LanguageRegistry LanguageRegistry::builtin() {
  using F = LanguageFamily;
  LanguageRegistry r;
  r.entries_ = {
      {"mr", "Marathi", F::IndoAryan, "Devanagari", digit_run(0x0966)},
      {"hi", "Hindi", F::IndoAryan, "Devanagari", digit_run(0x0966)},
      {"pa", "Punjabi", F::IndoAryan, "Gurmukhi", digit_run(0x0A66)},
      {"bn", "Bengali", F::IndoAryan, "Bengali", digit_run(0x09E6)},
      {"gu", "Gujarati", F::IndoAryan, "Gujarati", digit_run(0x0AE6)},
      {"or", "Oriya", F::IndoAryan, "Oriya", digit_run(0x0B66)},
      {"ta", "Tamil", F::Dravidian, "Tamil", digit_run(0x0BE6)},
      {"te", "Telugu", F::Dravidian, "Telugu", digit_run(0x0C66)},
      {"kn", "Kannada", F::Dravidian, "Kannada", digit_run(0x0CE6)},
      {"ml", "Malayalam", F::Dravidian, "Malayalam", digit_run(0x0D66)},
      {"en", "English", F::Other, "Latin", digit_run(kAsciiZero)},
  };
  return r;
}

const LanguageSpec& LanguageRegistry::lookup(std::string_view code) const {
  for (const auto& e : entries_) {
    if (e.code == code) return e;
  }
  throw UnknownLanguage("language '" + std::string(code) + "' is not in the registry");
}

bool LanguageRegistry::contains(std::string_view code) const {
  for (const auto& e : entries_) {
    if (e.code == code) return true;
  }
  return false;
}

void LanguageRegistry::add(LanguageSpec spec) {
  for (auto& e : entries_) {
    if (e.code == spec.code) {
      e = std::move(spec);
      return;
    }
  }
  entries_.push_back(std::move(spec));
}

void LanguageRegistry::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open language config '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInput(path, std::string("bad JSON: ") + e.what());
  }
  if (!doc.is_array()) throw MalformedInput(path, "expected a JSON array of language entries");

  for (const auto& j : doc) {
    LanguageSpec spec;
    spec.code = j.at("code").get<std::string>();
    spec.name = j.value("name", spec.code);
    spec.family = family_from_string(j.value("family", "Other"));
    spec.script = j.value("script", "");
    if (j.contains("digits")) {
      const std::u32string d = uni::decode_utf8(j.at("digits").get<std::string>());
      if (d.size() != 10) {
        throw MalformedInput(path, "language '" + spec.code + "': digits must be exactly 10 code points");
      }
      for (int i = 0; i < 10; ++i) spec.digits[i] = d[static_cast<std::size_t>(i)];
    } else {
      spec.digits = digit_run(kAsciiZero);
    }
    add(std::move(spec));
  }
}

std::u32string convert_digits(std::u32string_view text, const LanguageSpec& target) {
  std::u32string out(text);
  for (auto& c : out) {
    if (uni::is_ascii_digit(c)) c = target.digits[static_cast<std::size_t>(c - U'0')];
  }
  return out;
}

std::string convert_digits_utf8(std::string_view text, const LanguageSpec& target) {
  return uni::encode_utf8(convert_digits(uni::decode_utf8(text), target));
}

}  // namespace squadport
