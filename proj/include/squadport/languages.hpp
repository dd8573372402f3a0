#ifndef SQUADPORT_LANGUAGES_HPP
#define SQUADPORT_LANGUAGES_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace squadport {

enum class LanguageFamily { IndoAryan, Dravidian, Other };

std::string_view to_string(LanguageFamily family);
LanguageFamily family_from_string(std::string_view s);

struct LanguageSpec {
  std::string code;    // BCP-47-style tag: "mr", "hi", ...
  std::string name;    // "Marathi"
  LanguageFamily family = LanguageFamily::Other;
  std::string script;  // "Devanagari"
  /// Script digits for ASCII 0..9. Identity (U+0030..) for digit-less targets.
  std::array<char32_t, 10> digits{};

  bool operator==(const LanguageSpec&) const = default;
};

/// The ten Indic target languages plus English as the source language.
/// Extensible from a JSON config file; codes are unique.
class LanguageRegistry {
 public:
  /// Registry preloaded with the built-in table.
  static LanguageRegistry builtin();

  const LanguageSpec& lookup(std::string_view code) const;  // throws UnknownLanguage
  bool contains(std::string_view code) const;
  void add(LanguageSpec spec);  // replaces an existing entry with the same code

  /// Merges entries from a JSON array of objects
  /// {"code","name","family","script","digits"} where digits is a string of
  /// ten script digits (or absent for an identity map).
  void load_file(const std::string& path);

  const std::vector<LanguageSpec>& entries() const { return entries_; }

 private:
  std::vector<LanguageSpec> entries_;
};

/// Replaces every ASCII digit by its target-script counterpart, leaving all
/// other characters untouched. Preserves code-point length; idempotent.
std::u32string convert_digits(std::u32string_view text, const LanguageSpec& target);
std::string convert_digits_utf8(std::string_view text, const LanguageSpec& target);

}  // namespace squadport

#endif  // SQUADPORT_LANGUAGES_HPP
