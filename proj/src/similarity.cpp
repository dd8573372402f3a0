#include "squadport/similarity.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

namespace squadport {

std::u32string normalize_whitespace(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t c : s) {
    if (uni::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<double> SimilarityBackend::score_matrix(
    const std::vector<std::u32string>& candidates, std::u32string_view target) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(score(c, target));
  return out;
}

namespace {

// Code points fit in 21 bits, so a trigram packs into one uint64 key.
using TrigramCounts = std::unordered_map<std::uint64_t, std::uint32_t>;

TrigramCounts count_trigrams(std::u32string_view s) {
  TrigramCounts counts;
  if (s.size() < 3) return counts;
  counts.reserve(s.size());
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s[i]) << 42) |
                              (static_cast<std::uint64_t>(s[i + 1]) << 21) |
                              static_cast<std::uint64_t>(s[i + 2]);
    ++counts[key];
  }
  return counts;
}

double cosine(const TrigramCounts& a, const TrigramCounts& b) {
  const TrigramCounts& small = a.size() <= b.size() ? a : b;
  const TrigramCounts& large = a.size() <= b.size() ? b : a;
  std::uint64_t dot = 0, norm_a = 0, norm_b = 0;
  for (const auto& [key, count] : small) {
    if (auto it = large.find(key); it != large.end()) {
      dot += static_cast<std::uint64_t>(count) * it->second;
    }
  }
  for (const auto& [key, count] : a) norm_a += static_cast<std::uint64_t>(count) * count;
  for (const auto& [key, count] : b) norm_b += static_cast<std::uint64_t>(count) * count;
  if (dot == 0) return 0.0;
  return static_cast<double>(dot) /
         (std::sqrt(static_cast<double>(norm_a)) * std::sqrt(static_cast<double>(norm_b)));
}

}  // namespace

double TrigramCosineSimilarity::score(std::u32string_view a, std::u32string_view b) const {
  const std::u32string na = normalize_whitespace(a);
  const std::u32string nb = normalize_whitespace(b);
  if (na.empty() || nb.empty()) return na.empty() && nb.empty() ? 1.0 : 0.0;
  if (na.size() < 3 || nb.size() < 3) {
    // too short for trigrams: the whole string acts as the single gram
    return na == nb ? 1.0 : 0.0;
  }
  return cosine(count_trigrams(na), count_trigrams(nb));
}

double ExactMatchSimilarity::score(std::u32string_view a, std::u32string_view b) const {
  return normalize_whitespace(a) == normalize_whitespace(b) ? 1.0 : 0.0;
}

std::unique_ptr<SimilarityBackend> make_similarity(std::string_view name) {
  if (name == "trigram") return std::make_unique<TrigramCosineSimilarity>();
  if (name == "exact") return std::make_unique<ExactMatchSimilarity>();
  throw Error("unknown similarity backend '" + std::string(name) + "'");
}

}  // namespace squadport
