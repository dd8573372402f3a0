#ifndef SQUADPORT_SIMILARITY_HPP
#define SQUADPORT_SIMILARITY_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace squadport {

/// Scores how well a candidate span matches the translated answer. Values lie
/// in [0,1]; score(a,a) == 1 for non-empty a. Implementations must be safe for
/// concurrent calls.
class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual double score(std::u32string_view a, std::u32string_view b) const = 0;
  /// scores[i] == score(candidates[i], target).
  virtual std::vector<double> score_matrix(const std::vector<std::u32string>& candidates,
                                           std::u32string_view target) const;
  virtual std::string name() const = 0;
};

/// Cosine over character 3-gram multiset counts of whitespace-normalized
/// inputs. Inputs shorter than three code points fall back to a single
/// whole-string gram, so equal short strings still score 1. Deterministic,
/// symmetric, and robust to the suffix morphology that wrecks exact matching.
class TrigramCosineSimilarity : public SimilarityBackend {
 public:
  double score(std::u32string_view a, std::u32string_view b) const override;
  std::string name() const override { return "trigram"; }
};

/// 1.0 iff the whitespace-normalized inputs are identical, else 0.
class ExactMatchSimilarity : public SimilarityBackend {
 public:
  double score(std::u32string_view a, std::u32string_view b) const override;
  std::string name() const override { return "exact"; }
};

std::unique_ptr<SimilarityBackend> make_similarity(std::string_view name);

/// Trim plus collapse of internal whitespace runs to single spaces.
std::u32string normalize_whitespace(std::u32string_view s);

}  // namespace squadport

#endif  // SQUADPORT_SIMILARITY_HPP
