#ifndef SQUADPORT_ALIGN_HPP
#define SQUADPORT_ALIGN_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "squadport/similarity.hpp"

namespace squadport {

struct Token {
  std::u32string text;
  std::size_t start = 0;  // code-point offsets into the sentence
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

struct TokenizedSentence {
  std::u32string text;
  std::vector<Token> tokens;
};

/// A contiguous token range [first_token, last_token] with the covered
/// sentence substring (internal whitespace included) and its score.
struct AlignmentCandidate {
  std::size_t first_token = 0;
  std::size_t last_token = 0;
  std::u32string text;
  double score = 0.0;
};

struct AlignmentResult {
  std::u32string span_text;
  std::size_t char_start = 0;  // code-point offsets into the sentence
  std::size_t char_end = 0;
  double score = 0.0;
  bool extended = false;
  bool exact_match = false;
};

enum class ToleranceMode { Relative, Absolute };

struct AlignConfig {
  std::size_t max_tokens = 40;  // bounds candidate enumeration on long sentences
  double tolerance = 0.01;
  ToleranceMode tolerance_mode = ToleranceMode::Relative;
  double min_score = 0.5;  // drop threshold for align_answer
};

/// Per-QA debugging trace for the CLI's inspect view.
struct AlignmentTrace {
  bool fast_path = false;
  std::vector<AlignmentCandidate> candidates;  // every scored candidate
  struct ExtensionStep {
    char side = '?';  // 'L' or 'R'
    std::size_t first_token = 0;
    std::size_t last_token = 0;
    double score = 0.0;
    double threshold = 0.0;
    bool accepted = false;
  };
  std::vector<ExtensionStep> extensions;
};

/// Whitespace-delimited tokens with exact code-point offsets; punctuation
/// stays attached. Whitespace-only input yields zero tokens.
TokenizedSentence tokenize(std::u32string_view sentence);

/// All contiguous token ranges of length <= max_tokens, ordered by
/// (first_token, length). Unscored. n tokens with max_tokens >= n gives
/// n(n+1)/2 candidates.
std::vector<AlignmentCandidate> enumerate_candidates(const TokenizedSentence& sentence,
                                                     std::size_t max_tokens);

/// Argmax of similarity against the translated answer. Ties break to the
/// shorter token range, then to the smaller first_token (leftmost-shortest).
/// Scores every candidate in place.
AlignmentCandidate best_candidate(std::vector<AlignmentCandidate>& candidates,
                                  std::u32string_view translated_answer,
                                  const SimilarityBackend& sim,
                                  AlignmentTrace* trace = nullptr);

/// Iterative growth of the base span. Each round scores the token to the left
/// and the token to the right as tentative extensions and accepts the better
/// one while it stays within the tolerance of the running maximum score
/// (relative: score >= (1 - tol) * max; absolute: score >= max - tol). Never
/// shrinks the span; terminates after at most token-count rounds.
AlignmentCandidate extend_answer(const AlignmentCandidate& base, const TokenizedSentence& sentence,
                                 std::u32string_view translated_answer,
                                 const SimilarityBackend& sim, const AlignConfig& config,
                                 AlignmentTrace* trace = nullptr);

/// Full alignment of one translated answer inside one translated sentence.
/// Fast path: a verbatim occurrence wins immediately with score 1. Otherwise
/// tokenize -> enumerate -> best_candidate -> extend_answer. Returns nullopt
/// when the best candidate scores below config.min_score (the drop signal).
std::optional<AlignmentResult> align_answer(std::u32string_view sentence,
                                            std::u32string_view translated_answer,
                                            const SimilarityBackend& sim,
                                            const AlignConfig& config = {},
                                            AlignmentTrace* trace = nullptr);

/// Offset of a sentence-local span inside the context reconstructed by
/// joining the translated sentences with single spaces. Returns the
/// answer_start and the reconstructed context.
std::pair<std::size_t, std::u32string> locate_in_context(
    const std::vector<std::u32string>& translated_sentences, std::size_t sentence_index,
    std::size_t char_start);

}  // namespace squadport

#endif  // SQUADPORT_ALIGN_HPP
