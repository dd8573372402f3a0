#ifndef SQUADPORT_SEGMENTER_HPP
#define SQUADPORT_SEGMENTER_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace squadport {

/// A sentence with exact code-point offsets into its source context:
/// context[start..end) == text. Spans are sorted and non-overlapping, and
/// every non-whitespace character of the context lies in exactly one span.
struct SentenceSpan {
  std::u32string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const SentenceSpan&) const = default;
};

/// Inclusive range of sentence indices.
struct SentenceRange {
  std::size_t first = 0;
  std::size_t last = 0;

  bool operator==(const SentenceRange&) const = default;
};

struct SegmenterOptions {
  SegmenterOptions();
  /// Tokens (including the trailing dot) that never end a sentence: "Mr.",
  /// "e.g.", ... Loadable from a plain-text file, one entry per line.
  std::unordered_set<std::u32string> abbreviations;
};

/// Deterministic rule-based splitter. A sentence ends at a terminator
/// {. ! ? । ॥ …} followed by whitespace or end of text, unless
/// the dot sits between two digits or closes a listed abbreviation. Text with
/// no terminator becomes a single trimmed span; whitespace-only text yields
/// no spans.
std::vector<SentenceSpan> split_sentences(std::u32string_view context,
                                          const SegmenterOptions& options = {});

/// Minimal contiguous range of sentences whose spans intersect
/// [answer_start, answer_start + answer_len). Throws AnswerOutsideContext
/// when the answer touches no span (it lies in uncovered whitespace).
SentenceRange find_answer_sentence(const std::vector<SentenceSpan>& sentences,
                                   std::size_t answer_start, std::size_t answer_len);

/// One abbreviation per line; blank lines and lines starting with '#' skipped.
std::unordered_set<std::u32string> load_abbreviations(const std::string& path);

}  // namespace squadport

#endif  // SQUADPORT_SEGMENTER_HPP
