#include "squadport/segmenter.hpp"

#include <fstream>

#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

namespace squadport {

namespace {

bool is_terminator(char32_t c) {
  return c == U'.' || c == U'!' || c == U'?' || c == 0x0964 || c == 0x0965 || c == 0x2026;
}

// The non-whitespace token ending at (and including) text[dot].
std::u32string token_ending_at(std::u32string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !uni::is_space(text[begin - 1])) --begin;
  return std::u32string(text.substr(begin, dot - begin + 1));
}

}  // namespace

SegmenterOptions::SegmenterOptions()
    : abbreviations{U"Mr.",  U"Mrs.", U"Ms.",   U"Dr.",  U"Prof.", U"St.",
                    U"Jr.",  U"Sr.",  U"vs.",   U"etc.", U"e.g.",  U"i.e.",
                    U"cf.",  U"Co.",  U"Inc.",  U"Ltd.", U"No.",   U"Vol.",
                    U"pp.",  U"Fig.", U"approx."} {}

std::vector<SentenceSpan> split_sentences(std::u32string_view context,
                                          const SegmenterOptions& options) {
  std::vector<SentenceSpan> spans;
  const std::size_t n = context.size();
  std::size_t i = 0;

  while (i < n) {
    while (i < n && uni::is_space(context[i])) ++i;
    if (i >= n) break;
    const std::size_t start = i;

    std::size_t end = n;  // exclusive; defaults to a final unterminated span
    for (std::size_t j = i; j < n; ++j) {
      const char32_t c = context[j];
      if (!is_terminator(c)) continue;
      if (j + 1 < n && !uni::is_space(context[j + 1])) continue;
      if (c == U'.') {
        // decimal guard: 3.14 never splits
        if (j > 0 && j + 1 < n && uni::is_ascii_digit(context[j - 1]) &&
            uni::is_ascii_digit(context[j + 1])) {
          continue;
        }
        if (options.abbreviations.count(token_ending_at(context, j)) > 0) continue;
      }
      end = j + 1;
      break;
    }

    if (end == n) {
      // trim trailing whitespace off the final span
      while (end > start && uni::is_space(context[end - 1])) --end;
    }
    spans.push_back({std::u32string(context.substr(start, end - start)), start, end});
    i = end;
  }
  return spans;
}

SentenceRange find_answer_sentence(const std::vector<SentenceSpan>& sentences,
                                   std::size_t answer_start, std::size_t answer_len) {
  const std::size_t a = answer_start;
  const std::size_t b = answer_start + answer_len;

  std::size_t first = sentences.size();
  std::size_t last = sentences.size();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    if (s.start < b && s.end > a) {
      if (first == sentences.size()) first = i;
      last = i;
    }
  }
  if (first == sentences.size()) {
    throw AnswerOutsideContext("answer [" + std::to_string(a) + ", " + std::to_string(b) +
                               ") intersects no sentence span");
  }
  return {first, last};
}

std::unordered_set<std::u32string> load_abbreviations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open abbreviation list '" + path + "'");
  std::unordered_set<std::u32string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.insert(uni::decode_utf8(line));
  }
  return out;
}

}  // namespace squadport
