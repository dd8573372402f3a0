#ifndef SQUADPORT_TESTS_SUPPORT_CORPUS_HPP
#define SQUADPORT_TESTS_SUPPORT_CORPUS_HPP

// Deterministic synthetic multi-script SQuAD corpus for pipeline and
// acceptance tests. Contexts are sentences of random letter tokens (Latin,
// Devanagari, Tamil; no digits, so identity runs are digit-map neutral).
// Answer styles:
//   - token-boundary spans (single or multi token), recoverable verbatim by
//     any token-preserving translator;
//   - prefix mid-word spans (>= 4 code points of a longer token), which force
//     the n-gram path under the marker mock;
//   - sentence-straddling spans exercising the merged-range machinery.
// About 30% of QAs are unanswerable; a few carry plausible answers or a
// second gold answer.

#include <random>
#include <string>
#include <vector>

#include "squadport/squad.hpp"
#include "squadport/unicode.hpp"

namespace squadport::testsupport {

inline char32_t random_letter(std::mt19937& rng) {
  switch (rng() % 3) {
    case 0:
      return U'a' + static_cast<char32_t>(rng() % 26);
    case 1:
      return 0x0905 + static_cast<char32_t>(rng() % 0x35);  // Devanagari letters
    default: {
      static constexpr char32_t tamil[] = {0x0B85, 0x0B86, 0x0B87, 0x0B95, 0x0B99,
                                           0x0B9A, 0x0BA4, 0x0BA8, 0x0BAA, 0x0BB0};
      return tamil[rng() % 10];
    }
  }
}

inline std::u32string random_token(std::mt19937& rng, std::size_t min_len, std::size_t max_len) {
  std::u32string t;
  const std::size_t len = min_len + rng() % (max_len - min_len + 1);
  for (std::size_t i = 0; i < len; ++i) t.push_back(random_letter(rng));
  return t;
}

struct SentenceLayout {
  std::u32string text;           // includes the trailing '.'
  std::size_t start = 0;         // offset of the sentence in the context
  std::vector<std::size_t> token_starts;
  std::vector<std::size_t> token_ends;  // excludes the trailing '.'
};

struct ParagraphLayout {
  std::u32string context;
  std::vector<SentenceLayout> sentences;
};

inline ParagraphLayout random_paragraph_layout(std::mt19937& rng) {
  ParagraphLayout layout;
  const std::size_t sentences = 2 + rng() % 3;
  for (std::size_t si = 0; si < sentences; ++si) {
    SentenceLayout sent;
    if (!layout.context.empty()) layout.context.push_back(U' ');
    sent.start = layout.context.size();
    const std::size_t tokens = 3 + rng() % 5;
    for (std::size_t ti = 0; ti < tokens; ++ti) {
      if (ti > 0) sent.text.push_back(U' ');
      sent.token_starts.push_back(sent.start + sent.text.size());
      sent.text += random_token(rng, 3, 9);
      sent.token_ends.push_back(sent.start + sent.text.size());
    }
    sent.text.push_back(U'.');
    layout.context += sent.text;
    layout.sentences.push_back(std::move(sent));
  }
  return layout;
}

inline Answer span_answer(const ParagraphLayout& layout, std::size_t start, std::size_t end) {
  Answer a;
  a.text = uni::encode_utf8(layout.context.substr(start, end - start));
  a.answer_start = static_cast<std::int64_t>(start);
  return a;
}

/// A token-boundary answer inside one sentence.
inline Answer boundary_answer(const ParagraphLayout& layout, std::mt19937& rng) {
  const SentenceLayout& s = layout.sentences[rng() % layout.sentences.size()];
  const std::size_t first = rng() % s.token_starts.size();
  const std::size_t last = std::min(s.token_starts.size() - 1, first + rng() % 2);
  return span_answer(layout, s.token_starts[first], s.token_ends[last]);
}

/// A >= 4 code-point prefix of a token that is strictly longer than the
/// prefix, so the span never sits on a token boundary. Under a token-marking
/// translator a prefix is still verbatim (marker + prefix of marker + token).
inline Answer prefix_answer(const ParagraphLayout& layout, std::mt19937& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const SentenceLayout& s = layout.sentences[rng() % layout.sentences.size()];
    const std::size_t ti = rng() % s.token_starts.size();
    const std::size_t len = s.token_ends[ti] - s.token_starts[ti];
    if (len < 6) continue;
    const std::size_t keep = 4 + rng() % (len - 5);  // 4 <= keep < len
    return span_answer(layout, s.token_starts[ti], s.token_starts[ti] + keep);
  }
  return boundary_answer(layout, rng);  // layouts with only short tokens
}

/// A >= 5 code-point proper suffix of a token. Never verbatim under a
/// token-marking translator, so alignment has to go through the n-gram
/// candidate search.
inline Answer suffix_answer(const ParagraphLayout& layout, std::mt19937& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const SentenceLayout& s = layout.sentences[rng() % layout.sentences.size()];
    const std::size_t ti = rng() % s.token_starts.size();
    const std::size_t len = s.token_ends[ti] - s.token_starts[ti];
    if (len < 7) continue;
    const std::size_t keep = 5 + rng() % (len - 6);  // 5 <= keep < len
    return span_answer(layout, s.token_ends[ti] - keep, s.token_ends[ti]);
  }
  return boundary_answer(layout, rng);
}

/// Spans the last token of one sentence (with its '.') and the first token of
/// the next.
inline Answer straddling_answer(const ParagraphLayout& layout, std::mt19937& rng) {
  if (layout.sentences.size() < 2) return boundary_answer(layout, rng);
  const std::size_t si = rng() % (layout.sentences.size() - 1);
  const SentenceLayout& a = layout.sentences[si];
  const SentenceLayout& b = layout.sentences[si + 1];
  return span_answer(layout, a.token_starts.back(), b.token_ends.front());
}

struct CorpusOptions {
  std::size_t num_qas = 200;
  unsigned seed = 20240614;
  double impossible_ratio = 0.30;
  double prefix_ratio = 0.10;      // of answerable QAs
  double straddling_ratio = 0.05;  // of answerable QAs
  double suffix_ratio = 0.0;       // of answerable QAs; forces the n-gram path
  double second_answer_ratio = 0.10;
  double plausible_ratio = 0.25;   // of impossible QAs
};

inline SquadDataset make_corpus(const CorpusOptions& options = {}) {
  std::mt19937 rng(options.seed);
  SquadDataset ds;
  ds.version = "v2.0-synthetic";

  auto chance = [&rng](double p) { return (rng() % 10000) < p * 10000; };

  std::size_t produced = 0;
  int article_index = 0;
  while (produced < options.num_qas) {
    Article article;
    article.title = "article_" + std::to_string(article_index++);
    const std::size_t paragraphs = 1 + rng() % 3;
    for (std::size_t pi = 0; pi < paragraphs && produced < options.num_qas; ++pi) {
      const ParagraphLayout layout = random_paragraph_layout(rng);
      Paragraph paragraph;
      paragraph.context = uni::encode_utf8(layout.context);
      const std::size_t qas = 1 + rng() % 4;
      for (std::size_t qi = 0; qi < qas && produced < options.num_qas; ++qi) {
        QA qa;
        qa.id = "q" + std::to_string(produced);
        qa.question = uni::encode_utf8(random_token(rng, 3, 7)) + " " +
                      uni::encode_utf8(random_token(rng, 3, 7)) + "?";
        if (chance(options.impossible_ratio)) {
          qa.is_impossible = true;
          if (chance(options.plausible_ratio)) {
            qa.plausible_answers = std::vector<Answer>{boundary_answer(layout, rng)};
          }
        } else {
          qa.is_impossible = false;
          Answer a;
          if (chance(options.prefix_ratio)) {
            a = prefix_answer(layout, rng);
          } else if (chance(options.straddling_ratio)) {
            a = straddling_answer(layout, rng);
          } else if (chance(options.suffix_ratio)) {
            a = suffix_answer(layout, rng);
          } else {
            a = boundary_answer(layout, rng);
          }
          qa.answers.push_back(a);
          if (chance(options.second_answer_ratio)) {
            qa.answers.push_back(boundary_answer(layout, rng));
          }
        }
        paragraph.qas.push_back(std::move(qa));
        ++produced;
      }
      article.paragraphs.push_back(std::move(paragraph));
    }
    ds.articles.push_back(std::move(article));
  }
  return ds;
}

inline std::size_t count_answerable(const SquadDataset& ds) {
  std::size_t n = 0;
  for (const auto& a : ds.articles) {
    for (const auto& p : a.paragraphs) {
      for (const auto& qa : p.qas) {
        if (!qa.is_impossible) ++n;
      }
    }
  }
  return n;
}

}  // namespace squadport::testsupport

#endif  // SQUADPORT_TESTS_SUPPORT_CORPUS_HPP
