#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "squadport/errors.hpp"
#include "squadport/segmenter.hpp"
#include "squadport/unicode.hpp"
#include "support/corpus.hpp"

using namespace squadport;

namespace {

void check_span_invariants(const std::u32string& context, const std::vector<SentenceSpan>& spans) {
  std::size_t prev_end = 0;
  std::vector<bool> covered(context.size(), false);
  for (const auto& s : spans) {
    REQUIRE(s.start < s.end);
    REQUIRE(s.end <= context.size());
    CHECK(s.start >= prev_end);
    CHECK(context.substr(s.start, s.end - s.start) == s.text);
    for (std::size_t i = s.start; i < s.end; ++i) covered[i] = true;
    prev_end = s.end;
  }
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (!uni::is_space(context[i])) CHECK(covered[i]);
  }
}

}  // namespace

TEST_CASE("two sentences with exact offsets") {
  const std::u32string ctx = U"A b. C d.";
  const auto spans = split_sentences(ctx);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 4);
  CHECK(spans[0].text == U"A b.");
  CHECK(spans[1].start == 5);
  CHECK(spans[1].end == 9);
  CHECK(spans[1].text == U"C d.");
  check_span_invariants(ctx, spans);
}

TEST_CASE("no terminator yields a single trimmed span") {
  const std::u32string ctx = U"  just some words  ";
  const auto spans = split_sentences(ctx);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].text == U"just some words");
  CHECK(spans[0].start == 2);
  check_span_invariants(ctx, spans);
}

TEST_CASE("abbreviations do not split") {
  const std::u32string ctx = U"Mr. Smith went. He left.";
  const auto spans = split_sentences(ctx);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].text == U"Mr. Smith went.");
  CHECK(spans[1].text == U"He left.");

  SegmenterOptions custom;
  custom.abbreviations = {U"Zz."};
  const auto custom_spans = split_sentences(U"Zz. next. done.", custom);
  REQUIRE(custom_spans.size() == 2);
  CHECK(custom_spans[0].text == U"Zz. next.");
}

TEST_CASE("decimal numbers never split") {
  const auto spans = split_sentences(U"Pi is 3.14 here. Next one.");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].text == U"Pi is 3.14 here.");
}

TEST_CASE("danda and ellipsis terminate sentences") {
  const auto spans = split_sentences(U"कख। गघ॥ x… y");
  REQUIRE(spans.size() == 4);
  CHECK(spans[0].text == U"कख।");
  CHECK(spans[1].text == U"गघ॥");
  CHECK(spans[2].text == U"x…");
  CHECK(spans[3].text == U"y");
}

TEST_CASE("terminator runs stay inside one sentence") {
  const auto spans = split_sentences(U"What?! Really. Ok...");
  REQUIRE(spans.size() == 3);
  CHECK(spans[0].text == U"What?!");
  CHECK(spans[2].text == U"Ok...");
}

TEST_CASE("whitespace-only context yields no spans") {
  CHECK(split_sentences(U"   ").empty());
}

TEST_CASE("reconstruction is idempotent") {
  const std::vector<std::u32string> contexts = {
      U"A b. C d. E f!", U"Mr. Smith went. He left.", U"One 3.14 two. Three?  Four."};
  for (const auto& ctx : contexts) {
    const auto spans = split_sentences(ctx);
    std::u32string joined;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (i > 0) joined.push_back(U' ');
      joined += spans[i].text;
    }
    const auto respans = split_sentences(joined);
    REQUIRE(respans.size() == spans.size());
    for (std::size_t i = 0; i < spans.size(); ++i) CHECK(respans[i].text == spans[i].text);
  }
}

TEST_CASE("find_answer_sentence basic ranges") {
  const auto spans = split_sentences(U"A b. C d. E f.");
  CHECK(find_answer_sentence(spans, 0, 3) == SentenceRange{0, 0});
  CHECK(find_answer_sentence(spans, 5, 4) == SentenceRange{1, 1});
  // answer straddling the boundary of sentences 1 and 2
  CHECK(find_answer_sentence(spans, 7, 5) == SentenceRange{1, 2});
}

TEST_CASE("find_answer_sentence rejects whitespace-only target") {
  const auto spans = split_sentences(U"A b. C d.");
  CHECK_THROWS_AS(find_answer_sentence(spans, 4, 1), AnswerOutsideContext);
  CHECK_THROWS_AS(find_answer_sentence(spans, 4, 0), AnswerOutsideContext);
}

TEST_CASE("abbreviation lists load from plain-text files") {
  const std::string path = "test_abbrev.txt";
  {
    std::ofstream out(path, std::ios::trunc);
    out << "# titles\nMr.\nSt.\n\nZz.\n";
  }
  const auto abbrevs = load_abbreviations(path);
  CHECK(abbrevs.size() == 3);
  CHECK(abbrevs.count(U"Zz.") == 1);
  CHECK(abbrevs.count(U"# titles") == 0);

  SegmenterOptions options;
  options.abbreviations = abbrevs;
  CHECK(split_sentences(U"Zz. then more. done.", options).size() == 2);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_abbreviations("no_such_file.txt"), Error);
}

TEST_CASE("every qa of a valid dataset lands in a sentence containing its answer") {
  const SquadDataset corpus = testsupport::make_corpus({150, 123});
  for (const auto& article : corpus.articles) {
    for (const auto& paragraph : article.paragraphs) {
      const std::u32string context = uni::decode_utf8(paragraph.context);
      const auto spans = split_sentences(context);
      for (const auto& qa : paragraph.qas) {
        for (const auto& answer : qa.answers) {
          const std::u32string text = uni::decode_utf8(answer.text);
          const SentenceRange range = find_answer_sentence(
              spans, static_cast<std::size_t>(answer.answer_start), text.size());
          std::u32string joined;
          for (std::size_t i = range.first; i <= range.last; ++i) {
            if (i > range.first) joined.push_back(U' ');
            joined += spans[i].text;
          }
          CHECK(joined.find(text) != std::u32string::npos);
        }
      }
    }
  }
}

TEST_CASE("find_answer_sentence containment over random contexts") {
  // oracle: the union of the returned spans must contain every non-whitespace
  // position of the answer, found by brute-force scan
  std::mt19937 rng(20240612);
  int checked = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    std::u32string ctx;
    const int words = 3 + static_cast<int>(rng() % 20);
    for (int w = 0; w < words; ++w) {
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i) ctx.push_back(U'a' + static_cast<char32_t>(rng() % 26));
      const int punct = static_cast<int>(rng() % 10);
      if (punct < 2) ctx.push_back(U'.');
      if (punct == 2) ctx.push_back(U'!');
      ctx.push_back(U' ');
    }
    const auto spans = split_sentences(ctx);
    if (spans.empty()) continue;

    const std::size_t start = rng() % ctx.size();
    const std::size_t len = 1 + rng() % std::min<std::size_t>(12, ctx.size() - start);

    bool touches_any = false;
    for (const auto& s : spans) {
      if (s.start < start + len && s.end > start) touches_any = true;
    }

    if (!touches_any) {
      CHECK_THROWS_AS(find_answer_sentence(spans, start, len), AnswerOutsideContext);
      continue;
    }
    const SentenceRange range = find_answer_sentence(spans, start, len);
    REQUIRE(range.first <= range.last);
    REQUIRE(range.last < spans.size());
    // union covers every non-whitespace position of the answer
    for (std::size_t p = start; p < start + len; ++p) {
      if (p >= ctx.size() || uni::is_space(ctx[p])) continue;
      bool in_union = false;
      for (std::size_t i = range.first; i <= range.last; ++i) {
        if (p >= spans[i].start && p < spans[i].end) in_union = true;
      }
      CHECK(in_union);
    }
    // minimality: the boundary sentences intersect the answer
    CHECK(spans[range.first].end > start);
    CHECK(spans[range.last].start < start + len);
    ++checked;
  }
  CHECK(checked > 500);
}
