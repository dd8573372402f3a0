#include "squadport/align.hpp"

#include <cassert>

#include "squadport/unicode.hpp"

namespace squadport {

TokenizedSentence tokenize(std::u32string_view sentence) {
  TokenizedSentence out;
  out.text.assign(sentence);
  const std::size_t n = sentence.size();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && uni::is_space(sentence[i])) ++i;
    if (i >= n) break;
    const std::size_t start = i;
    while (i < n && !uni::is_space(sentence[i])) ++i;
    out.tokens.push_back({std::u32string(sentence.substr(start, i - start)), start, i});
  }
  return out;
}

namespace {

std::u32string span_text(const TokenizedSentence& s, std::size_t first, std::size_t last) {
  const std::size_t a = s.tokens[first].start;
  const std::size_t b = s.tokens[last].end;
  return s.text.substr(a, b - a);
}

// score > best wins; on a tie the shorter range wins, then the leftmost.
bool beats(const AlignmentCandidate& challenger, const AlignmentCandidate& champion) {
  if (challenger.score != champion.score) return challenger.score > champion.score;
  const std::size_t clen = challenger.last_token - challenger.first_token;
  const std::size_t blen = champion.last_token - champion.first_token;
  if (clen != blen) return clen < blen;
  return challenger.first_token < champion.first_token;
}

}  // namespace

std::vector<AlignmentCandidate> enumerate_candidates(const TokenizedSentence& sentence,
                                                     std::size_t max_tokens) {
  assert(max_tokens >= 1);
  std::vector<AlignmentCandidate> out;
  const std::size_t n = sentence.tokens.size();
  for (std::size_t first = 0; first < n; ++first) {
    const std::size_t limit = std::min(n - first, max_tokens);
    for (std::size_t len = 1; len <= limit; ++len) {
      const std::size_t last = first + len - 1;
      out.push_back({first, last, span_text(sentence, first, last), 0.0});
    }
  }
  return out;
}

AlignmentCandidate best_candidate(std::vector<AlignmentCandidate>& candidates,
                                  std::u32string_view translated_answer,
                                  const SimilarityBackend& sim, AlignmentTrace* trace) {
  assert(!candidates.empty());
  for (auto& c : candidates) c.score = sim.score(c.text, translated_answer);
  if (trace) trace->candidates = candidates;

  const AlignmentCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (beats(c, *best)) best = &c;
  }
  return *best;
}

AlignmentCandidate extend_answer(const AlignmentCandidate& base, const TokenizedSentence& sentence,
                                 std::u32string_view translated_answer,
                                 const SimilarityBackend& sim, const AlignConfig& config,
                                 AlignmentTrace* trace) {
  AlignmentCandidate current = base;
  double best_score = base.score;
  const std::size_t n = sentence.tokens.size();

  while (true) {
    const double threshold = config.tolerance_mode == ToleranceMode::Relative
                                 ? (1.0 - config.tolerance) * best_score
                                 : best_score - config.tolerance;

    std::optional<AlignmentCandidate> left, right;
    if (current.first_token > 0) {
      AlignmentCandidate c{current.first_token - 1, current.last_token, {}, 0.0};
      c.text = span_text(sentence, c.first_token, c.last_token);
      c.score = sim.score(c.text, translated_answer);
      left = std::move(c);
    }
    if (current.last_token + 1 < n) {
      AlignmentCandidate c{current.first_token, current.last_token + 1, {}, 0.0};
      c.text = span_text(sentence, c.first_token, c.last_token);
      c.score = sim.score(c.text, translated_answer);
      right = std::move(c);
    }
    if (!left && !right) break;

    // the better side; ties go right (the append direction)
    const AlignmentCandidate* chosen;
    char side;
    if (!right || (left && left->score > right->score)) {
      chosen = &*left;
      side = 'L';
    } else {
      chosen = &*right;
      side = 'R';
    }

    const bool accepted = chosen->score >= threshold;
    if (trace) {
      trace->extensions.push_back(
          {side, chosen->first_token, chosen->last_token, chosen->score, threshold, accepted});
    }
    if (!accepted) break;
    current = *chosen;
    best_score = std::max(best_score, current.score);
  }
  return current;
}

std::optional<AlignmentResult> align_answer(std::u32string_view sentence,
                                            std::u32string_view translated_answer,
                                            const SimilarityBackend& sim,
                                            const AlignConfig& config, AlignmentTrace* trace) {
  if (const auto pos = sentence.find(translated_answer);
      pos != std::u32string_view::npos && !translated_answer.empty()) {
    if (trace) trace->fast_path = true;
    AlignmentResult r;
    r.span_text.assign(translated_answer);
    r.char_start = pos;
    r.char_end = pos + translated_answer.size();
    r.score = 1.0;
    r.exact_match = true;
    return r;
  }

  const TokenizedSentence tokenized = tokenize(sentence);
  if (tokenized.tokens.empty()) return std::nullopt;

  auto candidates = enumerate_candidates(tokenized, std::max<std::size_t>(1, config.max_tokens));
  const AlignmentCandidate base = best_candidate(candidates, translated_answer, sim, trace);
  if (base.score < config.min_score) return std::nullopt;

  const AlignmentCandidate final_span =
      extend_answer(base, tokenized, translated_answer, sim, config, trace);

  AlignmentResult r;
  r.span_text = final_span.text;
  r.char_start = tokenized.tokens[final_span.first_token].start;
  r.char_end = tokenized.tokens[final_span.last_token].end;
  r.score = final_span.score;
  r.extended =
      final_span.first_token != base.first_token || final_span.last_token != base.last_token;
  return r;
}

std::pair<std::size_t, std::u32string> locate_in_context(
    const std::vector<std::u32string>& translated_sentences, std::size_t sentence_index,
    std::size_t char_start) {
  std::u32string context;
  std::size_t answer_start = char_start;
  for (std::size_t i = 0; i < translated_sentences.size(); ++i) {
    if (i > 0) context.push_back(U' ');
    if (i < sentence_index) answer_start += translated_sentences[i].size() + 1;
    context += translated_sentences[i];
  }
  return {answer_start, std::move(context)};
}

}  // namespace squadport
