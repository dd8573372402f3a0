#include "squadport/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "squad_json.hpp"
#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

namespace squadport {

using nlohmann::json;

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::NoAlignment: return "NoAlignment";
    case DropReason::EmptyTranslation: return "EmptyTranslation";
    case DropReason::BackendFailure: return "BackendFailure";
    case DropReason::AnswerOutsideContext: return "AnswerOutsideContext";
    case DropReason::ImpossibleFiltered: return "ImpossibleFiltered";
  }
  return "?";
}

std::size_t PipelineReport::total_dropped() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : dropped) n += count;
  return n;
}

std::string PipelineReport::to_json() const {
  json drops = json::object();
  for (const auto& [reason, count] : dropped) drops[std::string(to_string(reason))] = count;
  json articles = json::array();
  for (const auto& [title, seconds] : article_seconds) {
    articles.push_back(json{{"title", title}, {"seconds", seconds}});
  }
  return json{{"input_qas", input_qas},
              {"emitted_qas", emitted_qas},
              {"dropped", std::move(drops)},
              {"articles", std::move(articles)}}
      .dump();
}

std::string PipelineReport::summary() const {
  std::ostringstream os;
  os << "qas: " << input_qas << " in, " << emitted_qas << " emitted, " << total_dropped()
     << " dropped";
  for (const auto& [reason, count] : dropped) {
    os << "\n  " << to_string(reason) << ": " << count;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// per-paragraph translation state

ParagraphState translate_paragraph(const Paragraph& paragraph, const PipelineConfig& config,
                                   PipelineBackends& backends, const LanguageSpec& src,
                                   const LanguageSpec& tgt) {
  ParagraphState state;
  state.source_spans = split_sentences(uni::decode_utf8(paragraph.context), config.segmenter);

  std::vector<std::string> texts;
  texts.reserve(state.source_spans.size());
  for (const auto& span : state.source_spans) texts.push_back(uni::encode_utf8(span.text));

  const std::vector<std::string> translated = backends.translator.translate_batch(texts, src, tgt);
  state.translated.reserve(translated.size());
  for (const auto& t : translated) state.translated.push_back(uni::decode_utf8(t));
  return state;
}

namespace {

// A recovered answer span in reconstructed-context coordinates (code points
// into join(translated, " "), before the transliteration/digit pass).
struct AnswerAlignment {
  std::size_t ctx_start = 0;
  std::size_t ctx_end = 0;
};

struct QaAlignment {
  std::u32string question;
  bool is_impossible = false;
  bool had_plausible = false;
  std::vector<AnswerAlignment> answers;
  std::vector<AnswerAlignment> plausible;
  std::optional<DropReason> drop;
};

std::size_t context_prefix_length(const ParagraphState& state, std::size_t sentence_index) {
  std::size_t prefix = 0;
  for (std::size_t i = 0; i < sentence_index; ++i) prefix += state.translated[i].size() + 1;
  return prefix;
}

std::variant<AnswerAlignment, DropReason> align_one_answer(const Answer& answer,
                                                           const ParagraphState& state,
                                                           const PipelineConfig& config,
                                                           PipelineBackends& backends,
                                                           const LanguageSpec& src,
                                                           const LanguageSpec& tgt) {
  if (answer.answer_start < 0) return DropReason::AnswerOutsideContext;
  if (normalize_whitespace(uni::decode_utf8(answer.text)).empty()) {
    return DropReason::EmptyTranslation;
  }

  SentenceRange range;
  try {
    range = find_answer_sentence(state.source_spans,
                                 static_cast<std::size_t>(answer.answer_start),
                                 uni::cp_length(answer.text));
  } catch (const AnswerOutsideContext&) {
    return DropReason::AnswerOutsideContext;
  }

  std::string translated_answer;
  try {
    translated_answer = backends.translator.translate(answer.text, src, tgt);
  } catch (const Error&) {
    return DropReason::BackendFailure;
  }
  if (translated_answer.empty()) return DropReason::EmptyTranslation;

  // A multi-sentence range is merged and treated as one sentence; the join
  // rule matches the context reconstruction so offsets transfer directly.
  std::u32string merged;
  for (std::size_t i = range.first; i <= range.last; ++i) {
    if (i > range.first) merged.push_back(U' ');
    merged += state.translated[i];
  }
  if (normalize_whitespace(merged).empty()) return DropReason::EmptyTranslation;

  const auto result =
      align_answer(merged, uni::decode_utf8(translated_answer), backends.similarity, config.align);
  if (!result) return DropReason::NoAlignment;

  const std::size_t prefix = context_prefix_length(state, range.first);
  return AnswerAlignment{prefix + result->char_start, prefix + result->char_end};
}

QaAlignment align_qa(const QA& qa, const ParagraphState& state, const PipelineConfig& config,
                     PipelineBackends& backends, const LanguageSpec& src,
                     const LanguageSpec& tgt) {
  QaAlignment out;
  out.is_impossible = qa.is_impossible;
  out.had_plausible = qa.plausible_answers.has_value();

  if (qa.is_impossible && config.drop_impossible) {
    out.drop = DropReason::ImpossibleFiltered;
    return out;
  }

  if (normalize_whitespace(uni::decode_utf8(qa.question)).empty()) {
    out.question = uni::decode_utf8(qa.question);
  } else {
    try {
      const std::string q = backends.translator.translate(qa.question, src, tgt);
      if (q.empty()) {
        out.drop = DropReason::EmptyTranslation;
        return out;
      }
      out.question = uni::decode_utf8(q);
    } catch (const Error&) {
      out.drop = DropReason::BackendFailure;
      return out;
    }
  }

  if (qa.is_impossible) {
    if (config.translate_plausible && qa.plausible_answers) {
      for (const auto& answer : *qa.plausible_answers) {
        auto aligned = align_one_answer(answer, state, config, backends, src, tgt);
        if (auto* ok = std::get_if<AnswerAlignment>(&aligned)) out.plausible.push_back(*ok);
        // failed plausible answers are silently omitted; the QA still emits
      }
    }
    return out;
  }

  std::optional<DropReason> first_failure;
  for (const auto& answer : qa.answers) {
    auto aligned = align_one_answer(answer, state, config, backends, src, tgt);
    if (auto* ok = std::get_if<AnswerAlignment>(&aligned)) {
      out.answers.push_back(*ok);
    } else if (!first_failure) {
      first_failure = std::get<DropReason>(aligned);
    }
  }
  if (out.answers.empty()) {
    out.drop = first_failure.value_or(DropReason::NoAlignment);
  }
  return out;
}

// ---------------------------------------------------------------------------
// finalization: transliteration rewrites, digit pass, offset recovery

struct Rewrite {
  std::size_t old_start, old_end;
  std::u32string text;
  std::size_t new_start = 0, new_end = 0;
};

class OffsetRemap {
 public:
  // rewrites must be sorted by old_start and non-overlapping
  explicit OffsetRemap(std::vector<Rewrite> rewrites) : rewrites_(std::move(rewrites)) {}

  std::size_t map_start(std::size_t p) const {
    std::ptrdiff_t delta = 0;
    for (const auto& r : rewrites_) {
      if (r.old_end <= p) {
        delta += static_cast<std::ptrdiff_t>(r.new_end - r.new_start) -
                 static_cast<std::ptrdiff_t>(r.old_end - r.old_start);
        continue;
      }
      if (r.old_start <= p) return r.new_start;  // inside: snap to the rewrite start
      break;
    }
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + delta);
  }

  std::size_t map_end(std::size_t p) const {
    std::ptrdiff_t delta = 0;
    for (const auto& r : rewrites_) {
      if (r.old_end < p) {
        delta += static_cast<std::ptrdiff_t>(r.new_end - r.new_start) -
                 static_cast<std::ptrdiff_t>(r.old_end - r.old_start);
        continue;
      }
      if (r.old_start < p && p <= r.old_end) return r.new_end;  // inside: snap to the end
      break;
    }
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + delta);
  }

 private:
  std::vector<Rewrite> rewrites_;
};

struct FinalContext {
  std::u32string text;
  OffsetRemap remap;
};

FinalContext build_final_context(const std::u32string& reconstructed,
                                 const std::vector<QaAlignment>& alignments,
                                 PipelineBackends& backends, const LanguageSpec& tgt) {
  std::vector<Rewrite> proposals;
  if (backends.transliterator != nullptr) {
    auto propose = [&](const AnswerAlignment& a) {
      const std::u32string old_text =
          reconstructed.substr(a.ctx_start, a.ctx_end - a.ctx_start);
      const std::u32string new_text = uni::decode_utf8(transliterate_text(
          uni::encode_utf8(old_text), tgt, backends.transliterator));
      if (new_text != old_text) proposals.push_back({a.ctx_start, a.ctx_end, new_text});
    };
    for (const auto& qa : alignments) {
      if (qa.drop) continue;
      for (const auto& a : qa.answers) propose(a);
      for (const auto& a : qa.plausible) propose(a);
    }
  }

  std::sort(proposals.begin(), proposals.end(), [](const Rewrite& a, const Rewrite& b) {
    return std::tie(a.old_start, a.old_end, a.text) < std::tie(b.old_start, b.old_end, b.text);
  });

  // greedy non-overlapping acceptance; duplicate spans collapse to the first
  std::vector<Rewrite> accepted;
  std::size_t covered_to = 0;
  for (auto& p : proposals) {
    if (!accepted.empty() && p.old_start == accepted.back().old_start &&
        p.old_end == accepted.back().old_end) {
      continue;
    }
    if (p.old_start < covered_to) continue;
    covered_to = p.old_end;
    accepted.push_back(std::move(p));
  }

  std::u32string out;
  out.reserve(reconstructed.size());
  std::size_t pos = 0;
  for (auto& r : accepted) {
    out += reconstructed.substr(pos, r.old_start - pos);
    r.new_start = out.size();
    out += r.text;
    r.new_end = out.size();
    pos = r.old_end;
  }
  out += reconstructed.substr(pos);
  return {std::move(out), OffsetRemap(std::move(accepted))};
}

struct FinalizedParagraph {
  Paragraph paragraph;  // translated context + emitted QAs
  std::size_t input_qas = 0;
  std::map<DropReason, std::size_t> drops;
};

FinalizedParagraph finalize_paragraph(const Paragraph& source, const ParagraphState& state,
                                      std::vector<QaAlignment> alignments,
                                      const PipelineConfig& config, PipelineBackends& backends,
                                      const LanguageSpec& tgt) {
  std::u32string reconstructed;
  for (std::size_t i = 0; i < state.translated.size(); ++i) {
    if (i > 0) reconstructed.push_back(U' ');
    reconstructed += state.translated[i];
  }

  FinalContext final_ctx = build_final_context(reconstructed, alignments, backends, tgt);
  const std::u32string context = convert_digits(final_ctx.text, tgt);

  FinalizedParagraph out;
  out.input_qas = source.qas.size();
  out.paragraph.context = uni::encode_utf8(context);

  auto extract = [&](const AnswerAlignment& a) {
    const std::size_t s = final_ctx.remap.map_start(a.ctx_start);
    const std::size_t e = final_ctx.remap.map_end(a.ctx_end);
    Answer answer;
    answer.text = uni::encode_utf8(context.substr(s, e - s));
    answer.answer_start = static_cast<std::int64_t>(s);
    return answer;
  };

  for (std::size_t qi = 0; qi < source.qas.size(); ++qi) {
    const QA& src_qa = source.qas[qi];
    QaAlignment& aligned = alignments[qi];
    if (aligned.drop) {
      ++out.drops[*aligned.drop];
      continue;
    }
    QA qa;
    qa.id = src_qa.id;
    qa.question = uni::encode_utf8(convert_digits(aligned.question, tgt));
    qa.is_impossible = src_qa.is_impossible;
    for (const auto& a : aligned.answers) qa.answers.push_back(extract(a));
    if (config.translate_plausible && aligned.had_plausible) {
      std::vector<Answer> plausible;
      for (const auto& a : aligned.plausible) plausible.push_back(extract(a));
      qa.plausible_answers = std::move(plausible);
    }
    out.paragraph.qas.push_back(std::move(qa));
  }
  return out;
}

FinalizedParagraph process_paragraph(const Paragraph& paragraph, const PipelineConfig& config,
                                     PipelineBackends& backends, const LanguageSpec& src,
                                     const LanguageSpec& tgt) {
  const ParagraphState state = translate_paragraph(paragraph, config, backends, src, tgt);
  std::vector<QaAlignment> alignments;
  alignments.reserve(paragraph.qas.size());
  for (const auto& qa : paragraph.qas) {
    alignments.push_back(align_qa(qa, state, config, backends, src, tgt));
  }
  return finalize_paragraph(paragraph, state, std::move(alignments), config, backends, tgt);
}

}  // namespace

std::variant<QA, DropReason> translate_qa(const QA& qa, const ParagraphState& state,
                                          const PipelineConfig& config,
                                          PipelineBackends& backends, const LanguageSpec& src,
                                          const LanguageSpec& tgt) {
  Paragraph pseudo;
  pseudo.qas.push_back(qa);
  std::vector<QaAlignment> alignments;
  alignments.push_back(align_qa(qa, state, config, backends, src, tgt));
  if (alignments.front().drop) return *alignments.front().drop;
  FinalizedParagraph f =
      finalize_paragraph(pseudo, state, std::move(alignments), config, backends, tgt);
  return std::move(f.paragraph.qas.front());
}

// ---------------------------------------------------------------------------
// progress log

namespace {

std::uint64_t fnv64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_fingerprint(const PipelineConfig& c) {
  json j{{"source", c.source_lang},
         {"target", c.target_lang},
         {"min_score", c.align.min_score},
         {"tolerance", c.align.tolerance},
         {"tolerance_mode", c.align.tolerance_mode == ToleranceMode::Relative ? "relative" : "absolute"},
         {"max_tokens", c.align.max_tokens},
         {"drop_impossible", c.drop_impossible},
         {"translate_plausible", c.translate_plausible}};
  return j.dump();
}

struct ArticleRecord {
  Article article;
  std::size_t input_qas = 0;
  std::size_t emitted = 0;
  std::map<DropReason, std::size_t> drops;
  double seconds = 0.0;
};

json record_to_json(std::size_t index, const ArticleRecord& rec) {
  json drops = json::object();
  for (const auto& [reason, count] : rec.drops) drops[std::string(to_string(reason))] = count;
  return json{{"kind", "article"},       {"index", index},
              {"input_qas", rec.input_qas}, {"emitted", rec.emitted},
              {"drops", std::move(drops)}, {"seconds", rec.seconds},
              {"data", detail::article_to_json(rec.article)}};
}

DropReason drop_reason_from_string(const std::string& s) {
  for (DropReason r : {DropReason::NoAlignment, DropReason::EmptyTranslation,
                       DropReason::BackendFailure, DropReason::AnswerOutsideContext,
                       DropReason::ImpossibleFiltered}) {
    if (to_string(r) == s) return r;
  }
  throw Error("unknown drop reason '" + s + "' in progress file");
}

// Append-only JSONL sidecar: a header record binding the log to (input,
// config), then one record per completed article. A torn trailing record
// from a killed run is dropped by truncating back to the last good byte.
class ProgressLog {
 public:
  ProgressLog(const std::optional<std::filesystem::path>& path, std::uint64_t input_hash,
              const std::string& config_fp)
      : path_(path) {
    if (!path_) return;
    load_or_create(input_hash, config_fp);
    out_.open(*path_, std::ios::binary | std::ios::app);
    if (!out_) throw Error("cannot open progress file '" + path_->string() + "' for writing");
  }

  const std::vector<ArticleRecord>& completed() const { return completed_; }

  void append(std::size_t index, const ArticleRecord& rec, bool flush) {
    if (!path_) return;
    out_ << record_to_json(index, rec).dump() << '\n';
    if (flush) out_.flush();
  }

  void flush() {
    if (path_) out_.flush();
  }

 private:
  void load_or_create(std::uint64_t input_hash, const std::string& config_fp) {
    std::ifstream in(*path_, std::ios::binary);
    if (!in) {
      std::ofstream create(*path_, std::ios::binary | std::ios::trunc);
      if (!create) throw Error("cannot create progress file '" + path_->string() + "'");
      json header{{"kind", "header"}, {"input_hash", input_hash}, {"config", config_fp}};
      create << header.dump() << '\n';
      create.flush();
      return;
    }

    std::string line;
    std::uintmax_t good_bytes = 0;
    bool have_header = false;
    bool torn = false;
    while (std::getline(in, line)) {
      const bool complete_line = !in.eof();  // getline at EOF without '\n' = torn tail
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::parse_error&) {
        torn = true;
        break;
      }
      if (!complete_line) {
        torn = true;
        break;
      }
      if (!have_header) {
        if (rec.value("kind", "") != "header") {
          throw Error("progress file '" + path_->string() + "' has no header record");
        }
        if (rec.value("input_hash", 0ULL) != input_hash || rec.value("config", "") != config_fp) {
          throw Error("progress file '" + path_->string() +
                      "' was written for a different input or config");
        }
        have_header = true;
      } else {
        if (rec.value("kind", "") != "article" || !rec.contains("data")) {
          torn = true;
          break;
        }
        if (rec.value("index", completed_.size()) != completed_.size()) {
          throw Error("progress file '" + path_->string() + "' has out-of-order records");
        }
        ArticleRecord ar;
        ar.article = detail::article_from_json(rec["data"], "progress.data");
        ar.input_qas = rec.value("input_qas", std::size_t{0});
        ar.emitted = rec.value("emitted", std::size_t{0});
        ar.seconds = rec.value("seconds", 0.0);
        for (const auto& [key, value] : rec["drops"].items()) {
          ar.drops[drop_reason_from_string(key)] = value.get<std::size_t>();
        }
        completed_.push_back(std::move(ar));
      }
      good_bytes += line.size() + 1;
    }
    in.close();
    if (!have_header) throw Error("progress file '" + path_->string() + "' is unusable");
    if (torn) std::filesystem::resize_file(*path_, good_bytes);
  }

  std::optional<std::filesystem::path> path_;
  std::vector<ArticleRecord> completed_;
  std::ofstream out_;
};

// Bounded pool over the paragraphs of one article; results keep source order.
std::vector<FinalizedParagraph> process_article(const Article& article,
                                                const PipelineConfig& config,
                                                PipelineBackends& backends,
                                                const LanguageSpec& src, const LanguageSpec& tgt) {
  const std::size_t n = article.paragraphs.size();
  std::vector<FinalizedParagraph> results(n);
  if (n == 0) return results;

  const std::size_t workers =
      std::min<std::size_t>(std::max(config.workers, 1), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        results[i] = process_paragraph(article.paragraphs[i], config, backends, src, tgt);
      } catch (const std::exception& e) {
        throw BackendUnavailable("article '" + article.title + "' paragraph " +
                                 std::to_string(i) + ": " + e.what());
      }
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto work = [&] {
    std::size_t i;
    while (!failed.load(std::memory_order_relaxed) && (i = next.fetch_add(1)) < n) {
      try {
        results[i] = process_paragraph(article.paragraphs[i], config, backends, src, tgt);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error) {
          first_error = std::make_exception_ptr(
              BackendUnavailable("article '" + article.title + "' paragraph " +
                                 std::to_string(i) + ": " + e.what()));
        }
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace

TranslateOutcome translate_dataset(const SquadDataset& ds, const PipelineConfig& config,
                                   PipelineBackends& backends, const LanguageRegistry& registry,
                                   const std::optional<std::filesystem::path>& progress_path) {
  const LanguageSpec& src = registry.lookup(config.source_lang);
  const LanguageSpec& tgt = registry.lookup(config.target_lang);

  ProgressLog progress(progress_path, fnv64(serialize_dataset(ds)), config_fingerprint(config));

  TranslateOutcome out;
  out.dataset.version = ds.version;

  auto absorb = [&out](const ArticleRecord& rec) {
    out.dataset.articles.push_back(rec.article);
    out.report.input_qas += rec.input_qas;
    out.report.emitted_qas += rec.emitted;
    for (const auto& [reason, count] : rec.drops) out.report.dropped[reason] += count;
    out.report.article_seconds.emplace_back(rec.article.title, rec.seconds);
  };

  const std::size_t resumed = progress.completed().size();
  if (resumed > ds.articles.size()) {
    throw Error("progress file lists more articles than the input has");
  }
  for (const auto& rec : progress.completed()) absorb(rec);

  int fresh_this_run = 0;
  for (std::size_t ai = resumed; ai < ds.articles.size(); ++ai) {
    const Article& source = ds.articles[ai];
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<FinalizedParagraph> paragraphs =
        process_article(source, config, backends, src, tgt);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;

    ArticleRecord rec;
    rec.article.title = source.title;
    rec.seconds = dt.count();
    for (auto& fp : paragraphs) {
      rec.input_qas += fp.input_qas;
      rec.emitted += fp.paragraph.qas.size();
      for (const auto& [reason, count] : fp.drops) rec.drops[reason] += count;
      rec.article.paragraphs.push_back(std::move(fp.paragraph));
    }

    ++fresh_this_run;
    const bool flush = config.checkpoint_every <= 1 ||
                       fresh_this_run % config.checkpoint_every == 0 ||
                       ai + 1 == ds.articles.size();
    progress.append(ai, rec, flush);
    absorb(rec);

    if (config.abort_after_articles > 0 && fresh_this_run >= config.abort_after_articles) {
      progress.flush();
      std::_Exit(9);  // simulated kill: no destructors, nothing else flushed
    }
  }
  return out;
}

}  // namespace squadport
