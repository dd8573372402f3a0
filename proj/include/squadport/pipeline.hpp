#ifndef SQUADPORT_PIPELINE_HPP
#define SQUADPORT_PIPELINE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "squadport/align.hpp"
#include "squadport/backends.hpp"
#include "squadport/segmenter.hpp"
#include "squadport/similarity.hpp"
#include "squadport/squad.hpp"

namespace squadport {

struct PipelineConfig {
  std::string source_lang = "en";
  std::string target_lang;
  AlignConfig align;
  int workers = 1;            // paragraph-level worker pool size
  int checkpoint_every = 1;   // progress-file flush period, in articles
  bool drop_impossible = false;
  bool translate_plausible = false;
  SegmenterOptions segmenter;
  /// Crash-injection hook for recovery testing: hard-exits the process right
  /// after this many articles have been checkpointed. 0 disables.
  int abort_after_articles = 0;
};

enum class DropReason {
  NoAlignment,
  EmptyTranslation,
  BackendFailure,
  AnswerOutsideContext,
  ImpossibleFiltered,  // drop_impossible config, not an error
};

std::string_view to_string(DropReason reason);

struct PipelineReport {
  std::size_t input_qas = 0;
  std::size_t emitted_qas = 0;
  std::map<DropReason, std::size_t> dropped;
  std::vector<std::pair<std::string, double>> article_seconds;

  std::size_t total_dropped() const;
  std::string to_json() const;
  std::string summary() const;
};

struct PipelineBackends {
  TranslationBackend& translator;
  const SimilarityBackend& similarity;
  TransliterationBackend* transliterator = nullptr;  // null = not configured
};

/// Per-paragraph translation state, computed once and shared by every QA of
/// the paragraph: the source segmentation and one translation per sentence.
struct ParagraphState {
  std::vector<SentenceSpan> source_spans;
  std::vector<std::u32string> translated;
};

/// Segments the context and translates every sentence in one batch.
/// Backend errors propagate to the caller (which attaches paragraph identity).
ParagraphState translate_paragraph(const Paragraph& paragraph, const PipelineConfig& config,
                                   PipelineBackends& backends, const LanguageSpec& src,
                                   const LanguageSpec& tgt);

/// Translates one QA against a paragraph's state: question translation;
/// impossible QAs pass through with empty answers; answerable answers go
/// through sentence lookup, answer translation, span alignment, the digit /
/// transliteration pass, and offset recovery. A QA drops only when every one
/// of its answers drops.
std::variant<QA, DropReason> translate_qa(const QA& qa, const ParagraphState& state,
                                          const PipelineConfig& config,
                                          PipelineBackends& backends, const LanguageSpec& src,
                                          const LanguageSpec& tgt);

struct TranslateOutcome {
  SquadDataset dataset;
  PipelineReport report;
};

/// Full-dataset run: per-article checkpointing to the progress file (resume
/// picks up after the last complete record and reproduces identical output),
/// paragraph-level parallelism with order-restoring assembly, and drop
/// accounting satisfying emitted + dropped == input.
TranslateOutcome translate_dataset(
    const SquadDataset& ds, const PipelineConfig& config, PipelineBackends& backends,
    const LanguageRegistry& registry,
    const std::optional<std::filesystem::path>& progress_path = std::nullopt);

}  // namespace squadport

#endif  // SQUADPORT_PIPELINE_HPP
