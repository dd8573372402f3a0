#ifndef SQUADPORT_METRICS_HPP
#define SQUADPORT_METRICS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "squadport/squad.hpp"

namespace squadport {

struct Prediction {
  std::string qa_id;
  std::string answer_text;  // empty = predicted no-answer
};

struct NormalizeOptions {
  /// English article stripping (a/an/the); off by default because it does not
  /// apply to Indic targets. Enable for parity with the original English
  /// evaluation convention.
  bool remove_articles = false;
};

struct EvalReport {
  // percents in [0,100]; split values refer to has-answer / no-answer QAs
  double em = 0, f1 = 0;
  double em_has = 0, f1_has = 0;
  double em_no = 0, f1_no = 0;
  std::optional<double> bleu1, bleu2;  // absent when no eligible pairs
  std::size_t total = 0, has_answer = 0, no_answer = 0;
  std::size_t bleu_pairs = 0;
};

/// Casefold (ASCII), strip punctuation, collapse whitespace, trim; optional
/// article removal. Idempotent.
std::string normalize_answer(std::string_view text, const NormalizeOptions& options = {});

/// 1 iff the normalized prediction equals some normalized gold; with no golds
/// (no-answer QA), 1 iff the prediction is empty.
int exact_match(std::string_view pred, const std::vector<std::string>& golds,
                const NormalizeOptions& options = {});

/// Max over golds of the harmonic mean of token-multiset precision/recall on
/// normalized, whitespace-tokenized strings. No-answer case mirrors
/// exact_match.
double f1(std::string_view pred, const std::vector<std::string>& golds,
          const NormalizeOptions& options = {});

/// Corpus-level BLEU (percent): clipped modified n-gram precision, geometric
/// mean over orders 1..max_n, times brevity penalty
/// exp(min(0, 1 - ref_len/pred_len)). Throws EmptyCorpus on zero pairs.
double bleu(const std::vector<std::pair<std::string, std::string>>& pairs, int max_n,
            const NormalizeOptions& options = {});

/// Requires exactly one prediction per QA: throws MissingPrediction for a QA
/// without one and UnknownId for a prediction without a QA. BLEU runs over
/// the has-answer subset with non-empty predictions, each paired to its
/// best-F1 gold.
EvalReport evaluate(const std::vector<Prediction>& predictions, const SquadDataset& ds,
                    const NormalizeOptions& options = {});

/// Prediction file: one JSON object mapping qa_id to answer string.
std::vector<Prediction> parse_predictions(std::string_view raw);
std::vector<Prediction> load_predictions_file(const std::string& path);

/// Values rounded to 2 decimals in both renderings.
std::string report_to_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

}  // namespace squadport

#endif  // SQUADPORT_METRICS_HPP
