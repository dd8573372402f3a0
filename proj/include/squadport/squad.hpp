#ifndef SQUADPORT_SQUAD_HPP
#define SQUADPORT_SQUAD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace squadport {

// SQuAD 2.0 object model. Text fields hold UTF-8; answer_start counts Unicode
// code points into the enclosing paragraph context (matching the Python string
// indices the format was produced with), never bytes.

struct Answer {
  std::string text;
  std::int64_t answer_start = 0;

  bool operator==(const Answer&) const = default;
};

struct QA {
  std::string id;
  std::string question;
  bool is_impossible = false;
  std::vector<Answer> answers;
  std::optional<std::vector<Answer>> plausible_answers;

  bool operator==(const QA&) const = default;
};

struct Paragraph {
  std::string context;
  std::vector<QA> qas;

  bool operator==(const Paragraph&) const = default;
};

struct Article {
  std::string title;
  std::vector<Paragraph> paragraphs;

  bool operator==(const Article&) const = default;
};

struct SquadDataset {
  std::string version;
  std::vector<Article> articles;

  bool operator==(const SquadDataset&) const = default;
};

struct DatasetStats {
  std::size_t num_articles = 0;
  std::size_t num_paragraphs = 0;
  std::size_t num_qas = 0;
  std::size_t num_impossible = 0;
  double pct_impossible = 0.0;  // num_impossible / num_qas, 0 when num_qas == 0
};

struct Violation {
  enum class Kind {
    OffsetOutOfRange,
    TextMismatch,
    ImpossibleWithAnswers,
    MissingAnswers,  // answerable QA with an empty answer list
    DuplicateId,
    EmptyContext,
  };
  Kind kind;
  std::string qa_id;  // empty for paragraph-level violations
  std::string detail;
};

std::string_view to_string(Violation::Kind kind);

/// Parses a SQuAD 2.0 JSON document. Unknown extra fields are ignored.
/// Throws EncodingError on invalid UTF-8, MalformedInput on bad JSON or a
/// missing/mistyped required field (with the document path).
SquadDataset parse_dataset(std::string_view raw);

/// Canonical serialization: stable key order, compact formatting, raw UTF-8.
/// parse_dataset(serialize_dataset(ds)) == ds for any dataset.
std::string serialize_dataset(const SquadDataset& ds);

/// One Violation per failed invariant; empty iff the dataset is clean.
/// Dirty corpora parse fine and get reported here instead.
std::vector<Violation> validate(const SquadDataset& ds);

DatasetStats stats(const SquadDataset& ds);

SquadDataset load_dataset_file(const std::string& path);
void save_dataset_file(const SquadDataset& ds, const std::string& path);

}  // namespace squadport

#endif  // SQUADPORT_SQUAD_HPP
