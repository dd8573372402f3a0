#include "squadport/squad.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "squad_json.hpp"
#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

namespace squadport {

using nlohmann::json;

namespace {

const json& require_field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw MalformedInput(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw MalformedInput(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_string()) throw MalformedInput(path + "." + key, "expected a string");
  return v.get<std::string>();
}

bool require_bool(const json& obj, const char* key, const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_boolean()) throw MalformedInput(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_array()) throw MalformedInput(path + "." + key, "expected an array");
  return v;
}

Answer parse_answer(const json& j, const std::string& path) {
  Answer a;
  a.text = require_string(j, "text", path);
  const json& start = require_field(j, "answer_start", path);
  if (!start.is_number_integer()) {
    throw MalformedInput(path + ".answer_start", "expected an integer");
  }
  a.answer_start = start.get<std::int64_t>();
  return a;
}

std::vector<Answer> parse_answers(const json& arr, const std::string& path) {
  std::vector<Answer> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_answer(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json answer_to_json(const Answer& a) {
  return json{{"answer_start", a.answer_start}, {"text", a.text}};
}

json answers_to_json(const std::vector<Answer>& answers) {
  json arr = json::array();
  for (const auto& a : answers) arr.push_back(answer_to_json(a));
  return arr;
}

}  // namespace

namespace detail {

json article_to_json(const Article& article) {
  json jps = json::array();
  for (const auto& paragraph : article.paragraphs) {
    json jqas = json::array();
    for (const auto& qa : paragraph.qas) {
      json jq{{"answers", answers_to_json(qa.answers)},
              {"id", qa.id},
              {"is_impossible", qa.is_impossible},
              {"question", qa.question}};
      if (qa.plausible_answers) {
        jq["plausible_answers"] = answers_to_json(*qa.plausible_answers);
      }
      jqas.push_back(std::move(jq));
    }
    jps.push_back(json{{"context", paragraph.context}, {"qas", std::move(jqas)}});
  }
  return json{{"paragraphs", std::move(jps)}, {"title", article.title}};
}

Article article_from_json(const json& ja, const std::string& path) {
  Article article;
  article.title = require_string(ja, "title", path);
  const json& paragraphs = require_array(ja, "paragraphs", path);
  article.paragraphs.reserve(paragraphs.size());
  for (std::size_t pi = 0; pi < paragraphs.size(); ++pi) {
    const std::string ppath = path + ".paragraphs[" + std::to_string(pi) + "]";
    const json& jp = paragraphs[pi];
    Paragraph paragraph;
    paragraph.context = require_string(jp, "context", ppath);
    const json& qas = require_array(jp, "qas", ppath);
    paragraph.qas.reserve(qas.size());
    for (std::size_t qi = 0; qi < qas.size(); ++qi) {
      const std::string qpath = ppath + ".qas[" + std::to_string(qi) + "]";
      const json& jq = qas[qi];
      QA qa;
      qa.id = require_string(jq, "id", qpath);
      qa.question = require_string(jq, "question", qpath);
      qa.is_impossible = require_bool(jq, "is_impossible", qpath);
      qa.answers = parse_answers(require_array(jq, "answers", qpath), qpath + ".answers");
      if (auto it = jq.find("plausible_answers"); it != jq.end()) {
        if (!it->is_array()) {
          throw MalformedInput(qpath + ".plausible_answers", "expected an array");
        }
        qa.plausible_answers = parse_answers(*it, qpath + ".plausible_answers");
      }
      paragraph.qas.push_back(std::move(qa));
    }
    article.paragraphs.push_back(std::move(paragraph));
  }
  return article;
}

}  // namespace detail

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::OffsetOutOfRange: return "OffsetOutOfRange";
    case Violation::Kind::TextMismatch: return "TextMismatch";
    case Violation::Kind::ImpossibleWithAnswers: return "ImpossibleWithAnswers";
    case Violation::Kind::MissingAnswers: return "MissingAnswers";
    case Violation::Kind::DuplicateId: return "DuplicateId";
    case Violation::Kind::EmptyContext: return "EmptyContext";
  }
  return "?";
}

SquadDataset parse_dataset(std::string_view raw) {
  if (!uni::is_valid_utf8(raw)) throw EncodingError("input is not valid UTF-8");

  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw MalformedInput("", std::string("bad JSON: ") + e.what());
  }

  SquadDataset ds;
  ds.version = require_string(doc, "version", "$");
  const json& data = require_array(doc, "data", "$");

  ds.articles.reserve(data.size());
  for (std::size_t ai = 0; ai < data.size(); ++ai) {
    ds.articles.push_back(detail::article_from_json(data[ai], "data[" + std::to_string(ai) + "]"));
  }
  return ds;
}

std::string serialize_dataset(const SquadDataset& ds) {
  // nlohmann's default object backing is std::map, so keys come out in a
  // fixed alphabetical order; combined with compact dump() this makes the
  // serialization canonical and golden-file tests byte-exact.
  json data = json::array();
  for (const auto& article : ds.articles) data.push_back(detail::article_to_json(article));
  json doc{{"data", std::move(data)}, {"version", ds.version}};
  return doc.dump();
}

namespace {

void check_answer_offsets(const Answer& answer, const std::u32string& context,
                          const std::string& qa_id, bool plausible,
                          std::vector<Violation>& out) {
  const std::u32string text = uni::decode_utf8(answer.text);
  const auto clen = static_cast<std::int64_t>(context.size());
  const auto alen = static_cast<std::int64_t>(text.size());
  const char* label = plausible ? "plausible answer" : "answer";
  if (answer.answer_start < 0 || answer.answer_start + alen > clen) {
    out.push_back({Violation::Kind::OffsetOutOfRange, qa_id,
                   std::string(label) + " at " + std::to_string(answer.answer_start) +
                       " len " + std::to_string(alen) + " exceeds context of " +
                       std::to_string(clen) + " code points"});
    return;
  }
  if (context.compare(static_cast<std::size_t>(answer.answer_start), text.size(), text) != 0) {
    out.push_back({Violation::Kind::TextMismatch, qa_id,
                   std::string(label) + " text does not match context at offset " +
                       std::to_string(answer.answer_start)});
  }
}

}  // namespace

std::vector<Violation> validate(const SquadDataset& ds) {
  std::vector<Violation> out;
  std::unordered_set<std::string> seen_ids;

  for (const auto& article : ds.articles) {
    for (const auto& paragraph : article.paragraphs) {
      const std::u32string context = uni::decode_utf8(paragraph.context);
      bool has_answerable = false;
      for (const auto& qa : paragraph.qas) {
        if (!qa.is_impossible) has_answerable = true;
        if (!seen_ids.insert(qa.id).second) {
          out.push_back({Violation::Kind::DuplicateId, qa.id, "duplicate qa id"});
        }
        if (qa.is_impossible && !qa.answers.empty()) {
          out.push_back({Violation::Kind::ImpossibleWithAnswers, qa.id,
                         "is_impossible with " + std::to_string(qa.answers.size()) +
                             " answer(s)"});
        }
        if (!qa.is_impossible && qa.answers.empty()) {
          out.push_back({Violation::Kind::MissingAnswers, qa.id,
                         "answerable qa with no answers"});
        }
        for (const auto& answer : qa.answers) {
          check_answer_offsets(answer, context, qa.id, false, out);
        }
        if (qa.plausible_answers) {
          for (const auto& answer : *qa.plausible_answers) {
            check_answer_offsets(answer, context, qa.id, true, out);
          }
        }
      }
      if (has_answerable && paragraph.context.empty()) {
        out.push_back({Violation::Kind::EmptyContext, "",
                       "empty context with answerable qas in article '" + article.title + "'"});
      }
    }
  }
  return out;
}

DatasetStats stats(const SquadDataset& ds) {
  DatasetStats s;
  s.num_articles = ds.articles.size();
  for (const auto& article : ds.articles) {
    s.num_paragraphs += article.paragraphs.size();
    for (const auto& paragraph : article.paragraphs) {
      s.num_qas += paragraph.qas.size();
      for (const auto& qa : paragraph.qas) {
        if (qa.is_impossible) ++s.num_impossible;
      }
    }
  }
  if (s.num_qas > 0) {
    s.pct_impossible = static_cast<double>(s.num_impossible) / static_cast<double>(s.num_qas);
  }
  return s;
}

SquadDataset load_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

void save_dataset_file(const SquadDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << serialize_dataset(ds);
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace squadport
