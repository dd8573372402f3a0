#include "squadport/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

namespace squadport {

using nlohmann::json;

std::string normalize_answer(std::string_view text, const NormalizeOptions& options) {
  const std::u32string cps = uni::decode_utf8(text);
  std::u32string cleaned;
  cleaned.reserve(cps.size());
  bool pending_space = false;
  for (char32_t c : cps) {
    if (uni::is_punct(c)) continue;
    if (uni::is_space(c)) {
      pending_space = !cleaned.empty();
      continue;
    }
    if (pending_space) {
      cleaned.push_back(U' ');
      pending_space = false;
    }
    cleaned.push_back(uni::fold_case(c));
  }

  if (options.remove_articles) {
    std::u32string kept;
    std::size_t i = 0;
    while (i < cleaned.size()) {
      std::size_t j = cleaned.find(U' ', i);
      if (j == std::u32string::npos) j = cleaned.size();
      const std::u32string_view token(cleaned.data() + i, j - i);
      if (token != U"a" && token != U"an" && token != U"the") {
        if (!kept.empty()) kept.push_back(U' ');
        kept.append(token);
      }
      i = j + 1;
    }
    cleaned = std::move(kept);
  }
  return uni::encode_utf8(cleaned);
}

namespace {

std::vector<std::string> tokens_of(std::string_view normalized) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::string s(normalized);
  while (i < s.size()) {
    std::size_t j = s.find(' ', i);
    if (j == std::string::npos) j = s.size();
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

std::unordered_map<std::string, int> counts_of(const std::vector<std::string>& tokens) {
  std::unordered_map<std::string, int> counts;
  for (const auto& t : tokens) ++counts[t];
  return counts;
}

double pair_f1(const std::vector<std::string>& pred_tokens,
               const std::vector<std::string>& gold_tokens) {
  if (pred_tokens.empty() || gold_tokens.empty()) {
    return pred_tokens == gold_tokens ? 1.0 : 0.0;
  }
  const auto gold_counts = counts_of(gold_tokens);
  auto remaining = gold_counts;
  int overlap = 0;
  for (const auto& t : pred_tokens) {
    if (auto it = remaining.find(t); it != remaining.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(pred_tokens.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(gold_tokens.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

int exact_match(std::string_view pred, const std::vector<std::string>& golds,
                const NormalizeOptions& options) {
  const std::string np = normalize_answer(pred, options);
  if (golds.empty()) return np.empty() ? 1 : 0;
  for (const auto& g : golds) {
    if (np == normalize_answer(g, options)) return 1;
  }
  return 0;
}

double f1(std::string_view pred, const std::vector<std::string>& golds,
          const NormalizeOptions& options) {
  const std::vector<std::string> pred_tokens = tokens_of(normalize_answer(pred, options));
  if (golds.empty()) return pred_tokens.empty() ? 1.0 : 0.0;
  double best = 0.0;
  for (const auto& g : golds) {
    best = std::max(best, pair_f1(pred_tokens, tokens_of(normalize_answer(g, options))));
  }
  return best;
}

double bleu(const std::vector<std::pair<std::string, std::string>>& pairs, int max_n,
            const NormalizeOptions& options) {
  if (pairs.empty()) throw EmptyCorpus("BLEU over zero pairs");

  std::size_t pred_len = 0, ref_len = 0;
  std::vector<std::size_t> matched(static_cast<std::size_t>(max_n), 0);
  std::vector<std::size_t> total(static_cast<std::size_t>(max_n), 0);

  auto ngram_counts = [](const std::vector<std::string>& tokens, int n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    if (static_cast<int>(tokens.size()) >= n) {
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        ++counts[{tokens.begin() + static_cast<std::ptrdiff_t>(i),
                  tokens.begin() + static_cast<std::ptrdiff_t>(i) + n}];
      }
    }
    return counts;
  };

  for (const auto& [pred, gold] : pairs) {
    const auto pred_tokens = tokens_of(normalize_answer(pred, options));
    const auto gold_tokens = tokens_of(normalize_answer(gold, options));
    pred_len += pred_tokens.size();
    ref_len += gold_tokens.size();
    for (int n = 1; n <= max_n; ++n) {
      const auto pc = ngram_counts(pred_tokens, n);
      const auto gc = ngram_counts(gold_tokens, n);
      for (const auto& [gram, count] : pc) {
        total[static_cast<std::size_t>(n - 1)] += count;
        if (auto it = gc.find(gram); it != gc.end()) {
          matched[static_cast<std::size_t>(n - 1)] += std::min(count, it->second);
        }
      }
    }
  }

  if (pred_len == 0) return 0.0;
  double log_precision = 0.0;
  int used_orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    const std::size_t m = matched[static_cast<std::size_t>(n - 1)];
    const std::size_t t = total[static_cast<std::size_t>(n - 1)];
    if (t == 0) break;  // corpus has no n-grams at this order; stop here
    if (m == 0) return 0.0;
    log_precision += std::log(static_cast<double>(m) / static_cast<double>(t));
    ++used_orders;
  }
  if (used_orders == 0) return 0.0;
  const double bp =
      std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) / static_cast<double>(pred_len)));
  return 100.0 * bp * std::exp(log_precision / used_orders);
}

EvalReport evaluate(const std::vector<Prediction>& predictions, const SquadDataset& ds,
                    const NormalizeOptions& options) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.qa_id] = &p;

  EvalReport report;
  double em_sum = 0, f1_sum = 0, em_has_sum = 0, f1_has_sum = 0, em_no_sum = 0, f1_no_sum = 0;
  std::vector<std::pair<std::string, std::string>> bleu_input;
  std::unordered_set<std::string> seen;

  for (const auto& article : ds.articles) {
    for (const auto& paragraph : article.paragraphs) {
      for (const auto& qa : paragraph.qas) {
        auto it = by_id.find(qa.id);
        if (it == by_id.end()) throw MissingPrediction(qa.id);
        seen.insert(qa.id);
        const std::string& pred = it->second->answer_text;

        std::vector<std::string> golds;
        for (const auto& a : qa.answers) golds.push_back(a.text);

        const int em_i = exact_match(pred, golds, options);
        const double f1_i = f1(pred, golds, options);
        ++report.total;
        em_sum += em_i;
        f1_sum += f1_i;
        if (qa.is_impossible) {
          ++report.no_answer;
          em_no_sum += em_i;
          f1_no_sum += f1_i;
        } else {
          ++report.has_answer;
          em_has_sum += em_i;
          f1_has_sum += f1_i;
          if (!normalize_answer(pred, options).empty() && !golds.empty()) {
            // pair with the best-F1 gold (first on ties)
            const std::string* best_gold = &golds.front();
            double best_f1 = -1.0;
            for (const auto& g : golds) {
              const double v = f1(pred, {g}, options);
              if (v > best_f1) {
                best_f1 = v;
                best_gold = &g;
              }
            }
            bleu_input.emplace_back(pred, *best_gold);
          }
        }
      }
    }
  }

  for (const auto& p : predictions) {
    if (seen.find(p.qa_id) == seen.end()) throw UnknownId(p.qa_id);
  }

  auto pct = [](double sum, std::size_t n) { return n == 0 ? 0.0 : 100.0 * sum / n; };
  report.em = pct(em_sum, report.total);
  report.f1 = pct(f1_sum, report.total);
  report.em_has = pct(em_has_sum, report.has_answer);
  report.f1_has = pct(f1_has_sum, report.has_answer);
  report.em_no = pct(em_no_sum, report.no_answer);
  report.f1_no = pct(f1_no_sum, report.no_answer);
  report.bleu_pairs = bleu_input.size();
  if (!bleu_input.empty()) {
    report.bleu1 = bleu(bleu_input, 1, options);
    report.bleu2 = bleu(bleu_input, 2, options);
  }
  return report;
}

std::vector<Prediction> parse_predictions(std::string_view raw) {
  if (!uni::is_valid_utf8(raw)) throw EncodingError("prediction file is not valid UTF-8");
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw MalformedInput("", std::string("bad JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedInput("$", "expected an object mapping qa_id to answer");
  std::vector<Prediction> out;
  out.reserve(doc.size());
  for (const auto& [id, value] : doc.items()) {
    if (!value.is_string()) throw MalformedInput("$." + id, "expected a string answer");
    out.push_back({id, value.get<std::string>()});
  }
  return out;
}

std::vector<Prediction> load_predictions_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_predictions(buf.str());
}

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json j{{"em", round2(r.em)},
         {"f1", round2(r.f1)},
         {"em_has_ans", round2(r.em_has)},
         {"f1_has_ans", round2(r.f1_has)},
         {"em_no_ans", round2(r.em_no)},
         {"f1_no_ans", round2(r.f1_no)},
         {"counts",
          {{"total", r.total}, {"has_answer", r.has_answer}, {"no_answer", r.no_answer},
           {"bleu_pairs", r.bleu_pairs}}}};
  j["bleu_unigram"] = r.bleu1 ? json(round2(*r.bleu1)) : json(nullptr);
  j["bleu_bigram"] = r.bleu2 ? json(round2(*r.bleu2)) : json(nullptr);
  return j.dump();
}

std::string report_table(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  const int w = 12;
  os << std::setw(8) << "EM%" << std::setw(8) << "F1%" << std::setw(w) << "EM" << std::setw(w)
     << "F1" << std::setw(w) << "EM" << std::setw(w) << "F1" << std::setw(w) << "BLEU%"
     << std::setw(w) << "BLEU%" << '\n';
  os << std::setw(8) << "" << std::setw(8) << "" << std::setw(w) << "(Has_ans)" << std::setw(w)
     << "(Has_ans)" << std::setw(w) << "(No_ans)" << std::setw(w) << "(No_ans)" << std::setw(w)
     << "(Unigram)" << std::setw(w) << "(Bigram)" << '\n';
  os << std::setw(8) << round2(r.em) << std::setw(8) << round2(r.f1) << std::setw(w)
     << round2(r.em_has) << std::setw(w) << round2(r.f1_has) << std::setw(w) << round2(r.em_no)
     << std::setw(w) << round2(r.f1_no);
  if (r.bleu1) {
    os << std::setw(w) << round2(*r.bleu1);
  } else {
    os << std::setw(w) << "-";
  }
  if (r.bleu2) {
    os << std::setw(w) << round2(*r.bleu2);
  } else {
    os << std::setw(w) << "-";
  }
  os << '\n';
  os << "qas: " << r.total << " (" << r.has_answer << " has-answer, " << r.no_answer
     << " no-answer, " << r.bleu_pairs << " bleu pairs)";
  return os.str();
}

}  // namespace squadport
