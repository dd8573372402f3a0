// squadport — translate SQuAD 2.0 datasets into low-resource languages while
// recovering exact answer-span offsets, plus the evaluation metrics for the
// resulting datasets.
//
// Exit codes (stable contract for scripting):
//   0 success, 1 domain failure (violations, eval id mismatch, no alignment),
//   2 input/file errors, 3 backend errors.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "squadport/align.hpp"
#include "squadport/backends.hpp"
#include "squadport/errors.hpp"
#include "squadport/languages.hpp"
#include "squadport/metrics.hpp"
#include "squadport/pipeline.hpp"
#include "squadport/segmenter.hpp"
#include "squadport/similarity.hpp"
#include "squadport/squad.hpp"
#include "squadport/unicode.hpp"

namespace {

using nlohmann::json;
using namespace squadport;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;

struct Options {
  // paths
  std::string input;
  std::string output;
  std::string predictions;
  std::string report_path;
  std::string progress_path;
  std::string config_path;
  std::string languages_path;
  std::string abbrev_path;

  // pipeline
  std::string source_lang = "en";
  std::string target_lang = "mr";
  double min_score = 0.5;
  double tolerance = 0.01;
  std::string tolerance_mode = "relative";
  std::size_t max_tokens = 40;
  int workers = 1;
  int checkpoint_every = 1;
  bool drop_impossible = false;
  bool translate_plausible = false;
  int abort_after_articles = 0;

  // backends
  std::string backend = "identity";
  std::string endpoint;
  std::string cache_path;
  std::string translit = "none";
  std::string translit_endpoint;
  std::string translit_cache;
  std::string similarity = "trigram";
  int max_retries = 3;
  long backoff_ms = 250;
  double rate_limit = 0.0;
  std::size_t batch_size = 16;
  long timeout_ms = 10000;

  // metrics / inspect
  bool remove_articles = false;
  bool json_output = false;
  std::string qa_id;
  std::size_t top_k = 10;
};

// Config file: one JSON object whose keys mirror the option names below.
// Command-line flags override file values.
void apply_config_file(Options& o, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw MalformedInput(path, std::string("bad JSON: ") + e.what());
  }
  auto get = [&doc](const char* key, auto& field) {
    if (doc.contains(key)) field = doc[key].get<std::decay_t<decltype(field)>>();
  };
  get("source_lang", o.source_lang);
  get("target_lang", o.target_lang);
  get("min_score", o.min_score);
  get("tolerance", o.tolerance);
  get("tolerance_mode", o.tolerance_mode);
  get("max_tokens", o.max_tokens);
  get("workers", o.workers);
  get("checkpoint_every", o.checkpoint_every);
  get("drop_impossible", o.drop_impossible);
  get("translate_plausible", o.translate_plausible);
  get("backend", o.backend);
  get("endpoint", o.endpoint);
  get("cache_path", o.cache_path);
  get("translit", o.translit);
  get("translit_endpoint", o.translit_endpoint);
  get("translit_cache", o.translit_cache);
  get("similarity", o.similarity);
  get("max_retries", o.max_retries);
  get("backoff_ms", o.backoff_ms);
  get("rate_limit", o.rate_limit);
  get("batch_size", o.batch_size);
  get("timeout_ms", o.timeout_ms);
  get("languages", o.languages_path);
  get("abbreviations", o.abbrev_path);
  get("remove_articles", o.remove_articles);
}

json resolved_config(const Options& o, const std::string& command) {
  return json{{"command", command},
              {"input", o.input},
              {"output", o.output},
              {"source_lang", o.source_lang},
              {"target_lang", o.target_lang},
              {"min_score", o.min_score},
              {"tolerance", o.tolerance},
              {"tolerance_mode", o.tolerance_mode},
              {"max_tokens", o.max_tokens},
              {"workers", o.workers},
              {"checkpoint_every", o.checkpoint_every},
              {"drop_impossible", o.drop_impossible},
              {"translate_plausible", o.translate_plausible},
              {"backend", o.backend},
              {"endpoint", o.endpoint},
              {"cache_path", o.cache_path},
              {"translit", o.translit},
              {"translit_endpoint", o.translit_endpoint},
              {"translit_cache", o.translit_cache},
              {"similarity", o.similarity},
              {"max_retries", o.max_retries},
              {"backoff_ms", o.backoff_ms},
              {"rate_limit", o.rate_limit},
              {"batch_size", o.batch_size},
              {"timeout_ms", o.timeout_ms},
              {"languages", o.languages_path},
              {"abbreviations", o.abbrev_path},
              {"remove_articles", o.remove_articles}};
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig cfg;
  cfg.source_lang = o.source_lang;
  cfg.target_lang = o.target_lang;
  cfg.align.min_score = o.min_score;
  cfg.align.tolerance = o.tolerance;
  cfg.align.tolerance_mode =
      o.tolerance_mode == "absolute" ? ToleranceMode::Absolute : ToleranceMode::Relative;
  cfg.align.max_tokens = o.max_tokens;
  cfg.workers = o.workers;
  cfg.checkpoint_every = o.checkpoint_every;
  cfg.drop_impossible = o.drop_impossible;
  cfg.translate_plausible = o.translate_plausible;
  cfg.abort_after_articles = o.abort_after_articles;
  if (!o.abbrev_path.empty()) cfg.segmenter.abbreviations = load_abbreviations(o.abbrev_path);
  return cfg;
}

BackendConfig backend_config(const Options& o) {
  BackendConfig cfg;
  cfg.endpoint = o.endpoint;
  cfg.cache_path = o.cache_path;
  cfg.max_retries = o.max_retries;
  cfg.backoff_base = std::chrono::milliseconds(o.backoff_ms);
  cfg.rate_limit = o.rate_limit;
  cfg.batch_size = o.batch_size;
  cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
  return cfg;
}

struct BackendSet {
  std::unique_ptr<TranslationBackend> translator;
  std::unique_ptr<SimilarityBackend> similarity;
  std::unique_ptr<TransliterationBackend> transliterator;  // may stay null

  PipelineBackends view() {
    return PipelineBackends{*translator, *similarity, transliterator.get()};
  }
};

BackendSet make_backends(const Options& o) {
  BackendSet set;
  set.translator = make_translator(o.backend, backend_config(o));
  set.similarity = make_similarity(o.similarity);
  if (o.translit == "identity") {
    set.transliterator = std::make_unique<IdentityTransliterator>();
  } else if (o.translit == "http") {
    BackendConfig cfg = backend_config(o);
    cfg.endpoint = o.translit_endpoint;
    cfg.cache_path = o.translit_cache;
    set.transliterator = std::make_unique<HttpTransliterator>(cfg);
  } else if (o.translit != "none") {
    throw Error("unknown transliteration backend '" + o.translit + "'");
  }
  return set;
}

LanguageRegistry make_registry(const Options& o) {
  LanguageRegistry registry = LanguageRegistry::builtin();
  if (!o.languages_path.empty()) registry.load_file(o.languages_path);
  return registry;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o) {
  SquadDataset ds;
  try {
    ds = load_dataset_file(o.input);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  const auto violations = validate(ds);
  for (const auto& v : violations) {
    std::cout << to_string(v.kind) << " [" << v.qa_id << "] " << v.detail << '\n';
  }
  std::cout << violations.size() << " violations\n";
  return violations.empty() ? kExitOk : kExitDomain;
}

int cmd_stats(const Options& o) {
  SquadDataset ds;
  try {
    ds = load_dataset_file(o.input);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  const DatasetStats s = stats(ds);
  std::cout << "articles     " << s.num_articles << '\n'
            << "paragraphs   " << s.num_paragraphs << '\n'
            << "qas          " << s.num_qas << '\n'
            << "impossible   " << s.num_impossible << '\n'
            << "pct_impossible " << s.pct_impossible << '\n';
  std::cout << json{{"num_articles", s.num_articles},
                    {"num_paragraphs", s.num_paragraphs},
                    {"num_qas", s.num_qas},
                    {"num_impossible", s.num_impossible},
                    {"pct_impossible", s.pct_impossible}}
                   .dump()
            << '\n';
  return kExitOk;
}

int cmd_translate(const Options& o) {
  SquadDataset ds;
  try {
    ds = load_dataset_file(o.input);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  if (const auto violations = validate(ds); !violations.empty()) {
    std::cerr << "error: input fails validation with " << violations.size()
              << " violation(s); run `squadport validate` for details\n";
    return kExitInput;
  }

  try {
    LanguageRegistry registry = make_registry(o);
    BackendSet backends = make_backends(o);
    PipelineBackends view = backends.view();
    std::optional<std::filesystem::path> progress;
    if (!o.progress_path.empty()) progress = o.progress_path;

    TranslateOutcome outcome =
        translate_dataset(ds, pipeline_config(o), view, registry, progress);

    save_dataset_file(outcome.dataset, o.output);
    std::cerr << outcome.report.summary() << '\n';
    if (!o.report_path.empty()) {
      std::ofstream rep(o.report_path, std::ios::binary | std::ios::trunc);
      if (!rep) throw Error("cannot write report '" + o.report_path + "'");
      rep << outcome.report.to_json() << '\n';
    }
    return kExitOk;
  } catch (const BackendUnavailable& e) {
    std::cerr << "backend failure: " << e.what() << '\n';
    return kExitBackend;
  } catch (const RateLimited& e) {
    std::cerr << "backend failure: " << e.what() << '\n';
    return kExitBackend;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

int cmd_evaluate(const Options& o) {
  SquadDataset ds;
  std::vector<Prediction> preds;
  try {
    ds = load_dataset_file(o.input);
    preds = load_predictions_file(o.predictions);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    NormalizeOptions norm;
    norm.remove_articles = o.remove_articles;
    const EvalReport report = evaluate(preds, ds, norm);
    std::cout << report_table(report) << '\n';
    if (!o.report_path.empty()) {
      std::ofstream rep(o.report_path, std::ios::binary | std::ios::trunc);
      if (!rep) {
        std::cerr << "error: cannot write report '" << o.report_path << "'\n";
        return kExitInput;
      }
      rep << report_to_json(report) << '\n';
    } else {
      std::cout << report_to_json(report) << '\n';
    }
    return kExitOk;
  } catch (const MissingPrediction& e) {
    std::cerr << "missing prediction: " << e.qa_id() << '\n';
    return kExitDomain;
  } catch (const UnknownId& e) {
    std::cerr << "unknown id: " << e.qa_id() << '\n';
    return kExitDomain;
  }
}

int cmd_inspect(const Options& o) {
  SquadDataset ds;
  try {
    ds = load_dataset_file(o.input);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  const Paragraph* paragraph = nullptr;
  const QA* qa = nullptr;
  for (const auto& article : ds.articles) {
    for (const auto& p : article.paragraphs) {
      for (const auto& q : p.qas) {
        if (q.id == o.qa_id) {
          paragraph = &p;
          qa = &q;
        }
      }
    }
  }
  if (qa == nullptr) {
    std::cerr << "unknown qa id '" << o.qa_id << "'\n";
    return kExitDomain;
  }

  try {
    LanguageRegistry registry = make_registry(o);
    const LanguageSpec& src = registry.lookup(o.source_lang);
    const LanguageSpec& tgt = registry.lookup(o.target_lang);
    BackendSet backends = make_backends(o);
    PipelineBackends view = backends.view();
    const PipelineConfig cfg = pipeline_config(o);

    std::cout << "qa: " << qa->id << "\nquestion: " << qa->question << '\n';
    if (qa->is_impossible) {
      std::cout << "is_impossible: true (nothing to align)\n";
      return kExitOk;
    }

    const ParagraphState state = translate_paragraph(*paragraph, cfg, view, src, tgt);
    for (const auto& answer : qa->answers) {
      std::cout << "answer: \"" << answer.text << "\" @ " << answer.answer_start << '\n';
      const SentenceRange range =
          find_answer_sentence(state.source_spans, static_cast<std::size_t>(answer.answer_start),
                               uni::cp_length(answer.text));
      std::u32string merged;
      for (std::size_t i = range.first; i <= range.last; ++i) {
        if (i > range.first) merged.push_back(U' ');
        merged += state.translated[i];
      }
      std::cout << "source sentence(s) [" << range.first << ".." << range.last << "]: "
                << uni::encode_utf8(state.source_spans[range.first].text);
      for (std::size_t i = range.first + 1; i <= range.last; ++i) {
        std::cout << ' ' << uni::encode_utf8(state.source_spans[i].text);
      }
      std::cout << "\ntranslated sentence: " << uni::encode_utf8(merged) << '\n';

      const std::string translated_answer = view.translator.translate(answer.text, src, tgt);
      std::cout << "translated answer: " << translated_answer << '\n';

      AlignmentTrace trace;
      const auto result = align_answer(merged, uni::decode_utf8(translated_answer),
                                       view.similarity, cfg.align, &trace);
      if (trace.fast_path) {
        std::cout << "fast path: verbatim occurrence\n";
      } else {
        auto ranked = trace.candidates;
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const AlignmentCandidate& a, const AlignmentCandidate& b) {
                           return a.score > b.score;
                         });
        if (ranked.size() > o.top_k) ranked.resize(o.top_k);
        std::cout << "candidates (top " << ranked.size() << " of " << trace.candidates.size()
                  << "): first_token last_token score\n";
        for (const auto& c : ranked) {
          std::cout << "  " << c.first_token << ' ' << c.last_token << ' ' << c.score << "  \""
                    << uni::encode_utf8(c.text) << "\"\n";
        }
        for (const auto& step : trace.extensions) {
          std::cout << "extend " << step.side << " -> [" << step.first_token << ","
                    << step.last_token << "] score " << step.score << (step.accepted ? " >= " : " < ")
                    << step.threshold << (step.accepted ? " accepted" : " rejected") << '\n';
        }
      }
      if (result) {
        std::cout << "aligned span: \"" << uni::encode_utf8(result->span_text) << "\" ["
                  << result->char_start << "," << result->char_end << ") score " << result->score
                  << (result->exact_match ? " exact" : "") << (result->extended ? " extended" : "")
                  << '\n';
        const auto [ctx_start, ctx] = locate_in_context(
            state.translated, range.first, result->char_start);
        std::cout << "context answer_start: " << ctx_start << '\n';
      } else {
        double best = 0.0;
        for (const auto& c : trace.candidates) best = std::max(best, c.score);
        std::cout << "NoAlignment (best score " << best << " < min_score " << cfg.align.min_score
                  << ")\n";
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBackend;
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;

  // Pre-scan for --config so file values become defaults that flags override.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string_view(argv[i]) == "--config") {
      try {
        apply_config_file(o, argv[i + 1]);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
      }
    }
  }

  CLI::App app{"SQuAD 2.0 translation with answer-span recovery"};
  app.require_subcommand(1);

  auto add_backend_opts = [&o](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "JSON config file (flags override it)");
    cmd->add_option("--source", o.source_lang, "source language code");
    cmd->add_option("--target", o.target_lang, "target language code");
    cmd->add_option("--backend", o.backend, "translation backend: identity|mock|http");
    cmd->add_option("--endpoint", o.endpoint, "translation service URL");
    cmd->add_option("--cache", o.cache_path, "translation cache file");
    cmd->add_option("--translit", o.translit, "transliteration backend: none|identity|http");
    cmd->add_option("--translit-endpoint", o.translit_endpoint);
    cmd->add_option("--translit-cache", o.translit_cache);
    cmd->add_option("--similarity", o.similarity, "similarity backend: trigram|exact");
    cmd->add_option("--min-score", o.min_score, "alignment drop threshold");
    cmd->add_option("--tolerance", o.tolerance, "extension tolerance");
    cmd->add_option("--tolerance-mode", o.tolerance_mode, "relative|absolute");
    cmd->add_option("--max-tokens", o.max_tokens, "candidate span token bound");
    cmd->add_option("--max-retries", o.max_retries);
    cmd->add_option("--backoff-ms", o.backoff_ms);
    cmd->add_option("--rate-limit", o.rate_limit, "requests per second (0 = unlimited)");
    cmd->add_option("--batch-size", o.batch_size);
    cmd->add_option("--timeout-ms", o.timeout_ms);
    cmd->add_option("--languages", o.languages_path, "extra language registry JSON");
    cmd->add_option("--abbrev", o.abbrev_path, "abbreviation list, one per line");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check dataset invariants");
  validate_cmd->add_option("input", o.input)->required();

  CLI::App* stats_cmd = app.add_subcommand("stats", "dataset statistics");
  stats_cmd->add_option("input", o.input)->required();

  CLI::App* translate_cmd = app.add_subcommand("translate", "translate a dataset");
  translate_cmd->add_option("input", o.input)->required();
  translate_cmd->add_option("-o,--output", o.output)->required();
  translate_cmd->add_option("--report", o.report_path, "machine-readable run report");
  translate_cmd->add_option("--progress", o.progress_path, "checkpoint/progress file");
  translate_cmd->add_option("--workers", o.workers, "paragraph worker pool size");
  translate_cmd->add_option("--checkpoint-every", o.checkpoint_every, "flush period in articles");
  translate_cmd->add_flag("--drop-impossible", o.drop_impossible);
  translate_cmd->add_flag("--translate-plausible", o.translate_plausible);
  translate_cmd
      ->add_option("--abort-after-articles", o.abort_after_articles,
                   "crash-recovery testing: hard-exit after N checkpointed articles")
      ->group("");  // hidden from --help
  add_backend_opts(translate_cmd);

  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "score predictions");
  evaluate_cmd->add_option("dataset", o.input)->required();
  evaluate_cmd->add_option("predictions", o.predictions)->required();
  evaluate_cmd->add_option("--report", o.report_path, "write JSON report here");
  evaluate_cmd->add_flag("--remove-articles", o.remove_articles,
                         "strip English articles during normalization");
  evaluate_cmd->add_option("--config", o.config_path, "JSON config file");

  CLI::App* inspect_cmd = app.add_subcommand("inspect", "alignment trace for one QA");
  inspect_cmd->add_option("input", o.input)->required();
  inspect_cmd->add_option("--qa", o.qa_id, "qa id")->required();
  inspect_cmd->add_option("--top", o.top_k, "candidates to print");
  add_backend_opts(inspect_cmd);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  std::cerr << "config: " << resolved_config(o, command).dump() << '\n';

  try {
    if (validate_cmd->parsed()) return cmd_validate(o);
    if (stats_cmd->parsed()) return cmd_stats(o);
    if (translate_cmd->parsed()) return cmd_translate(o);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o);
    if (inspect_cmd->parsed()) return cmd_inspect(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
