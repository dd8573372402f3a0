#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "squadport/metrics.hpp"
#include "squadport/squad.hpp"
#include "support/corpus.hpp"

using namespace squadport;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_stdout.txt";
  const std::string err_path = "cli_stderr.txt";
  const std::string cmd =
      std::string(SQUADPORT_BIN) + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp_file(out_path);
  r.err = slurp_file(err_path);
  return r;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

struct TempPath {
  std::string path;
  explicit TempPath(std::string p) : path(std::move(p)) { std::remove(path.c_str()); }
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli validate exit codes") {
  TempPath good("cli_good.json");
  write_file(good.path,
             R"({"version":"v2.0","data":[{"title":"t","paragraphs":[{"context":"abc def",
                "qas":[{"id":"1","question":"q","is_impossible":false,
                "answers":[{"text":"def","answer_start":4}]}]}]}]})");
  auto r = run_cli("validate " + good.path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("0 violations") != std::string::npos);

  TempPath bad("cli_bad.json");
  write_file(bad.path,
             R"({"version":"v2.0","data":[{"title":"t","paragraphs":[{"context":"abc def",
                "qas":[{"id":"broken","question":"q","is_impossible":false,
                "answers":[{"text":"def","answer_start":3}]}]}]}]})");
  r = run_cli("validate " + bad.path);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("broken") != std::string::npos);
  CHECK(r.out.find("TextMismatch") != std::string::npos);

  TempPath malformed("cli_malformed.json");
  write_file(malformed.path, "{nope");
  r = run_cli("validate " + malformed.path);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("bad JSON") != std::string::npos);

  r = run_cli("validate does_not_exist.json");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli stats prints table and json") {
  TempPath input("cli_stats.json");
  write_file(input.path, serialize_dataset(testsupport::make_corpus({25, 9})));
  const auto r = run_cli("stats " + input.path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("qas          25") != std::string::npos);
  CHECK(r.out.find("\"num_qas\":25") != std::string::npos);

  TempPath empty("cli_empty.json");
  write_file(empty.path, R"({"version":"v","data":[]})");
  const auto e = run_cli("stats " + empty.path);
  CHECK(e.exit_code == 0);
  CHECK(e.out.find("\"num_qas\":0") != std::string::npos);
}

TEST_CASE("cli translate with identity backend emits everything") {
  TempPath input("cli_tr_in.json");
  TempPath output("cli_tr_out.json");
  TempPath report("cli_tr_report.json");
  write_file(input.path, serialize_dataset(testsupport::make_corpus({40, 11})));

  const auto r = run_cli("translate " + input.path + " -o " + output.path + " --target mr " +
                         "--backend identity --similarity exact --report " + report.path);
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("\"command\":\"translate\"") != std::string::npos);  // echoed config

  const SquadDataset out = parse_dataset(slurp_file(output.path));
  CHECK(validate(out).empty());
  const json rep = json::parse(slurp_file(report.path));
  CHECK(rep["input_qas"] == 40);
  CHECK(rep["emitted_qas"] == 40);
  CHECK(rep["dropped"].empty());
}

TEST_CASE("cli translate rejects invalid input and unknown target") {
  TempPath input("cli_tr_bad.json");
  TempPath output("cli_tr_bad_out.json");
  write_file(input.path,
             R"({"version":"v","data":[{"title":"t","paragraphs":[{"context":"abc",
                "qas":[{"id":"1","question":"q","is_impossible":false,
                "answers":[{"text":"zz","answer_start":0}]}]}]}]})");
  auto r = run_cli("translate " + input.path + " -o " + output.path + " --target mr");
  CHECK(r.exit_code == 2);

  TempPath ok("cli_tr_ok.json");
  write_file(ok.path, R"({"version":"v","data":[]})");
  r = run_cli("translate " + ok.path + " -o " + output.path + " --target zz");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("registry") != std::string::npos);
}

TEST_CASE("cli translate exits 3 on backend hard failure") {
  TempPath input("cli_backend_fail_in.json");
  TempPath output("cli_backend_fail_out.json");
  write_file(input.path, serialize_dataset(testsupport::make_corpus({5, 2})));
  const auto r = run_cli("translate " + input.path + " -o " + output.path +
                         " --target mr --backend http --endpoint http://127.0.0.1:9/t" +
                         " --max-retries 0 --timeout-ms 500");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("backend failure") != std::string::npos);
}

TEST_CASE("cli config file values are overridden by flags") {
  TempPath cfg("cli_cfg.json");
  write_file(cfg.path, R"({"target_lang":"ta","min_score":0.25,"backend":"identity"})");
  TempPath input("cli_cfg_in.json");
  TempPath output("cli_cfg_out.json");
  write_file(input.path, serialize_dataset(testsupport::make_corpus({10, 3})));

  const auto r = run_cli("translate " + input.path + " -o " + output.path + " --config " +
                         cfg.path + " --min-score 0.75 --similarity exact");
  CHECK(r.exit_code == 0);
  const auto echo_at = r.err.find("config: ");
  REQUIRE(echo_at != std::string::npos);
  const auto line_end = r.err.find('\n', echo_at);
  const json echoed = json::parse(r.err.substr(echo_at + 8, line_end - echo_at - 8));
  CHECK(echoed["target_lang"] == "ta");     // from config file
  CHECK(echoed["min_score"] == 0.75);       // flag wins
  CHECK(echoed["backend"] == "identity");
}

TEST_CASE("cli evaluate prints table and handles id mismatches") {
  TempPath ds_path("cli_eval_ds.json");
  write_file(ds_path.path,
             R"({"version":"v","data":[{"title":"t","paragraphs":[{"context":"alpha beta",
                "qas":[{"id":"q1","question":"?","is_impossible":false,
                "answers":[{"text":"alpha","answer_start":0}]},
                {"id":"q2","question":"?","is_impossible":true,"answers":[]}]}]}]})");
  TempPath preds("cli_eval_preds.json");
  write_file(preds.path, R"({"q1":"alpha","q2":""})");

  auto r = run_cli("evaluate " + ds_path.path + " " + preds.path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("100.00") != std::string::npos);
  CHECK(r.out.find("Has_ans") != std::string::npos);

  TempPath missing("cli_eval_missing.json");
  write_file(missing.path, R"({"q1":"alpha"})");
  r = run_cli("evaluate " + ds_path.path + " " + missing.path);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("q2") != std::string::npos);
}

TEST_CASE("cli inspect traces the alignment") {
  TempPath input("cli_inspect.json");
  write_file(input.path,
             R"({"version":"v","data":[{"title":"t","paragraphs":[{"context":"aa bb cc.",
                "qas":[{"id":"q1","question":"?","is_impossible":false,
                "answers":[{"text":"bb","answer_start":3}]}]}]}]})");

  auto r = run_cli("inspect " + input.path + " --qa q1 --backend identity");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("fast path") != std::string::npos);
  CHECK(r.out.find("context answer_start: 3") != std::string::npos);

  // the mock marks token starts, so a token-suffix answer is never verbatim
  // in the translated sentence; that forces the candidate path
  TempPath sub("cli_inspect_sub.json");
  write_file(sub.path,
             R"({"version":"v","data":[{"title":"t","paragraphs":[{"context":"aabbccdd eeff.",
                "qas":[{"id":"q1","question":"?","is_impossible":false,
                "answers":[{"text":"bbccdd","answer_start":2}]}]}]}]})");
  r = run_cli("inspect " + sub.path + " --qa q1 --backend mock");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("candidates") != std::string::npos);
  CHECK(r.out.find("aligned span") != std::string::npos);

  r = run_cli("inspect " + input.path + " --qa nope --backend identity");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("nope") != std::string::npos);
}

TEST_CASE("cli inspect shows NoAlignment for hopeless answers") {
  TempPath input("cli_inspect_drop.json");
  write_file(input.path,
             R"({"version":"v","data":[{"title":"t","paragraphs":[{"context":"aabb ccdd.",
                "qas":[{"id":"q1","question":"?","is_impossible":false,
                "answers":[{"text":"abb","answer_start":1}]}]}]}]})");
  // a token-suffix answer under the mock is not verbatim, and under exact
  // similarity no candidate equals it, so the best score stays at 0
  const auto r = run_cli("inspect " + input.path +
                         " --qa q1 --backend mock --similarity exact --min-score 0.5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("NoAlignment") != std::string::npos);
}

TEST_CASE("cli crash and resume produces byte-identical output") {
  TempPath input("cli_crash_in.json");
  TempPath out_full("cli_crash_full.json");
  TempPath out_resumed("cli_crash_resumed.json");
  TempPath progress("cli_crash_progress.jsonl");
  TempPath report("cli_crash_report.json");
  write_file(input.path, serialize_dataset(testsupport::make_corpus({60, 21})));

  const std::string common = " --target ta --backend mock --similarity trigram";
  auto r = run_cli("translate " + input.path + " -o " + out_full.path + common);
  REQUIRE(r.exit_code == 0);

  r = run_cli("translate " + input.path + " -o " + out_resumed.path + common + " --progress " +
              progress.path + " --abort-after-articles 3");
  CHECK(r.exit_code == 9);  // simulated kill
  CHECK(slurp_file(out_resumed.path).empty());

  r = run_cli("translate " + input.path + " -o " + out_resumed.path + common + " --progress " +
              progress.path + " --report " + report.path);
  CHECK(r.exit_code == 0);
  CHECK(slurp_file(out_resumed.path) == slurp_file(out_full.path));
  const json rep = json::parse(slurp_file(report.path));
  CHECK(rep["input_qas"] == 60);
  CHECK(rep["emitted_qas"].get<std::size_t>() + 0 == 60);
}
