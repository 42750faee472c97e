#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "absint/cli.hpp"

using namespace absint;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class TempFile {
public:
  TempFile(const std::string& name, const std::string& contents)
      : path_("absint_test_" + name) {
    std::ofstream f(path_);
    f << contents;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

}  // namespace

TEST_CASE("analyze prints the widened loop bound") {
  TempFile file("count.imp", "a := 0;\nloop {\n  assume a < 60;\n  a := a + 1\n}\n");
  const CliResult r = cli({"analyze", file.path(), "--width", "8"});
  CHECK(r.exit_code == 0);
  CHECK(r.out == "a ∈ [0, 64]\n");
}

TEST_CASE("analyze emits schema-conforming JSON") {
  TempFile file("json.imp", "a := 3; b := ?; assume b < a");
  const CliResult r = cli({"analyze", file.path(), "--width", "8", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc.contains("vars"));
  REQUIRE(doc.contains("stats"));
  REQUIRE(doc.contains("config"));
  CHECK(doc["config"]["width"] == 8);
  CHECK(doc["vars"]["a"]["low"] == 3);
  CHECK(doc["vars"]["a"]["up"] == 3);
  // b < 3 clips only the lower side: low renders as null (width minimum)
  CHECK(doc["vars"]["b"]["low"].is_null());
  CHECK(doc["vars"]["b"]["up"] == 2);
  CHECK(doc["stats"].contains("loop_widening_steps"));
  CHECK(doc["config"]["thresholds"].is_array());
}

TEST_CASE("analyze reports unreachable memories in JSON") {
  TempFile file("bot.imp", "assume 0; a := 1");
  const CliResult r = cli({"analyze", file.path(), "--width", "8", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out)["vars"]["a"] == "bot");
}

TEST_CASE("missing files and parse errors exit 2") {
  const CliResult missing = cli({"analyze", "no_such_file.imp"});
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("no_such_file.imp") != std::string::npos);

  TempFile file("bad.imp", "a := 200");
  const CliResult bad = cli({"analyze", file.path(), "--width", "8"});
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("200") != std::string::npos);
  CHECK(bad.out.empty());
}

TEST_CASE("custom thresholds change the widening target") {
  TempFile file("count.imp", "a := 0;\nloop { assume a < 60; a := a + 1 }\n");
  const CliResult r =
      cli({"analyze", file.path(), "--width", "8", "--thresholds", "100,-100"});
  CHECK(r.exit_code == 0);
  CHECK(r.out == "a ∈ [0, 100]\n");
}

TEST_CASE("check accepts a sound file and flags the budget") {
  TempFile fine("fine.imp", "a := 1; b := a + 1");
  CHECK(cli({"check", fine.path(), "--width", "4"}).exit_code == 0);

  TempFile big("big.imp", "a := b + c + d");
  const CliResult r = cli({"check", big.path(), "--width", "16"});
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("state budget") != std::string::npos);
}

TEST_CASE("check over generated programs emits one JSON verdict per line") {
  const CliResult r = cli({"check", "--gen", "--count", "5", "--seed", "7", "--width", "4"});
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json v = json::parse(line);
    CHECK(v["status"] == "sound");
    CHECK(v["index"] == count);
    ++count;
  }
  CHECK(count == 5);
}

TEST_CASE("gen output is deterministic and reparses") {
  const CliResult a = cli({"gen", "--count", "10", "--seed", "3", "--width", "4"});
  const CliResult b = cli({"gen", "--count", "10", "--seed", "3", "--width", "4"});
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  // split on separator lines and reparse each program
  std::istringstream in(a.out);
  std::string line, current;
  int programs = 0;
  auto flush = [&] {
    if (current.empty()) return;
    CHECK_NOTHROW(parse_program(current, Width(4)));
    ++programs;
    current.clear();
  };
  while (std::getline(in, line)) {
    if (line == "---")
      flush();
    else
      current += line + "\n";
  }
  flush();
  CHECK(programs == 10);

  const CliResult none = cli({"gen", "--count", "0"});
  CHECK(none.exit_code == 0);
  CHECK(none.out.empty());
}

TEST_CASE("run samples a concrete execution") {
  TempFile file("run.imp", "a := ?; assume a < 10");
  const CliResult r = cli({"run", file.path(), "--width", "8", "--seed", "5"});
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  if (doc["status"] == "ok") CHECK(doc["final"]["a"].get<int>() < 10);

  TempFile never("never.imp", "assume 0");
  const CliResult n = cli({"run", never.path(), "--width", "8"});
  CHECK(json::parse(n.out)["status"] == "no-witness");
}

TEST_CASE("ABSINT_WIDTH sets the default width") {
  TempFile file("envw.imp", "a := 100");
  setenv("ABSINT_WIDTH", "8", 1);
  const CliResult defaulted = cli({"analyze", file.path()});
  CHECK(defaulted.exit_code == 0);
  CHECK(defaulted.out == "a ∈ [100, 100]\n");

  // an explicit flag wins over the environment
  const CliResult flagged = cli({"analyze", file.path(), "--width", "64"});
  CHECK(flagged.out == "a ∈ [100, 100]\n");
  setenv("ABSINT_WIDTH", "4", 1);
  const CliResult narrow = cli({"analyze", file.path()});
  CHECK(narrow.exit_code == 2);  // 100 does not fit width 4
  unsetenv("ABSINT_WIDTH");
}

TEST_CASE("violations exit 1 and dump a witness") {
  // No public flag injects faults, so exercise the exit path through the
  // library and the JSON shape through verdict_to_json.
  Mutations mut;
  mut.assume_skips_negative_branch = true;
  CheckConfig cfg;
  cfg.mutations = mut;
  Program p = parse_program("a := -1; assume a", Width(4));
  const Verdict v = check_soundness(p, cfg);
  REQUIRE_FALSE(v.sound());
  const json doc = cli_detail::verdict_to_json(v, 0);
  CHECK(doc["status"] == "violation");
  CHECK(doc["witness"].contains("initial"));
  CHECK(doc["witness"].contains("final"));
  CHECK(doc["witness"]["variable"] == "a");
}
