#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "noc/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "noc_cli_test";

int run(const std::string& args) {
  const std::string cmd = "NOC_OUTPUT_DIR=" + kDir.string() + " " NOC_CLI_PATH " " + args +
                          " > " + (kDir / "stdout.txt").string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string out(const std::string& name) { return (kDir / name).string(); }

}  // namespace

TEST_CASE("cli pipeline and exit codes") {
  fs::remove_all(kDir);
  fs::create_directories(kDir);

  CHECK(run("--seed 7 generate --cells 3 --users 12 --failed 4") == 0);
  const auto sc = noc::read_json_file(out("scenario.json"));
  CHECK(sc.at("config").at("seed") == 7);
  CHECK(sc.at("user").size() == 16);

  CHECK(run("solve --scenario " + out("scenario.json") + " --mode isolated --pa solver -o a.json") == 0);
  const auto a = noc::read_json_file(out("a.json"));
  CHECK(a.at("association").size() == 4);
  CHECK(a.at("metrics").at("violations").empty());

  CHECK(run("solve --scenario " + out("scenario.json") + " --optimal --budget-assoc 3 -o b.json") == 4);
  CHECK(run("solve --scenario " + out("scenario.json") + " --no-such-flag") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("solve --scenario " + out("missing.json")) == 2);

  CHECK(run("--seed 7 generate --cells 3 --users 12 --failed 4 --s-min 30 -o hard.json") == 0);
  CHECK(run("solve --scenario " + out("hard.json")) == 3);
  std::ifstream so(out("stdout.txt"));
  const std::string text((std::istreambuf_iterator<char>(so)), std::istreambuf_iterator<char>());
  CHECK(text.find("certificate") != std::string::npos);

  CHECK(run("--seed 3 dataset -n 40 -o d.jsonl") == 0);
  CHECK(run("--seed 3 dataset split --in " + out("d.jsonl") + " --ratios 0.5,0.25,0.25 --prefix d") == 0);
  CHECK(run("train --train " + out("d.train.jsonl") + " --val " + out("d.val.jsonl") +
            " --epochs 2 --hidden 16 -o m.bin") == 0);
  CHECK(run("solve --scenario " + out("scenario.json") + " --pa dnn --model " + out("m.bin") +
            " -o c.json") == 0);
  CHECK(run("eval --scenario " + out("scenario.json") + " --solutions " + out("a.json") + " " +
            out("c.json") + " -o e.json") == 0);
  const auto e = noc::read_json_file(out("e.json"));
  CHECK(e.at("solutions").size() == 2);
  CHECK(run("bench --sweep failed=2,3 --reps 1 --opt-sample 5 -o bench.json") == 0);
  CHECK(run("bench --sweep sizes=1") == 2);
}
