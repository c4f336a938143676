// Copyright 2026 The aoscnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = AOS_TEST_DATA_DIR;
const std::string kCli = AOS_CLI_PATH;

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout; stderr is discarded.
Run cli(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("aos_cli_" + std::to_string(getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

const char* kSmall = "--k 5 --m-aspect 4 --m-sentiment 3 --batch 10 --epochs 2";

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(cli("").code == 1);
  CHECK(cli("frobnicate").code == 1);
  CHECK(cli("train --corpus " + q(kData / "fixture50.jsonl")).code == 1);
  CHECK(cli("train --corpus " + q(kData / "fixture50.jsonl") + " --arch cnn --out /tmp/x").code == 1);
  CHECK(cli("train --corpus " + q(kData / "fixture50.jsonl") + " --arch ccnn --lr -1 --out /tmp/x").code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("missing input files exit with 1") {
  CHECK(cli("stats --corpus /nonexistent/corpus.jsonl").code == 1);
  CHECK(cli("summarize --model /nonexistent/m.bin --reviews /nonexistent/r.jsonl --out-json /tmp/x").code == 1);
}

TEST_CASE("invalid data exits with 2") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.jsonl";
  std::ofstream(bad) << "{\"schema\":[\"battery\"]}\n"
                     << R"({"review_id":"r","ordinal":0,"text":"x","aspects":["camera"],"sentiment":"pos"})" << '\n';
  CHECK(cli("stats --corpus " + q(bad)).code == 2);
  const fs::path headless = tmp.path / "headless.jsonl";
  std::ofstream(headless) << R"({"review_id":"r","ordinal":0,"text":"x","aspects":[],"sentiment":null})" << '\n';
  CHECK(cli("stats --corpus " + q(headless)).code == 2);
}

TEST_CASE("stats prints the aspect table") {
  Run r = cli("stats --corpus " + q(kData / "corpus3.jsonl"));
  CHECK(r.code == 0);
  CHECK(r.out == "Aspects\t#Sentences\nbattery\t2\nscreen\t1\nothers\t1\nall\t3\n");
}

TEST_CASE("gradcheck passes and reports its worst error") {
  Run r = cli("gradcheck --seed 3 --count 10");
  CHECK(r.code == 0);
  CHECK(r.out.find("networks 10") != std::string::npos);
  // An impossible tolerance is a numerical failure.
  CHECK(cli("gradcheck --seed 3 --count 5 --tol 0").code == 3);
}

TEST_CASE("train, then summarize raw reviews") {
  TempDir tmp;
  const fs::path model = tmp.path / "model.bin";
  const fs::path reviews = tmp.path / "reviews.jsonl";
  std::ofstream(reviews) << R"({"review_id":"a","text":"The battery drains fast. The screen is <bright> & sharp!"})"
                         << '\n'
                         << R"({"review_id":"b","text":"Camera photos look great."})" << '\n';

  for (const char* arch : {"ccnn", "mcnn", "svm"}) {
    CAPTURE(arch);
    REQUIRE(cli(std::string("train --corpus ") + q(kData / "fixture50.jsonl") + " --arch " + arch + " " + kSmall +
                " --out " + q(model))
                .code == 0);
    const fs::path js = tmp.path / "s.json", html = tmp.path / "s.html";
    REQUIRE(cli("summarize --model " + q(model) + " --reviews " + q(reviews) + " --out-json " + q(js) +
                " --out-html " + q(html) + " --threads 2")
                .code == 0);
    auto doc = json::parse(read_all(js));
    CHECK(doc["totals"]["processed"] == 3);
    CHECK(doc["aspects"].size() == 5);
    CHECK(doc["aspects"][0]["name"] == "battery");
    const std::string page = read_all(html);
    CHECK(page.find("</html>") != std::string::npos);
    CHECK(page.find("<bright>") == std::string::npos);
  }
  CHECK(cli("summarize --model " + q(model) + " --reviews " + q(reviews)).code == 1);
}

TEST_CASE("ingest writes an unlabeled corpus") {
  TempDir tmp;
  const fs::path reviews = tmp.path / "reviews.jsonl", out = tmp.path / "corpus.jsonl";
  std::ofstream(reviews) << R"({"review_id":"a","text":"Great phone. Battery dies fast!"})" << '\n';
  REQUIRE(cli("ingest --reviews " + q(reviews) + " --schema " + q(kData / "schema.txt") + " --out " + q(out)).code == 0);
  Run r = cli("stats --corpus " + q(out));
  CHECK(r.code == 0);
  CHECK(r.out.find("others\t2\nall\t2\n") != std::string::npos);
}

TEST_CASE("eval writes a JSON report") {
  TempDir tmp;
  const fs::path out = tmp.path / "report.json";
  REQUIRE(cli("eval --corpus " + q(kData / "fixture50.jsonl") + " --arch svm --folds 5 --seed 4 --out " + q(out)).code ==
          0);
  auto doc = json::parse(read_all(out));
  CHECK(doc["method"] == "svm");
  CHECK(doc["seed"] == 4);
  CHECK(doc["per_fold"].size() == 5);
}
