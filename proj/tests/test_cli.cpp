// Copyright 2026 The Skein Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skein/matf.hpp"

#ifndef SKEIN_CLI_PATH
#error "SKEIN_CLI_PATH must point at the skein executable"
#endif

using namespace skein;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "skein_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd =
      std::string("\"") + SKEIN_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string path(const char* name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("flops subcommand") {
  const auto r = run("flops --n 1024 --p 32 --d 256");
  CHECK(r.code == 0);
  CHECK(r.out.find("standard      2n^2p     67108864") != std::string::npos);
  CHECK(r.out.find("skeinformer   4ndp      33554432") != std::string::npos);
  CHECK(r.out.find("linformer     4ndp      33554432") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("bench --methods nope --n 16 --d 4 --trials 1").code == 1);
  CHECK(run("bench --n 16 --d 32 --trials 1").code == 1);
  const auto lemma = run("verify lemma1 --delta 0.6");
  CHECK(lemma.code == 1);
  CHECK(lemma.err.find("(0, 1/2)") != std::string::npos);
  CHECK(run("verify jl --epsilon 0.6").code == 1);
  CHECK(run("verify bogus").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("gen and attn round trip") {
  write_matrix(path("one.matf"), DenseMatrix::from_rows({{1, 2}}));
  const auto r = run("attn --method exact --q " + path("one.matf") + " --k " + path("one.matf") + " --v " +
                     path("one.matf") + " --out " + path("one_out.matf"));
  REQUIRE(r.code == 0);
  CHECK(read_matrix(path("one_out.matf")) == DenseMatrix::from_rows({{1, 2}}));

  for (const char* name : {"q", "k", "v"}) {
    const std::string stream = name[0] == 'q' ? "0" : name[0] == 'k' ? "1" : "2";
    CHECK(run(std::string("gen --n 40 --p 4 --seed 9 --stream ") + stream + " --out " +
              path((std::string(name) + ".matf").c_str()))
              .code == 0);
  }
  const auto qkv = " --q " + path("q.matf") + " --k " + path("k.matf") + " --v " + path("v.matf");
  REQUIRE(run("attn --method exact" + qkv + " --out " + path("exact.matf")).code == 0);
  REQUIRE(run("attn --method skeinformer --d 40" + qkv + " --out " + path("skein.matf")).code == 0);
  const auto exact = read_matrix(path("exact.matf"));
  const auto skein = read_matrix(path("skein.matf"));
  CHECK(max_abs_diff(exact, skein) < 1e-10);

  REQUIRE(run("attn --method informer --d 8 --unpadded-len 30" + qkv + " --out " + path("inf.matf")).code == 0);
  const auto inf = read_matrix(path("inf.matf"));
  for (double x : inf.row(35)) CHECK(x == 0.0);
  CHECK(run("attn --method exact --unpadded-len 41" + qkv + " --out " + path("x.matf")).code == 1);
  CHECK(run("attn --method magic" + qkv + " --out " + path("x.matf")).code == 1);
}

TEST_CASE("vmean with identical value rows") {
  write_matrix(path("vq.matf"), DenseMatrix::from_rows({{1, 0}, {0, 1}, {2, 2}}));
  write_matrix(path("vv.matf"), DenseMatrix::from_rows({{3, 4}, {3, 4}, {3, 4}}));
  REQUIRE(run("attn --method vmean --q " + path("vq.matf") + " --k " + path("vq.matf") + " --v " + path("vv.matf") +
              " --out " + path("vout.matf"))
              .code == 0);
  CHECK(read_matrix(path("vout.matf")) == DenseMatrix::from_rows({{3, 4}, {3, 4}, {3, 4}}));
}

TEST_CASE("I/O and format errors exit 2") {
  {
    std::ofstream f(path("bad.matf"), std::ios::binary);
    f << "XXXX" << std::string(8, '\0');
  }
  const auto bad = run("attn --method exact --q " + path("bad.matf") + " --k " + path("bad.matf") + " --v " +
                       path("bad.matf") + " --out " + path("x.matf"));
  CHECK(bad.code == 2);
  CHECK(bad.err.find("byte 0") != std::string::npos);
  CHECK(run("attn --method exact --q /nonexistent/q --k /nonexistent/k --v /nonexistent/v --out " + path("x.matf"))
            .code == 2);
  CHECK(run("bench --n 16 --d 4 --trials 1 --methods vmean --out /nonexistent/dir/out.csv").code == 2);
  CHECK(run("gen --n 2 --p 2 --out /nonexistent/dir/g.matf").code == 2);
}

TEST_CASE("verify exit codes") {
  const auto pass = run("verify prop1 --trials 200");
  CHECK(pass.code == 0);
  CHECK(pass.out.find("PASS") != std::string::npos);
  CHECK(pass.out.find("trials 200") != std::string::npos);
  CHECK(run("verify sketch_unbiased --trials 20000").code == 0);
  CHECK(run("verify sketch_unbiased --sketch subsample --trials 20000").code == 0);
  // A 2-column sketch cannot hold 10% distortion.
  const auto fail = run("verify jl --d 2 --epsilon 0.1 --trials 500");
  CHECK(fail.code == 3);
  CHECK(fail.out.find("FAIL") != std::string::npos);
}

TEST_CASE("bench output is reproducible") {
  const std::string args = "bench --n 48 --p 4 --d 4,8 --methods skeinformer,informer,vmean --trials 3 --seed 11 "
                           "--deterministic --out ";
  REQUIRE(run(args + path("a.csv")).code == 0);
  REQUIRE(run(args + path("b.csv")).code == 0);
  CHECK(slurp(path("a.csv")) == slurp(path("b.csv")));
  std::size_t lines = 0;
  for (char c : slurp(path("a.csv"))) lines += c == '\n';
  CHECK(lines == 1 + 3 * 2 * 3 + 3 * 2);

  const auto stdout_run = run("bench --n 16 --p 2 --d 4 --methods vmean --trials 1");
  CHECK(stdout_run.code == 0);
  CHECK(stdout_run.out.rfind("# skein bench generated ", 0) == 0);
}

TEST_CASE("bench sanity violations exit 3") {
  const auto r = run("bench --n 256 --p 4 --d 2 --methods linformer --trials 2 --deterministic --out " +
                     path("lin.csv"));
  CHECK(r.code == 3);
  CHECK(r.err.find("sanity") != std::string::npos);
}
