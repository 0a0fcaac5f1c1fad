#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace gphsmm;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<std::string> args) {
  std::vector<std::string> store = {"gphsmm"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

struct Workspace {
  fs::path dir;
  Workspace() : dir(fs::temp_directory_path() / "gphsmm_cli_test") {
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_text_atomic(dir / "synth.json", R"({"workers": 2, "cycles_per_worker": 3, "dim": 2,
      "mean_duration": 8, "max_element_len": 14, "min_seconds": 0, "max_seconds": 0})");
    write_text_atomic(dir / "run.json", R"({"hyperparams": {"C": 8, "B": 3, "K": 16, "K_unit": 6,
      "iterations": 2, "restarts": 2, "seed": 3}})");
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("synth, train, eval and report pipeline") {
  Workspace w;
  REQUIRE(run({"synth", "--preset", "assembly", "--config", w.p("synth.json"), "--seed", "1", "--out", w.p("data")}) == 0);
  CHECK(fs::exists(w.dir / "data" / "corpus.csv"));
  CHECK(fs::exists(w.dir / "data" / "truth.csv"));

  REQUIRE(run({"train", "--config", w.p("run.json"), "--data", w.p("data/corpus.csv"), "--mode", "meu", "--out", w.p("meu")}) == 0);
  REQUIRE(run({"train", "--config", w.p("run.json"), "--data", w.p("data/corpus.csv"), "--mode", "lower-only", "--out", w.p("lo")}) == 0);
  CHECK(fs::exists(w.dir / "meu" / "checkpoints" / "restart_01.json"));
  CHECK(fs::exists(w.dir / "meu" / "restarts" / "restart_00.csv"));

  const auto lo = read_segmentation(w.dir / "lo" / "segmentation.csv");
  CHECK(lo.units.empty());
  std::ifstream in(w.dir / "lo" / "segmentation.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.substr(row.size() - 2) == ",,");
  CHECK_FALSE(read_segmentation(w.dir / "meu" / "segmentation.csv").units.empty());

  REQUIRE(run({"eval", "--truth", w.p("data/truth.csv"), "--run", w.p("meu"), "--run", w.p("lo"), "--out", w.p("eval")}) == 0);
  const auto table = read_text(w.dir / "eval" / "nld_table.tsv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  CHECK(table.find("\nmeu\t2\t") != std::string::npos);
  CHECK(table.find("\nlower-only\t2\t") != std::string::npos);

  REQUIRE(run({"report", "--truth", w.p("data/truth.csv"), "--run", w.p("meu"), "--out", w.p("report")}) == 0);
  CHECK(fs::exists(w.dir / "report" / "nld_histogram.svg"));
  CHECK(fs::exists(w.dir / "report" / "meu_timeline.svg"));
  CHECK(fs::exists(w.dir / "report" / "meu_timeline.tsv"));

  REQUIRE(run({"segment", "--run", w.p("meu"), "--data", w.p("data/corpus.csv"), "--out", w.p("seg.csv")}) == 0);
  CHECK(read_segmentation(fs::path(w.p("seg.csv"))).elements.size() == 6);
}

TEST_CASE("same config and seed give identical files") {
  Workspace w;
  REQUIRE(run({"synth", "--config", w.p("synth.json"), "--seed", "2", "--out", w.p("data")}) == 0);
  REQUIRE(run({"train", "--config", w.p("run.json"), "--data", w.p("data/corpus.csv"), "--mode", "ws", "--out", w.p("a")}) == 0);
  REQUIRE(run({"train", "--config", w.p("run.json"), "--data", w.p("data/corpus.csv"), "--mode", "ws", "--out", w.p("b")}) == 0);
  CHECK(read_text(w.dir / "a" / "segmentation.csv") == read_text(w.dir / "b" / "segmentation.csv"));
  CHECK(read_text(w.dir / "a" / "run.json") == read_text(w.dir / "b" / "run.json"));
}

TEST_CASE("exit codes separate config and data errors") {
  Workspace w;
  CHECK(run({"train", "--config", w.p("missing.json"), "--out", w.p("x")}) == 1);
  CHECK(run({"train", "--mode", "hmm", "--data", w.p("x.csv"), "--out", w.p("x")}) == 1);
  CHECK(run({"bogus"}) == 1);
  write_text_atomic(w.dir / "bad.json", R"({"hyperparams": {"C": 0}})");
  CHECK(run({"train", "--config", w.p("bad.json"), "--data", w.p("x.csv"), "--out", w.p("x")}) == 1);
  write_text_atomic(w.dir / "nan.csv", "sequence_id,a\ns,1\ns,nan\n");
  CHECK(run({"train", "--config", w.p("run.json"), "--data", w.p("nan.csv"), "--out", w.p("x")}) == 2);
  CHECK(run({"train", "--config", w.p("run.json"), "--data", w.p("absent.csv"), "--out", w.p("x")}) == 2);
}
