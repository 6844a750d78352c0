#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "testutil.h"
#include "twparse/conllu.h"

using namespace twparse;
namespace fs = std::filesystem;

namespace {

const std::string kCli = TWPARSE_CLI_PATH;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::path("cli_scratch") / std::to_string(::getpid());
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir.parent_path()); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_to = "") {
  std::string cmd = kCli + " " + args;
  if (!stdout_to.empty()) cmd += " > " + stdout_to;
  cmd += " 2> /dev/null";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

void write_treebank(const std::string& path, const Treebank& tb) {
  write_conllu_file(path, tb);
}

}  // namespace

TEST_CASE("cli: anonymize round trip through files") {
  Scratch scratch;
  write_file(scratch.path("in.txt"), "hi @bob see http://x.co\nplain line\n");
  REQUIRE(run("anonymize --input " + scratch.path("in.txt") + " --output " +
              scratch.path("out.txt")) == 0);
  CHECK(read_file(scratch.path("out.txt")) == "hi @USER see URL\nplain line\n");
}

TEST_CASE("cli: unknown subcommand and bad flags exit 1") {
  CHECK(run("frobnicate") == 1);
  CHECK(run("eval --metric las") == 1);  // missing --gold/--pred
}

TEST_CASE("cli: train, run, and evaluate the full pipeline at toy scale") {
  Scratch scratch;
  Treebank train = testutil::grammar_treebank(30, 101);
  Treebank dev = testutil::grammar_treebank(8, 102);
  write_treebank(scratch.path("train.conllu"), train);
  write_treebank(scratch.path("dev.conllu"), dev);

  std::string small = " --epochs 6 --word-dim 8 --hidden-dim 12 --word-cutoff 1";

  REQUIRE(run("train-tokenizer --train " + scratch.path("train.conllu") + " --out " +
              scratch.path("tok.model") + " --epochs 8 --char-dim 8 --hidden-dim 12") == 0);
  REQUIRE(run("train-tagger --train " + scratch.path("train.conllu") + " --out " +
              scratch.path("tag.model") + small) == 0);
  REQUIRE(run("train-parser --train " + scratch.path("train.conllu") + " --dev " +
              scratch.path("dev.conllu") + " --out " + scratch.path("par.model") +
              small) == 0);

  // pipeline over raw tweets: 3 in, 3 sentence blocks out
  write_file(scratch.path("tweets.txt"),
             "the cat sees a dog .\na bird likes the tree\nthis man takes that fish .\n");
  REQUIRE(run("pipeline --tokenizer " + scratch.path("tok.model") + " --tagger " +
              scratch.path("tag.model") + " --parser " + scratch.path("par.model") +
              " --input " + scratch.path("tweets.txt") + " --output " +
              scratch.path("parsed.conllu")) == 0);
  Treebank parsed = read_conllu_file(scratch.path("parsed.conllu"));
  CHECK(parsed.sentences.size() == 3);
  for (const Sentence& s : parsed.sentences) {
    CHECK(s.has_heads());
    CHECK(validate_sentence(s).empty());
  }
  // resolved config is embedded as comments
  CHECK(read_file(scratch.path("parsed.conllu")).find("# twparse.cmd = pipeline") !=
        std::string::npos);

  // eval: gold vs gold scores 100
  REQUIRE(run("eval --metric las --gold " + scratch.path("dev.conllu") + " --pred " +
              scratch.path("dev.conllu"),
              scratch.path("las.txt")) == 0);
  std::string las_out = read_file(scratch.path("las.txt"));
  CHECK(las_out.find("las = 100.0") != std::string::npos);

  REQUIRE(run("eval --metric tok --json --gold " + scratch.path("dev.conllu") +
              " --pred " + scratch.path("dev.conllu"),
              scratch.path("tok.json")) == 0);
  CHECK(read_file(scratch.path("tok.json")).find("\"f1\": 100.0") != std::string::npos);
}

TEST_CASE("cli: distill rejects exploration with alpha below 1") {
  Scratch scratch;
  Treebank train = testutil::grammar_treebank(6, 103);
  write_treebank(scratch.path("train.conllu"), train);
  // manifest is never read: the usage error comes first
  CHECK(run("distill --ensemble missing.manifest --train " +
            scratch.path("train.conllu") + " --out x.model --alpha 0.9 "
            "--mode exploration") == 1);
}

TEST_CASE("cli: train-ensemble then distill") {
  Scratch scratch;
  Treebank train = testutil::grammar_treebank(16, 104);
  write_treebank(scratch.path("train.conllu"), train);
  std::string small = " --epochs 4 --word-dim 8 --hidden-dim 12 --word-cutoff 1";
  REQUIRE(run("--jobs 2 train-ensemble --train " + scratch.path("train.conllu") +
              " --out-dir " + scratch.dir.string() + " --members 2" + small) == 0);
  CHECK(fs::exists(scratch.path("member1.model")));
  CHECK(fs::exists(scratch.path("ensemble.manifest")));

  REQUIRE(run("distill --ensemble " + scratch.path("ensemble.manifest") + " --train " +
              scratch.path("train.conllu") + " --out " + scratch.path("distilled.model") +
              " --alpha 1.0 --mode exploration" + small) == 0);
  CHECK(fs::exists(scratch.path("distilled.model")));

  // the distilled model drives the parse subcommand
  REQUIRE(run("parse --model " + scratch.path("distilled.model") + " --input " +
              scratch.path("train.conllu") + " --output " +
              scratch.path("reparsed.conllu")) == 0);
  Treebank reparsed = read_conllu_file(scratch.path("reparsed.conllu"));
  CHECK(reparsed.sentences.size() == train.sentences.size());
}

TEST_CASE("cli: identical configs produce bit-identical models and outputs") {
  Scratch scratch;
  Treebank train = testutil::grammar_treebank(10, 105);
  write_treebank(scratch.path("train.conllu"), train);
  std::string args = "train-parser --train " + scratch.path("train.conllu") +
                     " --epochs 3 --word-dim 8 --hidden-dim 12 --word-cutoff 1 "
                     "--seed 42 --out ";
  REQUIRE(run(args + scratch.path("a.model")) == 0);
  REQUIRE(run(args + scratch.path("b.model")) == 0);
  CHECK(read_file(scratch.path("a.model")) == read_file(scratch.path("b.model")));
}

TEST_CASE("cli: config file supplies defaults, flags win") {
  Scratch scratch;
  Treebank train = testutil::grammar_treebank(6, 106);
  write_treebank(scratch.path("train.conllu"), train);
  write_file(scratch.path("run.cfg"),
             "[train-parser]\nepochs = 2\nword-dim = 8\nhidden-dim = 12\n"
             "word-cutoff = 1\nseed = 7\n");
  REQUIRE(run("--config " + scratch.path("run.cfg") + " train-parser --train " +
              scratch.path("train.conllu") + " --out " + scratch.path("c.model")) == 0);
  // the flag overrides the file: seed 9 vs seed 7 give different models
  REQUIRE(run("--config " + scratch.path("run.cfg") + " train-parser --seed 9 --train " +
              scratch.path("train.conllu") + " --out " + scratch.path("d.model")) == 0);
  REQUIRE(run("--config " + scratch.path("run.cfg") + " train-parser --train " +
              scratch.path("train.conllu") + " --out " + scratch.path("e.model")) == 0);
  CHECK(read_file(scratch.path("c.model")) == read_file(scratch.path("e.model")));
  CHECK(read_file(scratch.path("c.model")) != read_file(scratch.path("d.model")));
}

TEST_CASE("cli: lint exit codes and allowlist") {
  Scratch scratch;
  std::string bad =
      "# sent_id = 1\n"
      "1\tnice\tnice\tADJ\t_\t_\t0\troot\t_\t_\n"
      "2\thttp://x.co\t_\tX\t_\t_\t1\tdiscourse\t_\t_\n\n";
  write_file(scratch.path("bad.conllu"), bad);
  CHECK(run("lint --input " + scratch.path("bad.conllu")) == 3);

  write_file(scratch.path("allow.txt"), "1\t2\turl-label\n");
  CHECK(run("lint --input " + scratch.path("bad.conllu") + " --allowlist " +
            scratch.path("allow.txt")) == 0);

  std::string good =
      "# sent_id = 1\n"
      "1\tnice\tnice\tADJ\t_\t_\t0\troot\t_\t_\n"
      "2\thttp://x.co\t_\tX\t_\t_\t1\tlist\t_\t_\n\n";
  write_file(scratch.path("good.conllu"), good);
  CHECK(run("lint --input " + scratch.path("good.conllu")) == 0);
}

TEST_CASE("cli: malformed data exits 2") {
  Scratch scratch;
  write_file(scratch.path("broken.conllu"), "1\tonly\tthree\n\n");
  CHECK(run("lint --input " + scratch.path("broken.conllu")) == 2);
  CHECK(run("stats --input " + scratch.path("broken.conllu")) == 2);
}

TEST_CASE("cli: stats table") {
  Scratch scratch;
  std::string text =
      "# sent_id = 1\n"
      "1\tnice\t_\tADJ\t_\t_\t0\troot\t_\t_\n"
      "2\t#win\t_\tX\t_\t_\t1\tdiscourse\t_\t_\n\n";
  write_file(scratch.path("in.conllu"), text);
  REQUIRE(run("stats --input " + scratch.path("in.conllu"), scratch.path("stats.txt")) ==
          0);
  std::string out = read_file(scratch.path("stats.txt"));
  CHECK(out.find("hashtag") != std::string::npos);
  CHECK(out.find("50.00") != std::string::npos);
}

TEST_CASE("cli: stdin/stdout streaming with - paths") {
  Scratch scratch;
  write_file(scratch.path("in.txt"), "ping @someone\n");
  int rc = std::system((kCli + " anonymize < " + scratch.path("in.txt") + " > " +
                        scratch.path("out.txt") + " 2>/dev/null")
                           .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(read_file(scratch.path("out.txt")) == "ping @USER\n");
}
