// Benchmarks the batch kernels (tokenize / tag / parse / ensemble parse)
// serial vs OpenMP, checking that both paths produce identical output.
// Models are random-initialized unless paths are given; the point is the
// kernel comparison, not the scores.
#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "twparse/distill.h"
#include "twparse/eval.h"
#include "twparse/parallel.h"
#include "twparse/parser.h"
#include "twparse/tagger.h"
#include "twparse/tokenizer.h"

using namespace twparse;

namespace {

double time_once(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

// Deterministic synthetic tweets; enough shape for the kernels to chew on.
std::vector<std::string> synth_tweets(int count, Rng& rng) {
  static const std::vector<std::string> words = {
      "the",   "a",     "cat",  "dog",    "sat",  "on",    "mat",  "saw",
      "big",   "small", "red",  "run",    "fast", "slow",  "bird", "tree",
      "house", "went",  "home", "really", "nice", "today", "lol",  "omg"};
  std::vector<std::string> tweets;
  for (int i = 0; i < count; ++i) {
    int len = 5 + static_cast<int>(rng.below(8));
    std::string t;
    for (int j = 0; j < len; ++j) {
      if (j) t += " ";
      t += words[rng.below(words.size())];
    }
    tweets.push_back(t);
  }
  return tweets;
}

Treebank synth_treebank(const std::vector<std::string>& tweets) {
  Treebank tb;
  for (size_t i = 0; i < tweets.size(); ++i) {
    Sentence s;
    std::vector<std::string> forms = split_ws(tweets[i]);
    for (size_t j = 0; j < forms.size(); ++j) {
      Token t;
      t.id = static_cast<int>(j) + 1;
      t.form = forms[j];
      t.upos = j == 0 ? "NOUN" : "VERB";
      t.head = j == 0 ? 0 : 1;
      t.deprel = j == 0 ? "root" : "dep";
      s.tokens.push_back(t);
    }
    s.set_comment("sent_id", std::to_string(i + 1));
    s.set_comment("text", tweets[i]);
    tb.sentences.push_back(s);
  }
  return tb;
}

void report(const std::string& name, double serial, double parallel, int jobs,
            bool identical) {
  std::cout << name << ": serial " << serial << "s, omp(" << jobs << ") " << parallel
            << "s, speedup " << (parallel > 0 ? serial / parallel : 0.0)
            << (identical ? "" : "  [MISMATCH]") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twparse-bench: serial vs OpenMP batch kernels"};
  int jobs = hardware_jobs();
  int tweets = 300;
  int members = 4;
  app.add_option("--jobs", jobs)->capture_default_str();
  app.add_option("--tweets", tweets)->capture_default_str();
  app.add_option("--members", members)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  Rng rng(7);
  std::vector<std::string> raws = synth_tweets(tweets, rng);
  Treebank tb = synth_treebank(raws);

  TokenizerConfig tok_cfg;
  tok_cfg.char_dim = 16;
  tok_cfg.hidden_dim = 32;
  tok_cfg.char_min_count = 1;
  Rng tok_rng(1);
  TokenizerModel tok = TokenizerModel::create(raws, tok_cfg, tok_rng);

  TaggerConfig tag_cfg;
  Rng tag_rng(2);
  TaggerModel tag = TaggerModel::create(tb, tag_cfg, tag_rng);

  ParserConfig par_cfg;
  Rng par_rng(3);
  ParserModel par = ParserModel::create(tb, par_cfg, par_rng);

  Ensemble ens;
  for (int i = 0; i < members; ++i) {
    Rng member_rng(100 + i);
    ens.members.push_back(
        std::make_shared<ParserModel>(ParserModel::create(tb, par_cfg, member_rng)));
  }

  bool all_identical = true;

  {
    std::vector<Sentence> a, b;
    double ts = time_once([&] { a = tokenize_batch(tok, raws, 1); });
    double tp = time_once([&] { b = tokenize_batch(tok, raws, jobs); });
    bool same = a == b;
    all_identical = all_identical && same;
    report("tokenize", ts, tp, jobs, same);
  }
  {
    Treebank a, b;
    double ts = time_once([&] { a = tag_treebank(tag, tb, 1); });
    double tp = time_once([&] { b = tag_treebank(tag, tb, jobs); });
    bool same = a == b;
    all_identical = all_identical && same;
    report("tag", ts, tp, jobs, same);
  }
  {
    Treebank a, b;
    double ts = time_once([&] { a = parse_treebank(par, tb, 1); });
    double tp = time_once([&] { b = parse_treebank(par, tb, jobs); });
    bool same = a == b;
    all_identical = all_identical && same;
    report("parse", ts, tp, jobs, same);
  }
  {
    Treebank a, b;
    double ts = time_once([&] { a = ensemble_parse_treebank(ens, tb, 1); });
    double tp = time_once([&] { b = ensemble_parse_treebank(ens, tb, jobs); });
    bool same = a == b;
    all_identical = all_identical && same;
    report("ensemble-parse", ts, tp, jobs, same);
  }

  return all_identical ? 0 : 1;
}
