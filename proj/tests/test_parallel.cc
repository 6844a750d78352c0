#include <doctest.h>

#include <atomic>

#include "testutil.h"
#include "twparse/distill.h"
#include "twparse/parallel.h"
#include "twparse/parser.h"
#include "twparse/tagger.h"
#include "twparse/tokenizer.h"

using namespace twparse;

TEST_CASE("parallel_for covers the range exactly once and propagates errors") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(parallel_for(8, 4,
                               [&](size_t i) {
                                 if (i == 5) throw DataError("boom");
                               }),
                  DataError);
}

TEST_CASE("OpenMP batch kernels match the serial reference exactly") {
  Treebank tb = testutil::grammar_treebank(40, 91);
  std::vector<std::string> raws;
  for (const Sentence& s : tb.sentences) raws.push_back(s.text());

  TokenizerConfig tok_cfg;
  tok_cfg.char_dim = 8;
  tok_cfg.hidden_dim = 8;
  tok_cfg.char_min_count = 1;
  Rng tok_rng(1);
  TokenizerModel tok = TokenizerModel::create(raws, tok_cfg, tok_rng);
  CHECK(tokenize_batch(tok, raws, 1) == tokenize_batch(tok, raws, 4));

  TaggerConfig tag_cfg;
  Rng tag_rng(2);
  TaggerModel tagger = TaggerModel::create(tb, tag_cfg, tag_rng);
  CHECK(tag_treebank(tagger, tb, 1) == tag_treebank(tagger, tb, 4));

  ParserConfig par_cfg;
  Rng par_rng(3);
  ParserModel parser = ParserModel::create(tb, par_cfg, par_rng);
  CHECK(parse_treebank(parser, tb, 1) == parse_treebank(parser, tb, 4));

  Ensemble e;
  for (int i = 0; i < 3; ++i) {
    Rng member_rng(50 + i);
    e.members.push_back(
        std::make_shared<ParserModel>(ParserModel::create(tb, par_cfg, member_rng)));
  }
  CHECK(ensemble_parse_treebank(e, tb, 1) == ensemble_parse_treebank(e, tb, 4));

  // exploration collection is deterministic regardless of the thread count
  std::vector<DistillationExample> serial = collect_exploration_states(e, tb, 5, 1);
  std::vector<DistillationExample> parallel = collect_exploration_states(e, tb, 5, 4);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].state.history == parallel[i].state.history);
    CHECK(serial[i].target.prob == parallel[i].target.prob);
  }
}

TEST_CASE("jackknife folds train concurrently with identical results") {
  Treebank tb = testutil::grammar_treebank(12, 92);
  TaggerConfig cfg;
  cfg.word_dim = 8;
  cfg.char_dim = 4;
  cfg.char_hidden = 4;
  cfg.input_dim = 8;
  cfg.hidden_dim = 8;
  cfg.word_min_count = 1;
  cfg.epochs = 3;
  CHECK(jackknife_tags(tb, 3, cfg, 1) == jackknife_tags(tb, 3, cfg, 3));
}
