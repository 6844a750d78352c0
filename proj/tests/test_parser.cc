#include <doctest.h>

#include "testutil.h"
#include "twparse/gradcheck.h"
#include "twparse/parser.h"

using namespace twparse;

namespace {

ParserConfig small_config() {
  ParserConfig c;
  c.word_dim = 12;
  c.char_dim = 6;
  c.char_hidden = 8;
  c.upos_dim = 6;
  c.input_dim = 16;
  c.hidden_dim = 16;
  c.action_dim = 8;
  c.action_hidden = 12;
  c.rel_dim = 6;
  c.cls_hidden = 16;
  c.word_min_count = 1;
  c.epochs = 30;
  return c;
}

}  // namespace

TEST_CASE("score_state renormalizes over the valid actions") {
  Treebank tb = testutil::grammar_treebank(5, 31);
  Rng rng(1);
  ParserModel model = ParserModel::create(tb, small_config(), rng);
  const Sentence& s = tb.sentences[0];

  SUBCASE("a state with exactly one valid action gets probability 1") {
    // initial state: only SHIFT is legal
    ParserState st = initial_state(s);
    ActionDistribution dist = model.score_state(st, s);
    REQUIRE(dist.support.size() == 1);
    CHECK(dist.prob[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("distributions sum to one on random reachable states") {
    Rng walk_rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const Sentence& sent = tb.sentences[trial % tb.sentences.size()];
      ParserState st = initial_state(sent);
      size_t steps = walk_rng.below(2 * sent.tokens.size());
      for (size_t k = 0; k < steps && !st.terminal(); ++k) {
        std::vector<int> valid = valid_action_indices(st, model.inventory());
        apply_action_inplace(st, model.inventory().at(valid[walk_rng.below(valid.size())]));
      }
      if (st.terminal()) continue;
      ActionDistribution dist = model.score_state(st, sent);
      CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(dist.support == valid_action_indices(st, model.inventory()));
    }
  }

  SUBCASE("terminal states are rejected") {
    ParserState st = replay(s, oracle_sequence(s));
    CHECK_THROWS_AS(model.score_state(st, s), std::logic_error);
  }
}

TEST_CASE("uniform logits yield a uniform distribution over valid actions") {
  Treebank tb = testutil::grammar_treebank(3, 32);
  Rng rng(2);
  ParserConfig config = small_config();
  ParserModel model = ParserModel::create(tb, config, rng);
  // zero the classifier output layer: every action scores identically
  model.params.get("cls.w2")->value.fill(0.0);
  model.params.get("cls.b2")->value.fill(0.0);

  const Sentence& s = tb.sentences[0];
  ParserState st = initial_state(s);
  apply_action_inplace(st, Action::shift());
  apply_action_inplace(st, Action::shift());
  ActionDistribution dist = model.score_state(st, s);
  REQUIRE(dist.support.size() > 1);
  for (double p : dist.prob)
    CHECK(p == doctest::Approx(1.0 / dist.support.size()).epsilon(1e-9));
}

TEST_CASE("greedy_parse on a 1-token sentence attaches to root regardless of weights") {
  Treebank tb = testutil::grammar_treebank(2, 33);
  Rng rng(3);
  ParserModel model = ParserModel::create(tb, small_config(), rng);
  Sentence s;
  Token t;
  t.id = 1;
  t.form = "hello";
  t.upos = "INTJ";
  s.tokens.push_back(t);
  Sentence parsed = model.greedy_parse(s);
  CHECK(parsed.tokens[0].head == 0);
  CHECK(parsed.tokens[0].deprel == "root");
}

TEST_CASE("greedy_parse output always validates") {
  Treebank tb = testutil::grammar_treebank(10, 34);
  Rng rng(4);
  ParserModel model = ParserModel::create(tb, small_config(), rng);
  for (const Sentence& s : tb.sentences) {
    Sentence parsed = model.greedy_parse(s);
    CHECK(validate_sentence(parsed).empty());
    CHECK(is_projective(parsed));
  }
}

TEST_CASE("greedy parses are deterministic") {
  Treebank tb = testutil::grammar_treebank(5, 35);
  Rng rng(5);
  ParserModel model = ParserModel::create(tb, small_config(), rng);
  Treebank a = parse_treebank(model, tb, 1);
  Treebank b = parse_treebank(model, tb, 1);
  CHECK(a == b);
}

TEST_CASE("train_parser memorizes a small treebank") {
  Treebank tb = testutil::grammar_treebank(10, 36);
  ParserConfig config = small_config();
  config.epochs = 40;
  ParserTrainStats stats;
  ParserModel model = train_parser(tb, config, &stats);
  CHECK(stats.best_dev_las == doctest::Approx(100.0));
  Treebank parsed = parse_treebank(model, tb, 1);
  AttachmentCounts counts = attachment_counts(tb, parsed);
  CHECK(counts.las() == doctest::Approx(100.0));
}

TEST_CASE("train_parser skips non-projective sentences and counts them") {
  Treebank tb = testutil::grammar_treebank(6, 37);
  // inject one crossing tree
  Sentence bad;
  for (int i = 1; i <= 4; ++i) {
    Token t;
    t.id = i;
    t.form = "w" + std::to_string(i);
    t.upos = "NOUN";
    bad.tokens.push_back(t);
  }
  bad.tokens[0].head = 0;
  bad.tokens[0].deprel = "root";
  bad.tokens[1].head = 4;
  bad.tokens[1].deprel = "dep";
  bad.tokens[2].head = 1;
  bad.tokens[2].deprel = "dep";
  bad.tokens[3].head = 3;
  bad.tokens[3].deprel = "dep";
  bad.set_comment("sent_id", "bad");
  tb.sentences.push_back(bad);

  ParserConfig config = small_config();
  config.epochs = 2;
  ParserTrainStats stats;
  train_parser(tb, config, &stats);
  CHECK(stats.non_projective_skipped == 1);

  Treebank only_bad;
  only_bad.sentences.push_back(bad);
  CHECK_THROWS_AS(train_parser(only_bad, config), DataError);
}

TEST_CASE("greedy decoding performs exactly 2n state scores") {
  Treebank tb = testutil::grammar_treebank(4, 38);
  Rng rng(6);
  ParserModel model = ParserModel::create(tb, small_config(), rng);
  for (const Sentence& s : tb.sentences) {
    ParserDecoder dec(model, s);
    size_t scores = 0;
    while (!dec.done()) {
      dec.logits();
      ++scores;
      std::vector<int> valid = dec.valid();
      std::vector<double> p = dec.probs();
      size_t best = 0;
      for (size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
      dec.advance_index(valid[best]);
    }
    CHECK(scores == 2 * s.tokens.size());
  }
}

TEST_CASE("parser scorer gradient check on a 3-token sentence") {
  Treebank tiny;
  tiny.sentences.push_back(testutil::grammar_treebank(1, 39).sentences[0]);
  tiny.sentences[0].tokens.resize(3);  // keep it small
  tiny.sentences[0].tokens[2].head = 0;
  tiny.sentences[0].tokens[2].deprel = "root";
  tiny.sentences[0].tokens[0].head = 3;
  tiny.sentences[0].tokens[0].deprel = "det";
  tiny.sentences[0].tokens[1].head = 3;
  tiny.sentences[0].tokens[1].deprel = "amod";
  tiny.sentences[0].comments.clear();

  ParserConfig config = small_config();
  config.word_dim = 6;
  config.char_dim = 4;
  config.char_hidden = 4;
  config.upos_dim = 4;
  config.input_dim = 8;
  config.hidden_dim = 8;
  config.action_dim = 4;
  config.action_hidden = 6;
  config.rel_dim = 4;
  config.cls_hidden = 8;
  Rng rng(7);
  ParserModel model = ParserModel::create(tiny, config, rng);
  const Sentence& s = tiny.sentences[0];
  std::vector<Action> actions = oracle_sequence(s);

  auto loss = [&](bool want_grad) {
    ParserDecoder dec(model, s);
    std::vector<Graph::NodeId> losses;
    for (const Action& a : actions) {
      losses.push_back(dec.graph().pickneglogsoftmax(
          dec.logits(), model.inventory().index_of(a), dec.valid()));
      dec.advance(a);
    }
    Graph::NodeId l = dec.graph().sum(losses);
    if (want_grad) dec.graph().backward(l);
    return dec.graph().value(l)[0];
  };
  Rng coord_rng(23);
  CHECK(finite_diff_check(model.params, loss, 1e-4, 150, coord_rng) < 1e-4);
}

TEST_CASE("parser model file round trip preserves parses") {
  Treebank tb = testutil::grammar_treebank(6, 40);
  ParserConfig config = small_config();
  config.epochs = 5;
  ParserModel model = train_parser(tb, config);
  model.save_file("parser_roundtrip.twpm");
  ParserModel back = ParserModel::load_file("parser_roundtrip.twpm");
  CHECK(back.inventory().labels() == model.inventory().labels());
  model.params.quantize_f32();
  CHECK(parse_treebank(model, tb, 1) == parse_treebank(back, tb, 1));
  std::remove("parser_roundtrip.twpm");
}
