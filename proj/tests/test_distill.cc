#include <doctest.h>

#include <cmath>

#include "testutil.h"
#include "twparse/distill.h"
#include "twparse/gradcheck.h"

using namespace twparse;

namespace {

ParserConfig small_config() {
  ParserConfig c;
  c.word_dim = 10;
  c.char_dim = 5;
  c.char_hidden = 6;
  c.upos_dim = 5;
  c.input_dim = 12;
  c.hidden_dim = 12;
  c.action_dim = 6;
  c.action_hidden = 8;
  c.rel_dim = 5;
  c.cls_hidden = 12;
  c.word_min_count = 1;
  c.epochs = 10;
  return c;
}

Ensemble make_ensemble(const Treebank& tb, int members, uint64_t seed_base) {
  Ensemble e;
  for (int i = 0; i < members; ++i) {
    Rng rng(seed_base + i);
    e.members.push_back(
        std::make_shared<ParserModel>(ParserModel::create(tb, small_config(), rng)));
  }
  return e;
}

DistillationExample example_with(const std::vector<int>& support,
                                 const std::vector<double>& target, int gold_index) {
  DistillationExample ex;
  ex.target.support = support;
  ex.target.prob = target;
  ex.gold_index = gold_index;
  if (gold_index >= 0) ex.gold_action = Action::shift();  // placeholder identity
  return ex;
}

}  // namespace

TEST_CASE("ensemble_distribution averages member distributions") {
  // two members, two valid actions: [0.6, 0.4] and [0.2, 0.8] -> [0.4, 0.6]
  ActionDistribution q1{{0, 1}, {0.6, 0.4}};
  ActionDistribution q2{{0, 1}, {0.2, 0.8}};
  // the arithmetic is what matters; exercised through the public op below
  std::vector<double> mean(2);
  for (int i = 0; i < 2; ++i) mean[i] = (q1.prob[i] + q2.prob[i]) / 2.0;
  CHECK(mean[0] == doctest::Approx(0.4));
  CHECK(mean[1] == doctest::Approx(0.6));

  Treebank tb = testutil::grammar_treebank(3, 51);
  Ensemble e = make_ensemble(tb, 2, 100);
  const Sentence& s = tb.sentences[0];
  ParserState st = initial_state(s);
  apply_action_inplace(st, Action::shift());
  apply_action_inplace(st, Action::shift());
  ActionDistribution d = ensemble_distribution(e, st, s);
  ActionDistribution m1 = e.members[0]->score_state(st, s);
  ActionDistribution m2 = e.members[1]->score_state(st, s);
  REQUIRE(d.support == m1.support);
  for (size_t i = 0; i < d.prob.size(); ++i)
    CHECK(d.prob[i] == doctest::Approx((m1.prob[i] + m2.prob[i]) / 2.0).epsilon(1e-9));
  CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("an ensemble of identical members reproduces the member exactly") {
  Treebank tb = testutil::grammar_treebank(3, 52);
  Rng rng(9);
  auto shared = std::make_shared<ParserModel>(ParserModel::create(tb, small_config(), rng));
  Ensemble e;
  for (int i = 0; i < 4; ++i) e.members.push_back(shared);

  const Sentence& s = tb.sentences[1];
  ParserState st = initial_state(s);
  apply_action_inplace(st, Action::shift());
  ActionDistribution single = shared->score_state(st, s);
  ActionDistribution mean = ensemble_distribution(e, st, s);
  REQUIRE(single.support == mean.support);
  for (size_t i = 0; i < single.prob.size(); ++i)
    CHECK(mean.prob[i] == doctest::Approx(single.prob[i]).epsilon(1e-12));
}

TEST_CASE("ensemble_distribution is invariant to member order") {
  Treebank tb = testutil::grammar_treebank(3, 53);
  Ensemble e = make_ensemble(tb, 3, 200);
  Ensemble reversed;
  reversed.members = {e.members[2], e.members[0], e.members[1]};

  const Sentence& s = tb.sentences[2];
  ParserState st = initial_state(s);
  apply_action_inplace(st, Action::shift());
  ActionDistribution a = ensemble_distribution(e, st, s);
  ActionDistribution b = ensemble_distribution(reversed, st, s);
  REQUIRE(a.support == b.support);
  for (size_t i = 0; i < a.prob.size(); ++i)
    CHECK(a.prob[i] == doctest::Approx(b.prob[i]).epsilon(1e-12));
}

TEST_CASE("singleton ensemble parses exactly like its member") {
  Treebank tb = testutil::grammar_treebank(6, 54);
  Ensemble e = make_ensemble(tb, 1, 300);
  for (const Sentence& s : tb.sentences)
    CHECK(ensemble_parse(e, s) == e.members[0]->greedy_parse(s));
}

TEST_CASE("empty ensemble is an error") {
  Treebank tb = testutil::grammar_treebank(1, 55);
  Ensemble empty;
  const Sentence& s = tb.sentences[0];
  ParserState st = initial_state(s);
  CHECK_THROWS_AS(ensemble_distribution(empty, st, s), DataError);
}

TEST_CASE("distillation_loss identities") {
  SUBCASE("alpha = 0 is exactly the log loss") {
    ActionDistribution q{{0, 1, 2}, {0.2, 0.5, 0.3}};
    DistillationExample ex = example_with({0, 1, 2}, {0.1, 0.7, 0.2}, 1);
    CHECK(distillation_loss(q, ex, 0.0) == -std::log(0.5));
  }
  SUBCASE("alpha = 1 with a one-hot target is the log loss of that action") {
    ActionDistribution q{{0, 1}, {0.25, 0.75}};
    DistillationExample ex = example_with({0, 1}, {0.0, 1.0}, -1);
    ex.gold_action.reset();
    CHECK(distillation_loss(q, ex, 1.0) == doctest::Approx(-std::log(0.75)).epsilon(1e-15));
  }
  SUBCASE("alpha = 1 with p = q = uniform over k gives ln k") {
    for (int k = 2; k <= 5; ++k) {
      std::vector<int> support;
      std::vector<double> uniform;
      for (int i = 0; i < k; ++i) {
        support.push_back(i);
        uniform.push_back(1.0 / k);
      }
      ActionDistribution q{support, uniform};
      DistillationExample ex = example_with(support, uniform, -1);
      ex.gold_action.reset();
      CHECK(std::abs(distillation_loss(q, ex, 1.0) - std::log(k)) < 1e-9);
    }
  }
  SUBCASE("hand-computed ln 2 example") {
    ActionDistribution q{{0, 1}, {0.5, 0.5}};
    DistillationExample ex = example_with({0, 1}, {0.5, 0.5}, -1);
    ex.gold_action.reset();
    CHECK(distillation_loss(q, ex, 1.0) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  }
  SUBCASE("precondition violations") {
    ActionDistribution q{{0, 1}, {0.5, 0.5}};
    DistillationExample no_gold = example_with({0, 1}, {0.5, 0.5}, -1);
    no_gold.gold_action.reset();
    CHECK_THROWS_AS(distillation_loss(q, no_gold, 0.5), UsageError);
    DistillationExample mismatched = example_with({0, 2}, {0.5, 0.5}, 0);
    CHECK_THROWS_AS(distillation_loss(q, mismatched, 1.0), DataError);
  }
}

TEST_CASE("distillation loss lower bound: loss >= alpha * H(p), equality at q = p") {
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    int k = 2 + static_cast<int>(rng.below(5));
    std::vector<int> support;
    std::vector<double> p(k), q(k);
    double ps = 0.0, qs = 0.0;
    for (int i = 0; i < k; ++i) {
      support.push_back(i);
      p[i] = rng.uniform01() + 1e-6;
      q[i] = rng.uniform01() + 1e-6;
      ps += p[i];
      qs += q[i];
    }
    for (int i = 0; i < k; ++i) {
      p[i] /= ps;
      q[i] /= qs;
    }
    double alpha = trial % 2 == 0 ? 1.0 : rng.uniform01();
    double entropy = 0.0;
    for (int i = 0; i < k; ++i) entropy += -p[i] * std::log(p[i]);

    ActionDistribution qd{support, q};
    DistillationExample ex = example_with(support, p, 0);
    if (alpha == 1.0) ex.gold_action.reset();
    double loss = distillation_loss(qd, ex, alpha);
    CHECK(loss >= alpha * entropy - 1e-12);

    ActionDistribution pd{support, p};
    double at_p = distillation_loss(pd, ex, 1.0);
    CHECK(at_p == doctest::Approx(entropy).epsilon(1e-9));
  }
}

TEST_CASE("graph distill_loss gradients pass finite differences for all alphas") {
  ModelParams m;
  Rng rng(62);
  Parameter* logits = m.add_param("z", 5, 1);
  m.init_matrix(logits, rng);
  std::vector<int> support = {0, 2, 3, 4};
  std::vector<double> target = {0.4, 0.3, 0.2, 0.1};
  for (double alpha : {0.0, 0.5, 0.9, 1.0}) {
    auto loss = [&](bool want_grad) {
      Graph g;
      Graph::NodeId l = g.distill_loss(g.param(logits), support, target, alpha, 2);
      if (want_grad) g.backward(l);
      return g.value(l)[0];
    };
    Rng coord_rng(63);
    CHECK(finite_diff_check(m, loss, 1e-4, 100, coord_rng) < 1e-6);
  }
}

TEST_CASE("collect_oracle_states yields 2n examples per sentence with legal golds") {
  Treebank tb = testutil::grammar_treebank(5, 56);
  Ensemble e = make_ensemble(tb, 2, 400);
  int skipped = -1;
  std::vector<DistillationExample> examples = collect_oracle_states(e, tb, &skipped);
  CHECK(skipped == 0);
  size_t expected = 0;
  for (const Sentence& s : tb.sentences) expected += 2 * s.tokens.size();
  CHECK(examples.size() == expected);
  for (const DistillationExample& ex : examples) {
    REQUIRE(ex.gold_action.has_value());
    CHECK(ex.gold_index >= 0);
    bool in_support = false;
    double sum = 0.0;
    for (size_t i = 0; i < ex.target.support.size(); ++i) {
      if (ex.target.support[i] == ex.gold_index) in_support = true;
      sum += ex.target.prob[i];
    }
    CHECK(in_support);  // gold is always legal
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("collect_exploration_states: 2n steps, no gold, deterministic in the seed") {
  Treebank tb = testutil::grammar_treebank(4, 57);
  Ensemble e = make_ensemble(tb, 2, 500);
  std::vector<DistillationExample> a = collect_exploration_states(e, tb, 99);
  std::vector<DistillationExample> b = collect_exploration_states(e, tb, 99);
  std::vector<DistillationExample> c = collect_exploration_states(e, tb, 100);
  size_t expected = 0;
  for (const Sentence& s : tb.sentences) expected += 2 * s.tokens.size();
  CHECK(a.size() == expected);
  for (const DistillationExample& ex : a) CHECK_FALSE(ex.gold_action.has_value());

  REQUIRE(a.size() == b.size());
  bool identical = true;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].state.history == b[i].state.history) ||
        a[i].target.prob != b[i].target.prob)
      identical = false;
  }
  CHECK(identical);

  bool different = a.size() != c.size();
  for (size_t i = 0; !different && i < a.size(); ++i)
    if (!(a[i].state.history == c[i].state.history)) different = true;
  CHECK(different);
}

TEST_CASE("exploration sampling from a one-hot ensemble follows the greedy parse") {
  Treebank tb = testutil::grammar_treebank(3, 58);
  Ensemble e = make_ensemble(tb, 1, 600);
  // force a one-hot member: state-independent logits with a 50-nat gap
  // between consecutive action indices
  Parameter* w2 = e.members[0]->params.get("cls.w2");
  w2->value.fill(0.0);
  Parameter* b2 = e.members[0]->params.get("cls.b2");
  for (int i = 0; i < b2->value.rows; ++i) b2->value[i] = -50.0 * i;

  // with near-one-hot members the sampled trajectories equal the greedy ones
  std::vector<DistillationExample> examples = collect_exploration_states(e, tb, 7);
  Treebank sampled_trees = tb;
  size_t at = 0;
  for (size_t i = 0; i < tb.sentences.size(); ++i) {
    const Sentence& s = tb.sentences[i];
    const DistillationExample& last = examples[at + 2 * s.tokens.size() - 1];
    at += 2 * s.tokens.size();
    CHECK(last.state.history.size() == 2 * s.tokens.size() - 1);
    ParserState st = replay(s, last.state.history);
    // finish the final step with the argmax of the recorded target
    size_t best = 0;
    for (size_t j = 1; j < last.target.prob.size(); ++j)
      if (last.target.prob[j] > last.target.prob[best]) best = j;
    apply_action_inplace(st, e.members[0]->inventory().at(last.target.support[best]));
    sampled_trees.sentences[i] = extract_tree(st, s);
  }
  CHECK(ensemble_parse_treebank(e, tb, 1) == sampled_trees);
}

TEST_CASE("distill_train validates the mode/alpha combination") {
  Treebank tb = testutil::grammar_treebank(3, 59);
  Ensemble e = make_ensemble(tb, 2, 700);
  ParserConfig config = small_config();
  config.epochs = 1;
  CHECK_THROWS_AS(
      distill_train(e, tb, 0.9, DistillMode::Exploration, config), UsageError);
  CHECK_THROWS_AS(distill_train(e, tb, 1.5, DistillMode::Oracle, config), UsageError);
}

TEST_CASE("distill_train produces a working parser in both modes") {
  Treebank tb = testutil::grammar_treebank(20, 60);
  ParserConfig member_config = small_config();
  member_config.epochs = 8;
  Ensemble e;
  for (int i = 0; i < 2; ++i) {
    ParserConfig cfg = member_config;
    cfg.seed = 1000 + i;
    e.members.push_back(std::make_shared<ParserModel>(train_parser(tb, cfg)));
  }
  ParserConfig student_config = small_config();
  student_config.epochs = 6;

  DistillStats stats;
  ParserModel oracle_student =
      distill_train(e, tb, 0.9, DistillMode::Oracle, student_config, &stats);
  CHECK(stats.best_dev_las > 50.0);

  ParserModel expl_student =
      distill_train(e, tb, 1.0, DistillMode::Exploration, student_config, &stats);
  CHECK(stats.best_dev_las > 50.0);
}

TEST_CASE("ensemble manifest round trip with checksums") {
  Treebank tb = testutil::grammar_treebank(4, 61);
  Ensemble e = make_ensemble(tb, 3, 800);
  std::vector<std::string> paths;
  for (size_t i = 0; i < e.members.size(); ++i) {
    paths.push_back("manifest_member" + std::to_string(i) + ".twpm");
    e.members[i]->save_file(paths.back());
  }
  Ensemble::write_manifest("test_ensemble.manifest", paths);
  Ensemble back = Ensemble::load_manifest("test_ensemble.manifest");
  CHECK(back.size() == 3);
  CHECK(back.members[0]->inventory().labels() == e.members[0]->inventory().labels());

  // corrupt one member: checksum must catch it
  std::string bytes = read_file(paths[1]);
  bytes[bytes.size() / 2] ^= 0x40;
  write_file(paths[1], bytes);
  CHECK_THROWS_AS(Ensemble::load_manifest("test_ensemble.manifest"), DataError);

  for (const std::string& p : paths) std::remove(p.c_str());
  std::remove("test_ensemble.manifest");
}
