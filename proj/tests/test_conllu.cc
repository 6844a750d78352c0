#include <doctest.h>

#include "testutil.h"
#include "twparse/conllu.h"
#include "twparse/transition.h"

using namespace twparse;

namespace {

const char* kTwoTokenSentence =
    "1\tHi\t_\tINTJ\t_\t_\t0\troot\t_\t_\n"
    "2\t!\t_\tPUNCT\t_\t_\t1\tpunct\t_\t_\n\n";

Sentence make_sentence(const std::vector<std::tuple<std::string, int, std::string>>& toks) {
  Sentence s;
  for (const auto& [form, head, rel] : toks) {
    Token t;
    t.id = static_cast<int>(s.tokens.size()) + 1;
    t.form = form;
    t.upos = "NOUN";
    t.head = head;
    t.deprel = rel;
    s.tokens.push_back(t);
  }
  return s;
}

}  // namespace

TEST_CASE("parse_conllu accepts a minimal well-formed sentence") {
  Treebank tb = parse_conllu(kTwoTokenSentence);
  REQUIRE(tb.sentences.size() == 1);
  const Sentence& s = tb.sentences[0];
  CHECK(s.tokens.size() == 2);
  CHECK(s.tokens[0].form == "Hi");
  CHECK(s.tokens[0].head == 0);
  CHECK(s.tokens[0].deprel == "root");
  CHECK(s.tokens[1].head == 1);
}

TEST_CASE("parse_conllu reports malformed input with line numbers") {
  SUBCASE("wrong column count") {
    try {
      parse_conllu("1\tHi\t_\n\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
      CHECK(std::string(e.what()).find("columns") != std::string::npos);
    }
  }
  SUBCASE("non-integer head") {
    try {
      parse_conllu("1\tHi\t_\tINTJ\t_\t_\tx\troot\t_\t_\n\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("non-integer head") != std::string::npos);
    }
  }
  SUBCASE("cycle names both ids") {
    const char* cyclic =
        "1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
        "2\tb\t_\tNOUN\t_\t_\t3\tdep\t_\t_\n"
        "3\tc\t_\tNOUN\t_\t_\t2\tdep\t_\t_\n\n";
    try {
      parse_conllu(cyclic);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      std::string msg = e.what();
      CHECK(msg.find("Cycle") != std::string::npos);
      CHECK(msg.find("2") != std::string::npos);
      CHECK(msg.find("3") != std::string::npos);
    }
  }
  SUBCASE("zero roots") {
    CHECK_THROWS_AS(parse_conllu("1\ta\t_\tNOUN\t_\t_\t1\tdep\t_\t_\n"
                                 "2\tb\t_\tNOUN\t_\t_\t1\tdep\t_\t_\n\n"),
                    DataError);
  }
  SUBCASE("multiple roots rejected by default") {
    const char* multi =
        "1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
        "2\tb\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n";
    CHECK_THROWS_AS(parse_conllu(multi), DataError);
    Treebank tb = parse_conllu(multi, {.allow_multi_root = true});
    CHECK(tb.sentences[0].tokens[1].head == 1);
    CHECK(tb.sentences[0].tokens[1].deprel == "parataxis");
  }
  SUBCASE("empty nodes rejected") {
    CHECK_THROWS_AS(parse_conllu("1.1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n"), DataError);
  }
}

TEST_CASE("unannotated sentences (tokenizer output) parse fine") {
  Treebank tb = parse_conllu(
      "1\thello\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "2\tworld\t_\t_\t_\t_\t_\t_\t_\t_\n\n");
  CHECK(tb.sentences[0].tokens[0].head == -1);
  CHECK_FALSE(tb.sentences[0].has_heads());
  CHECK(validate_sentence(tb.sentences[0]).empty());
}

TEST_CASE("multiword ranges round trip and validate") {
  const char* text =
      "# sent_id = 1\n"
      "# text = its gonna be\n"
      "1-2\tits\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tit\t_\tPRON\t_\t_\t3\tnsubj\t_\t_\n"
      "2\ts\t_\tAUX\t_\t_\t3\tcop\t_\t_\n"
      "3-4\tgonna\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "3\tgon\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
      "4\tna\t_\tPART\t_\t_\t3\tmark\t_\t_\n"
      "5\tbe\t_\tAUX\t_\t_\t3\tcop\t_\t_\n\n";
  Treebank tb = parse_conllu(text);
  REQUIRE(tb.sentences.size() == 1);
  CHECK(tb.sentences[0].ranges.size() == 2);
  CHECK(tb.sentences[0].ranges[0].surface_form == "its");
  CHECK(write_conllu(tb) == text);

  SUBCASE("surface mismatch is flagged") {
    Sentence bad = tb.sentences[0];
    bad.ranges[0].surface_form = "izz";
    bool found = false;
    for (const Violation& v : validate_sentence(bad))
      if (v.code == ViolationCode::RangeSurfaceMismatch) found = true;
    CHECK(found);
  }
}

TEST_CASE("write_conllu format rules") {
  CHECK(write_conllu(Treebank{}) == "");
  Treebank tb = parse_conllu(kTwoTokenSentence);
  std::string out = write_conllu(tb);
  CHECK(out == kTwoTokenSentence);  // trailing blank line after the block
  CHECK(out.back() == '\n');
}

TEST_CASE("parse-write identity on random valid treebanks") {
  Rng rng(11);
  std::vector<std::string> labels = {"det", "amod", "nsubj", "obj", "punct"};
  for (int trial = 0; trial < 25; ++trial) {
    Treebank tb = testutil::random_projective_treebank(8, 9, labels, rng);
    std::string text = write_conllu(tb);
    Treebank back = parse_conllu(text);
    CHECK(back == tb);
    CHECK(write_conllu(back) == text);
  }
}

TEST_CASE("every accepted tree is reachable from the root by DFS") {
  Rng rng(12);
  std::vector<std::string> labels = {"dep"};
  for (int trial = 0; trial < 20; ++trial) {
    Sentence s = testutil::random_projective_sentence(
        1 + static_cast<int>(rng.below(12)), labels, rng);
    Treebank back = parse_conllu(write_conllu(Treebank{{s}, "unsplit"}));
    const Sentence& p = back.sentences[0];
    size_t n = p.tokens.size();
    std::vector<std::vector<int>> children(n + 1);
    for (const Token& t : p.tokens) children[t.head].push_back(t.id);
    std::vector<int> stack = {0};
    size_t reached = 0;
    std::vector<bool> seen(n + 1, false);
    seen[0] = true;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int c : children[cur])
        if (!seen[c]) {
          seen[c] = true;
          ++reached;
          stack.push_back(c);
        }
    }
    CHECK(reached == n);
  }
}

TEST_CASE("validate_sentence reports the spec'd violations") {
  SUBCASE("well-formed is clean") {
    Sentence s = make_sentence({{"a", 0, "root"}, {"b", 1, "dep"}});
    CHECK(validate_sentence(s).empty());
  }
  SUBCASE("two roots") {
    Sentence s = make_sentence({{"a", 0, "root"}, {"b", 0, "root"}});
    auto v = validate_sentence(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == ViolationCode::MultipleRoots);
  }
  SUBCASE("head out of range") {
    Sentence s = make_sentence({{"a", 0, "root"}, {"b", 5, "dep"}, {"c", 1, "dep"}});
    bool found = false;
    for (const auto& v : validate_sentence(s))
      if (v.code == ViolationCode::HeadOutOfRange &&
          v.message.find("HeadOutOfRange(5)") != std::string::npos)
        found = true;
    CHECK(found);
  }
  SUBCASE("self loop") {
    Sentence s = make_sentence({{"a", 0, "root"}, {"b", 2, "dep"}});
    bool found = false;
    for (const auto& v : validate_sentence(s))
      if (v.code == ViolationCode::SelfHead) found = true;
    CHECK(found);
  }
  SUBCASE("bad upos") {
    Sentence s = make_sentence({{"a", 0, "root"}});
    s.tokens[0].upos = "NOUNS";
    bool found = false;
    for (const auto& v : validate_sentence(s))
      if (v.code == ViolationCode::InvalidUpos) found = true;
    CHECK(found);
  }
}

TEST_CASE("duplicate sent_ids are rejected") {
  std::string text;
  for (int i = 0; i < 2; ++i)
    text += "# sent_id = same\n1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n";
  CHECK_THROWS_AS(parse_conllu(text), DataError);
}

TEST_CASE("opaque columns pass through verbatim") {
  const char* text =
      "1\tcats\tcat\tNOUN\tNNS\tNumber=Plur\t0\troot\t0:root\tSpaceAfter=No\n\n";
  Treebank tb = parse_conllu(text);
  const Token& t = tb.sentences[0].tokens[0];
  CHECK(t.lemma == "cat");
  CHECK(t.xpos == "NNS");
  CHECK(t.feats == "Number=Plur");
  CHECK(t.deps == "0:root");
  CHECK(t.misc == "SpaceAfter=No");
  CHECK(write_conllu(tb) == text);
}
