#include "testutil.h"

#include <algorithm>
#include <map>
#include <set>

#include "twparse/transition.h"

namespace twparse::testutil {

Sentence random_projective_sentence(int n, const std::vector<std::string>& labels,
                                    Rng& rng) {
  Sentence s;
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.id = i;
    t.form = "w" + std::to_string(i);
    t.upos = kUposTags[rng.below(kUposTags.size())];
    s.tokens.push_back(t);
  }
  ActionInventory inv{labels};
  ParserState st = initial_state(s);
  while (!st.terminal()) {
    std::vector<int> valid = valid_action_indices(st, inv);
    apply_action_inplace(st, inv.at(valid[rng.below(valid.size())]));
  }
  Sentence out = extract_tree(st, s);
  out.set_comment("sent_id", "r" + std::to_string(rng.next_u64() % 1000000000));
  return out;
}

Treebank random_projective_treebank(int sentences, int max_len,
                                    const std::vector<std::string>& labels, Rng& rng) {
  Treebank tb;
  for (int i = 0; i < sentences; ++i) {
    int n = 1 + static_cast<int>(rng.below(static_cast<size_t>(max_len)));
    Sentence s = random_projective_sentence(n, labels, rng);
    s.set_comment("sent_id", "s" + std::to_string(i + 1));
    tb.sentences.push_back(s);
  }
  return tb;
}

namespace {

const std::vector<std::string>& dets() {
  static const std::vector<std::string> v = {"the", "a", "this", "that"};
  return v;
}
const std::vector<std::string>& adjs() {
  static const std::vector<std::string> v = {"big",  "red",  "cool", "tiny",
                                             "fast", "lazy", "odd",  "neat"};
  return v;
}
const std::vector<std::string>& nouns() {
  static const std::vector<std::string> v = {"cat",  "dog",  "bird", "man",  "city",
                                             "mat",  "tree", "fish", "girl", "boy",
                                             "song", "game"};
  return v;
}
const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {"sees", "likes", "finds", "takes",
                                             "hits", "wants", "makes", "keeps"};
  return v;
}
const std::vector<std::string>& advs() {
  static const std::vector<std::string> v = {"quickly", "really", "often", "barely"};
  return v;
}
const std::vector<std::string>& preps() {
  static const std::vector<std::string> v = {"on", "in", "near", "under"};
  return v;
}

struct Growing {
  Sentence s;
  int add(const std::string& form, const std::string& upos, int head,
          const std::string& deprel) {
    Token t;
    t.id = static_cast<int>(s.tokens.size()) + 1;
    t.form = form;
    t.upos = upos;
    t.head = head;
    t.deprel = deprel;
    s.tokens.push_back(t);
    return t.id;
  }
};

// DET (ADJ){0,2} NOUN; returns the noun id.
int gen_np(Growing& g, Rng& rng) {
  int det_pos = g.add(dets()[rng.below(dets().size())], "DET", 0, "det");
  int n_adjs = static_cast<int>(rng.below(3));
  std::vector<int> adj_pos;
  for (int i = 0; i < n_adjs; ++i)
    adj_pos.push_back(g.add(adjs()[rng.below(adjs().size())], "ADJ", 0, "amod"));
  int noun = g.add(nouns()[rng.below(nouns().size())], "NOUN", 0, "nsubj");
  g.s.tokens[det_pos - 1].head = noun;
  for (int a : adj_pos) g.s.tokens[a - 1].head = noun;
  return noun;
}

}  // namespace

Treebank grammar_treebank(int sentences, uint64_t seed) {
  Rng rng(seed);
  Treebank tb;
  for (int i = 0; i < sentences; ++i) {
    Growing g;
    int subj = gen_np(g, rng);
    int verb = g.add(verbs()[rng.below(verbs().size())], "VERB", 0, "root");
    g.s.tokens[subj - 1].head = verb;
    g.s.tokens[subj - 1].deprel = "nsubj";
    int obj = gen_np(g, rng);
    g.s.tokens[obj - 1].head = verb;
    g.s.tokens[obj - 1].deprel = "obj";
    if (rng.uniform01() < 0.5) {
      int prep = g.add(preps()[rng.below(preps().size())], "ADP", 0, "case");
      int pobj = gen_np(g, rng);
      g.s.tokens[pobj - 1].deprel = rng.uniform01() < 0.5 ? "obl" : "nmod";
      // PP attachment is genuinely ambiguous: verb or object noun
      g.s.tokens[pobj - 1].head =
          g.s.tokens[pobj - 1].deprel == "obl" ? verb : obj;
      g.s.tokens[prep - 1].head = pobj;
    }
    if (rng.uniform01() < 0.4)
      g.add(advs()[rng.below(advs().size())], "ADV", verb, "advmod");
    if (rng.uniform01() < 0.8) g.add(".", "PUNCT", verb, "punct");

    std::string text;
    for (const Token& t : g.s.tokens) {
      if (!text.empty()) text += " ";
      text += t.form;
    }
    g.s.set_comment("sent_id", "g" + std::to_string(i + 1));
    g.s.set_comment("text", text);
    tb.sentences.push_back(g.s);
  }
  return tb;
}

Treebank with_label_noise(const Treebank& tb, double rate, uint64_t seed) {
  Rng rng(seed);
  std::set<std::string> label_set;
  for (const Sentence& s : tb.sentences)
    for (const Token& t : s.tokens)
      if (t.deprel != "root") label_set.insert(t.deprel);
  std::vector<std::string> labels(label_set.begin(), label_set.end());

  Treebank out = tb;
  for (Sentence& s : out.sentences) {
    for (Token& t : s.tokens) {
      if (t.deprel == "root" || rng.uniform01() >= rate) continue;
      std::string replacement = labels[rng.below(labels.size())];
      if (replacement != t.deprel) t.deprel = replacement;
    }
  }
  return out;
}

std::vector<std::pair<std::string, Sentence>> tokenizer_corpus(int n, uint64_t seed) {
  Rng rng(seed);
  // surface -> split parts, UD contraction style
  static const std::vector<std::pair<std::string, std::vector<std::string>>> splits = {
      {"gonna", {"gon", "na"}},   {"wanna", {"wan", "na"}},
      {"cant", {"ca", "nt"}},     {"dont", {"do", "nt"}},
      {"its", {"it", "s"}},       {"whats", {"what", "s"}},
      {"im", {"i", "m"}},         {"youre", {"you", "re"}}};

  std::vector<std::pair<std::string, Sentence>> out;
  for (int i = 0; i < n; ++i) {
    std::string raw;
    Sentence s;
    int words = 4 + static_cast<int>(rng.below(6));
    for (int w = 0; w < words; ++w) {
      if (!raw.empty()) raw += " ";
      double roll = rng.uniform01();
      if (roll < 0.25) {
        const auto& [surface, parts] = splits[rng.below(splits.size())];
        int start = static_cast<int>(s.tokens.size()) + 1;
        raw += surface;
        for (const std::string& p : parts) {
          Token t;
          t.id = static_cast<int>(s.tokens.size()) + 1;
          t.form = p;
          s.tokens.push_back(t);
        }
        MultiwordRange r;
        r.start = start;
        r.end = static_cast<int>(s.tokens.size());
        r.surface_form = surface;
        s.ranges.push_back(r);
      } else if (roll < 0.4) {
        std::string word = nouns()[rng.below(nouns().size())];
        raw += word + ",";
        Token t;
        t.id = static_cast<int>(s.tokens.size()) + 1;
        t.form = word;
        s.tokens.push_back(t);
        Token p;
        p.id = t.id + 1;
        p.form = ",";
        s.tokens.push_back(p);
      } else {
        const std::vector<std::string>& pool =
            roll < 0.6 ? verbs() : (roll < 0.8 ? nouns() : adjs());
        std::string word = pool[rng.below(pool.size())];
        raw += word;
        Token t;
        t.id = static_cast<int>(s.tokens.size()) + 1;
        t.form = word;
        s.tokens.push_back(t);
      }
    }
    s.set_comment("sent_id", "t" + std::to_string(i + 1));
    s.set_comment("text", raw);
    out.push_back({raw, s});
  }
  return out;
}

BruteF1 brute_span_f1(const std::vector<TokenSpan>& gold,
                      const std::vector<TokenSpan>& pred) {
  BruteF1 r;
  for (const TokenSpan& p : pred)
    for (const TokenSpan& g : gold)
      if (p.begin == g.begin && p.end == g.end) {
        ++r.correct;
        break;
      }
  r.precision = pred.empty() ? 0.0 : 100.0 * r.correct / pred.size();
  r.recall = gold.empty() ? 0.0 : 100.0 * r.correct / gold.size();
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

BruteF1 brute_tagged_span_f1(const std::vector<TokenSpan>& gold,
                             const std::vector<std::string>& gold_tags,
                             const std::vector<TokenSpan>& pred,
                             const std::vector<std::string>& pred_tags) {
  BruteF1 r;
  for (size_t i = 0; i < pred.size(); ++i)
    for (size_t j = 0; j < gold.size(); ++j)
      if (pred[i].begin == gold[j].begin && pred[i].end == gold[j].end &&
          pred_tags[i] == gold_tags[j]) {
        ++r.correct;
        break;
      }
  r.precision = pred.empty() ? 0.0 : 100.0 * r.correct / pred.size();
  r.recall = gold.empty() ? 0.0 : 100.0 * r.correct / gold.size();
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

void brute_attachment(const Sentence& gold, const Sentence& pred, long* head_ok,
                      long* both_ok) {
  for (size_t i = 0; i < gold.tokens.size(); ++i) {
    if (pred.tokens[i].head == gold.tokens[i].head) {
      ++*head_ok;
      if (pred.tokens[i].deprel == gold.tokens[i].deprel) ++*both_ok;
    }
  }
}

BruteF1 brute_pipeline_las(const Sentence& gold, const std::vector<TokenSpan>& gs,
                           const Sentence& pred, const std::vector<TokenSpan>& ps) {
  BruteF1 r;
  for (size_t i = 0; i < ps.size(); ++i) {
    for (size_t j = 0; j < gs.size(); ++j) {
      if (!(ps[i].begin == gs[j].begin && ps[i].end == gs[j].end)) continue;
      if (pred.tokens[i].deprel != gold.tokens[j].deprel) continue;
      int ph = pred.tokens[i].head;
      int gh = gold.tokens[j].head;
      bool head_match = false;
      if (ph == 0 && gh == 0) {
        head_match = true;
      } else if (ph > 0 && gh > 0 && ph <= static_cast<int>(ps.size()) &&
                 gh <= static_cast<int>(gs.size())) {
        head_match = ps[ph - 1].begin == gs[gh - 1].begin &&
                     ps[ph - 1].end == gs[gh - 1].end;
      }
      if (head_match) ++r.correct;
      break;
    }
  }
  r.precision = ps.empty() ? 0.0 : 100.0 * r.correct / ps.size();
  r.recall = gs.empty() ? 0.0 : 100.0 * r.correct / gs.size();
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

std::pair<std::string, Sentence> random_tokenization(Rng& rng) {
  int len = 3 + static_cast<int>(rng.below(20));
  std::string raw;
  for (int i = 0; i < len; ++i) {
    if (i > 0 && rng.uniform01() < 0.2)
      raw += ' ';
    else
      raw += static_cast<char>('a' + rng.below(5));
  }
  // segment every maximal non-space run at random internal points
  Sentence s;
  size_t pos = 0;
  while (pos < raw.size()) {
    if (raw[pos] == ' ') {
      ++pos;
      continue;
    }
    size_t end = pos;
    while (end < raw.size() && raw[end] != ' ') ++end;
    size_t at = pos;
    while (at < end) {
      size_t next = at + 1 + rng.below(end - at);
      Token t;
      t.id = static_cast<int>(s.tokens.size()) + 1;
      t.form = raw.substr(at, next - at);
      s.tokens.push_back(t);
      at = next;
    }
    pos = end;
  }
  s.set_comment("text", raw);
  return {raw, s};
}

}  // namespace twparse::testutil
