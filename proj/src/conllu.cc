#include "twparse/conllu.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "twparse/utf8.h"

namespace twparse {

const std::vector<std::string> kUposTags = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

bool is_universal_upos(const std::string& tag) {
  return std::find(kUposTags.begin(), kUposTags.end(), tag) != kUposTags.end();
}

const char* violation_code_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::MalformedLine: return "MalformedLine";
    case ViolationCode::NonContiguousIds: return "NonContiguousIds";
    case ViolationCode::SelfHead: return "SelfHead";
    case ViolationCode::HeadOutOfRange: return "HeadOutOfRange";
    case ViolationCode::InvalidUpos: return "InvalidUpos";
    case ViolationCode::MissingHead: return "MissingHead";
    case ViolationCode::ZeroRoots: return "ZeroRoots";
    case ViolationCode::MultipleRoots: return "MultipleRoots";
    case ViolationCode::RootDeprel: return "RootDeprel";
    case ViolationCode::Cycle: return "Cycle";
    case ViolationCode::BadRange: return "BadRange";
    case ViolationCode::RangeSurfaceMismatch: return "RangeSurfaceMismatch";
    case ViolationCode::TextMismatch: return "TextMismatch";
  }
  return "Unknown";
}

std::string Sentence::comment_value(const std::string& key) const {
  const std::string prefix = "# " + key + " = ";
  for (const auto& c : comments) {
    if (starts_with(c, prefix)) return c.substr(prefix.size());
  }
  return "";
}

std::string Sentence::sent_id() const { return comment_value("sent_id"); }
std::string Sentence::text() const { return comment_value("text"); }

void Sentence::set_comment(const std::string& key, const std::string& value) {
  const std::string prefix = "# " + key + " = ";
  for (auto& c : comments) {
    if (starts_with(c, prefix)) {
      c = prefix + value;
      return;
    }
  }
  comments.push_back(prefix + value);
}

bool Sentence::has_heads() const {
  for (const auto& t : tokens)
    if (t.head >= 0) return true;
  return false;
}

std::string Sentence::surface_concat() const {
  std::string out;
  size_t r = 0;
  for (size_t i = 0; i < tokens.size();) {
    while (r < ranges.size() && ranges[r].end < tokens[i].id) ++r;
    if (r < ranges.size() && ranges[r].start == tokens[i].id) {
      out += ranges[r].surface_form;
      i += static_cast<size_t>(ranges[r].end - ranges[r].start + 1);
      ++r;
    } else {
      out += tokens[i].form;
      ++i;
    }
  }
  return out;
}

size_t Treebank::token_count() const {
  size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

namespace {

std::string strip_ws(const std::string& s) {
  std::string out;
  for (const auto& ch : utf8_chars(s))
    if (!is_space_char(ch)) out += ch;
  return out;
}

std::string lower_nows(const std::string& s) {
  std::string out;
  for (const auto& ch : utf8_chars(s))
    if (!is_space_char(ch)) out += utf8_lower(ch);
  return out;
}

// Returns the ids on a head cycle, empty if the head graph is a tree.
std::vector<int> find_cycle(const Sentence& s) {
  int n = static_cast<int>(s.tokens.size());
  std::vector<int> color(n + 1, 0);  // 0 unvisited, 1 on path, 2 done
  for (int start = 1; start <= n; ++start) {
    if (color[start]) continue;
    std::vector<int> path;
    int cur = start;
    while (cur >= 1 && cur <= n && color[cur] == 0) {
      color[cur] = 1;
      path.push_back(cur);
      cur = s.tokens[cur - 1].head;
    }
    if (cur >= 1 && cur <= n && color[cur] == 1) {
      std::vector<int> cycle;
      bool in = false;
      for (int id : path) {
        if (id == cur) in = true;
        if (in) cycle.push_back(id);
      }
      return cycle;
    }
    for (int id : path) color[id] = 2;
  }
  return {};
}

}  // namespace

std::vector<Violation> validate_sentence(const Sentence& s) {
  std::vector<Violation> out;
  int n = static_cast<int>(s.tokens.size());

  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.id != i + 1) {
      out.push_back({ViolationCode::NonContiguousIds, t.id,
                     "token id " + std::to_string(t.id) + " at position " +
                         std::to_string(i + 1)});
    }
    if (t.upos != "_" && !is_universal_upos(t.upos)) {
      out.push_back({ViolationCode::InvalidUpos, t.id,
                     "UPOS '" + t.upos + "' is not a universal tag"});
    }
    if (t.head == t.id && t.head > 0) {
      out.push_back({ViolationCode::SelfHead, t.id,
                     "token " + std::to_string(t.id) + " is its own head"});
    }
    if (t.head > n) {
      out.push_back({ViolationCode::HeadOutOfRange, t.id,
                     "HeadOutOfRange(" + std::to_string(t.head) + ") in a " +
                         std::to_string(n) + "-token sentence"});
    }
  }

  if (s.has_heads()) {
    std::vector<int> roots;
    for (const Token& t : s.tokens) {
      if (t.head < 0) {
        out.push_back({ViolationCode::MissingHead, t.id,
                       "token " + std::to_string(t.id) +
                           " has no head in a partially annotated sentence"});
      } else if (t.head == 0) {
        roots.push_back(t.id);
        if (t.deprel != "root") {
          out.push_back({ViolationCode::RootDeprel, t.id,
                         "head 0 token " + std::to_string(t.id) +
                             " has deprel '" + t.deprel + "', expected 'root'"});
        }
      }
    }
    if (roots.empty()) {
      out.push_back({ViolationCode::ZeroRoots, 0, "no token has head 0"});
    } else if (roots.size() > 1) {
      for (size_t i = 1; i < roots.size(); ++i) {
        out.push_back({ViolationCode::MultipleRoots, roots[i],
                       "extra root at token " + std::to_string(roots[i])});
      }
    }
    bool heads_in_range = true;
    for (const Token& t : s.tokens)
      if (t.head < 0 || t.head > n || (t.head == t.id)) heads_in_range = false;
    if (heads_in_range) {
      std::vector<int> cyc = find_cycle(s);
      if (!cyc.empty()) {
        std::string ids;
        for (size_t i = 0; i < cyc.size(); ++i) {
          if (i) ids += ", ";
          ids += std::to_string(cyc[i]);
        }
        out.push_back({ViolationCode::Cycle, cyc[0],
                       "cycle detected involving tokens " + ids});
      }
    }
  }

  int prev_end = 0;
  for (const MultiwordRange& r : s.ranges) {
    if (r.start >= r.end || r.start <= prev_end || r.end > n) {
      out.push_back({ViolationCode::BadRange, r.start,
                     "bad range " + std::to_string(r.start) + "-" +
                         std::to_string(r.end)});
      continue;
    }
    prev_end = r.end;
    std::string concat;
    for (int id = r.start; id <= r.end; ++id) concat += s.tokens[id - 1].form;
    if (strip_ws(concat) != strip_ws(r.surface_form) &&
        lower_nows(concat) != lower_nows(r.surface_form)) {
      out.push_back({ViolationCode::RangeSurfaceMismatch, r.start,
                     "range surface '" + r.surface_form +
                         "' does not spell out its tokens"});
    }
  }

  std::string text = s.text();
  if (!text.empty()) {
    if (strip_ws(text) != strip_ws(s.surface_concat()) &&
        lower_nows(text) != lower_nows(s.surface_concat())) {
      out.push_back({ViolationCode::TextMismatch, 0,
                     "text comment does not match token forms"});
    }
  }

  return out;
}

namespace {

struct PendingSentence {
  Sentence s;
  int first_line = 0;
};

void finalize_sentence(PendingSentence& pending, Treebank& tb,
                       const ConlluOptions& opts) {
  Sentence& s = pending.s;
  if (s.tokens.empty()) {
    throw DataError("line " + std::to_string(pending.first_line) +
                    ": sentence block with no token lines");
  }
  std::vector<Violation> violations = validate_sentence(s);
  if (opts.allow_multi_root &&
      std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
        return v.code == ViolationCode::MultipleRoots;
      })) {
    int first_root = 0;
    for (Token& t : s.tokens) {
      if (t.head == 0) {
        if (first_root == 0) {
          first_root = t.id;
        } else {
          t.head = first_root;
          t.deprel = "parataxis";
        }
      }
    }
    violations = validate_sentence(s);
  }
  if (!violations.empty()) {
    std::string msg = "line " + std::to_string(pending.first_line) +
                      ": invalid sentence";
    if (!s.sent_id().empty()) msg += " (sent_id " + s.sent_id() + ")";
    for (const Violation& v : violations)
      msg += "; " + std::string(violation_code_name(v.code)) + ": " + v.message;
    throw DataError(msg);
  }
  tb.sentences.push_back(std::move(s));
  pending = PendingSentence{};
}

}  // namespace

Treebank parse_conllu(const std::string& text, const ConlluOptions& opts) {
  Treebank tb;
  PendingSentence pending;
  bool in_sentence = false;

  int line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in_sentence) {
        finalize_sentence(pending, tb, opts);
        in_sentence = false;
      }
      continue;
    }
    if (!in_sentence) {
      pending.first_line = line_no;
      in_sentence = true;
    }
    if (line[0] == '#') {
      pending.s.comments.push_back(line);
      continue;
    }
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 10) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected 10 tab-separated columns, got " +
                      std::to_string(cols.size()));
    }
    const std::string& id_col = cols[0];
    size_t dash = id_col.find('-');
    if (id_col.find('.') != std::string::npos) {
      throw DataError("line " + std::to_string(line_no) +
                      ": empty nodes ('" + id_col + "') are not supported");
    }
    if (dash != std::string::npos) {
      MultiwordRange r;
      if (!parse_uint(id_col.substr(0, dash), &r.start) ||
          !parse_uint(id_col.substr(dash + 1), &r.end) || r.start >= r.end) {
        throw DataError("line " + std::to_string(line_no) +
                        ": malformed range id '" + id_col + "'");
      }
      r.surface_form = cols[1];
      r.misc = cols[9];
      pending.s.ranges.push_back(r);
      continue;
    }
    Token t;
    if (!parse_uint(id_col, &t.id) || t.id <= 0) {
      throw DataError("line " + std::to_string(line_no) + ": bad token id '" +
                      id_col + "'");
    }
    t.form = cols[1];
    t.lemma = cols[2];
    t.upos = cols[3];
    t.xpos = cols[4];
    t.feats = cols[5];
    if (cols[6] == "_") {
      t.head = -1;
    } else if (!parse_uint(cols[6], &t.head)) {
      throw DataError("line " + std::to_string(line_no) +
                      ": non-integer head '" + cols[6] + "'");
    }
    t.deprel = cols[7];
    t.deps = cols[8];
    t.misc = cols[9];
    pending.s.tokens.push_back(std::move(t));
  }
  if (in_sentence) finalize_sentence(pending, tb, opts);

  std::set<std::string> seen_ids;
  for (const Sentence& s : tb.sentences) {
    std::string id = s.sent_id();
    if (id.empty()) continue;
    if (!seen_ids.insert(id).second) {
      throw DataError("duplicate sent_id '" + id + "'");
    }
  }
  return tb;
}

Treebank read_conllu_file(const std::string& path, const ConlluOptions& opts) {
  return parse_conllu(read_file(path), opts);
}

std::string write_sentence(const Sentence& s) {
  std::string out;
  for (const auto& c : s.comments) {
    out += c;
    out += '\n';
  }
  size_t r = 0;
  for (const Token& t : s.tokens) {
    while (r < s.ranges.size() && s.ranges[r].end < t.id) ++r;
    if (r < s.ranges.size() && s.ranges[r].start == t.id) {
      const MultiwordRange& mr = s.ranges[r];
      out += std::to_string(mr.start) + "-" + std::to_string(mr.end) + "\t" +
             mr.surface_form + "\t_\t_\t_\t_\t_\t_\t_\t" + mr.misc + "\n";
      ++r;
    }
    out += std::to_string(t.id);
    out += '\t';
    out += t.form;
    out += '\t';
    out += t.lemma;
    out += '\t';
    out += t.upos;
    out += '\t';
    out += t.xpos;
    out += '\t';
    out += t.feats;
    out += '\t';
    out += (t.head < 0 ? "_" : std::to_string(t.head));
    out += '\t';
    out += t.deprel;
    out += '\t';
    out += t.deps;
    out += '\t';
    out += t.misc;
    out += '\n';
  }
  out += '\n';
  return out;
}

std::string write_conllu(const Treebank& tb) {
  std::string out;
  for (const Sentence& s : tb.sentences) out += write_sentence(s);
  return out;
}

void write_conllu_file(const std::string& path, const Treebank& tb) {
  write_file(path, write_conllu(tb));
}

}  // namespace twparse
