#include "twparse/transition.h"

#include <algorithm>
#include <map>
#include <set>

namespace twparse {

std::string Action::to_string() const {
  switch (kind) {
    case ActionKind::Shift: return "SHIFT";
    case ActionKind::LeftArc: return "LEFT_ARC(" + label + ")";
    case ActionKind::RightArc: return "RIGHT_ARC(" + label + ")";
  }
  return "?";
}

ActionInventory::ActionInventory(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  labels.erase(std::remove(labels.begin(), labels.end(), "root"), labels.end());
  labels_ = labels;
  actions_.push_back(Action::shift());
  for (const auto& l : labels_) actions_.push_back(Action::left(l));
  for (const auto& l : labels_) actions_.push_back(Action::right(l));
  actions_.push_back(Action::right("root"));
}

ActionInventory ActionInventory::from_treebank(const Treebank& tb) {
  std::vector<std::string> labels;
  for (const Sentence& s : tb.sentences)
    for (const Token& t : s.tokens)
      if (t.deprel != "_") labels.push_back(t.deprel);
  return ActionInventory(std::move(labels));
}

int ActionInventory::index_of(const Action& a) const {
  if (a.kind == ActionKind::Shift) return 0;
  if (a.kind == ActionKind::RightArc && a.label == "root")
    return static_cast<int>(actions_.size()) - 1;
  auto it = std::lower_bound(labels_.begin(), labels_.end(), a.label);
  if (it == labels_.end() || *it != a.label) return -1;
  int li = static_cast<int>(it - labels_.begin());
  int k = static_cast<int>(labels_.size());
  return a.kind == ActionKind::LeftArc ? 1 + li : 1 + k + li;
}

size_t ParserState::arc_count() const {
  size_t c = 0;
  for (size_t i = 1; i < head.size(); ++i)
    if (head[i] >= 0) ++c;
  return c;
}

NonProjectiveError::NonProjectiveError(std::pair<int, int> a1, std::pair<int, int> a2)
    : DataError("non-projective tree: arc (" + std::to_string(a1.first) + "->" +
                std::to_string(a1.second) + ") crosses arc (" +
                std::to_string(a2.first) + "->" + std::to_string(a2.second) + ")"),
      arc1(a1),
      arc2(a2) {}

ParserState initial_state(const Sentence& s) {
  if (s.tokens.empty()) throw DataError("cannot parse an empty sentence");
  ParserState st;
  st.n = static_cast<int>(s.tokens.size());
  st.stack.push_back(0);
  st.buffer_next = 1;
  st.head.assign(st.n + 1, -1);
  st.label.assign(st.n + 1, "");
  return st;
}

std::vector<int> valid_action_indices(const ParserState& st, const ActionInventory& inv) {
  if (st.terminal()) throw std::logic_error("valid_actions on a terminal state");
  std::vector<int> out;
  int k = static_cast<int>(inv.labels().size());
  if (!st.buffer_empty()) out.push_back(0);  // SHIFT
  if (st.stack.size() >= 2) {
    int second = st.stack_second();
    if (second != 0) {
      for (int i = 0; i < k; ++i) out.push_back(1 + i);       // LEFT_ARC(l)
      for (int i = 0; i < k; ++i) out.push_back(1 + k + i);   // RIGHT_ARC(l)
    } else if (st.buffer_empty() && st.stack.size() == 2) {
      out.push_back(1 + 2 * k);  // RIGHT_ARC(root)
    }
  }
  return out;
}

std::vector<Action> valid_actions(const ParserState& st, const ActionInventory& inv) {
  std::vector<Action> out;
  for (int i : valid_action_indices(st, inv)) out.push_back(inv.at(i));
  return out;
}

void apply_action_inplace(ParserState& st, const Action& a) {
  switch (a.kind) {
    case ActionKind::Shift:
      if (st.buffer_empty()) throw std::logic_error("SHIFT on an empty buffer");
      st.stack.push_back(st.buffer_next++);
      break;
    case ActionKind::LeftArc: {
      if (st.stack.size() < 2 || st.stack_second() == 0)
        throw std::logic_error("illegal LEFT_ARC");
      int top = st.stack_top();
      int second = st.stack_second();
      st.head[second] = top;
      st.label[second] = a.label;
      st.stack.erase(st.stack.end() - 2);
      break;
    }
    case ActionKind::RightArc: {
      if (st.stack.size() < 2) throw std::logic_error("illegal RIGHT_ARC");
      int top = st.stack_top();
      int second = st.stack_second();
      if (second == 0 && !(st.buffer_empty() && st.stack.size() == 2 && a.label == "root"))
        throw std::logic_error("illegal RIGHT_ARC into the artificial root");
      st.head[top] = second;
      st.label[top] = a.label;
      st.stack.pop_back();
      break;
    }
  }
  st.history.push_back(a);
}

ParserState apply_action(const ParserState& st, const Action& a) {
  ParserState next = st;
  apply_action_inplace(next, a);
  return next;
}

namespace {

// First crossing gold arc pair, or {(-1,..)} if projective.
bool find_crossing(const Sentence& s, std::pair<int, int>* a1, std::pair<int, int>* a2) {
  std::vector<std::pair<int, int>> arcs;
  for (const Token& t : s.tokens)
    if (t.head >= 0) arcs.push_back({t.head, t.id});
  for (size_t i = 0; i < arcs.size(); ++i) {
    int lo1 = std::min(arcs[i].first, arcs[i].second);
    int hi1 = std::max(arcs[i].first, arcs[i].second);
    for (size_t j = i + 1; j < arcs.size(); ++j) {
      int lo2 = std::min(arcs[j].first, arcs[j].second);
      int hi2 = std::max(arcs[j].first, arcs[j].second);
      if ((lo1 < lo2 && lo2 < hi1 && hi1 < hi2) ||
          (lo2 < lo1 && lo1 < hi2 && hi2 < hi1)) {
        *a1 = arcs[i];
        *a2 = arcs[j];
        return true;
      }
    }
  }
  return false;
}

}  // namespace

bool is_projective(const Sentence& s) {
  std::pair<int, int> a1, a2;
  return !find_crossing(s, &a1, &a2);
}

std::vector<Action> oracle_sequence(const Sentence& s) {
  int n = static_cast<int>(s.tokens.size());
  std::vector<int> gold_head(n + 1, -1);
  std::vector<std::string> gold_label(n + 1);
  std::vector<int> pending_deps(n + 1, 0);
  for (const Token& t : s.tokens) {
    gold_head[t.id] = t.head;
    gold_label[t.id] = t.deprel;
    if (t.head > 0) ++pending_deps[t.head];
  }

  ParserState st = initial_state(s);
  std::vector<Action> out;
  while (!st.terminal()) {
    Action a;
    bool found = false;
    if (st.stack.size() >= 2) {
      int top = st.stack_top();
      int second = st.stack_second();
      if (second != 0 && gold_head[second] == top) {
        a = Action::left(gold_label[second]);
        --pending_deps[top];
        found = true;
      } else if (gold_head[top] == second && pending_deps[top] == 0) {
        a = Action::right(second == 0 ? "root" : gold_label[top]);
        if (second > 0) --pending_deps[second];
        found = true;
      }
    }
    if (!found) {
      if (st.buffer_empty()) {
        std::pair<int, int> a1, a2;
        if (find_crossing(s, &a1, &a2)) throw NonProjectiveError(a1, a2);
        throw DataError("oracle stuck on a sentence that is not a valid tree");
      }
      a = Action::shift();
    }
    apply_action_inplace(st, a);
    out.push_back(a);
  }
  return out;
}

ParserState replay(const Sentence& s, const std::vector<Action>& actions) {
  ParserState st = initial_state(s);
  for (const Action& a : actions) apply_action_inplace(st, a);
  return st;
}

Sentence extract_tree(const ParserState& st, const Sentence& tmpl) {
  if (!st.terminal()) throw std::logic_error("extract_tree on a non-terminal state");
  if (st.n != static_cast<int>(tmpl.tokens.size()))
    throw std::logic_error("extract_tree: sentence length mismatch");
  Sentence out = tmpl;
  for (Token& t : out.tokens) {
    t.head = st.head[t.id];
    t.deprel = st.label[t.id];
  }
  return out;
}

}  // namespace twparse
