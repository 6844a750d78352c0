#ifndef TWPARSE_TRANSITION_H
#define TWPARSE_TRANSITION_H

#include <string>
#include <vector>

#include "twparse/conllu.h"

namespace twparse {

enum class ActionKind { Shift, LeftArc, RightArc };

struct Action {
  ActionKind kind = ActionKind::Shift;
  std::string label;  // empty for Shift

  bool operator==(const Action&) const = default;

  static Action shift() { return {ActionKind::Shift, ""}; }
  static Action left(std::string l) { return {ActionKind::LeftArc, std::move(l)}; }
  static Action right(std::string l) { return {ActionKind::RightArc, std::move(l)}; }

  std::string to_string() const;
};

// Closed action set fixed at training time: SHIFT, LEFT_ARC(l) and
// RIGHT_ARC(l) for every non-root label, plus RIGHT_ARC(root) — the label
// "root" is reserved for the final attachment to the artificial root.
class ActionInventory {
 public:
  ActionInventory() = default;
  explicit ActionInventory(std::vector<std::string> labels);

  static ActionInventory from_treebank(const Treebank& tb);

  int size() const { return static_cast<int>(actions_.size()); }
  const Action& at(int i) const { return actions_[i]; }
  int index_of(const Action& a) const;

  // Non-root dependency labels, sorted.
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::vector<Action> actions_;
};

// Arc-standard configuration. The artificial root is node 0 and sits at the
// bottom of the stack; the buffer is always a suffix of [1..n].
struct ParserState {
  std::vector<int> stack;
  int buffer_next = 1;
  int n = 0;
  std::vector<int> head;            // indexed by dependent id, -1 = unattached
  std::vector<std::string> label;   // indexed by dependent id
  std::vector<Action> history;

  size_t buffer_size() const { return static_cast<size_t>(n - buffer_next + 1); }
  bool buffer_empty() const { return buffer_next > n; }
  bool terminal() const { return buffer_empty() && stack.size() == 1; }
  size_t arc_count() const;
  int stack_top() const { return stack.back(); }
  int stack_second() const { return stack[stack.size() - 2]; }
};

class NonProjectiveError : public DataError {
 public:
  NonProjectiveError(std::pair<int, int> arc1, std::pair<int, int> arc2);
  std::pair<int, int> arc1, arc2;  // (head, dependent) of the crossing pair
};

ParserState initial_state(const Sentence& s);

std::vector<Action> valid_actions(const ParserState& st, const ActionInventory& inv);

// Indices into the inventory of the valid actions, ascending; this is the
// support the scorers renormalize over, and the tie-break order.
std::vector<int> valid_action_indices(const ParserState& st, const ActionInventory& inv);

void apply_action_inplace(ParserState& st, const Action& a);
ParserState apply_action(const ParserState& st, const Action& a);

// Canonical oracle action sequence for a projective gold tree; throws
// NonProjectiveError otherwise.
std::vector<Action> oracle_sequence(const Sentence& s);

bool is_projective(const Sentence& s);

// Replays `actions` from the initial state of s.
ParserState replay(const Sentence& s, const std::vector<Action>& actions);

// Writes st's arcs into a copy of the template sentence.
Sentence extract_tree(const ParserState& st, const Sentence& tmpl);

}  // namespace twparse

#endif
