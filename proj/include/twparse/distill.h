#ifndef TWPARSE_DISTILL_H
#define TWPARSE_DISTILL_H

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twparse/parser.h"

namespace twparse {

// N independently trained parsers with identical inventories and
// vocabularies; inference averages their transition distributions.
struct Ensemble {
  std::vector<std::shared_ptr<ParserModel>> members;

  // Manifest: one "path<TAB>fnv64:<hex>" line per member.
  static Ensemble load_manifest(const std::string& manifest_path);
  static void write_manifest(const std::string& manifest_path,
                             const std::vector<std::string>& member_paths);

  void check_compatible() const;
  size_t size() const { return members.size(); }
};

// Arithmetic mean of the members' distributions at st, renormalized (shared
// support makes that a no-op up to rounding).
ActionDistribution ensemble_distribution(Ensemble& e, const ParserState& st,
                                         const Sentence& s);

Sentence ensemble_parse(Ensemble& e, const Sentence& s);
Treebank ensemble_parse_treebank(Ensemble& e, const Treebank& tb, int jobs = 1);

struct DistillationExample {
  ParserState state;
  Sentence sentence;
  ActionDistribution target;          // p(.|s) from the ensemble
  std::optional<Action> gold_action;  // absent off the oracle path
  int gold_index = -1;                // inventory index of gold_action
};

// Interpolated loss of the distilled model's distribution q against one
// example: alpha * sum_a -p(a|s) log q(a|s) + (1-alpha) * (-log q(gold|s)).
// q probabilities are clamped at 1e-12.
double distillation_loss(const ActionDistribution& q, const DistillationExample& ex,
                         double alpha);

// One example per oracle state, target from the ensemble, gold attached.
// Non-projective sentences are skipped (counted in *skipped when given).
std::vector<DistillationExample> collect_oracle_states(Ensemble& e, const Treebank& tb,
                                                       int* skipped = nullptr,
                                                       int jobs = 1);

// Trajectories sampled from the ensemble distribution itself; gold is absent,
// so these examples only train with alpha = 1. Deterministic in `seed`.
std::vector<DistillationExample> collect_exploration_states(Ensemble& e,
                                                            const Treebank& tb,
                                                            uint64_t seed,
                                                            int jobs = 1);

enum class DistillMode { Oracle, Exploration };

struct DistillStats {
  int non_projective_skipped = 0;
  double best_dev_las = 0.0;
  int best_epoch = -1;
};

// Trains one greedy parser against the ensemble's action distributions.
// Oracle mode walks gold transition sequences with targets precomputed once;
// exploration mode (requires alpha = 1) resamples trajectories from the
// ensemble every epoch.
ParserModel distill_train(Ensemble& e, const Treebank& tb, double alpha,
                          DistillMode mode, const ParserConfig& config,
                          DistillStats* stats = nullptr, int jobs = 1);

}  // namespace twparse

#endif
