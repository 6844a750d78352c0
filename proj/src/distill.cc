#include "twparse/distill.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "twparse/optimizer.h"
#include "twparse/parallel.h"

namespace twparse {

namespace {

constexpr double kProbClamp = 1e-12;

std::string dirname_of(const std::string& path) {
  size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

// Member decoders advanced in lockstep over one sentence.
class EnsembleDecoder {
 public:
  EnsembleDecoder(Ensemble& e, const Sentence& s) {
    if (e.members.empty()) throw DataError("empty ensemble");
    for (auto& m : e.members) decs_.push_back(std::make_unique<ParserDecoder>(*m, s));
  }

  bool done() const { return decs_.front()->done(); }
  const ParserState& state() const { return decs_.front()->state(); }
  std::vector<int> valid() const { return decs_.front()->valid(); }

  std::vector<double> mean_probs() {
    std::vector<double> mean = decs_.front()->probs();
    for (size_t m = 1; m < decs_.size(); ++m) {
      std::vector<double> p = decs_[m]->probs();
      for (size_t i = 0; i < mean.size(); ++i) mean[i] += p[i];
    }
    double total = 0.0;
    for (double& x : mean) total += x;
    for (double& x : mean) x /= total;  // renormalize; a no-op up to rounding
    return mean;
  }

  void advance(const Action& a) {
    for (auto& d : decs_) d->advance(a);
  }

 private:
  std::vector<std::unique_ptr<ParserDecoder>> decs_;
};

Action sample_action(const ActionInventory& inv, const std::vector<int>& support,
                     const std::vector<double>& probs, Rng& rng) {
  double u = rng.uniform01();
  double acc = 0.0;
  for (size_t i = 0; i < support.size(); ++i) {
    acc += probs[i];
    if (u < acc) return inv.at(support[i]);
  }
  return inv.at(support.back());
}

}  // namespace

void Ensemble::check_compatible() const {
  if (members.empty()) throw DataError("empty ensemble");
  const ParserModel& first = *members.front();
  for (size_t i = 1; i < members.size(); ++i) {
    const ParserModel& m = *members[i];
    if (m.inventory().labels() != first.inventory().labels())
      throw DataError("ensemble member " + std::to_string(i) +
                      " has a different action inventory");
    if (!(m.params.vocab("words") == first.params.vocab("words")) ||
        !(m.params.vocab("chars") == first.params.vocab("chars")))
      throw DataError("ensemble member " + std::to_string(i) +
                      " has different vocabularies");
  }
}

Ensemble Ensemble::load_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open ensemble manifest: " + manifest_path);
  Ensemble e;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 2 || !starts_with(cols[1], "fnv64:"))
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": expected 'path<TAB>fnv64:<hex>'");
    std::string path = cols[0];
    std::ifstream probe(path, std::ios::binary);
    if (!probe) path = dirname_of(manifest_path) + "/" + cols[0];
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(path)));
    if (cols[1].substr(6) != hex)
      throw DataError("checksum mismatch for ensemble member " + cols[0]);
    e.members.push_back(std::make_shared<ParserModel>(ParserModel::load_file(path)));
  }
  e.check_compatible();
  return e;
}

void Ensemble::write_manifest(const std::string& manifest_path,
                              const std::vector<std::string>& member_paths) {
  std::string out;
  for (const std::string& p : member_paths) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(p)));
    out += p + "\tfnv64:" + hex + "\n";
  }
  write_file(manifest_path, out);
}

ActionDistribution ensemble_distribution(Ensemble& e, const ParserState& st,
                                         const Sentence& s) {
  if (st.terminal()) throw std::logic_error("ensemble_distribution on a terminal state");
  if (e.members.empty()) throw DataError("empty ensemble");
  EnsembleDecoder dec(e, s);
  for (const Action& a : st.history) dec.advance(a);
  ActionDistribution dist;
  dist.support = dec.valid();
  dist.prob = dec.mean_probs();
  return dist;
}

Sentence ensemble_parse(Ensemble& e, const Sentence& s) {
  EnsembleDecoder dec(e, s);
  while (!dec.done()) {
    std::vector<int> support = dec.valid();
    std::vector<double> p = dec.mean_probs();
    size_t best = 0;
    for (size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[best]) best = i;
    dec.advance(e.members.front()->inventory().at(support[best]));
  }
  return extract_tree(dec.state(), s);
}

Treebank ensemble_parse_treebank(Ensemble& e, const Treebank& tb, int jobs) {
  Treebank out = tb;
  parallel_for(out.sentences.size(), jobs, [&](size_t i) {
    out.sentences[i] = ensemble_parse(e, out.sentences[i]);
  });
  return out;
}

double distillation_loss(const ActionDistribution& q, const DistillationExample& ex,
                         double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw UsageError("distillation_loss: alpha must lie in [0, 1]");
  if (alpha < 1.0 && !ex.gold_action)
    throw UsageError("distillation_loss: alpha < 1 requires a gold action");
  if (q.support != ex.target.support)
    throw DataError("distillation_loss: q and target have different supports");

  double loss = 0.0;
  if (alpha > 0.0)
    for (size_t i = 0; i < q.support.size(); ++i)
      loss += alpha * (-ex.target.prob[i] * std::log(std::max(q.prob[i], kProbClamp)));
  if (alpha < 1.0) {
    int pos = -1;
    for (size_t i = 0; i < q.support.size(); ++i)
      if (q.support[i] == ex.gold_index) pos = static_cast<int>(i);
    if (pos < 0) throw DataError("distillation_loss: gold action outside the support");
    loss += (1.0 - alpha) * (-std::log(std::max(q.prob[pos], kProbClamp)));
  }
  return loss;
}

std::vector<DistillationExample> collect_oracle_states(Ensemble& e, const Treebank& tb,
                                                       int* skipped, int jobs) {
  e.check_compatible();
  std::vector<std::vector<DistillationExample>> per_sentence(tb.sentences.size());
  std::vector<char> ok(tb.sentences.size(), 0);
  parallel_for(tb.sentences.size(), jobs, [&](size_t i) {
    const Sentence& s = tb.sentences[i];
    std::vector<Action> actions;
    try {
      actions = oracle_sequence(s);
    } catch (const NonProjectiveError&) {
      return;
    }
    ok[i] = 1;
    const ActionInventory& inv = e.members.front()->inventory();
    EnsembleDecoder dec(e, s);
    for (const Action& a : actions) {
      DistillationExample ex;
      ex.state = dec.state();
      ex.sentence = s;
      ex.target.support = dec.valid();
      ex.target.prob = dec.mean_probs();
      ex.gold_action = a;
      ex.gold_index = inv.index_of(a);
      per_sentence[i].push_back(std::move(ex));
      dec.advance(a);
    }
  });
  std::vector<DistillationExample> out;
  int skip_count = 0;
  for (size_t i = 0; i < per_sentence.size(); ++i) {
    if (!ok[i]) ++skip_count;
    for (auto& ex : per_sentence[i]) out.push_back(std::move(ex));
  }
  if (skipped) *skipped = skip_count;
  return out;
}

std::vector<DistillationExample> collect_exploration_states(Ensemble& e,
                                                            const Treebank& tb,
                                                            uint64_t seed, int jobs) {
  e.check_compatible();
  const ActionInventory& inv = e.members.front()->inventory();
  std::vector<std::vector<DistillationExample>> per_sentence(tb.sentences.size());
  parallel_for(tb.sentences.size(), jobs, [&](size_t i) {
    const Sentence& s = tb.sentences[i];
    Rng rng(Rng::seed_mix(seed, i));
    EnsembleDecoder dec(e, s);
    while (!dec.done()) {
      DistillationExample ex;
      ex.state = dec.state();
      ex.sentence = s;
      ex.target.support = dec.valid();
      ex.target.prob = dec.mean_probs();
      Action a = sample_action(inv, ex.target.support, ex.target.prob, rng);
      per_sentence[i].push_back(std::move(ex));
      dec.advance(a);
    }
  });
  std::vector<DistillationExample> out;
  for (auto& v : per_sentence)
    for (auto& ex : v) out.push_back(std::move(ex));
  return out;
}

namespace {

// Per-sentence trajectory for the student: action indices plus the teacher
// distribution at every step.
struct Trajectory {
  const Sentence* sent = nullptr;
  std::vector<int> actions;
  std::vector<std::vector<int>> supports;
  std::vector<std::vector<double>> targets;
  std::vector<int> golds;  // -1 when absent
};

Trajectory roll_oracle(Ensemble& e, const Sentence& s, const std::vector<Action>& actions) {
  const ActionInventory& inv = e.members.front()->inventory();
  Trajectory t;
  t.sent = &s;
  EnsembleDecoder dec(e, s);
  for (const Action& a : actions) {
    int idx = inv.index_of(a);
    t.actions.push_back(idx);
    t.golds.push_back(idx);
    t.supports.push_back(dec.valid());
    t.targets.push_back(dec.mean_probs());
    dec.advance(a);
  }
  return t;
}

Trajectory roll_exploration(Ensemble& e, const Sentence& s, Rng rng) {
  const ActionInventory& inv = e.members.front()->inventory();
  Trajectory t;
  t.sent = &s;
  EnsembleDecoder dec(e, s);
  while (!dec.done()) {
    t.supports.push_back(dec.valid());
    t.targets.push_back(dec.mean_probs());
    Action a = sample_action(inv, t.supports.back(), t.targets.back(), rng);
    t.actions.push_back(inv.index_of(a));
    t.golds.push_back(-1);
    dec.advance(a);
  }
  return t;
}

double train_on_trajectory(ParserModel& student, const Trajectory& t, double alpha,
                           SgdTrainer& trainer, Rng& dropout_rng) {
  ParserDecoder dec(student, *t.sent, &dropout_rng);
  std::vector<Graph::NodeId> losses;
  losses.reserve(t.actions.size());
  for (size_t k = 0; k < t.actions.size(); ++k) {
    losses.push_back(dec.graph().distill_loss(dec.logits(), t.supports[k],
                                              t.targets[k], alpha, t.golds[k]));
    dec.advance_index(t.actions[k]);
  }
  if (losses.empty()) return 0.0;
  Graph::NodeId loss = dec.graph().sum(losses);
  double value = dec.graph().value(loss)[0];
  dec.graph().backward(loss);
  trainer.update();
  return value;
}

}  // namespace

ParserModel distill_train(Ensemble& e, const Treebank& tb, double alpha,
                          DistillMode mode, const ParserConfig& config,
                          DistillStats* stats, int jobs) {
  if (alpha < 0.0 || alpha > 1.0) throw UsageError("distill: alpha must lie in [0, 1]");
  if (mode == DistillMode::Exploration && alpha != 1.0)
    throw UsageError("distill: exploration mode requires alpha = 1.0");
  e.check_compatible();
  if (tb.sentences.empty()) throw DataError("distill: empty treebank");

  // student takes its vocabularies and inventory from the same treebank
  Treebank usable;
  int skipped = 0;
  if (mode == DistillMode::Oracle) {
    for (const Sentence& s : tb.sentences) {
      if (is_projective(s))
        usable.sentences.push_back(s);
      else
        ++skipped;
    }
    if (skipped > 0)
      std::cerr << "[distill] skipped " << skipped << " non-projective sentences\n";
    if (usable.sentences.empty()) throw DataError("distill: no projective sentences");
  } else {
    usable = tb;
  }

  Rng rng(config.seed);
  ParserModel student = ParserModel::create(usable, config, rng);
  if (student.inventory().labels() != e.members.front()->inventory().labels())
    throw DataError(
        "distill: treebank label inventory differs from the ensemble's; "
        "train the ensemble on the same data");
  SgdTrainer trainer(student.params, {config.lr, config.decay, config.clip});
  const Treebank& dev = config.dev ? *config.dev : usable;

  // oracle states are fixed, so their targets are computed once and reused
  std::vector<Trajectory> cached;
  if (mode == DistillMode::Oracle) {
    cached.resize(usable.sentences.size());
    parallel_for(usable.sentences.size(), jobs, [&](size_t i) {
      cached[i] = roll_oracle(e, usable.sentences[i], oracle_sequence(usable.sentences[i]));
    });
  }

  double best_las = -1.0;
  int best_epoch = -1;
  std::vector<Tensor> best;
  std::vector<size_t> order(usable.sentences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<Trajectory> fresh;
    if (mode == DistillMode::Exploration) {
      fresh.resize(usable.sentences.size());
      parallel_for(usable.sentences.size(), jobs, [&](size_t i) {
        uint64_t tag = Rng::seed_mix(static_cast<uint64_t>(epoch) + 1, i);
        fresh[i] = roll_exploration(e, usable.sentences[i],
                                    Rng(Rng::seed_mix(config.seed, tag)));
      });
    }
    const std::vector<Trajectory>& trajectories =
        mode == DistillMode::Oracle ? cached : fresh;

    rng.shuffle(order);
    double total_loss = 0.0;
    for (size_t idx : order)
      total_loss += train_on_trajectory(student, trajectories[idx], alpha, trainer, rng);

    Treebank parsed = parse_treebank(student, dev, jobs);
    double las = attachment_counts(dev, parsed).las();
    if (config.verbose)
      std::cerr << "[distill] epoch " << epoch + 1 << " loss " << total_loss
                << " dev LAS " << las << "\n";
    if (las > best_las) {
      best_las = las;
      best_epoch = epoch;
      best.clear();
      for (const Parameter* p : student.params.params()) best.push_back(p->value);
    }
    trainer.new_epoch();
  }
  if (!best.empty()) {
    size_t i = 0;
    for (Parameter* p : student.params.params()) p->value = best[i++];
  }
  if (stats) {
    stats->non_projective_skipped = skipped;
    stats->best_dev_las = best_las;
    stats->best_epoch = best_epoch;
  }
  return student;
}

}  // namespace twparse
