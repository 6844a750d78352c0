// twparse: tweets in, Universal Dependencies out. Subcommands cover the
// whole pipeline (tokenize / tag / parse / pipeline), training for each
// stage, ensemble training and distillation, evaluation, and the treebank
// convention linter.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "twparse/distill.h"
#include "twparse/eval.h"
#include "twparse/lint.h"
#include "twparse/parallel.h"
#include "twparse/pipeline.h"

using namespace twparse;

namespace {

std::string resolve_model_path(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (probe) return path;
  const char* root = std::getenv("TWPARSE_MODEL_DIR");
  if (root && !path.empty() && path[0] != '/') {
    std::string candidate = std::string(root) + "/" + path;
    std::ifstream probe2(candidate, std::ios::binary);
    if (probe2) return candidate;
  }
  return path;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return read_file(path);
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  write_file(path, content);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_input(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<uint64_t> parse_seed_list(const std::string& s) {
  std::vector<uint64_t> seeds;
  for (const std::string& part : split(s, ','))
    if (!trim(part).empty()) seeds.push_back(std::stoull(trim(part)));
  return seeds;
}

// The resolved run configuration goes to stderr and into the output
// CoNLL-U as comments on the first sentence, for reproducibility.
struct RunLog {
  std::vector<std::pair<std::string, std::string>> kv;

  void add(const std::string& k, const std::string& v) { kv.push_back({k, v}); }
  void add(const std::string& k, uint64_t v) { add(k, std::to_string(v)); }
  void add(const std::string& k, double v) { add(k, std::to_string(v)); }

  void print() const {
    for (const auto& [k, v] : kv) std::cerr << "[config] " << k << " = " << v << "\n";
  }
  void embed(Treebank& tb) const {
    if (tb.sentences.empty()) return;
    std::vector<std::string> lines;
    for (const auto& [k, v] : kv) lines.push_back("# twparse." + k + " = " + v);
    auto& comments = tb.sentences.front().comments;
    comments.insert(comments.begin(), lines.begin(), lines.end());
  }
};

void print_report(const EvalReport& report, bool as_json) {
  if (as_json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << report.to_table() << "\n" << report.to_kv();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twparse: a Universal Dependencies pipeline for tweets"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for batch stages")
      ->capture_default_str();

  // ---- tokenize ----------------------------------------------------------
  auto* tokenize_cmd = app.add_subcommand("tokenize", "raw tweets to CoNLL-U tokens");
  std::string tok_model, tok_in = "-", tok_out = "-";
  tokenize_cmd->add_option("--model", tok_model, "tokenizer model")->required();
  tokenize_cmd->add_option("--input", tok_in, "tweet file, one per line, - for stdin");
  tokenize_cmd->add_option("--output", tok_out, "CoNLL-U output, - for stdout");

  // ---- tag ---------------------------------------------------------------
  auto* tag_cmd = app.add_subcommand("tag", "fill UPOS in a CoNLL-U file");
  std::string tag_model, tag_in = "-", tag_out = "-";
  tag_cmd->add_option("--model", tag_model, "tagger model")->required();
  tag_cmd->add_option("--input", tag_in, "CoNLL-U input");
  tag_cmd->add_option("--output", tag_out, "CoNLL-U output");

  // ---- parse -------------------------------------------------------------
  auto* parse_cmd = app.add_subcommand("parse", "fill heads/deprels in a CoNLL-U file");
  std::string parse_model, parse_ensemble, parse_in = "-", parse_out = "-";
  parse_cmd->add_option("--model", parse_model, "parser model");
  parse_cmd->add_option("--ensemble", parse_ensemble, "ensemble manifest");
  parse_cmd->add_option("--input", parse_in, "CoNLL-U input");
  parse_cmd->add_option("--output", parse_out, "CoNLL-U output");

  // ---- pipeline ----------------------------------------------------------
  auto* pipe_cmd = app.add_subcommand("pipeline", "tokenize + tag + parse raw tweets");
  std::string pipe_tok, pipe_tag, pipe_parse, pipe_ens, pipe_in = "-", pipe_out = "-";
  pipe_cmd->add_option("--tokenizer", pipe_tok, "tokenizer model")->required();
  pipe_cmd->add_option("--tagger", pipe_tag, "tagger model")->required();
  pipe_cmd->add_option("--parser", pipe_parse, "parser model");
  pipe_cmd->add_option("--ensemble", pipe_ens, "ensemble manifest");
  pipe_cmd->add_option("--input", pipe_in, "tweet file, one per line");
  pipe_cmd->add_option("--output", pipe_out, "CoNLL-U output");

  // ---- train-tokenizer ---------------------------------------------------
  auto* ttok_cmd = app.add_subcommand("train-tokenizer", "train the bi-LSTM tokenizer");
  std::string ttok_train, ttok_dev, ttok_out;
  TokenizerConfig ttok_config;
  ttok_cmd->add_option("--train", ttok_train, "gold CoNLL-U with text comments")->required();
  ttok_cmd->add_option("--dev", ttok_dev, "dev CoNLL-U for best-epoch selection");
  ttok_cmd->add_option("--out", ttok_out, "model output path")->required();
  ttok_cmd->add_option("--epochs", ttok_config.epochs)->capture_default_str();
  ttok_cmd->add_option("--char-dim", ttok_config.char_dim)->capture_default_str();
  ttok_cmd->add_option("--hidden-dim", ttok_config.hidden_dim)->capture_default_str();
  ttok_cmd->add_option("--lr", ttok_config.lr)->capture_default_str();
  ttok_cmd->add_option("--dropout", ttok_config.dropout)->capture_default_str();
  ttok_cmd->add_option("--seed", ttok_config.seed)->capture_default_str();
  ttok_cmd->add_flag("--verbose", ttok_config.verbose);

  // ---- train-tagger ------------------------------------------------------
  auto* ttag_cmd = app.add_subcommand("train-tagger", "train the UPOS tagger");
  std::string ttag_train, ttag_dev, ttag_out, ttag_emb;
  TaggerConfig ttag_config;
  ttag_cmd->add_option("--train", ttag_train)->required();
  ttag_cmd->add_option("--dev", ttag_dev);
  ttag_cmd->add_option("--out", ttag_out)->required();
  ttag_cmd->add_option("--embeddings", ttag_emb, "pretrained word vectors");
  ttag_cmd->add_option("--epochs", ttag_config.epochs)->capture_default_str();
  ttag_cmd->add_option("--word-dim", ttag_config.word_dim)->capture_default_str();
  ttag_cmd->add_option("--hidden-dim", ttag_config.hidden_dim)->capture_default_str();
  ttag_cmd->add_option("--word-cutoff", ttag_config.word_min_count)->capture_default_str();
  ttag_cmd->add_option("--lr", ttag_config.lr)->capture_default_str();
  ttag_cmd->add_option("--dropout", ttag_config.dropout)->capture_default_str();
  ttag_cmd->add_option("--seed", ttag_config.seed)->capture_default_str();
  ttag_cmd->add_flag("--verbose", ttag_config.verbose);

  // ---- train-parser ------------------------------------------------------
  auto* tpar_cmd = app.add_subcommand("train-parser", "train the greedy parser");
  std::string tpar_train, tpar_dev, tpar_out, tpar_emb, tpar_seeds;
  ParserConfig tpar_config;
  tpar_cmd->add_option("--train", tpar_train)->required();
  tpar_cmd->add_option("--dev", tpar_dev);
  tpar_cmd->add_option("--out", tpar_out)->required();
  tpar_cmd->add_option("--embeddings", tpar_emb, "pretrained word vectors");
  tpar_cmd->add_option("--seeds", tpar_seeds,
                       "comma list; trains one model per seed and reports the spread");
  tpar_cmd->add_option("--epochs", tpar_config.epochs)->capture_default_str();
  tpar_cmd->add_option("--word-dim", tpar_config.word_dim)->capture_default_str();
  tpar_cmd->add_option("--hidden-dim", tpar_config.hidden_dim)->capture_default_str();
  tpar_cmd->add_option("--word-cutoff", tpar_config.word_min_count)->capture_default_str();
  tpar_cmd->add_option("--lr", tpar_config.lr)->capture_default_str();
  tpar_cmd->add_option("--dropout", tpar_config.dropout)->capture_default_str();
  tpar_cmd->add_option("--seed", tpar_config.seed)->capture_default_str();
  tpar_cmd->add_flag("--verbose", tpar_config.verbose);

  // ---- train-ensemble ----------------------------------------------------
  auto* tens_cmd = app.add_subcommand("train-ensemble",
                                      "train N differently seeded parsers + manifest");
  std::string tens_train, tens_dev, tens_dir, tens_seeds, tens_emb;
  int tens_members = 20;
  ParserConfig tens_config;
  tens_cmd->add_option("--train", tens_train)->required();
  tens_cmd->add_option("--dev", tens_dev);
  tens_cmd->add_option("--out-dir", tens_dir, "directory for member models + manifest")
      ->required();
  tens_cmd->add_option("--members", tens_members, "ensemble size")->capture_default_str();
  tens_cmd->add_option("--seeds", tens_seeds, "comma list, defaults to 1..N");
  tens_cmd->add_option("--embeddings", tens_emb);
  tens_cmd->add_option("--epochs", tens_config.epochs)->capture_default_str();
  tens_cmd->add_option("--word-dim", tens_config.word_dim)->capture_default_str();
  tens_cmd->add_option("--hidden-dim", tens_config.hidden_dim)->capture_default_str();
  tens_cmd->add_option("--word-cutoff", tens_config.word_min_count)->capture_default_str();
  tens_cmd->add_option("--lr", tens_config.lr)->capture_default_str();
  tens_cmd->add_option("--dropout", tens_config.dropout)->capture_default_str();
  tens_cmd->add_flag("--verbose", tens_config.verbose);

  // ---- distill -----------------------------------------------------------
  auto* dist_cmd = app.add_subcommand("distill", "compress an ensemble into one parser");
  std::string dist_ens, dist_train, dist_dev, dist_out, dist_mode = "oracle", dist_emb;
  double dist_alpha = 1.0;
  ParserConfig dist_config;
  dist_cmd->add_option("--ensemble", dist_ens, "ensemble manifest")->required();
  dist_cmd->add_option("--train", dist_train)->required();
  dist_cmd->add_option("--dev", dist_dev);
  dist_cmd->add_option("--out", dist_out)->required();
  dist_cmd->add_option("--alpha", dist_alpha, "distillation interpolation weight")
      ->capture_default_str();
  dist_cmd->add_option("--mode", dist_mode, "oracle | exploration")->capture_default_str();
  dist_cmd->add_option("--embeddings", dist_emb);
  dist_cmd->add_option("--epochs", dist_config.epochs)->capture_default_str();
  dist_cmd->add_option("--word-dim", dist_config.word_dim)->capture_default_str();
  dist_cmd->add_option("--hidden-dim", dist_config.hidden_dim)->capture_default_str();
  dist_cmd->add_option("--word-cutoff", dist_config.word_min_count)->capture_default_str();
  dist_cmd->add_option("--lr", dist_config.lr)->capture_default_str();
  dist_cmd->add_option("--dropout", dist_config.dropout)->capture_default_str();
  dist_cmd->add_option("--seed", dist_config.seed)->capture_default_str();
  dist_cmd->add_flag("--verbose", dist_config.verbose);

  // ---- jackknife ---------------------------------------------------------
  auto* jack_cmd = app.add_subcommand("jackknife",
                                      "k-fold automatic tags for parser training");
  std::string jack_train, jack_out;
  int jack_k = 5;
  TaggerConfig jack_config;
  jack_cmd->add_option("--train", jack_train)->required();
  jack_cmd->add_option("--out", jack_out)->required();
  jack_cmd->add_option("--folds", jack_k)->capture_default_str();
  jack_cmd->add_option("--epochs", jack_config.epochs)->capture_default_str();
  jack_cmd->add_option("--seed", jack_config.seed)->capture_default_str();
  jack_cmd->add_flag("--verbose", jack_config.verbose);

  // ---- eval --------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  std::string eval_metric, eval_gold, eval_pred, eval_model, eval_ens, eval_input;
  bool eval_json = false, eval_spans = false;
  eval_cmd->add_option("--metric", eval_metric, "tok | pos | las | pipeline | speed")
      ->required();
  eval_cmd->add_option("--gold", eval_gold);
  eval_cmd->add_option("--pred", eval_pred);
  eval_cmd->add_option("--model", eval_model, "parser model (speed)");
  eval_cmd->add_option("--ensemble", eval_ens, "ensemble manifest (speed)");
  eval_cmd->add_option("--input", eval_input, "CoNLL-U input (speed)");
  eval_cmd->add_flag("--spans", eval_spans, "force span-aligned POS scoring");
  eval_cmd->add_flag("--json", eval_json);

  // ---- lint / stats / anonymize -----------------------------------------
  auto* lint_cmd = app.add_subcommand("lint", "check tweet annotation conventions");
  std::string lint_in, lint_allow;
  bool lint_multi_root = false;
  lint_cmd->add_option("--input", lint_in)->required();
  lint_cmd->add_option("--allowlist", lint_allow,
                       "file of known hits: sent_id<TAB>token<TAB>code");
  lint_cmd->add_flag("--allow-multi-root", lint_multi_root,
                     "rewrite extra roots as parataxis while ingesting");

  auto* stats_cmd = app.add_subcommand("stats", "non-syntactic token proportions");
  std::string stats_in;
  bool stats_multi_root = false;
  stats_cmd->add_option("--input", stats_in)->required();
  stats_cmd->add_flag("--allow-multi-root", stats_multi_root);

  auto* anon_cmd = app.add_subcommand("anonymize", "mask usernames and URLs");
  std::string anon_in = "-", anon_out = "-";
  anon_cmd->add_option("--input", anon_in);
  anon_cmd->add_option("--output", anon_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*tokenize_cmd) {
      TokenizerModel model = TokenizerModel::load_file(resolve_model_path(tok_model));
      std::vector<std::string> raws = read_lines(tok_in);
      std::vector<std::string> nonempty;
      for (const std::string& r : raws)
        if (!trim(r).empty()) nonempty.push_back(r);
      Treebank tb;
      std::vector<Sentence> sents = tokenize_batch(model, nonempty, jobs);
      for (size_t i = 0; i < sents.size(); ++i) {
        if (sents[i].tokens.empty()) continue;
        sents[i].set_comment("sent_id", std::to_string(i + 1));
        std::rotate(sents[i].comments.begin(), sents[i].comments.end() - 1,
                    sents[i].comments.end());
        tb.sentences.push_back(std::move(sents[i]));
      }
      RunLog log;
      log.add("cmd", "tokenize");
      log.add("model", tok_model);
      log.add("jobs", static_cast<uint64_t>(jobs));
      log.print();
      log.embed(tb);
      write_output(tok_out, write_conllu(tb));
    } else if (*tag_cmd) {
      TaggerModel model = TaggerModel::load_file(resolve_model_path(tag_model));
      Treebank tb = parse_conllu(read_input(tag_in));
      Treebank tagged = tag_treebank(model, tb, jobs);
      RunLog log;
      log.add("cmd", "tag");
      log.add("model", tag_model);
      log.print();
      log.embed(tagged);
      write_output(tag_out, write_conllu(tagged));
    } else if (*parse_cmd) {
      if (parse_model.empty() == parse_ensemble.empty())
        throw UsageError("parse: give exactly one of --model or --ensemble");
      Treebank tb = parse_conllu(read_input(parse_in));
      Treebank parsed;
      if (!parse_model.empty()) {
        ParserModel model = ParserModel::load_file(resolve_model_path(parse_model));
        parsed = parse_treebank(model, tb, jobs);
      } else {
        Ensemble e = Ensemble::load_manifest(resolve_model_path(parse_ensemble));
        parsed = ensemble_parse_treebank(e, tb, jobs);
      }
      RunLog log;
      log.add("cmd", "parse");
      log.add("model", parse_model.empty() ? parse_ensemble : parse_model);
      log.print();
      log.embed(parsed);
      write_output(parse_out, write_conllu(parsed));
    } else if (*pipe_cmd) {
      if (pipe_parse.empty() == pipe_ens.empty())
        throw UsageError("pipeline: give exactly one of --parser or --ensemble");
      TokenizerModel tok = TokenizerModel::load_file(resolve_model_path(pipe_tok));
      TaggerModel tag = TaggerModel::load_file(resolve_model_path(pipe_tag));
      std::optional<ParserModel> par;
      std::optional<Ensemble> ens;
      if (!pipe_parse.empty())
        par.emplace(ParserModel::load_file(resolve_model_path(pipe_parse)));
      else
        ens.emplace(Ensemble::load_manifest(resolve_model_path(pipe_ens)));
      std::vector<std::string> raws;
      for (const std::string& r : read_lines(pipe_in))
        if (!trim(r).empty()) raws.push_back(r);
      int skipped = 0;
      Treebank out = run_pipeline(tok, tag, par ? &*par : nullptr,
                                  ens ? &*ens : nullptr, raws, jobs, &skipped);
      if (skipped > 0)
        std::cerr << "[pipeline] dropped " << skipped << " tweets with no tokens\n";
      RunLog log;
      log.add("cmd", "pipeline");
      log.add("tokenizer", pipe_tok);
      log.add("tagger", pipe_tag);
      log.add("parser", pipe_parse.empty() ? pipe_ens : pipe_parse);
      log.add("jobs", static_cast<uint64_t>(jobs));
      log.print();
      log.embed(out);
      write_output(pipe_out, write_conllu(out));
    } else if (*ttok_cmd) {
      Treebank train = read_conllu_file(ttok_train);
      std::vector<std::pair<std::string, Sentence>> pairs;
      for (const Sentence& s : train.sentences)
        if (!s.text().empty()) pairs.push_back({s.text(), s});
      std::vector<std::pair<std::string, Sentence>> dev_pairs;
      if (!ttok_dev.empty()) {
        for (const Sentence& s : read_conllu_file(ttok_dev).sentences)
          if (!s.text().empty()) dev_pairs.push_back({s.text(), s});
        ttok_config.dev = &dev_pairs;
      }
      TokenizerTrainStats stats;
      TokenizerModel model = train_tokenizer(pairs, ttok_config, &stats);
      model.save_file(ttok_out);
      std::cerr << "[train-tokenizer] best dev F1 " << fixed1(stats.best_dev_f1 * 100.0)
                << " at epoch " << stats.best_epoch + 1 << "; saved " << ttok_out << "\n";
    } else if (*ttag_cmd) {
      Treebank train = read_conllu_file(ttag_train);
      Treebank dev;
      PretrainedEmbeddings emb;
      if (!ttag_emb.empty()) {
        emb = PretrainedEmbeddings::load(ttag_emb);
        ttag_config.pretrained = &emb;
      }
      if (!ttag_dev.empty()) {
        dev = read_conllu_file(ttag_dev);
        ttag_config.dev = &dev;
      }
      TaggerTrainStats stats;
      TaggerModel model = train_tagger(train, ttag_config, &stats);
      model.save_file(ttag_out);
      std::cerr << "[train-tagger] best dev accuracy "
                << fixed1(stats.best_dev_accuracy * 100.0) << " at epoch "
                << stats.best_epoch + 1 << "; saved " << ttag_out << "\n";
    } else if (*tpar_cmd) {
      Treebank train = read_conllu_file(tpar_train);
      Treebank dev;
      PretrainedEmbeddings emb;
      if (!tpar_emb.empty()) {
        emb = PretrainedEmbeddings::load(tpar_emb);
        tpar_config.pretrained = &emb;
      }
      if (!tpar_dev.empty()) {
        dev = read_conllu_file(tpar_dev);
        tpar_config.dev = &dev;
      }
      std::vector<uint64_t> seeds =
          tpar_seeds.empty() ? std::vector<uint64_t>{tpar_config.seed}
                             : parse_seed_list(tpar_seeds);
      std::vector<double> dev_las(seeds.size());
      double best = -1.0;
      for (size_t i = 0; i < seeds.size(); ++i) {
        ParserConfig cfg = tpar_config;
        cfg.seed = seeds[i];
        ParserTrainStats stats;
        ParserModel model = train_parser(train, cfg, &stats);
        dev_las[i] = stats.best_dev_las;
        std::string path =
            seeds.size() == 1 ? tpar_out : tpar_out + ".seed" + std::to_string(seeds[i]);
        model.save_file(path);
        std::cerr << "[train-parser] seed " << seeds[i] << " dev LAS "
                  << fixed1(stats.best_dev_las) << " -> " << path << "\n";
        if (stats.best_dev_las > best) {
          best = stats.best_dev_las;
          if (seeds.size() > 1) model.save_file(tpar_out);
        }
      }
      if (seeds.size() > 1) {
        double mn = dev_las[0], mx = dev_las[0], sum = 0.0;
        for (double v : dev_las) {
          mn = std::min(mn, v);
          mx = std::max(mx, v);
          sum += v;
        }
        std::cerr << "[train-parser] dev LAS over " << seeds.size() << " seeds: mean "
                  << fixed1(sum / dev_las.size()) << " min " << fixed1(mn) << " max "
                  << fixed1(mx) << " (spread " << fixed1(mx - mn) << ")\n";
      }
    } else if (*tens_cmd) {
      Treebank train = read_conllu_file(tens_train);
      Treebank dev;
      PretrainedEmbeddings emb;
      if (!tens_emb.empty()) {
        emb = PretrainedEmbeddings::load(tens_emb);
        tens_config.pretrained = &emb;
      }
      if (!tens_dev.empty()) {
        dev = read_conllu_file(tens_dev);
        tens_config.dev = &dev;
      }
      std::vector<uint64_t> seeds;
      if (!tens_seeds.empty()) {
        seeds = parse_seed_list(tens_seeds);
        if (static_cast<int>(seeds.size()) != tens_members)
          throw UsageError("train-ensemble: --seeds must list exactly --members seeds");
      } else {
        for (int i = 1; i <= tens_members; ++i) seeds.push_back(i);
      }
      std::vector<std::string> paths(seeds.size());
      parallel_for(seeds.size(), jobs, [&](size_t i) {
        ParserConfig cfg = tens_config;
        cfg.seed = seeds[i];
        ParserModel model = train_parser(train, cfg);
        paths[i] = tens_dir + "/member" + std::to_string(i + 1) + ".model";
        model.save_file(paths[i]);
      });
      std::string manifest = tens_dir + "/ensemble.manifest";
      Ensemble::write_manifest(manifest, paths);
      std::cerr << "[train-ensemble] wrote " << seeds.size() << " members and "
                << manifest << "\n";
    } else if (*dist_cmd) {
      if (dist_mode != "oracle" && dist_mode != "exploration")
        throw UsageError("distill: --mode must be oracle or exploration");
      DistillMode mode =
          dist_mode == "oracle" ? DistillMode::Oracle : DistillMode::Exploration;
      Ensemble e = Ensemble::load_manifest(resolve_model_path(dist_ens));
      Treebank train = read_conllu_file(dist_train);
      Treebank dev;
      PretrainedEmbeddings emb;
      if (!dist_emb.empty()) {
        emb = PretrainedEmbeddings::load(dist_emb);
        dist_config.pretrained = &emb;
      }
      if (!dist_dev.empty()) {
        dev = read_conllu_file(dist_dev);
        dist_config.dev = &dev;
      }
      DistillStats stats;
      ParserModel model = distill_train(e, train, dist_alpha, mode, dist_config,
                                        &stats, jobs);
      model.save_file(dist_out);
      std::cerr << "[distill] alpha " << dist_alpha << " mode " << dist_mode
                << " best dev LAS " << fixed1(stats.best_dev_las) << "; saved "
                << dist_out << "\n";
    } else if (*jack_cmd) {
      Treebank train = read_conllu_file(jack_train);
      Treebank tagged = jackknife_tags(train, jack_k, jack_config, jobs);
      write_file(jack_out, write_conllu(tagged));
      std::cerr << "[jackknife] " << jack_k << " folds over " << train.sentences.size()
                << " sentences -> " << jack_out << "\n";
    } else if (*eval_cmd) {
      if (eval_metric == "speed") {
        if (eval_input.empty())
          throw UsageError("eval --metric speed needs --input");
        if (eval_model.empty() == eval_ens.empty())
          throw UsageError("eval --metric speed needs exactly one of --model/--ensemble");
        Treebank tb = read_conllu_file(eval_input);
        EvalReport report;
        report.metric = "speed";
        if (!eval_model.empty()) {
          ParserModel model = ParserModel::load_file(resolve_model_path(eval_model));
          report.tokens_per_second = measure_throughput(
              [&] { parse_treebank(model, tb, 1); }, tb.token_count());
        } else {
          Ensemble e = Ensemble::load_manifest(resolve_model_path(eval_ens));
          report.tokens_per_second = measure_throughput(
              [&] { ensemble_parse_treebank(e, tb, 1); }, tb.token_count());
        }
        report.gold_count = report.pred_count = static_cast<long>(tb.token_count());
        print_report(report, eval_json);
      } else {
        if (eval_gold.empty() || eval_pred.empty())
          throw UsageError("eval needs --gold and --pred");
        Treebank gold = read_conllu_file(eval_gold);
        Treebank pred = read_conllu_file(eval_pred);
        EvalReport report;
        if (eval_metric == "tok") {
          report = token_span_f1(gold, pred);
        } else if (eval_metric == "pos") {
          bool counts_equal = gold.sentences.size() == pred.sentences.size();
          if (counts_equal)
            for (size_t i = 0; i < gold.sentences.size(); ++i)
              if (gold.sentences[i].tokens.size() != pred.sentences[i].tokens.size())
                counts_equal = false;
          report = (eval_spans || !counts_equal) ? tagging_span_f1(gold, pred)
                                                 : tagging_accuracy_report(gold, pred);
        } else if (eval_metric == "las") {
          report = attachment_scores(gold, pred);
        } else if (eval_metric == "pipeline") {
          report = pipeline_scores(gold, pred);
        } else {
          throw UsageError("eval: unknown metric '" + eval_metric + "'");
        }
        print_report(report, eval_json);
      }
    } else if (*lint_cmd) {
      Treebank tb = parse_conllu(read_input(lint_in), {lint_multi_root});
      std::set<std::string> allow;
      if (!lint_allow.empty())
        for (const std::string& line : split(read_file(lint_allow), '\n')) {
          std::vector<std::string> cols = split(trim(line), '\t');
          if (cols.size() >= 3) allow.insert(cols[0] + "\t" + cols[1] + "\t" + cols[2]);
        }
      int errors = 0;
      for (size_t i = 0; i < tb.sentences.size(); ++i) {
        const Sentence& s = tb.sentences[i];
        std::string id = s.sent_id().empty() ? std::to_string(i + 1) : s.sent_id();
        for (const LintHit& h : lint_sentence(s)) {
          std::string key = id + "\t" + std::to_string(h.token_id) + "\t" + h.rule->code;
          bool allowed = allow.count(key) > 0;
          std::cout << id << "\t" << h.token_id << "\t" << h.rule->code << "\t"
                    << h.message << (allowed ? "\t(allowlisted)" : "") << "\n";
          if (h.rule->severity == LintRule::Error && !allowed) ++errors;
        }
      }
      if (errors > 0) {
        std::cerr << "[lint] " << errors << " error-severity violations\n";
        return 3;
      }
    } else if (*stats_cmd) {
      Treebank tb = parse_conllu(read_input(stats_in), {stats_multi_root});
      std::cout << corpus_stats(tb).to_table();
    } else if (*anon_cmd) {
      std::vector<std::string> lines = read_lines(anon_in);
      std::string out;
      for (const std::string& line : lines) out += anonymize(line) + "\n";
      write_output(anon_out, out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
