#ifndef TWPARSE_TOKENIZER_H
#define TWPARSE_TOKENIZER_H

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twparse/align.h"
#include "twparse/conllu.h"
#include "twparse/graph.h"
#include "twparse/lstm.h"
#include "twparse/model.h"

namespace twparse {

// Per-character tag: token Begins here, Inside a token, or whitespace ($ in
// the usual notation). S is deterministic, the classifier only decides B/I.
enum class CharTag : uint8_t { B, I, S };

char char_tag_symbol(CharTag t);  // '1', '0', '$'

// Gold B/I/S tags for raw, derived by aligning the token forms of s.
std::vector<CharTag> derive_char_labels(const std::string& raw, const Sentence& s);

// Tokens recovered from a tag sequence; spans are codepoint offsets into raw.
struct DecodedToken {
  std::string form;
  TokenSpan span;
};
std::vector<DecodedToken> decode_tokens(const std::string& raw,
                                        const std::vector<CharTag>& tags);

// CoNLL-U sentence with only ID/FORM populated; consecutive tokens that came
// from one whitespace-delimited chunk get a multiword range line.
Sentence tokens_to_sentence(const std::string& raw,
                            const std::vector<DecodedToken>& tokens);

struct TokenizerConfig {
  int char_dim = 32;
  int hidden_dim = 64;  // per direction
  int char_min_count = 2;
  int epochs = 30;
  double lr = 0.1;
  double decay = 0.05;
  double clip = 5.0;
  double dropout = 0.0;
  uint64_t seed = 1;
  bool verbose = false;
  // held-out pairs for best-epoch selection; training pairs are reused when
  // absent (memorization-style runs)
  const std::vector<std::pair<std::string, Sentence>>* dev = nullptr;
};

// Character-level bi-LSTM sequence labeler over B/I with deterministic S.
class TokenizerModel {
 public:
  ModelParams params;

  static TokenizerModel create(const std::vector<std::string>& training_raws,
                               const TokenizerConfig& config, Rng& rng);
  static TokenizerModel load_file(const std::string& path);
  void save_file(const std::string& path) const;

  std::vector<CharTag> tag_characters(const std::string& raw);
  std::vector<DecodedToken> tokenize(const std::string& raw);

  // Summed B/I cross-entropy for one aligned pair; -1 if nothing to score.
  Graph::NodeId build_loss(Graph& g, const std::string& raw,
                           const std::vector<CharTag>& gold, Rng* dropout_rng);

  int hidden_dim() const { return hidden_; }

 private:
  void bind();
  std::vector<Graph::NodeId> encode(Graph& g, const std::vector<std::string>& chars,
                                    Rng* dropout_rng);

  int char_dim_ = 0;
  int hidden_ = 0;
  double dropout_ = 0.0;
  Parameter* char_emb_ = nullptr;
  LstmCell fwd_, bwd_;
  Parameter* out_w_ = nullptr;
  Parameter* out_b_ = nullptr;

  friend TokenizerModel train_tokenizer(
      const std::vector<std::pair<std::string, Sentence>>&, const TokenizerConfig&);
};

struct TokenizerTrainStats {
  int skipped_alignment = 0;
  double best_dev_f1 = 0.0;
  int best_epoch = -1;
};

TokenizerModel train_tokenizer(const std::vector<std::pair<std::string, Sentence>>& corpus,
                               const TokenizerConfig& config,
                               TokenizerTrainStats* stats);
TokenizerModel train_tokenizer(const std::vector<std::pair<std::string, Sentence>>& corpus,
                               const TokenizerConfig& config);

// Exact-span token F1 between two span sets (helper for dev selection).
double span_f1(const std::vector<TokenSpan>& gold, const std::vector<TokenSpan>& pred);

// Batch tokenization; jobs > 1 uses the OpenMP path, results are identical
// to the serial one.
std::vector<Sentence> tokenize_batch(TokenizerModel& model,
                                     const std::vector<std::string>& raws, int jobs);

}  // namespace twparse

#endif
