#include "twparse/pipeline.h"

#include <algorithm>

#include "twparse/parallel.h"

namespace twparse {

Treebank run_pipeline(TokenizerModel& tokenizer, TaggerModel& tagger,
                      ParserModel* parser, Ensemble* ensemble,
                      const std::vector<std::string>& raws, int jobs, int* skipped) {
  std::vector<Sentence> sentences(raws.size());
  std::vector<char> keep(raws.size(), 0);
  parallel_for(raws.size(), jobs, [&](size_t i) {
    std::vector<DecodedToken> tokens = tokenizer.tokenize(raws[i]);
    if (tokens.empty()) return;
    Sentence s = tokens_to_sentence(raws[i], tokens);
    s = tagger.tag_tokens(s);
    if (ensemble)
      s = ensemble_parse(*ensemble, s);
    else
      s = parser->greedy_parse(s);
    sentences[i] = std::move(s);
    keep[i] = 1;
  });

  Treebank out;
  int skip_count = 0;
  for (size_t i = 0; i < raws.size(); ++i) {
    if (!keep[i]) {
      ++skip_count;
      continue;
    }
    Sentence& s = sentences[i];
    s.set_comment("sent_id", std::to_string(i + 1));
    // comment order in the output: sent_id first, then text
    std::rotate(s.comments.begin(), s.comments.end() - 1, s.comments.end());
    out.sentences.push_back(std::move(s));
  }
  if (skipped) *skipped = skip_count;
  return out;
}

}  // namespace twparse
