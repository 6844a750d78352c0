#ifndef TWPARSE_PIPELINE_H
#define TWPARSE_PIPELINE_H

#include <string>
#include <vector>

#include "twparse/distill.h"
#include "twparse/parser.h"
#include "twparse/tagger.h"
#include "twparse/tokenizer.h"

namespace twparse {

// Raw tweets (one per line) -> tokenize -> tag -> parse. Tweets that
// tokenize to nothing are dropped; *skipped counts them when given.
// `ensemble` replaces the single parser when non-null.
Treebank run_pipeline(TokenizerModel& tokenizer, TaggerModel& tagger,
                      ParserModel* parser, Ensemble* ensemble,
                      const std::vector<std::string>& raws, int jobs,
                      int* skipped = nullptr);

}  // namespace twparse

#endif
