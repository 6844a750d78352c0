#ifndef TWPARSE_EMBEDDINGS_H
#define TWPARSE_EMBEDDINGS_H

#include <string>

#include "twparse/tensor.h"
#include "twparse/vocab.h"

namespace twparse {

// Pretrained word vectors in the whitespace-separated text format
// ("word v1 v2 ... vd" per line). Row 0 (UNK) stays zero.
struct PretrainedEmbeddings {
  Vocab words;
  Tensor table;  // words.size() x dim
  int dim = 0;

  static PretrainedEmbeddings load(const std::string& path);
};

}  // namespace twparse

#endif
