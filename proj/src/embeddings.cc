#include "twparse/embeddings.h"

#include <fstream>
#include <sstream>

#include "twparse/common.h"

namespace twparse {

PretrainedEmbeddings PretrainedEmbeddings::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);

  PretrainedEmbeddings emb;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> v;
    double x;
    while (ss >> x) v.push_back(x);
    if (v.empty()) continue;
    // some releases start with a "count dim" header line
    if (emb.dim == 0 && v.size() == 1 && rows.empty()) {
      int ignored;
      if (parse_uint(word, &ignored)) continue;
    }
    if (emb.dim == 0) emb.dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != emb.dim) continue;
    if (emb.words.contains(word)) continue;
    emb.words.add(word);
    rows.push_back(std::move(v));
  }
  emb.table = Tensor(static_cast<int>(rows.size()) + 1, emb.dim);
  for (size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < emb.dim; ++c) emb.table(static_cast<int>(r) + 1, c) = rows[r][c];
  return emb;
}

}  // namespace twparse
