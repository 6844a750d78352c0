#ifndef TWPARSE_MODEL_H
#define TWPARSE_MODEL_H

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "twparse/common.h"
#include "twparse/rng.h"
#include "twparse/tensor.h"
#include "twparse/vocab.h"

namespace twparse {

// Raised when an update sees a NaN/Inf gradient; names the offending tensor.
class NonFiniteGradient : public std::runtime_error {
 public:
  NonFiniteGradient(const std::string& tensor, const std::string& what)
      : std::runtime_error(what), tensor_name(tensor) {}
  std::string tensor_name;
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;
  bool lookup = false;

  // Rows written to since the last zero_grad; only meaningful for lookup
  // tables, where zeroing the whole gradient every step would dominate.
  std::vector<int> touched;
  std::vector<char> touched_flag;

  void mark_touched(int row) {
    if (!touched_flag[row]) {
      touched_flag[row] = 1;
      touched.push_back(row);
    }
  }
  void zero_grad();
};

// Named tensors, vocabularies, and hyperparameters of one model, with a
// versioned binary file format (JSON header + row-major float32 payload).
class ModelParams {
 public:
  static constexpr uint32_t kFormatVersion = 1;

  Parameter* add_param(const std::string& name, int rows, int cols);
  Parameter* add_lookup(const std::string& name, int rows, int cols);
  Parameter* get(const std::string& name);
  const Parameter* get(const std::string& name) const;
  bool has(const std::string& name) const;

  // Uniform in [-0.1, 0.1]: embedding tables.
  void init_embedding(Parameter* p, Rng& rng);
  // Fan-scaled uniform: weight matrices. Biases stay zero.
  void init_matrix(Parameter* p, Rng& rng);

  Vocab& vocab(const std::string& name);
  const Vocab& vocab(const std::string& name) const;
  bool has_vocab(const std::string& name) const;

  nlohmann::json& hyper() { return hyper_; }
  const nlohmann::json& hyper() const { return hyper_; }

  std::vector<Parameter*>& params() { return order_; }
  const std::vector<Parameter*>& params() const { return order_; }

  void zero_grads();

  // Rounds every value to its float32 representation, the precision models
  // have after a save/load cycle.
  void quantize_f32();

  void save(const std::string& path) const;
  void load(const std::string& path);

  bool same_tensors(const ModelParams& o) const;

 private:
  std::map<std::string, std::unique_ptr<Parameter>> by_name_;
  std::vector<Parameter*> order_;
  std::map<std::string, Vocab> vocabs_;
  std::vector<std::string> vocab_order_;
  nlohmann::json hyper_ = nlohmann::json::object();
};

}  // namespace twparse

#endif
