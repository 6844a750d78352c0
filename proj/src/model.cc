#include "twparse/model.h"

#include <cstring>
#include <fstream>

namespace twparse {

void Parameter::zero_grad() {
  if (lookup) {
    for (int r : touched) {
      double* row = &grad.v[static_cast<size_t>(r) * grad.cols];
      std::fill(row, row + grad.cols, 0.0);
      touched_flag[r] = 0;
    }
    touched.clear();
  } else {
    grad.fill(0.0);
  }
}

Parameter* ModelParams::add_param(const std::string& name, int rows, int cols) {
  if (by_name_.count(name)) throw std::logic_error("duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Tensor(rows, cols);
  p->grad = Tensor(rows, cols);
  Parameter* raw = p.get();
  by_name_.emplace(name, std::move(p));
  order_.push_back(raw);
  return raw;
}

Parameter* ModelParams::add_lookup(const std::string& name, int rows, int cols) {
  Parameter* p = add_param(name, rows, cols);
  p->lookup = true;
  p->touched_flag.assign(rows, 0);
  return p;
}

Parameter* ModelParams::get(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::logic_error("no parameter named " + name);
  return it->second.get();
}

const Parameter* ModelParams::get(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::logic_error("no parameter named " + name);
  return it->second.get();
}

bool ModelParams::has(const std::string& name) const { return by_name_.count(name) > 0; }

void ModelParams::init_embedding(Parameter* p, Rng& rng) {
  for (double& x : p->value.v) x = rng.uniform(-0.1, 0.1);
}

void ModelParams::init_matrix(Parameter* p, Rng& rng) {
  double range = std::sqrt(6.0 / (p->value.rows + p->value.cols));
  for (double& x : p->value.v) x = rng.uniform(-range, range);
}

Vocab& ModelParams::vocab(const std::string& name) {
  auto it = vocabs_.find(name);
  if (it == vocabs_.end()) {
    vocab_order_.push_back(name);
    return vocabs_[name];
  }
  return it->second;
}

const Vocab& ModelParams::vocab(const std::string& name) const {
  auto it = vocabs_.find(name);
  if (it == vocabs_.end()) throw std::logic_error("no vocabulary named " + name);
  return it->second;
}

bool ModelParams::has_vocab(const std::string& name) const {
  return vocabs_.count(name) > 0;
}

void ModelParams::zero_grads() {
  for (Parameter* p : order_) p->zero_grad();
}

void ModelParams::quantize_f32() {
  for (Parameter* p : order_)
    for (double& x : p->value.v) x = static_cast<double>(static_cast<float>(x));
}

void ModelParams::save(const std::string& path) const {
  nlohmann::json header;
  header["hyper"] = hyper_;
  nlohmann::json vocabs = nlohmann::json::object();
  for (const std::string& name : vocab_order_) vocabs[name] = vocabs_.at(name).to_json();
  header["vocabs"] = vocabs;
  header["vocab_order"] = vocab_order_;
  nlohmann::json tensors = nlohmann::json::array();
  for (const Parameter* p : order_) {
    tensors.push_back({{"name", p->name},
                       {"rows", p->value.rows},
                       {"cols", p->value.cols},
                       {"lookup", p->lookup},
                       {"trainable", p->trainable}});
  }
  header["tensors"] = tensors;
  std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  out.write("TWPM", 4);
  uint32_t version = kFormatVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  uint64_t hlen = header_str.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(header_str.data(), static_cast<std::streamsize>(hlen));
  std::vector<float> buf;
  for (const Parameter* p : order_) {
    buf.resize(p->value.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(p->value.v[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw DataError("write failed for model file: " + path);
}

void ModelParams::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TWPM", 4) != 0)
    throw DataError("not a model file: " + path);
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kFormatVersion)
    throw DataError("unsupported model format version " + std::to_string(version) +
                    " in " + path);
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string header_str(hlen, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw DataError("truncated model file: " + path);
  nlohmann::json header = nlohmann::json::parse(header_str);

  by_name_.clear();
  order_.clear();
  vocabs_.clear();
  vocab_order_.clear();
  hyper_ = header.at("hyper");
  for (const auto& name : header.at("vocab_order")) {
    std::string n = name.get<std::string>();
    vocab_order_.push_back(n);
    vocabs_[n] = Vocab::from_json(header.at("vocabs").at(n));
  }
  for (const auto& t : header.at("tensors")) {
    Parameter* p = t.at("lookup").get<bool>()
                       ? add_lookup(t.at("name"), t.at("rows"), t.at("cols"))
                       : add_param(t.at("name"), t.at("rows"), t.at("cols"));
    p->trainable = t.at("trainable").get<bool>();
    std::vector<float> buf(p->value.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw DataError("truncated model file: " + path);
    for (size_t i = 0; i < buf.size(); ++i) p->value.v[i] = buf[i];
  }
}

bool ModelParams::same_tensors(const ModelParams& o) const {
  if (order_.size() != o.order_.size()) return false;
  for (size_t i = 0; i < order_.size(); ++i) {
    if (order_[i]->name != o.order_[i]->name) return false;
    if (!(order_[i]->value == o.order_[i]->value)) return false;
  }
  if (vocab_order_ != o.vocab_order_) return false;
  for (const auto& name : vocab_order_)
    if (!(vocabs_.at(name) == o.vocabs_.at(name))) return false;
  return true;
}

}  // namespace twparse
