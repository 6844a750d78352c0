#ifndef TWPARSE_VOCAB_H
#define TWPARSE_VOCAB_H

#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace twparse {

// Injective string <-> index map; index 0 is reserved for the UNK symbol.
class Vocab {
 public:
  static constexpr const char* kUnk = "<unk>";

  Vocab() { add(kUnk); }

  int add(const std::string& s) {
    auto it = map_.find(s);
    if (it != map_.end()) return it->second;
    int id = static_cast<int>(items_.size());
    map_.emplace(s, id);
    items_.push_back(s);
    return id;
  }

  // 0 (UNK) for unseen symbols.
  int get(const std::string& s) const {
    auto it = map_.find(s);
    return it == map_.end() ? 0 : it->second;
  }

  bool contains(const std::string& s) const { return map_.count(s) > 0; }
  const std::string& at(int id) const { return items_[id]; }
  size_t size() const { return items_.size(); }

  nlohmann::json to_json() const { return nlohmann::json(items_); }

  static Vocab from_json(const nlohmann::json& j) {
    Vocab v;
    for (const auto& s : j) v.add(s.get<std::string>());
    return v;
  }

  bool operator==(const Vocab& o) const { return items_ == o.items_; }

 private:
  std::unordered_map<std::string, int> map_;
  std::vector<std::string> items_;
};

}  // namespace twparse

#endif
