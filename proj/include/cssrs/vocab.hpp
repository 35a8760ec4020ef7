#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace cssrs::nn {

// Token index with reserved ids. Built from training data only; absent
// tokens encode as kOov.
struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;
  static constexpr int kSep = 2;

  std::vector<std::string> tokens = {"<pad>", "<oov>", "<sep>"};
  std::unordered_map<std::string, int> index = {{"<pad>", 0}, {"<oov>", 1}, {"<sep>", 2}};

  int size() const { return static_cast<int>(tokens.size()); }

  int id_of(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? kOov : it->second;
  }

  int add(const std::string& token);

  std::vector<int> encode(const std::vector<std::string>& words, int max_len) const;

  // Tokens ordered by (frequency desc, token asc) above min_freq; the order
  // is part of the serialized model so it must be deterministic.
  static Vocabulary build(const std::vector<std::vector<std::string>>& docs, int min_freq);
};

}  // namespace cssrs::nn
