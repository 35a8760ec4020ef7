#include "cssrs/vocab.hpp"

#include <algorithm>
#include <map>

namespace cssrs::nn {

int Vocabulary::add(const std::string& token) {
  auto it = index.find(token);
  if (it != index.end()) return it->second;
  int id = size();
  tokens.push_back(token);
  index.emplace(token, id);
  return id;
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& words, int max_len) const {
  std::vector<int> ids;
  ids.reserve(std::min<std::size_t>(words.size(), max_len));
  for (const std::string& w : words) {
    if (static_cast<int>(ids.size()) >= max_len) break;
    ids.push_back(id_of(w));
  }
  return ids;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& docs, int min_freq) {
  std::map<std::string, std::size_t> freq;
  for (const auto& doc : docs)
    for (const std::string& w : doc) ++freq[w];
  std::vector<std::pair<std::string, std::size_t>> items(freq.begin(), freq.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [token, count] : items) {
    if (count < static_cast<std::size_t>(min_freq)) break;
    vocab.add(token);
  }
  return vocab;
}

}  // namespace cssrs::nn
