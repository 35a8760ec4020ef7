#include "cssrs/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cssrs/error.hpp"

namespace cssrs {

std::optional<std::span<const double>> EmbeddingTable::lookup(std::string_view token) const {
  auto it = index.find(std::string(token));
  if (it == index.end()) return std::nullopt;
  return std::span<const double>(data.data() + it->second * dimension,
                                 static_cast<std::size_t>(dimension));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open embeddings file: " + path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    if (token.empty()) continue;
    std::vector<double> values;
    std::string cell;
    while (row >> cell) {
      try {
        std::size_t pos = 0;
        values.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw data_error("embeddings line " + std::to_string(line_no) +
                         ": unparseable float '" + cell + "'");
      }
    }
    if (values.empty())
      throw data_error("embeddings line " + std::to_string(line_no) + ": no vector components");
    for (double v : values) {
      if (!std::isfinite(v))
        throw data_error("embeddings line " + std::to_string(line_no) +
                         ": non-finite component");
    }
    if (table.dimension == 0) {
      table.dimension = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != table.dimension) {
      throw data_error("embeddings line " + std::to_string(line_no) + ": dimension " +
                       std::to_string(values.size()) + " != declared " +
                       std::to_string(table.dimension));
    }
    auto it = table.index.find(token);
    if (it != table.index.end()) {
      ++table.duplicate_tokens;
      std::copy(values.begin(), values.end(), table.data.begin() + it->second * table.dimension);
    } else {
      table.index.emplace(token, table.index.size());
      table.data.insert(table.data.end(), values.begin(), values.end());
    }
  }
  if (table.index.empty()) throw data_error("embeddings file is empty: " + path.string());
  return table;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw data_error("cosine_similarity: dimension mismatch " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw data_error("cosine_similarity: undefined similarity for zero vector");
  double value = dot / (std::sqrt(na) * std::sqrt(nb));
  if (value > 1.0) value = 1.0;
  if (value < -1.0) value = -1.0;
  return value;
}

std::optional<std::vector<double>> phrase_vector(std::span<const std::string> tokens,
                                                 const EmbeddingTable& table) {
  std::vector<double> sum(static_cast<std::size_t>(table.dimension), 0.0);
  std::size_t found = 0;
  for (const std::string& token : tokens) {
    if (auto vec = table.lookup(token)) {
      for (std::size_t i = 0; i < vec->size(); ++i) sum[i] += (*vec)[i];
      ++found;
    }
  }
  if (found == 0) return std::nullopt;
  for (double& v : sum) v /= static_cast<double>(found);
  return sum;
}

}  // namespace cssrs
