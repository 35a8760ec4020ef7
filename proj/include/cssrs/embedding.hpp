#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cssrs {

// Word-vector table, immutable after load and safe for concurrent reads.
struct EmbeddingTable {
  int dimension = 0;
  bool lowercased = true;
  std::unordered_map<std::string, std::size_t> index;  // token -> row
  std::vector<double> data;                            // rows back to back
  std::size_t duplicate_tokens = 0;                    // last occurrence wins

  std::size_t size() const { return index.size(); }

  // Absent tokens return nullopt, never a silent zero vector.
  std::optional<std::span<const double>> lookup(std::string_view token) const;
};

// One line per token: token followed by `dimension` space-separated decimals.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// dot(a,b) / (|a||b|); throws Error(Data) on dimension mismatch or a zero
// vector ("undefined similarity").
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Unweighted mean of the vectors of in-vocabulary tokens; nullopt when no
// token is known.
std::optional<std::vector<double>> phrase_vector(std::span<const std::string> tokens,
                                                 const EmbeddingTable& table);

}  // namespace cssrs
