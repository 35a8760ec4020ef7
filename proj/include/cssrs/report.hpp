#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cssrs/ablation.hpp"
#include "cssrs/diagnostics.hpp"
#include "cssrs/metrics.hpp"

namespace cssrs {

// Hex SHA-1 of the bytes wrapped as a git blob ("blob <len>\0" + content).
std::string git_blob_sha1(std::string_view content);

nlohmann::json metrics_to_json(const MetricsReport& report);
nlohmann::json roc_to_json(const RocCurve& curve);
nlohmann::json diagnostics_to_json(const DiagnosticsReport& report);

// Ablation grid CSV: experiment,method,TA,UI,SU,avg_prec,avg_rec,f1 with
// presentation rounding to 2 decimals (full precision lives in the JSON).
std::string ablation_csv(const std::vector<AblationRow>& rows);
nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows);

// CSV of (class,fpr,tpr) points.
std::string roc_csv(const std::vector<RocCurve>& curves);

// Standalone SVG plot of one-vs-rest curves.
std::string roc_svg(const std::vector<RocCurve>& curves, const std::string& title);

std::string stats_text(const CorpusStats& stats);
nlohmann::json stats_to_json(const CorpusStats& stats);

// Writes output files under a directory and assembles a manifest
// (command, config echo, master seed, content hash per output) that is
// sufficient to rerun the command.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, std::string command, nlohmann::json config_echo,
               std::uint64_t master_seed);

  void write(const std::string& filename, std::string_view content);
  // Writes manifest.json and returns its path.
  std::filesystem::path finish();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json manifest_;
};

}  // namespace cssrs
