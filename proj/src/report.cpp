#include "cssrs/report.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cssrs/error.hpp"

namespace cssrs {

using nlohmann::json;

namespace {

// Compact SHA-1, sufficient for content fingerprints in manifests.
struct Sha1 {
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
  std::uint64_t total = 0;
  std::array<std::uint8_t, 64> block{};
  std::size_t fill = 0;

  static std::uint32_t rol(std::uint32_t v, int s) { return (v << s) | (v >> (32 - s)); }

  void process(const std::uint8_t* p) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (p[4 * i] << 24) | (p[4 * i + 1] << 16) | (p[4 * i + 2] << 8) | p[4 * i + 3];
    for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const void* data, std::size_t len) {
    const std::uint8_t* p = static_cast<const std::uint8_t*>(data);
    total += len;
    while (len > 0) {
      std::size_t take = std::min(len, block.size() - fill);
      std::memcpy(block.data() + fill, p, take);
      fill += take;
      p += take;
      len -= take;
      if (fill == block.size()) {
        process(block.data());
        fill = 0;
      }
    }
  }

  std::string hex_digest() {
    std::uint64_t bits = total * 8;
    std::uint8_t pad = 0x80;
    update(&pad, 1);
    std::uint8_t zero = 0;
    while (fill != 56) update(&zero, 1);
    std::uint8_t len_be[8];
    for (int i = 0; i < 8; ++i) len_be[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    update(len_be, 8);
    std::ostringstream os;
    for (std::uint32_t v : h) os << std::hex << std::setw(8) << std::setfill('0') << v;
    return os.str();
  }
};

std::string round2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string git_blob_sha1(std::string_view content) {
  Sha1 sha;
  std::string header = "blob " + std::to_string(content.size());
  sha.update(header.data(), header.size() + 1);  // includes the NUL
  sha.update(content.data(), content.size());
  return sha.hex_digest();
}

json metrics_to_json(const MetricsReport& report) {
  json j;
  j["classes"] = report.classes;
  json per_class = json::object();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    per_class[report.classes[c]] = {{"precision", m.precision},
                                    {"recall", m.recall},
                                    {"f1", m.f1},
                                    {"support", m.support},
                                    {"degenerate", m.degenerate}};
  }
  j["per_class"] = std::move(per_class);
  j["macro"] = {{"avg_precision", report.macro_precision},
                {"avg_recall", report.macro_recall},
                {"f1", report.f1},
                {"f1_mean_per_class", report.f1_mean_per_class}};
  j["accuracy"] = report.accuracy;
  j["ordinal_error"] = report.ordinal_error;
  j["total"] = report.total;
  j["confusion"] = report.confusion.counts;
  return j;
}

json roc_to_json(const RocCurve& curve) {
  json j;
  j["positive_class"] = curve.positive_class;
  j["auc"] = curve.auc;
  json points = json::array();
  for (const auto& [fpr, tpr] : curve.points) points.push_back({fpr, tpr});
  j["points"] = std::move(points);
  return j;
}

json diagnostics_to_json(const DiagnosticsReport& report) {
  auto one = [](const LexiconDiagnostics& d) {
    json j;
    j["lexicon"] = d.lexicon_name;
    json groups = json::object();
    for (const auto& [label, g] : d.groups)
      groups[to_string(label)] = {{"mean", g.mean}, {"stddev", g.stddev}, {"n", g.n}};
    j["groups"] = std::move(groups);
    j["between_group_variance"] = d.between_group_variance;
    j["within_group_variance"] = d.within_group_variance;
    j["f_ratio"] = d.f_ratio;
    return j;
  };
  json j;
  j["valence"] = one(report.valence);
  j["happiness"] = one(report.happiness);
  return j;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "experiment,method,TA,UI,SU,avg_prec,avg_rec,f1\n";
  for (const AblationRow& row : rows) {
    os << row.experiment_id << "," << to_string(row.method) << ","
       << yes_no(row.flags.include_throwaway) << "," << yes_no(row.flags.include_uninformative)
       << "," << yes_no(row.flags.include_supportive) << ",";
    if (row.ok) {
      os << round2(row.metrics.macro_precision) << "," << round2(row.metrics.macro_recall) << ","
         << round2(row.metrics.f1);
    } else {
      os << "error,error,error";
    }
    os << "\n";
  }
  return os.str();
}

json ablation_to_json(const std::vector<AblationRow>& rows) {
  json arr = json::array();
  for (const AblationRow& row : rows) {
    json j;
    j["experiment"] = row.experiment_id;
    j["method"] = to_string(row.method);
    j["TA"] = row.flags.include_throwaway;
    j["UI"] = row.flags.include_uninformative;
    j["SU"] = row.flags.include_supportive;
    j["ok"] = row.ok;
    j["n_users"] = row.n_users;
    if (row.ok) {
      j["metrics"] = metrics_to_json(row.metrics);
    } else {
      j["error"] = row.error;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string roc_csv(const std::vector<RocCurve>& curves) {
  std::ostringstream os;
  os << "class,fpr,tpr\n";
  os << std::setprecision(17);
  for (const RocCurve& curve : curves)
    for (const auto& [fpr, tpr] : curve.points)
      os << curve.positive_class << "," << fpr << "," << tpr << "\n";
  return os.str();
}

std::string roc_svg(const std::vector<RocCurve>& curves, const std::string& title) {
  constexpr int kSize = 420;
  constexpr int kMargin = 50;
  constexpr int kPlot = kSize - 2 * kMargin;
  const std::array<const char*, 6> palette = {"#1b6ca8", "#c0392b", "#27ae60",
                                              "#8e44ad", "#d35400", "#2c3e50"};
  auto px = [&](double x) { return kMargin + x * kPlot; };
  auto py = [&](double y) { return kSize - kMargin - y * kPlot; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 170 << "\" height=\""
     << kSize << "\" viewBox=\"0 0 " << kSize + 170 << " " << kSize << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kSize / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"15\">"
     << title << "</text>\n";
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kPlot
     << "\" height=\"" << kPlot << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
     << py(1) << "\" stroke=\"#bbb\" stroke-dasharray=\"5,4\"/>\n";
  os << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">false positive "
        "rate</text>\n";
  os << "<text x=\"16\" y=\"" << kSize / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
        "16 "
     << kSize / 2 << ")\">true positive rate</text>\n";
  for (double tick = 0.0; tick <= 1.0001; tick += 0.25) {
    os << "<text x=\"" << px(tick) << "\" y=\"" << kSize - kMargin + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << std::fixed
       << std::setprecision(2) << tick << "</text>\n";
    os << "<text x=\"" << kMargin - 8 << "\" y=\"" << py(tick) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << std::fixed
       << std::setprecision(2) << tick << "</text>\n";
  }
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = palette[c % palette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (const auto& [fpr, tpr] : curves[c].points)
      os << px(fpr) << "," << py(tpr) << " ";
    os << "\"/>\n";
    const int ly = kMargin + 18 + static_cast<int>(c) * 18;
    os << "<line x1=\"" << kSize - kMargin + 20 << "\" y1=\"" << ly << "\" x2=\""
       << kSize - kMargin + 44 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kSize - kMargin + 50 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << curves[c].positive_class
       << " (AUC " << round2(curves[c].auc) << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string stats_text(const CorpusStats& stats) {
  std::ostringstream os;
  os << "users: " << stats.n_users << "\n";
  os << "posts: " << stats.n_posts << "\n";
  os << "sentences: " << stats.n_sentences << "\n";
  os << "avg posts/user: " << round2(stats.avg_posts_per_user) << "\n";
  os << "avg sentences/post: " << round2(stats.avg_sentences_per_post) << "\n";
  os << "users by label (throwaway / non-throwaway):\n";
  for (SeverityLabel l : kSeverityLabels) {
    os << "  " << to_string(l) << ": " << stats.user_counts_throwaway.at(l) << " / "
       << stats.user_counts_non_throwaway.at(l) << "\n";
  }
  return os.str();
}

json stats_to_json(const CorpusStats& stats) {
  json j;
  j["n_users"] = stats.n_users;
  j["n_posts"] = stats.n_posts;
  j["n_sentences"] = stats.n_sentences;
  j["avg_posts_per_user"] = stats.avg_posts_per_user;
  j["avg_sentences_per_post"] = stats.avg_sentences_per_post;
  json throwaway = json::object(), non_throwaway = json::object();
  for (SeverityLabel l : kSeverityLabels) {
    throwaway[to_string(l)] = stats.user_counts_throwaway.at(l);
    non_throwaway[to_string(l)] = stats.user_counts_non_throwaway.at(l);
  }
  j["user_counts_throwaway"] = std::move(throwaway);
  j["user_counts_non_throwaway"] = std::move(non_throwaway);
  return j;
}

OutputWriter::OutputWriter(std::filesystem::path dir, std::string command, json config_echo,
                           std::uint64_t master_seed)
    : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  manifest_["command"] = std::move(command);
  manifest_["config"] = std::move(config_echo);
  manifest_["master_seed"] = master_seed;
  manifest_["outputs"] = json::object();
}

void OutputWriter::write(const std::string& filename, std::string_view content) {
  const std::filesystem::path path = dir_ / filename;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write output file: " + path.string());
  out << content;
  manifest_["outputs"][filename] = git_blob_sha1(content);
}

std::filesystem::path OutputWriter::finish() {
  const std::filesystem::path path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write manifest: " + path.string());
  out << manifest_.dump(2) << "\n";
  return path;
}

}  // namespace cssrs
