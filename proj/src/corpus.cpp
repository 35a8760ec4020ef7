#include "cssrs/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cssrs/error.hpp"
#include "cssrs/text.hpp"
#include "csv.hpp"

namespace cssrs {

namespace {

using nlohmann::json;

[[noreturn]] void row_error(std::size_t line, const std::string& field, const std::string& what) {
  throw data_error("line " + std::to_string(line) + ", field '" + field + "': " + what);
}

PostLabel parse_post_label_or_throw(std::size_t line, const std::string& field,
                                    const std::string& raw) {
  auto label = parse_post_label(raw);
  if (!label) {
    row_error(line, field,
              "unknown post label '" + raw + "' (allowed: " + allowed_post_labels() + ")");
  }
  return *label;
}

void finalize_user(UserRecord& user, std::size_t line) {
  if (user.posts.empty()) row_error(line, "posts", "user '" + user.user_id + "' has no posts");
  std::stable_sort(user.posts.begin(), user.posts.end(),
                   [](const PostRecord& a, const PostRecord& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.post_id < b.post_id;  // deterministic tie-break
                   });
  user.is_throwaway = detect_throwaway(user.username);
}

void check_text(std::size_t line, const std::string& text) {
  if (trim(text).empty()) row_error(line, "text", "post text is empty");
}

struct PostIdSet {
  std::set<std::string> seen;
  void insert_or_throw(std::size_t line, const std::string& id) {
    if (!seen.insert(id).second) row_error(line, "post_id", "duplicate post_id '" + id + "'");
  }
};

Corpus load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open dataset file: " + path.string());
  Corpus corpus;
  PostIdSet post_ids;
  std::set<std::string> user_ids;
  std::string line_text;
  std::size_t line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    if (trim(line_text).empty()) continue;
    json rec;
    try {
      rec = json::parse(line_text);
    } catch (const json::exception& e) {
      row_error(line, "-", std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) row_error(line, "-", "expected a JSON object per line");
    if (!rec.contains("user_id") || !rec["user_id"].is_string())
      row_error(line, "user_id", "missing or not a string");
    if (!rec.contains("label") || !rec["label"].is_string())
      row_error(line, "label", "missing or not a string");
    if (!rec.contains("posts") || !rec["posts"].is_array() || rec["posts"].empty())
      row_error(line, "posts", "missing, not an array, or empty");

    UserRecord user;
    user.user_id = rec["user_id"].get<std::string>();
    if (!user_ids.insert(user.user_id).second)
      row_error(line, "user_id", "duplicate user_id '" + user.user_id + "'");
    if (rec.contains("username")) {
      if (!rec["username"].is_string()) row_error(line, "username", "not a string");
      user.username = rec["username"].get<std::string>();
    }

    const std::string raw_label = rec["label"].get<std::string>();
    const bool indication = is_indication_label(raw_label);
    if (!indication) {
      auto label = parse_severity_label(raw_label);
      if (!label) {
        row_error(line, "label",
                  "unknown user label '" + raw_label + "' (allowed: " + allowed_user_labels() +
                      ")");
      }
      user.user_label = *label;
    }

    for (const json& p : rec["posts"]) {
      if (!p.is_object()) row_error(line, "posts", "post entry is not an object");
      for (const char* key : {"post_id", "timestamp", "subreddit", "text", "label"}) {
        if (!p.contains(key)) row_error(line, key, "missing in post");
      }
      if (!p["post_id"].is_string()) row_error(line, "post_id", "not a string");
      if (!p["timestamp"].is_number_integer()) row_error(line, "timestamp", "not an integer");
      if (!p["subreddit"].is_string()) row_error(line, "subreddit", "not a string");
      if (!p["text"].is_string()) row_error(line, "text", "not a string");
      if (!p["label"].is_string()) row_error(line, "label", "not a string");

      PostRecord post;
      post.post_id = p["post_id"].get<std::string>();
      post_ids.insert_or_throw(line, post.post_id);
      post.user_id = user.user_id;
      post.timestamp = p["timestamp"].get<std::int64_t>();
      post.subreddit = p["subreddit"].get<std::string>();
      post.text = p["text"].get<std::string>();
      check_text(line, post.text);
      if (p.contains("normalized_text")) {
        if (!p["normalized_text"].is_string()) row_error(line, "normalized_text", "not a string");
        post.normalized_text = p["normalized_text"].get<std::string>();
      }
      if (indication) {
        ++corpus.info.dropped_indication_posts;
        continue;
      }
      post.set_label(parse_post_label_or_throw(line, "label", p["label"].get<std::string>()));
      user.posts.push_back(std::move(post));
    }

    if (indication) {
      ++corpus.info.dropped_indication_users;
      continue;
    }
    finalize_user(user, line);
    corpus.users.push_back(std::move(user));
  }
  if (corpus.users.empty() && corpus.info.dropped_indication_users == 0)
    throw data_error("no records in " + path.string());
  if (corpus.info.dropped_indication_users > 0) {
    corpus.info.warnings.push_back(
        "dropped " + std::to_string(corpus.info.dropped_indication_users) +
        " indication-labeled user(s) with " +
        std::to_string(corpus.info.dropped_indication_posts) + " post(s)");
  }
  return corpus;
}

Corpus load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open dataset file: " + path.string());

  const std::vector<std::string> expected = {"user_id", "username",  "user_label", "post_id",
                                             "timestamp", "subreddit", "post_label", "text"};
  std::vector<std::string> fields;
  std::size_t line = 1, consumed = 0;
  if (!detail::read_csv_record(in, fields, line, consumed)) throw data_error("no records in " + path.string());
  if (fields != expected) {
    std::ostringstream os;
    os << "line 1: expected header user_id,username,user_label,post_id,timestamp,subreddit,"
          "post_label,text";
    throw data_error(os.str());
  }
  line += consumed;

  struct PendingUser {
    UserRecord user;
    std::string raw_label;
    bool indication = false;
    std::size_t first_line = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, PendingUser> by_user;
  PostIdSet post_ids;
  std::size_t n_rows = 0;

  while (detail::read_csv_record(in, fields, line, consumed)) {
    std::size_t this_line = line;
    line += consumed;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != expected.size()) {
      row_error(this_line, "-",
                "expected " + std::to_string(expected.size()) + " columns, got " +
                    std::to_string(fields.size()));
    }
    ++n_rows;
    const std::string& user_id = fields[0];
    if (user_id.empty()) row_error(this_line, "user_id", "empty");
    auto [it, inserted] = by_user.try_emplace(user_id);
    PendingUser& pu = it->second;
    if (inserted) {
      order.push_back(user_id);
      pu.user.user_id = user_id;
      pu.user.username = fields[1];
      pu.raw_label = fields[2];
      pu.first_line = this_line;
      pu.indication = is_indication_label(fields[2]);
      if (!pu.indication) {
        auto label = parse_severity_label(fields[2]);
        if (!label) {
          row_error(this_line, "user_label",
                    "unknown user label '" + fields[2] + "' (allowed: " + allowed_user_labels() +
                        ")");
        }
        pu.user.user_label = *label;
      }
    } else {
      if (fields[2] != pu.raw_label)
        row_error(this_line, "user_label", "conflicting labels for user '" + user_id + "'");
      if (fields[1] != pu.user.username)
        row_error(this_line, "username", "conflicting usernames for user '" + user_id + "'");
    }

    PostRecord post;
    post.post_id = fields[3];
    if (post.post_id.empty()) row_error(this_line, "post_id", "empty");
    post_ids.insert_or_throw(this_line, post.post_id);
    post.user_id = user_id;
    try {
      std::size_t pos = 0;
      post.timestamp = std::stoll(fields[4], &pos);
      if (pos != fields[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      row_error(this_line, "timestamp", "not an integer: '" + fields[4] + "'");
    }
    post.subreddit = fields[5];
    post.text = fields[7];
    check_text(this_line, post.text);
    if (!pu.indication) {
      post.set_label(parse_post_label_or_throw(this_line, "post_label", fields[6]));
      pu.user.posts.push_back(std::move(post));
    }
  }
  if (n_rows == 0) throw data_error("no records in " + path.string());

  Corpus corpus;
  for (const std::string& id : order) {
    PendingUser& pu = by_user[id];
    if (pu.indication) {
      ++corpus.info.dropped_indication_users;
      continue;
    }
    finalize_user(pu.user, pu.first_line);
    corpus.users.push_back(std::move(pu.user));
  }
  if (corpus.info.dropped_indication_users > 0) {
    corpus.info.warnings.push_back("dropped " +
                                   std::to_string(corpus.info.dropped_indication_users) +
                                   " indication-labeled user(s)");
  }
  return corpus;
}

}  // namespace

DatasetFormat format_from_string(std::string_view s) {
  std::string f = casefold(s);
  if (f == "jsonl") return DatasetFormat::Jsonl;
  if (f == "csv") return DatasetFormat::Csv;
  throw usage_error("unknown dataset format '" + std::string(s) + "' (jsonl or csv)");
}

DatasetFormat guess_format(const std::filesystem::path& path) {
  std::string ext = casefold(path.extension().string());
  if (ext == ".csv") return DatasetFormat::Csv;
  return DatasetFormat::Jsonl;
}

Corpus load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  return format == DatasetFormat::Jsonl ? load_jsonl(path) : load_csv(path);
}

Corpus load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, guess_format(path));
}

void save_dataset_jsonl(const std::vector<UserRecord>& users, std::ostream& out) {
  for (const UserRecord& user : users) {
    json rec;
    rec["user_id"] = user.user_id;
    rec["label"] = to_string(user.user_label);
    if (!user.username.empty()) rec["username"] = user.username;
    json posts = json::array();
    for (const PostRecord& post : user.posts) {
      json p;
      p["post_id"] = post.post_id;
      p["timestamp"] = post.timestamp;
      p["subreddit"] = post.subreddit;
      p["text"] = post.text;
      p["label"] = to_string(post.label);
      if (post.normalized_text) p["normalized_text"] = *post.normalized_text;
      posts.push_back(std::move(p));
    }
    rec["posts"] = std::move(posts);
    out << rec.dump() << "\n";
  }
}

void save_dataset_jsonl(const std::vector<UserRecord>& users,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path.string());
  save_dataset_jsonl(users, out);
}

bool detect_throwaway(std::string_view username) {
  return casefold(username).find("throwaway") != std::string::npos;
}

CorpusStats dataset_stats(const std::vector<UserRecord>& users) {
  return dataset_stats(users, [](std::string_view text) { return count_sentences(text); });
}

CorpusStats dataset_stats(const std::vector<UserRecord>& users,
                          const SentenceSplitter& splitter) {
  if (users.empty()) throw data_error("dataset_stats: empty user collection");
  CorpusStats stats;
  stats.n_users = users.size();
  for (SeverityLabel l : kSeverityLabels) {
    stats.user_counts_non_throwaway[l] = 0;
    stats.user_counts_throwaway[l] = 0;
  }
  for (const UserRecord& user : users) {
    stats.n_posts += user.posts.size();
    for (const PostRecord& post : user.posts) stats.n_sentences += splitter(post.text);
    auto& counts =
        user.is_throwaway ? stats.user_counts_throwaway : stats.user_counts_non_throwaway;
    ++counts[user.user_label];
  }
  stats.avg_posts_per_user = static_cast<double>(stats.n_posts) / static_cast<double>(stats.n_users);
  stats.avg_sentences_per_post =
      stats.n_posts == 0 ? 0.0
                         : static_cast<double>(stats.n_sentences) / static_cast<double>(stats.n_posts);
  return stats;
}

SliceResult ablation_slice(const std::vector<UserRecord>& users, AblationFlags flags) {
  SliceResult result;
  for (const UserRecord& user : users) {
    if (!flags.include_throwaway && user.is_throwaway) continue;
    if (!flags.include_supportive && user.user_label == SeverityLabel::Supportive) continue;
    UserRecord kept = user;
    if (!flags.include_uninformative || !flags.include_supportive) {
      std::erase_if(kept.posts, [&](const PostRecord& p) {
        if (!flags.include_uninformative && p.is_uninformative_content) return true;
        if (!flags.include_supportive && p.is_supportive_content) return true;
        return false;
      });
    }
    if (kept.posts.empty()) {
      ++result.dropped_empty_users;
      continue;
    }
    result.users.push_back(std::move(kept));
  }
  return result;
}

ZipfFit fit_zipf_mandelbrot(const std::vector<double>& ranked_frequencies,
                            const ZipfParams& params) {
  std::vector<double> freq;
  for (double f : ranked_frequencies)
    if (f > 0) freq.push_back(f);
  if (freq.size() < 2) throw data_error("zipf fit needs at least 2 positive frequencies");

  ZipfFit best;
  double best_sse = -1.0;
  for (double b = 0.0; b <= params.b_max + 1e-12; b += params.b_step) {
    // linear least squares of log f = log C - a * log(r + b)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(freq.size());
    for (std::size_t i = 0; i < freq.size(); ++i) {
      double x = std::log(static_cast<double>(i + 1) + b);
      double y = std::log(freq[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) continue;
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    double sse = 0;
    for (std::size_t i = 0; i < freq.size(); ++i) {
      double x = std::log(static_cast<double>(i + 1) + b);
      double r = std::log(freq[i]) - (intercept + slope * x);
      sse += r * r;
    }
    if (best_sse < 0 || sse < best_sse - 1e-12) {
      best_sse = sse;
      best.log_c = intercept;
      best.a = -slope;
      best.b = b;
    }
  }
  if (best_sse < 0) throw data_error("zipf fit failed: degenerate rank data");
  return best;
}

}  // namespace cssrs
