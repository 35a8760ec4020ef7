#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cssrs/labels.hpp"

namespace cssrs {

struct PostRecord {
  std::string post_id;
  std::string user_id;
  std::int64_t timestamp = 0;  // epoch seconds
  std::string subreddit;
  std::string text;
  std::optional<std::string> normalized_text;
  PostLabel label = PostLabel::Uninformative;
  // Derived from label, never set independently.
  bool is_supportive_content = false;
  bool is_uninformative_content = false;

  void set_label(PostLabel l) {
    label = l;
    is_supportive_content = (l == PostLabel::Supportive);
    is_uninformative_content = (l == PostLabel::Uninformative);
  }

  bool operator==(const PostRecord&) const = default;
};

struct UserRecord {
  std::string user_id;
  std::string username;  // empty when the source omits it
  std::vector<PostRecord> posts;  // ascending by (timestamp, post_id)
  SeverityLabel user_label = SeverityLabel::Supportive;
  bool is_throwaway = false;

  bool operator==(const UserRecord&) const = default;
};

struct CorpusStats {
  std::size_t n_users = 0;
  std::size_t n_posts = 0;
  std::size_t n_sentences = 0;
  double avg_posts_per_user = 0.0;
  double avg_sentences_per_post = 0.0;
  // [0] = non-throwaway, [1] = throwaway
  std::map<SeverityLabel, std::size_t> user_counts_non_throwaway;
  std::map<SeverityLabel, std::size_t> user_counts_throwaway;
};

}  // namespace cssrs
