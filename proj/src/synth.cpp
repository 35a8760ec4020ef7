#include "cssrs/synth.hpp"

#include <array>
#include <string>

#include "cssrs/rng.hpp"

namespace cssrs {

namespace {

const std::array<std::vector<const char*>, 4> kClassMarkers = {{
    // Supportive
    {"you are worthy of support", "i am here to help you", "sharing my recovery experience",
     "it gets better with therapy", "happy to listen and support you"},
    // Ideation
    {"i wish i could disappear", "thoughts of ending it keep returning",
     "i keep thinking about dying", "my mind circles suicidal thoughts",
     "i wonder if anyone would miss me"},
    // Behavior
    {"i wrote the note last night", "i have been collecting pills",
     "i planned the method in detail", "i stood on the bridge again",
     "i keep rehearsing the plan"},
    // Attempt
    {"i survived my overdose last year", "after the attempt i woke in hospital",
     "the er pumped my stomach", "my last attempt failed by chance",
     "i still carry scars from the attempt"},
}};

const std::vector<const char*> kFiller = {
    "the week has been long and tiring.", "work keeps piling up around me.",
    "my sleep schedule is a mess.",       "the weather was grey all day.",
    "nobody at home talks much anymore.", "i spent the evening scrolling reddit.",
    "dinner was instant noodles again.",  "the neighbors argued into the night.",
};

const std::vector<const char*> kUninformative = {
    "does anyone know a good podcast?", "my cat knocked over the plant again.",
    "thanks for the game recommendation.", "what phone should i buy next?",
};

const std::vector<const char*> kSubreddits = {"SuicideWatch", "depression", "anxiety", "BPD",
                                              "selfharm"};

std::string sentence_case(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string build_post_text(int label_idx, int n_sentences, Rng& rng) {
  std::string text;
  for (int s = 0; s < n_sentences; ++s) {
    if (s) text += " ";
    if (s % 2 == 0) {
      const auto& pool = kClassMarkers[label_idx];
      text += sentence_case(pool[rng.next_below(pool.size())]);
      text += ".";
    } else {
      text += sentence_case(kFiller[rng.next_below(kFiller.size())]);
    }
  }
  return text;
}

std::string uninformative_text(int n_sentences, Rng& rng) {
  std::string text;
  for (int s = 0; s < n_sentences; ++s) {
    if (s) text += " ";
    text += sentence_case(kUninformative[rng.next_below(kUninformative.size())]);
  }
  return text;
}

PostRecord make_post(const std::string& user_id, int index, std::int64_t base_ts,
                     PostLabel label, std::string text, Rng& rng) {
  PostRecord post;
  post.post_id = user_id + "-p" + std::to_string(index);
  post.user_id = user_id;
  post.timestamp = base_ts + index * 86400 + static_cast<std::int64_t>(rng.next_below(3600));
  post.subreddit = kSubreddits[rng.next_below(kSubreddits.size())];
  post.text = std::move(text);
  post.set_label(label);
  return post;
}

}  // namespace

std::vector<UserRecord> make_keyword_corpus(int users_per_class, int posts_per_user,
                                            std::uint64_t seed) {
  std::vector<UserRecord> users;
  int uid = 0;
  for (int cls = 0; cls < 4; ++cls) {
    for (int u = 0; u < users_per_class; ++u, ++uid) {
      Rng rng(derive_seed(seed, "kw-user-" + std::to_string(uid)));
      UserRecord user;
      user.user_id = "synth-" + std::to_string(uid);
      user.username = "user" + std::to_string(uid);
      user.user_label = static_cast<SeverityLabel>(cls);
      for (int p = 0; p < posts_per_user; ++p) {
        user.posts.push_back(make_post(user.user_id, p, 1'500'000'000, post_label_of(user.user_label),
                                       build_post_text(cls, 3, rng), rng));
      }
      users.push_back(std::move(user));
    }
  }
  return users;
}

std::vector<UserRecord> make_table1_demo_corpus(std::uint64_t seed) {
  // throwaway S/I/B/A then non-throwaway S/I/B/A
  const std::array<int, 4> throwaway_counts = {37, 63, 23, 17};
  const std::array<int, 4> regular_counts = {85, 114, 76, 33};
  constexpr int kTotalUsers = 448;
  constexpr int kTotalPosts = 7327;
  const int base_posts = kTotalPosts / kTotalUsers;       // 16
  const int extra_posts = kTotalPosts % kTotalUsers;      // first users get one more

  std::vector<UserRecord> users;
  users.reserve(kTotalUsers);
  int uid = 0;
  for (int group = 0; group < 2; ++group) {
    const auto& counts = group == 0 ? throwaway_counts : regular_counts;
    for (int cls = 0; cls < 4; ++cls) {
      for (int u = 0; u < counts[cls]; ++u, ++uid) {
        Rng rng(derive_seed(seed, "demo-user-" + std::to_string(uid)));
        UserRecord user;
        user.user_id = "demo-" + std::to_string(uid);
        user.username = group == 0 ? "throwaway_acct_" + std::to_string(uid)
                                   : "redditor_" + std::to_string(uid);
        user.is_throwaway = group == 0;
        user.user_label = static_cast<SeverityLabel>(cls);
        const int n_posts = base_posts + (uid < extra_posts ? 1 : 0);
        for (int p = 0; p < n_posts; ++p) {
          // ~1 uninformative and ~1 supportive-flavored post per history
          PostLabel label = post_label_of(user.user_label);
          std::string text;
          const std::uint64_t roll = rng.next_below(100);
          if (roll < 8) {
            label = PostLabel::Uninformative;
            text = uninformative_text(5, rng);
          } else if (roll < 14 && cls != 0) {
            label = PostLabel::Supportive;
            text = build_post_text(0, 5, rng);
          } else {
            text = build_post_text(cls, 5, rng);
          }
          user.posts.push_back(make_post(user.user_id, p, 1'400'000'000, label, std::move(text), rng));
        }
        users.push_back(std::move(user));
      }
    }
  }
  return users;
}

}  // namespace cssrs
