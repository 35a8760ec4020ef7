#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cssrs/bundle.hpp"
#include "cssrs/embedding.hpp"
#include "cssrs/records.hpp"

namespace cssrs {

enum class Method { TinvM, TvarM };

Method method_from_string(std::string_view s);
std::string to_string(Method m);

struct PostPrediction {
  std::string post_id;
  std::array<double, kNumPostLabels> probabilities{};
  PostLabel predicted = PostLabel::Uninformative;
};

struct UserPrediction {
  std::string user_id;
  std::array<double, kNumSeverityLabels> probabilities{};
  SeverityLabel predicted = SeverityLabel::Supportive;
  Method method = Method::TinvM;
  int fold = -1;
  // Audit trail: per-post predictions in timestamp order for TvarM; the
  // effective post-truncation size (tokens for TinvM, kept posts for TvarM).
  std::vector<PostPrediction> post_trace;
  int effective_tokens = 0;
};

// Argmax with ties broken toward higher severity (Attempt first,
// Uninformative last).
PostLabel argmax_post_label(const std::array<double, kNumPostLabels>& probs);
SeverityLabel argmax_severity(const std::array<double, kNumSeverityLabels>& probs);

// Per-post 5-class LSTM classifier. Training posts use normalized_text when
// present and config.use_normalized_text is set. Throws Error(Train)
// "degenerate labels" when fewer than two distinct labels are present.
// `pretrained` freezes the embedding rows and leaves only the OOV row
// trainable; without it a table of config.embedding_dim is trained from
// scratch.
nn::ModelBundle train_post_classifier(const std::vector<PostRecord>& posts,
                                      const nn::TrainConfig& config,
                                      const EmbeddingTable* pretrained = nullptr);

PostPrediction predict_post(const nn::ModelBundle& bundle, const PostRecord& post);

// User-level CNN over the time-ordered matrix of per-post risk probability
// vectors [Pr(S) Pr(I) Pr(B) Pr(A)] (Uninformative dropped, the four values
// passed unrenormalized). The post classifier stays frozen.
nn::ModelBundle train_tvarm(const std::vector<UserRecord>& users,
                            const nn::ModelBundle& post_bundle, const nn::TrainConfig& config);

UserPrediction predict_user_tvarm(const nn::ModelBundle& post_bundle,
                                  const nn::ModelBundle& user_bundle, const UserRecord& user);

// Kim-style CNN over each user's posts concatenated in timestamp order with
// a separator token, truncated to max_tokens_per_post * max_posts_per_user.
nn::ModelBundle train_tinvm(const std::vector<UserRecord>& users, const nn::TrainConfig& config,
                            const EmbeddingTable* pretrained = nullptr);

UserPrediction predict_user_tinvm(const nn::ModelBundle& bundle, const UserRecord& user);

// Tokens fed to the models for one post (normalized_text when configured and
// present, else raw text).
std::vector<std::string> model_tokens(const PostRecord& post, const nn::TrainConfig& config);

}  // namespace cssrs
