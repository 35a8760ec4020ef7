#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace cssrs {

// User-level severity, ordered Supportive < Ideation < Behavior < Attempt.
enum class SeverityLabel : int { Supportive = 0, Ideation = 1, Behavior = 2, Attempt = 3 };

// Post-level labels add Uninformative; a user is never Uninformative.
enum class PostLabel : int {
  Supportive = 0,
  Ideation = 1,
  Behavior = 2,
  Attempt = 3,
  Uninformative = 4
};

inline constexpr int kNumSeverityLabels = 4;
inline constexpr int kNumPostLabels = 5;

inline constexpr std::array<SeverityLabel, 4> kSeverityLabels = {
    SeverityLabel::Supportive, SeverityLabel::Ideation, SeverityLabel::Behavior,
    SeverityLabel::Attempt};

inline constexpr std::array<PostLabel, 5> kPostLabels = {
    PostLabel::Supportive, PostLabel::Ideation, PostLabel::Behavior, PostLabel::Attempt,
    PostLabel::Uninformative};

std::string to_string(SeverityLabel label);
std::string to_string(PostLabel label);

// Case-insensitive parse of the wire strings "supportive", "ideation",
// "behavior", "attempt" (+ "uninformative" for posts). "indication" is not a
// valid value for either enum; the loader handles it separately.
std::optional<SeverityLabel> parse_severity_label(std::string_view s);
std::optional<PostLabel> parse_post_label(std::string_view s);

// True for the raw string marking the removed Suicide Indication category.
bool is_indication_label(std::string_view s);

inline int severity_rank(SeverityLabel l) { return static_cast<int>(l); }

// Ordinal rank used for argmax tie-breaking: higher risk wins, Uninformative
// ranks beneath everything.
inline int tiebreak_rank(PostLabel l) {
  return l == PostLabel::Uninformative ? -1 : static_cast<int>(l);
}

inline SeverityLabel severity_of(PostLabel l) { return static_cast<SeverityLabel>(l); }
inline PostLabel post_label_of(SeverityLabel l) { return static_cast<PostLabel>(l); }

std::string allowed_user_labels();
std::string allowed_post_labels();

}  // namespace cssrs
