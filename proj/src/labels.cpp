#include "cssrs/labels.hpp"

#include <algorithm>
#include <cctype>

namespace cssrs {

namespace {

std::string fold(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string to_string(SeverityLabel label) {
  switch (label) {
    case SeverityLabel::Supportive: return "supportive";
    case SeverityLabel::Ideation: return "ideation";
    case SeverityLabel::Behavior: return "behavior";
    case SeverityLabel::Attempt: return "attempt";
  }
  return "?";
}

std::string to_string(PostLabel label) {
  if (label == PostLabel::Uninformative) return "uninformative";
  return to_string(static_cast<SeverityLabel>(label));
}

std::optional<SeverityLabel> parse_severity_label(std::string_view s) {
  std::string f = fold(s);
  for (SeverityLabel l : kSeverityLabels)
    if (f == to_string(l)) return l;
  return std::nullopt;
}

std::optional<PostLabel> parse_post_label(std::string_view s) {
  std::string f = fold(s);
  for (PostLabel l : kPostLabels)
    if (f == to_string(l)) return l;
  return std::nullopt;
}

bool is_indication_label(std::string_view s) {
  std::string f = fold(s);
  return f == "indication" || f == "suicide indication" || f == "suicide_indication";
}

std::string allowed_user_labels() { return "supportive, ideation, behavior, attempt, indication"; }

std::string allowed_post_labels() {
  return "supportive, ideation, behavior, attempt, uninformative";
}

}  // namespace cssrs
