#pragma once

#include <cstdint>
#include <vector>

#include "cssrs/records.hpp"

namespace cssrs {

// Small keyword-separable corpus: every post of a user carries that class's
// marker tokens mixed with shared filler, so both methodologies can fit it
// to high training accuracy quickly. Deterministic given the seed.
std::vector<UserRecord> make_keyword_corpus(int users_per_class, int posts_per_user,
                                            std::uint64_t seed);

// Demo corpus shaped like the annotated Reddit data: 448 users / 7327 posts,
// throwaway user distribution 37/63/23/17 (S/I/B/A) and non-throwaway
// 85/114/76/33, around five sentences per post, a sprinkling of supportive
// and uninformative posts inside every user history. For exercising the
// pipeline end to end, not a substitute for the real dataset.
std::vector<UserRecord> make_table1_demo_corpus(std::uint64_t seed);

}  // namespace cssrs
