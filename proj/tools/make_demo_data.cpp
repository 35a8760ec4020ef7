// Writes a synthetic demo dataset shaped like the annotated corpus the
// pipeline targets (448 users / 7327 posts), so every subcommand can be
// exercised end to end without the real data.

#include <cstdio>
#include <filesystem>
#include <string>

#include "cssrs/corpus.hpp"
#include "cssrs/synth.hpp"

int main(int argc, char** argv) {
  std::filesystem::path dir = argc > 1 ? argv[1] : "demo-data";
  std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 42;
  std::filesystem::create_directories(dir);
  const auto users = cssrs::make_table1_demo_corpus(seed);
  const auto path = dir / "demo_corpus.jsonl";
  cssrs::save_dataset_jsonl(users, path);
  std::size_t posts = 0;
  for (const auto& u : users) posts += u.posts.size();
  std::printf("wrote %s: %zu users, %zu posts\n", path.string().c_str(), users.size(), posts);
  return 0;
}
