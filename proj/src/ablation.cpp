#include "cssrs/ablation.hpp"

#include "cssrs/error.hpp"
#include "cssrs/rng.hpp"

namespace cssrs {

AblationFlags ablation_flags_for(int index_within_method) {
  AblationFlags flags;
  flags.include_throwaway = index_within_method < 4;
  flags.include_uninformative = (index_within_method % 4) < 2;
  flags.include_supportive = (index_within_method % 2) == 0;
  return flags;
}

std::vector<AblationRow> run_ablation(const std::vector<UserRecord>& users,
                                      const nn::TrainConfig& train, int folds,
                                      std::uint64_t master_seed,
                                      const EmbeddingTable* embeddings) {
  std::vector<AblationRow> rows;
  rows.reserve(16);
  for (int r = 0; r < 16; ++r) {
    AblationRow row;
    row.experiment_id = "S" + std::to_string(r + 1);
    row.method = r < 8 ? Method::TinvM : Method::TvarM;
    row.flags = ablation_flags_for(r % 8);
    try {
      SliceResult slice = ablation_slice(users, row.flags);
      row.n_users = slice.users.size();
      CvOptions options;
      options.method = row.method;
      options.folds = folds;
      options.seed = derive_seed(master_seed, row.experiment_id);
      options.train = train;
      options.embeddings = embeddings;
      CvResult cv = cross_validate(slice.users, options);
      row.metrics = std::move(cv.metrics);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cssrs
