#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cssrs/corpus.hpp"
#include "cssrs/cross_validation.hpp"

namespace cssrs {

struct AblationRow {
  std::string experiment_id;  // S1..S16
  Method method = Method::TinvM;
  AblationFlags flags;  // TA, UI, SU
  bool ok = false;
  std::string error;  // set when the row failed; the grid never aborts
  MetricsReport metrics;
  std::size_t n_users = 0;
};

// The ablation grid: S1-S8 TinvM, S9-S16 TvarM, flag pattern
// (TA,UI,SU) = yyy,yyn,yny,ynn,nyy,nyn,nny,nnn in that order for each
// method. Row seeds derive from master_seed and the experiment id, so a row
// equals a manual slice+cross_validate run with the same derived seed.
std::vector<AblationRow> run_ablation(const std::vector<UserRecord>& users,
                                      const nn::TrainConfig& train, int folds,
                                      std::uint64_t master_seed,
                                      const EmbeddingTable* embeddings = nullptr);

AblationFlags ablation_flags_for(int index_within_method);  // 0..7

}  // namespace cssrs
