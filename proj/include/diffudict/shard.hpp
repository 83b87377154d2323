#pragma once

#include <Eigen/Dense>
#include <vector>

#include "diffudict/task.hpp"

namespace diffudict {

// The columns of the global dictionary owned by one agent.
struct DictionaryShard {
  int agent_id = 0;
  Eigen::MatrixXd atoms;  // M x N_k

  int height() const { return static_cast<int>(atoms.rows()); }
  int width() const { return static_cast<int>(atoms.cols()); }
};

// Exact feasibility test used by the update invariants: every column obeys
// the constraint set, with |.|_2 <= 1 checked under a 1e-12 slack to absorb
// the rounding of the normalization itself. Nonnegativity is exact.
bool shard_feasible(const DictionaryShard& shard, const ConstraintSet& constraint);

// Widest shard in a collection (the N_max of the step-size rules).
int max_shard_width(const std::vector<DictionaryShard>& shards);

}  // namespace diffudict
